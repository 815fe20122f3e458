"""
X-duplex amplify-and-forward relaying: per-draw mode selection, closed
form outage and SER, and a reproducible Monte Carlo engine to check them.

Submodules
----------
specfun
    Bessel K, incomplete gamma, parabolic cylinder and Q functions.
channel
    System parameters and the seeded Rayleigh channel generator.
duplex
    Mode SINRs, the X-duplex selection rule and baseline schemes.
analytic
    High-SNR closed forms (CDF, outage, SER, diversity, FD floor).
montecarlo
    Batched estimators that are invariant to the worker count.
bench
    Sweeps, CSV output, plot data and the self-test.
"""

from .channel import BPSK, QPSK, Modulation, SystemParams, symmetric_params
from .duplex import Mode, Scheme, select_mode, scheme_equivalent_sinr

__version__ = "0.1.0"

__all__ = [
    "BPSK",
    "QPSK",
    "Modulation",
    "SystemParams",
    "symmetric_params",
    "Mode",
    "Scheme",
    "select_mode",
    "scheme_equivalent_sinr",
]
