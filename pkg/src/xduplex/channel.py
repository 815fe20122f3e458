"""
System parameters and the block Rayleigh-fading channel generator.

All link quantities are power gains already normalised by the noise
variance, so a draw consists of four exponential link SNRs and two
exponential residual self-interference (RSI) gains.

Randomness is counter based: the stream for batch ``b`` under master
seed ``s`` is a Philox generator keyed by ``s`` with its counter
starting at ``b * 2**192``.  A trial's variates therefore depend only on
``(seed, trial index)``, never on how batches are spread over workers.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemParams",
    "DerivedConstants",
    "ChannelDraw",
    "Modulation",
    "BPSK",
    "QPSK",
    "MODULATIONS",
    "derive_constants",
    "symmetric_params",
    "trial_stream",
    "sample_channels",
    "db_to_linear",
    "linear_to_db",
]


def db_to_linear(db):
    """``10 ** (db / 10)``."""
    return np.power(10.0, np.divide(db, 10.0))


def linear_to_db(value):
    """``10 log10(value)``."""
    return 10.0 * np.log10(value)


@dataclass(frozen=True)
class SystemParams:
    """
    Transmit powers and average channel gains.

    Parameters
    ----------
    p_s, p_r : float
        Source and relay transmit powers (linear, relative to noise).
    lambdas : tuple of 4 floats
        Means of the link SNRs, in order: source to antenna A, source to
        antenna B, antenna A to destination, antenna B to destination.
        Configuration A pairs links 1 and 4, configuration B links 2
        and 3.
    lambda_rsi : tuple of 2 floats
        Means of the RSI gains into antenna A (``[0]``) and B (``[1]``).
    sigma2 : float
        Noise variance; carried for completeness, all formulas assume 1.
    """

    p_s: float
    p_r: float
    lambdas: tuple = (1.0, 1.0, 1.0, 1.0)
    lambda_rsi: tuple = (0.01, 0.01)
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "lambda_rsi", tuple(float(v) for v in self.lambda_rsi))
        if len(self.lambdas) != 4 or len(self.lambda_rsi) != 2:
            raise ValueError("need four link gains and two RSI gains")
        values = (self.p_s, self.p_r, self.sigma2) + self.lambdas + self.lambda_rsi
        if not all(np.isfinite(v) and v > 0 for v in values):
            raise ValueError(f"all system parameters must be positive: {self}")

    @property
    def identical_rsi(self):
        return self.lambda_rsi[0] == self.lambda_rsi[1]

    @property
    def symmetric(self):
        """True when both antenna branches are statistically identical
        and both nodes transmit with the same power."""
        lam = self.lambdas
        return (
            lam[0] == lam[1]
            and lam[2] == lam[3]
            and self.identical_rsi
            and self.p_s == self.p_r
        )

    def with_power(self, p_t):
        """Copy with ``p_s = p_r = p_t``."""
        return SystemParams(p_t, p_t, self.lambdas, self.lambda_rsi, self.sigma2)


def symmetric_params(p_t, eta=0.01, lam=1.0):
    """Equal power, all link means ``lam`` and RSI ratio ``eta``."""
    return SystemParams(p_t, p_t, (lam,) * 4, (eta * lam,) * 2)


@dataclass(frozen=True)
class DerivedConstants:
    """Ratios and inverse-SNR sums shared by the closed forms."""

    eta1: float
    eta2: float
    c1: float
    c2: float
    c3: float


def derive_constants(params):
    """
    Constants of the closed-form analysis.

    ``eta_k`` is the RSI-to-signal ratio of branch k, ``c1``/``c2`` the
    sum of inverse average SNRs of each branch's two hops, and ``c3`` the
    power-free version of ``c1`` used by the diversity expressions.
    """
    lam1, lam2, lam3, lam4 = params.lambdas
    lr1, lr2 = params.lambda_rsi
    return DerivedConstants(
        eta1=lr1 * params.p_r / (lam1 * params.p_s),
        eta2=lr2 * params.p_r / (lam2 * params.p_s),
        c1=1.0 / (lam1 * params.p_s) + 1.0 / (lam4 * params.p_r),
        c2=1.0 / (lam2 * params.p_s) + 1.0 / (lam3 * params.p_r),
        c3=1.0 / lam1 + 1.0 / lam4,
    )


@dataclass(frozen=True)
class Modulation:
    """Constants of ``SER = a1 E[Q(sqrt(2 a2 gamma))]``."""

    a1: float
    a2: float
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0):
            raise ValueError("modulation constants must be positive")


BPSK = Modulation(1.0, 1.0, "bpsk")
QPSK = Modulation(1.0, 0.5, "qpsk")
MODULATIONS = {m.name: m for m in (BPSK, QPSK)}


@dataclass(frozen=True)
class ChannelDraw:
    """
    Fading realisation(s).

    ``gamma`` has shape ``(4, ...)`` and ``gamma_si`` shape ``(2, ...)``;
    trailing axes index trials, so the same object describes a single
    draw or a whole batch.
    """

    gamma: np.ndarray
    gamma_si: np.ndarray

    @classmethod
    def from_values(cls, gamma, gamma_si):
        return cls(np.asarray(gamma, dtype=float), np.asarray(gamma_si, dtype=float))

    def __len__(self):
        return 1 if self.gamma.ndim == 1 else self.gamma.shape[1]

    def swapped(self):
        """Exchange the roles of antennas A and B."""
        g = self.gamma
        return ChannelDraw(g[[1, 0, 3, 2]], self.gamma_si[[1, 0]])


def trial_stream(seed, batch_index):
    """Generator for one batch of trials, independent of all other batches."""
    if seed < 0 or batch_index < 0:
        raise ValueError("seed and batch index must be non-negative")
    bitgen = np.random.Philox(key=int(seed) % (1 << 128), counter=int(batch_index) << 192)
    return np.random.Generator(bitgen)


def sample_channels(params, stream, size=None):
    """
    Draw ``size`` i.i.d. channel realisations (one if ``size`` is None).

    Variates are taken trial-major, six per trial, so the first ``n``
    trials of a stream are the same whatever ``size`` is requested.
    """
    n = 1 if size is None else int(size)
    unit = stream.standard_exponential((n, 6)).T
    gamma = unit[:4] * np.asarray(params.lambdas)[:, None]
    gamma_si = unit[4:] * np.asarray(params.lambda_rsi)[:, None]
    if size is None:
        return ChannelDraw(gamma[:, 0], gamma_si[:, 0])
    return ChannelDraw(gamma, gamma_si)
