"""
Outage and symbol error rate: closed forms against simulation
=============================================================

The simplified outage expression drops small Bessel corrections, the
full CDF keeps them.  The closed-form SER integrates the simplified
outage through an approximation of the RSI factor, so it inherits that
gap.  Numerical quadrature of the full CDF closes most of it.

Run with ``python demos/03_outage_and_ser.py`` (about 10 s).
"""

from xduplex import analytic
from xduplex.channel import BPSK, db_to_linear, symmetric_params
from xduplex.montecarlo import simulate

x = analytic.outage_threshold(2.0)  # target rate 2 bit/s/Hz -> SINR threshold 3

print("SNR  outage: MC (se)              simplified  full CDF")
for db in (20, 25, 30, 35):
    p = symmetric_params(float(db_to_linear(db)))
    mc = simulate(p, 2_000_000, seed=1, thresholds=[x], schemes=["xd"]).outage("xd")
    print(
        f"{db:3d}  {mc.value:.4e} ({mc.std_error:.1e})     "
        f"{analytic.outage_xd(x, p):.4e}  {analytic.cdf_xd(x, p):.4e}"
    )

print("\nSNR  BPSK SER: MC (se)            closed form quad(simplified) quad(full CDF)")
for db in (20, 25, 30, 35):
    p = symmetric_params(float(db_to_linear(db)))
    mc = simulate(p, 2_000_000, seed=1, schemes=["xd"]).ser("xd")
    closed = analytic.ser_xd(p, BPSK)
    q_simple = analytic.ser_quadrature(lambda v: analytic.outage_xd(v, p), BPSK)
    q_full = analytic.ser_quadrature(lambda v: analytic.cdf_xd(v, p), BPSK)
    print(f"{db:3d}  {mc.value:.4e} ({mc.std_error:.1e})     {closed:.4e}  {q_simple:.4e}       {q_full:.4e}")
