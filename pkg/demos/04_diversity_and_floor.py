"""
Diversity order and the full-duplex error floor
===============================================

Fixed full duplex hits an error floor: its SINR saturates at the inverse
RSI level no matter how much power is spent.  Half duplex keeps diversity
one, and the X-duplex relay, which can fall back to either antenna in
either duplex mode, approaches diversity two.

Run with ``python demos/04_diversity_and_floor.py`` (about 15 s).
"""

import numpy as np

from xduplex import analytic
from xduplex.channel import BPSK, symmetric_params
from xduplex.montecarlo import SweepCurve, numeric_diversity, simulate

x = analytic.outage_threshold(2.0)
base = symmetric_params(1.0)

# %%
# Diversity from the closed form versus the slope of the outage curve.
# The baseline expressions are first-order expansions, only meaningful
# from about 20 dB up (hence the negative HD value at 10 dB).

snr = np.arange(0, 61, 1.0)
p_t = 10 ** (snr / 10)
curve = SweepCurve(tuple((p, analytic.outage_xd(x, base.with_power(p))) for p in p_t))
slopes = dict(numeric_diversity(curve))
print("SNR   d_xd closed   d_xd slope   d_hd-a   d_fd-a")
for db in range(10, 61, 10):
    p = 10 ** (db / 10)
    slope = slopes.get(p, float("nan"))
    print(
        f"{db:3d}   {analytic.diversity_xd(p, x, base):.4f}        {slope:.4f}       "
        f"{analytic.diversity_baseline('hd-a', p, x, base):.4f}   {analytic.diversity_baseline('fd-a', p, x, base):.4f}"
    )

# %%
# Error floor at high SNR

floor = analytic.ser_fd_floor(0.01, BPSK)
print(f"\nFD floor (eta = 0.01, BPSK): {floor:.5e}")
print("SNR   FD_A SER      XD SER")
for db in (30, 40, 50, 60):
    res = simulate(base.with_power(10 ** (db / 10)), 2_000_000, seed=1, schemes=["fd-a", "xd"])
    print(f"{db:3d}   {res.ser('fd-a').value:.5e}   {res.ser('xd').value:.3e}")
