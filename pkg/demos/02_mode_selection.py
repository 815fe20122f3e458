"""
Which mode does the X-duplex relay pick?
========================================

Per channel draw the relay evaluates two full-duplex modes (one per
antenna orientation) and two half-duplex modes, and keeps the best
end-to-end SINR.  Full duplex wins while residual self-interference is
small next to the noise; as transmit power grows the interference grows
with it and half duplex takes over a growing share.

Run with ``python demos/02_mode_selection.py``.
"""

import numpy as np

from xduplex.channel import db_to_linear, sample_channels, symmetric_params, trial_stream
from xduplex.duplex import Mode, select_mode
from xduplex.montecarlo import simulate

# %%
# A handful of individual draws at 30 dB

params = symmetric_params(float(db_to_linear(30)))
draws = sample_channels(params, trial_stream(7, 0), 5)
decision = select_mode(draws, params)
print("equivalent SINR (dB)   FD_A    FD_B    HD_A    HD_B   -> chosen")
for row, m in zip(np.asarray(decision.eq_sinr).T, np.atleast_1d(decision.chosen)):
    cells = "  ".join(f"{10 * np.log10(g):6.2f}" for g in row)
    print(f"                     {cells}   -> {Mode(int(m)).name}")

# %%
# Mode shares over 200k draws per power level

print("\nSNR    FD_A    FD_B    HD_A    HD_B")
for db in range(10, 61, 10):
    res = simulate(symmetric_params(float(db_to_linear(db))), 200_000, seed=1, schemes=["xd"])
    shares = res.mode_fractions()
    print(f"{db:3d}  " + "  ".join(f"{shares[m]:.4f}" for m in Mode))
