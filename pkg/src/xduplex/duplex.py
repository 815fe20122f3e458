"""
Per-realisation SINRs of the four relay configurations and the schemes
built on top of them.

Configuration A receives on antenna A and (in FD) transmits on antenna
B; it uses source link 1, destination link 4 and RSI channel 1.
Configuration B is the mirror image (links 2, 3 and RSI channel 2).

Everything here broadcasts over trailing trial axes of a
:class:`~xduplex.channel.ChannelDraw`.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Mode",
    "Scheme",
    "ModeDecision",
    "sinr_mode",
    "all_mode_sinrs",
    "interference_scaled_snr",
    "equivalent_sinr_hd",
    "select_mode",
    "scheme_equivalent_sinr",
    "scheme_sinrs",
    "parse_scheme",
]


class Mode(enum.IntEnum):
    """Relay configuration.  The integer order is the tie-break priority."""

    FD_A = 0
    FD_B = 1
    HD_A = 2
    HD_B = 3

    @property
    def is_fd(self):
        return self in (Mode.FD_A, Mode.FD_B)


class Scheme(enum.Enum):
    """Relaying strategies compared in the benchmarks."""

    XD = "xd"
    FD_A_FIXED = "fd-a"
    FD_B_FIXED = "fd-b"
    HD_A_FIXED = "hd-a"
    HD_B_FIXED = "hd-b"
    HY = "hy"
    RAMS = "rams"

    def __str__(self):
        return self.value


# Candidate modes each scheme chooses among (in tie-break order).
SCHEME_CANDIDATES = {
    Scheme.XD: (Mode.FD_A, Mode.FD_B, Mode.HD_A, Mode.HD_B),
    Scheme.FD_A_FIXED: (Mode.FD_A,),
    Scheme.FD_B_FIXED: (Mode.FD_B,),
    Scheme.HD_A_FIXED: (Mode.HD_A,),
    Scheme.HD_B_FIXED: (Mode.HD_B,),
    Scheme.HY: (Mode.FD_A, Mode.HD_A),
    Scheme.RAMS: (Mode.FD_A, Mode.FD_B),
}


def parse_scheme(name):
    """Scheme from its CLI name (``xd``, ``fd-a``, ...) or enum name."""
    if isinstance(name, Scheme):
        return name
    key = str(name).strip().lower()
    for s in Scheme:
        if key in (s.value, s.name.lower()):
            return s
    raise ValueError(f"unknown scheme {name!r}; choose from {[s.value for s in Scheme]}")


@dataclass(frozen=True)
class ModeDecision:
    """Outcome of the X-duplex selection for one draw (or a batch)."""

    chosen: object
    sinr_fd_a: object
    sinr_fd_b: object
    sinr_hd_a: object
    sinr_hd_b: object
    eq_sinr: np.ndarray
    gamma_max: object
    x1: object
    x2: object


def _branch(draw, branch):
    g, si = draw.gamma, draw.gamma_si
    if branch == 0:
        return g[0], g[3], si[0]
    return g[1], g[2], si[1]


def interference_scaled_snr(draw, params):
    """First-hop SNRs degraded by RSI: ``(X1, X2)``."""
    out = []
    for b in (0, 1):
        g_src, _, g_si = _branch(draw, b)
        out.append(params.p_s * g_src / (params.p_r * g_si + 1.0))
    return tuple(out)


def _fd(x, g_dst, p_r):
    second = p_r * g_dst
    return x * second / (x + second + 1.0)


def _hd(g_src, g_dst, p_s, p_r):
    first = p_s * g_src
    second = p_r * g_dst
    return first * second / (first + second + 1.0)


def sinr_mode(mode, draw, params):
    """
    End-to-end SINR of one relay configuration.

    FD modes use the RSI-degraded first hop ``X_k``; HD modes use the
    plain two-hop amplify-and-forward SINR.  The HD value returned here
    is the raw SINR, before the half-rate equivalence.
    """
    mode = Mode(mode)
    branch = 0 if mode in (Mode.FD_A, Mode.HD_A) else 1
    g_src, g_dst, g_si = _branch(draw, branch)
    if mode.is_fd:
        x = params.p_s * g_src / (params.p_r * g_si + 1.0)
        return _fd(x, g_dst, params.p_r)
    return _hd(g_src, g_dst, params.p_s, params.p_r)


def all_mode_sinrs(draw, params):
    """Raw SINRs stacked in :class:`Mode` order, shape ``(4, ...)``."""
    return np.stack([np.asarray(sinr_mode(m, draw, params), dtype=float) for m in Mode])


def equivalent_sinr_hd(raw):
    """Map an HD SINR onto the FD scale: ``sqrt(raw + 1) - 1``."""
    arr = np.asarray(raw, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("SINR must be non-negative")
    # sqrt(r+1)-1 written as r/(sqrt(r+1)+1) to keep small values exact
    out = arr / (np.sqrt(arr + 1.0) + 1.0)
    return float(out) if out.ndim == 0 else out


def _equivalent(raw):
    eq = raw.copy()
    eq[2:] = raw[2:] / (np.sqrt(raw[2:] + 1.0) + 1.0)
    return eq


def select_mode(draw, params):
    """
    X-duplex decision: the configuration with the largest equivalent SINR.

    Ties go to the earlier entry of FD_A, FD_B, HD_A, HD_B.
    """
    raw = all_mode_sinrs(draw, params)
    eq = _equivalent(raw)
    idx = np.argmax(eq, axis=0)
    gmax = np.take_along_axis(eq, idx[None], axis=0)[0] if eq.ndim > 1 else eq[idx]
    x1, x2 = interference_scaled_snr(draw, params)
    chosen = Mode(int(idx)) if np.ndim(idx) == 0 else idx
    scalar = eq.ndim == 1
    conv = (lambda v: float(v)) if scalar else (lambda v: v)
    return ModeDecision(
        chosen=chosen,
        sinr_fd_a=conv(raw[Mode.FD_A]),
        sinr_fd_b=conv(raw[Mode.FD_B]),
        sinr_hd_a=conv(raw[Mode.HD_A]),
        sinr_hd_b=conv(raw[Mode.HD_B]),
        eq_sinr=eq,
        gamma_max=conv(gmax),
        x1=conv(x1),
        x2=conv(x2),
    )


def scheme_sinrs(eq_sinr, schemes=tuple(Scheme)):
    """
    Equivalent SINR of each scheme from a stacked ``(4, ...)`` array of
    equivalent mode SINRs, plus the index of the mode each one used.

    Returns
    -------
    dict
        ``{scheme: (sinr, chosen_mode_index)}``.
    """
    out = {}
    for s in schemes:
        cand = SCHEME_CANDIDATES[s]
        if len(cand) == 1:
            sinr = eq_sinr[cand[0]]
            chosen = np.full(np.shape(sinr), int(cand[0]))
        else:
            sub = eq_sinr[list(cand)]
            k = np.argmax(sub, axis=0)
            sinr = np.take_along_axis(sub, k[None], axis=0)[0] if sub.ndim > 1 else sub[k]
            chosen = np.asarray(cand)[k]
        out[s] = (sinr, chosen)
    return out


def scheme_equivalent_sinr(scheme, draw, params):
    """
    Equivalent end-to-end SINR delivered by ``scheme``.

    XD takes the best of all four configurations, HY chooses between FD
    and HD on the fixed antenna assignment A, RAMS chooses between the
    two FD antenna assignments, and the fixed schemes use one mode.
    """
    scheme = parse_scheme(scheme)
    eq = _equivalent(all_mode_sinrs(draw, params))
    sinr, _ = scheme_sinrs(eq, (scheme,))[scheme]
    return float(sinr) if np.ndim(sinr) == 0 else sinr
