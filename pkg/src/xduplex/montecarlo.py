"""
Monte Carlo estimators used as ground truth for the closed forms.

Trials are processed in fixed-size batches.  Batch ``b`` draws its
channels from :func:`~xduplex.channel.trial_stream` ``(seed, b)``, each
batch is reduced to a handful of sufficient statistics, and batches are
combined in index order with compensated summation.  The result is
therefore bit-identical for any number of worker processes.

SER is estimated semi-analytically: the average of ``a1 Q(sqrt(2 a2
gamma))`` over simulated equivalent SINRs.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import BPSK, sample_channels, trial_stream
from .duplex import Mode, Scheme, _equivalent, all_mode_sinrs, parse_scheme, scheme_sinrs
from .specfun import q_function

__all__ = [
    "BATCH_SIZE",
    "McEstimate",
    "SweepCurve",
    "SimulationResult",
    "simulate",
    "estimate_outage",
    "estimate_ser",
    "empirical_cdf",
    "numeric_diversity",
]

log = logging.getLogger(__name__)

BATCH_SIZE = 65536


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SweepCurve:
    """A metric sampled at increasing transmit powers."""

    points: tuple
    scheme: Scheme = Scheme.XD

    def __post_init__(self):
        pts = tuple((float(p), float(v)) for p, v in self.points)
        object.__setattr__(self, "points", pts)
        p_t = [p for p, _ in pts]
        if any(b <= a for a, b in zip(p_t, p_t[1:])):
            raise ValueError("sweep powers must be strictly increasing")


# xxxxxxxxxx Batch kernel xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def _batch_stats(task):
    params, seed, batch, n, thresholds, mod, schemes = task
    draw = sample_channels(params, trial_stream(seed, batch), n)
    eq = _equivalent(all_mode_sinrs(draw, params))
    per_scheme = scheme_sinrs(eq, schemes)
    out = {}
    for s, (sinr, chosen) in per_scheme.items():
        ordered = np.sort(sinr)
        below = np.searchsorted(ordered, thresholds, side="left")
        q = mod.a1 * q_function(np.sqrt(2.0 * mod.a2 * sinr))
        out[s] = (
            below.astype(np.int64),
            float(np.sum(q)),
            float(np.sum(q * q)),
            int(np.count_nonzero(chosen <= Mode.FD_B)),
            np.bincount(chosen, minlength=4).astype(np.int64),
        )
    return out


def _tasks(params, trials, seed, thresholds, mod, schemes, batch_size):
    n_batches = -(-trials // batch_size)
    for b in range(n_batches):
        n = min(batch_size, trials - b * batch_size)
        yield (params, seed, b, n, thresholds, mod, schemes)


@dataclass
class _Accumulator:
    below: np.ndarray
    q_parts: list = field(default_factory=list)
    q2_parts: list = field(default_factory=list)
    fd: int = 0
    modes: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))


class SimulationResult:
    """Aggregated statistics of one simulation run, for several schemes."""

    def __init__(self, params, trials, seed, thresholds, mod, acc):
        self.params = params
        self.trials = trials
        self.seed = seed
        self.thresholds = thresholds
        self.mod = mod
        self._acc = acc

    @property
    def schemes(self):
        return tuple(self._acc)

    def outage(self, scheme, index=0):
        """Fraction of trials below ``thresholds[index]``."""
        acc = self._acc[parse_scheme(scheme)]
        p = acc.below[index] / self.trials
        return McEstimate(float(p), math.sqrt(p * (1.0 - p) / self.trials), self.trials, self.seed)

    def cdf(self, scheme):
        acc = self._acc[parse_scheme(scheme)]
        return [float(c) / self.trials for c in acc.below]

    def ser(self, scheme):
        acc = self._acc[parse_scheme(scheme)]
        n = self.trials
        total = math.fsum(acc.q_parts)
        mean = total / n
        if n > 1:
            var = max(math.fsum(acc.q2_parts) - total * mean, 0.0) / (n - 1)
        else:
            var = 0.0
        return McEstimate(mean, math.sqrt(var / n), n, self.seed)

    def fd_fraction(self, scheme):
        """Share of trials in which the scheme used an FD configuration."""
        return self._acc[parse_scheme(scheme)].fd / self.trials

    def mode_fractions(self, scheme=Scheme.XD):
        """Share of trials per :class:`Mode`, in FD_A, FD_B, HD_A, HD_B order."""
        counts = self._acc[parse_scheme(scheme)].modes
        return {m: float(counts[m]) / self.trials for m in Mode}


def simulate(
    params,
    trials,
    seed,
    thresholds=(),
    mod=BPSK,
    schemes=tuple(Scheme),
    workers=1,
    batch_size=BATCH_SIZE,
):
    """
    Run ``trials`` channel realisations and collect outage counts, SER
    sums and mode statistics for every requested scheme.

    Parameters
    ----------
    params : SystemParams
    trials : int
        At least 1.
    seed : int
        Master seed; with ``trials`` and ``params`` it fixes the result.
    thresholds : sequence of float
        SINR thresholds for outage / empirical CDF counts.
    mod : Modulation
    schemes : sequence of Scheme
    workers : int
        Number of processes.  Has no influence on the result.
    batch_size : int

    Returns
    -------
    SimulationResult
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    schemes = tuple(parse_scheme(s) for s in schemes)
    thr = np.asarray(thresholds, dtype=float).reshape(-1)
    tasks = _tasks(params, int(trials), int(seed), thr, mod, schemes, batch_size)
    acc = {s: _Accumulator(np.zeros(thr.size, dtype=np.int64)) for s in schemes}

    def absorb(stats):
        for s, (below, q, q2, fd, modes) in stats.items():
            a = acc[s]
            a.below += below
            a.q_parts.append(q)
            a.q2_parts.append(q2)
            a.fd += fd
            a.modes += modes

    if workers is None or workers <= 1:
        for t in tasks:
            absorb(_batch_stats(t))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map() yields in submission order, which fixes the reduction order
            for stats in pool.map(_batch_stats, tasks, chunksize=4):
                absorb(stats)
    return SimulationResult(params, int(trials), int(seed), thr, mod, acc)


def estimate_outage(scheme, params, threshold, trials, seed, workers=1):
    """Fraction of draws whose equivalent SINR is below ``threshold``."""
    scheme = parse_scheme(scheme)
    res = simulate(params, trials, seed, [threshold], schemes=[scheme], workers=workers)
    return res.outage(scheme)


def estimate_ser(scheme, params, mod, trials, seed, workers=1):
    """Semi-analytic SER ``a1 E[Q(sqrt(2 a2 gamma))]`` of ``scheme``."""
    scheme = parse_scheme(scheme)
    return simulate(params, trials, seed, mod=mod, schemes=[scheme], workers=workers).ser(scheme)


def empirical_cdf(scheme, params, xs, trials, seed, workers=1):
    """Empirical CDF of the scheme's equivalent SINR at sorted thresholds ``xs``."""
    xs = list(xs)
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("thresholds must be sorted ascending")
    scheme = parse_scheme(scheme)
    return simulate(params, trials, seed, xs, schemes=[scheme], workers=workers).cdf(scheme)


def numeric_diversity(curve):
    """
    Log-log slope ``-d ln value / d ln p_t`` of a sweep curve.

    Interior points use central differences, the two ends one-sided
    ones.  Points whose value is not positive are skipped (and logged).

    Returns
    -------
    list of (p_t, order)
    """
    if len(curve.points) < 3:
        raise ValueError("need at least three sweep points")
    kept = []
    for p, v in curve.points:
        if v > 0 and math.isfinite(v):
            kept.append((p, v))
        else:
            log.info("numeric_diversity: skipping p_t=%g with value %r", p, v)
    if len(kept) < 2:
        raise ValueError("fewer than two points with positive values")
    lp = [math.log(p) for p, _ in kept]
    lv = [math.log(v) for _, v in kept]
    out = []
    last = len(kept) - 1
    for i, (p, _) in enumerate(kept):
        lo, hi = max(i - 1, 0), min(i + 1, last)
        out.append((p, (lv[lo] - lv[hi]) / (lp[hi] - lp[lo])))
    return out
