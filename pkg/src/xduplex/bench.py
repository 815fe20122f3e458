"""
Sweep orchestration, CSV output, plot data and the self-test.

A sweep evaluates every requested scheme at each point of an SNR grid
(``P_S = P_R = P_t``, noise variance 1).  All points use the same master
seed, so consecutive points share their fading draws (common random
numbers) and MC curves are smooth in ``P_t``.
"""

import configparser
import csv
import io
import math
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import analytic, montecarlo, oracles, specfun
from .channel import BPSK, MODULATIONS, Modulation, SystemParams, db_to_linear
from .duplex import Scheme, parse_scheme
from .errors import ConfigError, PreconditionError

__all__ = [
    "SweepConfig",
    "MetricRecord",
    "CSV_COLUMNS",
    "FigureData",
    "CheckResult",
    "SelftestReport",
    "load_config",
    "run_sweep",
    "records_to_csv",
    "write_csv",
    "figure",
    "mode_table",
    "selftest",
]

FIGURE_KINDS = ("ser", "outage", "diversity")


@dataclass(frozen=True)
class SweepConfig:
    """
    Everything a sweep needs.  Defaults reproduce the reference setting:
    equal powers, unit channel means, ``eta = 0.01``, BPSK and a target
    rate of 2 bps/Hz over 0 to 50 dB.
    """

    snr_db_start: float = 0.0
    snr_db_stop: float = 50.0
    snr_db_step: float = 5.0
    schemes: tuple = tuple(Scheme)
    eta: float = 0.01
    lambdas: tuple = (1.0, 1.0, 1.0, 1.0)
    r0: float = 2.0
    modulation: Modulation = BPSK
    trials: int = 1_000_000
    seed: int = 1
    output_path: str = None
    workers: int = 1

    def __post_init__(self):
        try:
            schemes = tuple(parse_scheme(s) for s in self.schemes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not schemes:
            raise ConfigError("scheme list is empty")
        if len(set(schemes)) != len(schemes):
            raise ConfigError("scheme list has duplicates")
        object.__setattr__(self, "schemes", schemes)
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if not self.snr_db_start < self.snr_db_stop:
            raise ConfigError("snr start must be below snr stop")
        if not self.snr_db_step > 0:
            raise ConfigError("snr step must be positive")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ConfigError("eta must be positive")
        if len(self.lambdas) != 4 or not all(v > 0 and math.isfinite(v) for v in self.lambdas):
            raise ConfigError("need four positive channel means")
        if not (self.r0 > 0 and math.isfinite(self.r0)):
            raise ConfigError("r0 must be positive")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "workers", int(self.workers))

    def snr_grid(self):
        """SNR points in dB, ``start, start + step, ...`` up to ``stop`` inclusive."""
        n = int(math.floor((self.snr_db_stop - self.snr_db_start) / self.snr_db_step + 1e-9))
        return [self.snr_db_start + i * self.snr_db_step for i in range(n + 1)]

    def params_at(self, snr_db):
        p_t = float(db_to_linear(snr_db))
        lam = self.lambdas
        return SystemParams(p_t, p_t, lam, (self.eta * lam[0], self.eta * lam[1]))

    @property
    def threshold(self):
        return analytic.outage_threshold(self.r0)


# Config file keys and the SweepConfig field each one sets.
_KEYS = {
    "snr_start": "snr_db_start",
    "snr_stop": "snr_db_stop",
    "snr_step": "snr_db_step",
    "eta": "eta",
    "r0": "r0",
    "trials": "trials",
    "seed": "seed",
    "schemes": "schemes",
    "out": "output_path",
    "lambdas": "lambdas",
    "modulation": "modulation",
    "workers": "workers",
}


def _convert(name, raw):
    raw = raw.strip()
    try:
        if name in ("snr_db_start", "snr_db_stop", "snr_db_step", "eta", "r0"):
            return float(raw)
        if name in ("trials", "seed", "workers"):
            value = float(raw)  # accept 1e6
            if value != int(value):
                raise ValueError(raw)
            return int(value)
        if name == "schemes":
            return tuple(s for s in (p.strip() for p in raw.split(",")) if s)
        if name == "lambdas":
            return tuple(float(p) for p in raw.split(","))
        if name == "modulation":
            return MODULATIONS[raw.lower()]
    except (ValueError, KeyError):
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def load_config(path=None, **overrides):
    """
    Build a :class:`SweepConfig` from a flat ``key = value`` file and
    keyword overrides (``None`` overrides are ignored).

    Recognised keys: ``snr_start``, ``snr_stop``, ``snr_step``, ``eta``,
    ``r0``, ``trials``, ``seed``, ``schemes`` (comma separated), ``out``,
    ``lambdas`` (four comma-separated means), ``modulation`` (``bpsk`` or
    ``qpsk``) and ``workers``.  Lines starting with ``#`` are comments.

    Raises
    ------
    ConfigError
        Unknown key, unparsable value or an invalid combination.
    OSError
        The file cannot be read.
    """
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
        try:
            parser.read_string("[sweep]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
        for key, raw in parser["sweep"].items():
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            values[_KEYS[key]] = _convert(_KEYS[key], raw)
    for key, value in overrides.items():
        if value is None:
            continue
        name = _KEYS.get(key, key)
        if name not in {f.name for f in fields(SweepConfig)}:
            raise ConfigError(f"unknown setting {key!r}")
        values[name] = _convert(name, value) if isinstance(value, str) else value
    return SweepConfig(**values)


@dataclass(frozen=True)
class MetricRecord:
    """One (SNR, scheme) row of a sweep.  ``None`` marks a missing value."""

    snr_db: float
    scheme: str
    outage_mc: float
    outage_mc_stderr: float
    outage_analytic: float
    ser_mc: float
    ser_mc_stderr: float
    ser_analytic: float
    diversity_analytic: float
    diversity_numeric: float
    fd_select_fraction: float
    trials: int
    seed: int
    validity_flag: str


CSV_COLUMNS = tuple(f.name for f in fields(MetricRecord))

_DIVERSITY_FORMS = (Scheme.HD_A_FIXED, Scheme.FD_A_FIXED, Scheme.HY)


def _optional(func, *args):
    # closed forms that need symmetric branches simply do not apply otherwise
    try:
        return func(*args)
    except PreconditionError:
        return None


def _analytic_columns(scheme, p_t, params, config):
    """(outage, ser, diversity) closed forms for one point, None where absent."""
    x = config.threshold
    mod = config.modulation
    if scheme is Scheme.XD:
        return (
            _optional(analytic.outage_xd, x, params),
            _optional(analytic.ser_xd, params, mod),
            _optional(analytic.diversity_xd, p_t, x, params),
        )
    ser = None
    if scheme in (Scheme.FD_A_FIXED, Scheme.FD_B_FIXED):
        # reference column: the RSI-induced SER floor of a fixed FD mode
        ser = analytic.ser_fd_floor(config.eta, mod)
    div = None
    if scheme in _DIVERSITY_FORMS:
        div = _optional(analytic.diversity_baseline, scheme, p_t, x, params)
    return None, ser, div


def _simulate_grid(config):
    grid = config.snr_grid()
    results = []
    for snr in grid:
        params = config.params_at(snr)
        results.append(
            montecarlo.simulate(
                params,
                config.trials,
                config.seed,
                [config.threshold],
                config.modulation,
                config.schemes,
                workers=config.workers,
            )
        )
    return grid, results


def _numeric_orders(grid, values):
    """MC diversity per grid point (None where it cannot be formed)."""
    pts = [(float(db_to_linear(s)), v) for s, v in zip(grid, values)]
    if len(pts) < 3:
        return [None] * len(pts)
    try:
        orders = dict(montecarlo.numeric_diversity(montecarlo.SweepCurve(tuple(pts))))
    except ValueError:
        return [None] * len(pts)
    return [orders.get(p) for p, _ in pts]


def run_sweep(config):
    """
    Monte Carlo and closed-form metrics on the configured grid.

    Returns
    -------
    list of MetricRecord
        Ordered by SNR, then by the configured scheme order.
    """
    grid, results = _simulate_grid(config)
    numeric = {
        s: _numeric_orders(grid, [r.outage(s).value for r in results]) for s in config.schemes
    }
    records = []
    for i, (snr, res) in enumerate(zip(grid, results)):
        params = res.params
        p_t = params.p_s
        flag = "ok" if analytic.high_snr_valid(p_t) else "low_snr"
        for s in config.schemes:
            out = res.outage(s)
            ser = res.ser(s)
            out_a, ser_a, div_a = _analytic_columns(s, p_t, params, config)
            records.append(
                MetricRecord(
                    snr_db=float(snr),
                    scheme=s.value,
                    outage_mc=out.value,
                    outage_mc_stderr=out.std_error,
                    outage_analytic=out_a,
                    ser_mc=ser.value,
                    ser_mc_stderr=ser.std_error,
                    ser_analytic=ser_a,
                    diversity_analytic=div_a,
                    diversity_numeric=numeric[s][i],
                    fd_select_fraction=res.fd_fraction(s),
                    trials=config.trials,
                    seed=config.seed,
                    validity_flag=flag,
                )
            )
    return records


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def records_to_csv(records):
    """CSV text with the fixed :data:`CSV_COLUMNS` header."""
    return _table_csv(CSV_COLUMNS, ([getattr(r, c) for c in CSV_COLUMNS] for r in records))


def _write_text(text, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_csv(records, path):
    """Write sweep records to ``path`` (UTF-8, LF line endings)."""
    _write_text(records_to_csv(records), path)


@dataclass
class FigureData:
    """Wide plot table: one row per SNR point."""

    kind: str
    columns: list
    rows: list

    def to_csv(self):
        return _table_csv(self.columns, self.rows)


def figure(kind, config, path=None):
    """
    Plot-ready data for one figure.

    ``ser`` and ``outage`` tables hold, per scheme, the MC estimate, its
    standard error and the closed form where one exists.  The outage
    table carries both XD closed forms (``xd_analytic`` from the
    simplified outage expression, ``xd_cdf_analytic`` from the full
    CDF).  ``diversity`` holds the numeric log-log slope of each MC
    outage curve and the closed-form diversity where available.

    The CSV is written to ``path``, or ``config.output_path`` when
    ``path`` is None and the config names one.
    """
    if kind not in FIGURE_KINDS:
        raise ConfigError(f"unknown figure kind {kind!r}; choose from {FIGURE_KINDS}")
    records = run_sweep(config)
    grid = config.snr_grid()
    by_key = {(r.snr_db, r.scheme): r for r in records}
    columns = ["snr_db"]
    getters = []

    for s in config.schemes:
        key = s.value

        def add(name, get, key=key):
            columns.append(name)
            getters.append((key, get))

        if kind == "diversity":
            add(f"{key}_numeric", lambda r: r.diversity_numeric)
            if s is Scheme.XD or s in _DIVERSITY_FORMS:
                add(f"{key}_analytic", lambda r: r.diversity_analytic)
            continue
        if kind == "ser":
            add(f"{key}_mc", lambda r: r.ser_mc)
            add(f"{key}_mc_stderr", lambda r: r.ser_mc_stderr)
            if s in (Scheme.XD, Scheme.FD_A_FIXED, Scheme.FD_B_FIXED):
                add(f"{key}_analytic", lambda r: r.ser_analytic)
        else:
            add(f"{key}_mc", lambda r: r.outage_mc)
            add(f"{key}_mc_stderr", lambda r: r.outage_mc_stderr)
            if s is Scheme.XD:
                add("xd_analytic", lambda r: r.outage_analytic)
                add(
                    "xd_cdf_analytic",
                    lambda r: _optional(
                        analytic.cdf_xd, config.threshold, config.params_at(r.snr_db)
                    ),
                )

    rows = []
    for snr in grid:
        row = [float(snr)]
        for key, get in getters:
            row.append(get(by_key[(float(snr), key)]))
        rows.append(row)
    data = FigureData(kind, columns, rows)
    target = path if path is not None else config.output_path
    if target is not None:
        _write_text(data.to_csv(), target)
    return data


def mode_table(config):
    """
    X-duplex mode-selection shares per SNR point.

    Returns
    -------
    list of (snr_db, {Mode: fraction})
    """
    out = []
    for snr in config.snr_grid():
        res = montecarlo.simulate(
            config.params_at(snr),
            config.trials,
            config.seed,
            schemes=[Scheme.XD],
            workers=config.workers,
        )
        out.append((float(snr), res.mode_fractions()))
    return out


# xxxxxxxxxx Self-test xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    limit: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured {self.measured:.3e} (limit {self.limit:.3e}) {self.detail}".rstrip()


@dataclass
class SelftestReport:
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def text(self):
        lines = [c.line() for c in self.checks]
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"selftest {verdict}: {len(self.checks) - len(self.failures())}/{len(self.checks)} checks in {self.seconds:.1f} s")
        return "\n".join(lines)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _max_rel(pairs):
    worst = 0.0
    for got, ref in pairs:
        err = _rel(got, ref)
        if not math.isfinite(err):
            return math.inf
        worst = max(worst, err)
    return worst


def _specfun_checks(tol=1e-9):
    # Functions are looked up on the module at call time, so a patched
    # implementation is what gets checked.
    z_grid = np.geomspace(1e-3, 60.0, 24)
    q_grid = np.linspace(-4.0, 12.0, 17)
    a_grid = [(-2.5, 0.3), (-1.5, 2.0), (-0.5, 0.05), (-0.5, 40.0), (0.5, 0.7), (0.5, 150.0), (1.5, 3.0), (2.5, 10.0)]
    d_grid = [(-1.5, 0.1), (-1.5, 3.0), (-2.5, 1.0), (-0.5, 8.0), (-3.5, 0.5), (-1.5, 40.0)]
    checks = [
        ("q_function_oracle", [(specfun.q_function(x), oracles.q_oracle(x)) for x in q_grid]),
        ("bessel_k0_oracle", [(specfun.bessel_k(0, z), oracles.bessel_k_oracle(0, z)) for z in z_grid]),
        ("bessel_k1_oracle", [(specfun.bessel_k(1, z), oracles.bessel_k_oracle(1, z)) for z in z_grid]),
        ("gamma_oracle", [(specfun.gamma_fn(a), oracles.gamma_oracle(a)) for a in (-2.5, -0.5, 0.5, 1.5, 3.7, 7.0)]),
        (
            "upper_incomplete_gamma_oracle",
            [(specfun.upper_incomplete_gamma(a, x), oracles.upper_incomplete_gamma_oracle(a, x)) for a, x in a_grid],
        ),
        (
            "parabolic_cylinder_oracle",
            [(specfun.parabolic_cylinder_d_scaled(p, z), oracles.parabolic_cylinder_oracle(p, z)) for p, z in d_grid],
        ),
    ]
    out = []
    for name, pairs in checks:
        err = _max_rel(pairs)
        out.append(CheckResult(name, err <= tol, err, tol, f"over {len(pairs)} points"))
    # three-term recurrences
    rec = []
    for a, x in a_grid:
        lhs = specfun.upper_incomplete_gamma(a + 1.0, x)
        rhs = a * specfun.upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
        rec.append((lhs, rhs))
    err = _max_rel(rec)
    out.append(CheckResult("incomplete_gamma_recurrence", err <= tol, err, tol))
    rec = []
    for p, z in d_grid:
        # D_{p}(z) - z D_{p-1}(z) + (p-1) D_{p-2}(z) = 0 with p <= -0.5
        d0 = specfun.parabolic_cylinder_d_scaled(p, z)
        d1 = specfun.parabolic_cylinder_d_scaled(p - 1.0, z)
        d2 = specfun.parabolic_cylinder_d_scaled(p - 2.0, z)
        rec.append((d0, z * d1 - (p - 1.0) * d2))
    err = _max_rel(rec)
    out.append(CheckResult("parabolic_cylinder_recurrence", err <= tol, err, tol))
    return out


def _analytic_checks(p_db=30.0, eta=0.01):
    p_t = float(db_to_linear(p_db))
    params = SystemParams(p_t, p_t, (1.0,) * 4, (eta,) * 2)
    x = analytic.outage_threshold(2.0)
    closed = analytic.ser_xd(params, BPSK)
    quad = analytic.ser_quadrature(lambda v: analytic.outage_xd(v, params), BPSK)
    err = _rel(closed, quad)
    out = [CheckResult("ser_closed_form_vs_quadrature", err <= 0.05, err, 0.05, f"at {p_db:g} dB")]
    b1 = analytic.branch_cdf(1, x, params)
    b2 = analytic.branch_cdf(2, x, params)
    sym = abs(b1 - b2)
    out.append(CheckResult("branch_symmetry", sym == 0.0, sym, 0.0))
    return out, params, x


def _mc_checks(params, x, trials=100_000, seed=1):
    res = montecarlo.simulate(params, trials, seed, [x], BPSK, [Scheme.XD, Scheme.FD_A_FIXED])
    out = []
    mc = res.outage(Scheme.XD)
    ref = analytic.cdf_xd(x, params)
    z = abs(mc.value - ref) / mc.std_error
    out.append(CheckResult("mc_outage_vs_cdf", z <= 4.0, z, 4.0, "standard errors"))
    mc = res.ser(Scheme.XD)
    quad = analytic.ser_quadrature(lambda v: analytic.cdf_xd(v, params), BPSK)
    z = abs(mc.value - quad) / mc.std_error
    out.append(CheckResult("mc_ser_vs_quadrature", z <= 4.0, z, 4.0, "standard errors"))
    dom = res.ser(Scheme.XD).value <= res.ser(Scheme.FD_A_FIXED).value
    out.append(CheckResult("xd_beats_fd", dom, res.ser(Scheme.XD).value, res.ser(Scheme.FD_A_FIXED).value))
    return out


def selftest():
    """
    Oracle suite for the special functions, closed-form versus
    quadrature agreement and a 1e5-trial Monte Carlo cross-check.

    Returns
    -------
    SelftestReport
    """
    start = time.perf_counter()
    report = SelftestReport()
    for stage in (_specfun_checks,):
        try:
            report.checks.extend(stage())
        except Exception as exc:  # a broken kernel must show up as a failed check
            report.checks.append(CheckResult(stage.__name__, False, math.nan, math.nan, repr(exc)))
    try:
        checks, params, x = _analytic_checks()
        report.checks.extend(checks)
        report.checks.extend(_mc_checks(params, x))
    except Exception as exc:
        report.checks.append(CheckResult("analytic_and_mc", False, math.nan, math.nan, repr(exc)))
    report.seconds = time.perf_counter() - start
    return report


def with_overrides(config, **changes):
    """Copy of ``config`` with fields replaced (validation re-run)."""
    return replace(config, **changes)
