"""
Command line front end.

    xduplex sweep    [options]          metrics CSV (stdout or --out)
    xduplex figure   KIND [options]     plot data for ser | outage | diversity
    xduplex selftest                    oracle and cross-engine checks
    xduplex modes    [options]          X-duplex mode-selection shares

Exit status: 0 success, 1 invariant failure, 2 configuration error,
3 I/O error.
"""

import argparse
import math
import sys

from . import bench
from .duplex import Mode, Scheme
from .errors import ConfigError

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _common_options():
    parent = argparse.ArgumentParser(add_help=False)
    g = parent.add_argument_group("sweep settings (override --config)")
    g.add_argument("--config", help="flat key = value settings file")
    g.add_argument("--snr-start", type=float, help="first SNR point in dB (default 0)")
    g.add_argument("--snr-stop", type=float, help="last SNR point in dB (default 50)")
    g.add_argument("--snr-step", type=float, help="SNR step in dB (default 5)")
    g.add_argument("--eta", type=float, help="RSI to signal ratio (default 0.01)")
    g.add_argument("--r0", type=float, help="target rate in bps/Hz (default 2)")
    g.add_argument("--trials", type=_count, help="Monte Carlo trials per point (default 1e6)")
    g.add_argument("--seed", type=_count, help="master seed (default 1)")
    g.add_argument("--schemes", help="comma-separated, from " + ",".join(s.value for s in Scheme))
    g.add_argument("--out", help="output CSV path (default stdout)")
    g.add_argument("--workers", type=_count, help="worker processes (default 1)")
    return parent


def _count(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="xduplex",
        description="Monte Carlo and closed-form performance of X-duplex AF relaying.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    sub.add_parser("sweep", parents=[common], help="per-point metrics for every scheme")
    fig = sub.add_parser("figure", parents=[common], help="wide plot-data CSV")
    fig.add_argument("kind", choices=bench.FIGURE_KINDS)
    sub.add_parser("selftest", help="oracle suite and reduced cross-validation")
    sub.add_parser("modes", parents=[common], help="mode-selection fractions per SNR")
    return parser


def _config(args):
    config = _load(args)
    if config.output_path is not None:
        # fail before a long run rather than after it
        with open(config.output_path, "a", encoding="utf-8"):
            pass
    return config


def _load(args):
    return bench.load_config(
        args.config,
        snr_start=args.snr_start,
        snr_stop=args.snr_stop,
        snr_step=args.snr_step,
        eta=args.eta,
        r0=args.r0,
        trials=args.trials,
        seed=args.seed,
        schemes=args.schemes,
        out=args.out,
        workers=args.workers,
    )


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def sweep_violations(records):
    """Invariants every sweep must satisfy; returns readable messages."""
    problems = []
    for r in records:
        for name in ("outage_mc", "ser_mc", "outage_analytic", "fd_select_fraction"):
            v = getattr(r, name)
            if v is not None and not 0.0 <= v <= 1.0:
                problems.append(f"{r.scheme} at {r.snr_db:g} dB: {name}={v!r} outside [0, 1]")
        for name in ("outage_mc_stderr", "ser_mc_stderr"):
            if getattr(r, name) < 0:
                problems.append(f"{r.scheme} at {r.snr_db:g} dB: negative {name}")
    xd = {r.snr_db: r for r in records if r.scheme == Scheme.XD.value}
    for r in records:
        ref = xd.get(r.snr_db)
        if ref is None or r is ref:
            continue
        if ref.ser_mc > r.ser_mc or ref.outage_mc > r.outage_mc:
            problems.append(f"xd worse than {r.scheme} at {r.snr_db:g} dB")
    return problems


def _cmd_sweep(args):
    config = _config(args)
    records = bench.run_sweep(config)
    _emit(bench.records_to_csv(records), config.output_path)
    problems = sweep_violations(records)
    for p in problems:
        print(f"invariant violated: {p}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_OK


def _cmd_figure(args):
    config = _config(args)
    data = bench.figure(args.kind, config, path=None)
    _emit(data.to_csv(), config.output_path)
    return EXIT_OK


def _cmd_selftest(args):
    report = bench.selftest()
    print(report.text())
    return EXIT_OK if report.passed else EXIT_INVARIANT


def _cmd_modes(args):
    config = _config(args)
    lines = ["snr_db,fd_a,fd_b,hd_a,hd_b,fd_total"]
    for snr, frac in bench.mode_table(config):
        shares = [frac[m] for m in Mode]
        cells = [repr(snr)] + [f"{v:.6f}" for v in shares + [shares[0] + shares[1]]]
        lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", config.output_path)
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "selftest": _cmd_selftest,
    "modes": _cmd_modes,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors, 0 for --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
