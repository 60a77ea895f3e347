"""Command-line interface.

    ondsim run    --kind scheme-comparison --k 2 --n 100 200 --snr-db 0:45:5 \
                  --scheme ond-alternate ond-no-alternate --trials 10000 \
                  --seed 7 --out results.csv --figures
    ondsim report results.csv

`run` executes one experiment sweep and writes CSV or JSON; `report`
renders matplotlib figures next to an existing results file.  Exit codes:
0 success, 2 configuration error, 3 resource limit, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import Convention, Scheme
from .errors import ConfigurationError, ResourceLimitError
from .harness import ExperimentKind, ExperimentSpec, NRule, emit_results, read_results, run_experiment
from .report import render_figures

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_IO = 4

_N_RULE_ALIASES = {
    "fixed": NRule.FIXED,
    "thm1": NRule.FULL_RATE_SCALING,
    "full-rate-scaling": NRule.FULL_RATE_SCALING,
    "thm3": NRule.TWO_PHASE_SCALING,
    "two-phase-scaling": NRule.TWO_PHASE_SCALING,
}


def _parse_snr_db(tokens: list[str]) -> list[float]:
    """SNR grid in dB: either explicit values or a start:stop:step range."""
    if len(tokens) == 1 and ":" in tokens[0]:
        parts = tokens[0].split(":")
        if len(parts) != 3:
            raise ConfigurationError("snr_db", f"range must be start:stop:step, got {tokens[0]!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigurationError("snr_db", f"bad range {tokens[0]!r}")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 9))
            v += step
        return out
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ConfigurationError("snr_db", str(exc)) from exc


# keys accepted in a --config JSON file (same names as the long flags)
RUN_KEYS = ("kind", "k", "n", "n-rule", "n-cap", "snr-db", "slots", "trials",
            "scheme", "seed", "convention", "out", "format", "threads",
            "mem-cap-gb", "figures")


def _build_parser() -> tuple[argparse.ArgumentParser, argparse.ArgumentParser]:
    parser = argparse.ArgumentParser(prog="ondsim",
                                     description="Monte Carlo experiments for opportunistic "
                                                 "relay selection in two-hop interfering networks")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment sweep")
    run.add_argument("--config", type=Path, default=None,
                     help="JSON file with defaults for any of the flags below")
    run.add_argument("--kind", choices=[k.value for k in ExperimentKind], default="rate-vs-snr")
    run.add_argument("--k", type=int, default=2, help="number of source-destination pairs")
    run.add_argument("--n", type=int, nargs="+", default=[100], help="relay counts (fixed rule)")
    run.add_argument("--n-rule", choices=sorted(_N_RULE_ALIASES), default="fixed",
                     help="N per sweep point: fixed list, or scaled as round(snr^(3K-2)) "
                          "(thm1/full-rate-scaling) or round(snr^(2K-2)) (thm3/two-phase-scaling)")
    run.add_argument("--n-cap", type=int, default=1_000_000, help="ceiling for rule-derived N")
    run.add_argument("--snr-db", nargs="+", default=["0:45:5"],
                     help="SNR grid in dB: values or start:stop:step")
    run.add_argument("--slots", type=int, default=11, help="data slots per block (odd, >= 3)")
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--scheme", nargs="+", choices=[s.value for s in Scheme],
                     default=["ond-alternate"])
    run.add_argument("--seed", type=int, default=0, help="master seed")
    run.add_argument("--convention", choices=[c.value for c in Convention],
                     default=Convention.UNIT_COMPLEX_VARIANCE.value)
    run.add_argument("--out", type=Path, default=Path("results.csv"))
    run.add_argument("--format", choices=["csv", "json"], default=None,
                     help="output format (default: from --out extension)")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--mem-cap-gb", type=float, default=4.0)
    run.add_argument("--figures", action="store_true",
                     help="also render figures next to the output file")

    rep = sub.add_parser("report", help="render figures from an existing results file")
    rep.add_argument("results", type=Path, help="CSV or JSON file written by 'run'")
    rep.add_argument("--out-dir", type=Path, default=None,
                     help="directory for figures (default: alongside the results file)")
    return parser, run


def _apply_config_file(parser, run_parser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            overrides = json.load(fh)
        if not isinstance(overrides, dict):
            raise ConfigurationError("config", "config file must hold a JSON object")
        unknown = [k for k in overrides if k not in RUN_KEYS and k.replace("_", "-") not in RUN_KEYS]
        if unknown:
            raise ConfigurationError("config", f"unknown keys {unknown}")
        # config supplies defaults; explicit flags win on the re-parse
        defaults = {}
        for key, value in overrides.items():
            dest = key.replace("-", "_")
            if dest in ("out",):
                value = Path(value)
            if dest in ("n", "snr_db", "scheme") and not isinstance(value, list):
                value = [value]
            defaults[dest] = value
        run_parser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _spec_from_args(args) -> ExperimentSpec:
    return ExperimentSpec(
        kind=ExperimentKind(args.kind),
        k_pairs=args.k,
        snr_db=tuple(_parse_snr_db([str(t) for t in args.snr_db])),
        n_relays=tuple(args.n),
        schemes=tuple(Scheme(s) for s in args.scheme),
        l_slots=args.slots,
        convention=Convention(args.convention),
        trials=args.trials,
        master_seed=args.seed,
        n_rule=_N_RULE_ALIASES[args.n_rule],
        n_cap=args.n_cap,
        mem_cap_bytes=int(args.mem_cap_gb * 1024 ** 3),
        threads=args.threads,
    )


def _run(args) -> int:
    spec = _spec_from_args(args)
    fmt = args.format or ("json" if args.out.suffix == ".json" else "csv")
    rows = run_experiment(spec)
    emit_results(rows, fmt, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.figures:
        paths = render_figures(rows, args.out.parent, args.out.stem)
        for p in paths:
            print(f"wrote {p}")
    return EXIT_OK


def _report(args) -> int:
    rows = read_results(args.results)
    out_dir = args.out_dir or args.results.parent
    paths = render_figures(rows, out_dir, args.results.stem)
    if not paths:
        print("no renderable rows found", file=sys.stderr)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser, run_parser = _build_parser()
    try:
        args = _apply_config_file(parser, run_parser, list(sys.argv[1:] if argv is None else argv))
        if args.command == "run":
            return _run(args)
        return _report(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceLimitError, MemoryError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
