"""Experiment orchestration: sweeps, Monte Carlo aggregation, result files.

A spec describes a sweep over (N, scheme, SNR); every sweep point is
averaged over seeded trials.  Per-trial seeds derive from the master seed
and the trial's (K, N, index) only, so results are byte-identical no matter
how trials are partitioned across workers, and adding SNR points or schemes
to a sweep does not change the channel draws.

Within one trial the realization and the relay selection are shared by all
schemes and SNR points of the cell (selection does not depend on SNR), and
SINRs for the whole SNR grid are evaluated at once from their affine
coefficient form.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import rng
from .analysis import ks_distance
from .channel import generate_realization
from .config import Convention, Scheme, SystemConfig
from .errors import ConfigurationError, ResourceLimitError
from .metrics import MetricKind, metric_cdf, scheduling_metric_table, til_table
from .protocol import link_coefficients, per_pair_rates
from .selection import Assignment, second_set_with_values, select_first_set, select_max_min_snr


class ExperimentKind(enum.Enum):
    RATE_VS_SNR = "rate-vs-snr"
    TIL_VS_N = "til-vs-n"
    SCHEME_COMPARISON = "scheme-comparison"
    CDF_VALIDATION = "cdf-validation"


class NRule(enum.Enum):
    """How N is chosen per sweep point.

    FIXED uses the spec's N list.  The scaling rules tie N to the SNR as
    N = round(snr^(3K-2)) (full-rate scaling, flag value "thm1") or
    N = round(snr^(2K-2)) (two-phase scaling, flag value "thm3"), clamped
    below at the scheme's minimum and above at n_cap.
    """

    FIXED = "fixed"
    FULL_RATE_SCALING = "thm1"
    TWO_PHASE_SCALING = "thm3"

    def exponent(self, k_pairs: int) -> int:
        if self is NRule.FULL_RATE_SCALING:
            return 3 * k_pairs - 2
        if self is NRule.TWO_PHASE_SCALING:
            return 2 * k_pairs - 2
        raise ValueError("fixed rule has no exponent")


# chunk sizing is a pure function of the cell so that worker count cannot
# change the reduction order (byte-identical outputs for any --threads)
_CHUNK_BUDGET = 4_000_000


def _chunk_size(n_relays: int, k_pairs: int) -> int:
    return max(1, min(256, _CHUNK_BUDGET // max(1, n_relays * k_pairs)))


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one experiment sweep."""

    kind: ExperimentKind
    k_pairs: int
    snr_db: tuple[float, ...]
    n_relays: tuple[int, ...]
    schemes: tuple[Scheme, ...]
    l_slots: int = 11
    convention: Convention = Convention.UNIT_COMPLEX_VARIANCE
    trials: int = 1000
    master_seed: int = 0
    n_rule: NRule = NRule.FIXED
    n_cap: int = 1_000_000
    mem_cap_bytes: int = 4 * 1024 ** 3
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "n_relays", tuple(int(n) for n in self.n_relays))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        self.validate()

    def validate(self):
        if self.k_pairs < 1:
            raise ConfigurationError("k_pairs", f"must be >= 1, got {self.k_pairs}")
        if self.trials < 1:
            raise ConfigurationError("trials", f"must be >= 1, got {self.trials}")
        if self.l_slots < 3 or self.l_slots % 2 == 0:
            raise ConfigurationError("l_slots", f"must be odd and >= 3, got {self.l_slots}")
        if not (0 <= self.master_seed < 2 ** 64):
            raise ConfigurationError("master_seed", "must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise ConfigurationError("threads", f"must be >= 1, got {self.threads}")
        if self.n_cap < 1:
            raise ConfigurationError("n_cap", f"must be >= 1, got {self.n_cap}")
        if self.kind is ExperimentKind.CDF_VALIDATION:
            if self.k_pairs < 2:
                raise ConfigurationError(
                    "k_pairs", "cdf-validation needs k_pairs >= 2 (the K=1 scheduling metric is degenerate)")
            return
        if not self.snr_db:
            raise ConfigurationError("snr_db", "sweep list must not be empty")
        if not self.schemes:
            raise ConfigurationError("schemes", "sweep list must not be empty")
        if any(not math.isfinite(s) for s in self.snr_db):
            raise ConfigurationError("snr_db", f"values must be finite, got {self.snr_db}")
        if self.n_rule is NRule.FIXED:
            if not self.n_relays:
                raise ConfigurationError("n_relays", "sweep list must not be empty under the fixed rule")
            need = max(s.min_relays(self.k_pairs) for s in self.schemes)
            bad = [n for n in self.n_relays if n < need]
            if bad:
                raise ConfigurationError(
                    "n_relays", f"values {bad} are below the minimum {need} required by the scheme sweep")

    def min_relays(self) -> int:
        return max(s.min_relays(self.k_pairs) for s in self.schemes)


@dataclass(frozen=True)
class ResultRow:
    """One sweep point; field order is the CSV column order."""

    kind: str
    scheme: str | None
    convention: str
    k_pairs: int
    n_relays: int
    n_capped: bool
    l_slots: int
    snr_db: float | None
    snr_linear: float | None
    trials: int
    master_seed: int
    mean_sum_rate: float | None
    stderr_sum_rate: float | None
    mean_kth_min_til: float | None
    mean_inv_kth_min_til: float | None
    metric_kind: str | None
    ks_distance: float | None


@dataclass(frozen=True)
class _Cell:
    """One (N, SNR subset) work unit sharing realizations across schemes."""

    n_relays: int
    n_capped: bool
    snr_db: tuple[float, ...]


def _plan_cells(spec: ExperimentSpec) -> list[_Cell]:
    if spec.n_rule is NRule.FIXED:
        return [_Cell(n, False, spec.snr_db) for n in spec.n_relays]
    exp = spec.n_rule.exponent(spec.k_pairs)
    floor = spec.min_relays()
    cells = []
    for sdb in spec.snr_db:
        raw = round((10.0 ** (sdb / 10.0)) ** exp)
        capped = raw > spec.n_cap
        n = max(floor, min(raw, spec.n_cap))
        cells.append(_Cell(n, capped, (sdb,)))
    return cells


def _check_memory(spec: ExperimentSpec, cells: list[_Cell]):
    max_n = max(c.n_relays for c in cells)
    # ~8 live float64 arrays of shape (N, K) per in-flight trial
    est = 64 * max_n * spec.k_pairs * spec.threads * 2
    if est > spec.mem_cap_bytes:
        raise ResourceLimitError(
            f"estimated peak memory {est / 1e9:.2f} GB exceeds the cap "
            f"{spec.mem_cap_bytes / 1e9:.2f} GB; reduce n_relays/threads, or raise mem_cap_bytes"
        )


def _run_cell_chunk(payload):
    """Run one chunk of trials of one cell; top-level so workers can import it.

    Returns (rates[scheme, snr, trial], til_worst[trial] or None).
    """
    (k, n, l_slots, conv_value, scheme_values, snr_db, master_seed, t0, t1) = payload
    convention = Convention(conv_value)
    schemes = [Scheme(v) for v in scheme_values]
    snr_lin = np.array([10.0 ** (s / 10.0) for s in snr_db])
    cfg = SystemConfig(k_pairs=k, n_relays=n, l_slots=l_slots, snr=1.0,
                       convention=convention, scheme=schemes[0])
    need_first = any(s is not Scheme.MAX_MIN_SNR for s in schemes)
    need_second = any(s.uses_second_set for s in schemes)
    rates = np.empty((len(schemes), len(snr_lin), t1 - t0))
    til_worst = np.empty(t1 - t0) if need_second else None
    s_col = snr_lin[:, None, None]
    for idx, t in enumerate(range(t0, t1)):
        real = generate_realization(cfg, rng.trial_seed(master_seed, k, n, t))
        first = select_first_set(real, cfg) if need_first else None
        second = None
        if need_second:
            second, values = second_set_with_values(real, first)
            til_worst[idx] = values.max()
        for si, scheme in enumerate(schemes):
            if scheme is Scheme.MAX_MIN_SNR:
                assignment = select_max_min_snr(real, cfg)
            elif scheme is Scheme.OND_ALTERNATE:
                assignment = Assignment(tuple(first), tuple(second))
            else:
                assignment = Assignment(tuple(first))
            coefs = link_coefficients(real, assignment, alternate=scheme.uses_second_set)
            fh = coefs.a1 * s_col / (1.0 + coefs.b1 * s_col)   # (snr, K, S)
            sh = coefs.a2 * s_col / (1.0 + coefs.b2 * s_col)
            rates[si, :, idx] = per_pair_rates(fh, sh, scheme, l_slots).sum(axis=-1)
    return rates, til_worst


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def _cdf_validation_rows(spec: ExperimentSpec) -> list[ResultRow]:
    rows = []
    k, conv = spec.k_pairs, spec.convention
    for kind_idx, kind in enumerate(MetricKind):
        if kind is MetricKind.SCHEDULING_METRIC:
            n = spec.trials
            cfg = SystemConfig(k_pairs=k, n_relays=max(n, k), convention=conv,
                               scheme=Scheme.OND_NO_ALTERNATE)
            real = generate_realization(cfg, rng.trial_seed(spec.master_seed, k, cfg.n_relays, kind_idx))
            samples = scheduling_metric_table(real).values[:n, 0]
        else:
            n = spec.trials + k
            cfg = SystemConfig(k_pairs=k, n_relays=n, convention=conv,
                               scheme=Scheme.OND_ALTERNATE)
            real = generate_realization(cfg, rng.trial_seed(spec.master_seed, k, n, kind_idx))
            samples = til_table(real, list(range(k))).values[k:, 0]
        dist = ks_distance(samples, lambda v: metric_cdf(kind, k, conv, v))
        rows.append(ResultRow(
            kind=spec.kind.value, scheme=None, convention=conv.value, k_pairs=k,
            n_relays=cfg.n_relays, n_capped=False, l_slots=spec.l_slots,
            snr_db=None, snr_linear=None, trials=spec.trials, master_seed=spec.master_seed,
            mean_sum_rate=None, stderr_sum_rate=None,
            mean_kth_min_til=None, mean_inv_kth_min_til=None,
            metric_kind=kind.value, ks_distance=float(dist),
        ))
    return rows


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Run every sweep point of a spec and aggregate trial statistics.

    Deterministic for a fixed spec: per-trial seeds depend only on
    (master_seed, K, N, trial index), chunk boundaries only on the cell, and
    aggregation reduces chunks in index order, so the output is identical
    for any thread count.
    """
    spec.validate()
    if spec.kind is ExperimentKind.CDF_VALIDATION:
        return _cdf_validation_rows(spec)
    cells = _plan_cells(spec)
    _check_memory(spec, cells)

    tasks = []
    for ci, cell in enumerate(cells):
        chunk = _chunk_size(cell.n_relays, spec.k_pairs)
        for t0 in range(0, spec.trials, chunk):
            t1 = min(t0 + chunk, spec.trials)
            payload = (spec.k_pairs, cell.n_relays, spec.l_slots, spec.convention.value,
                       tuple(s.value for s in spec.schemes), cell.snr_db,
                       spec.master_seed, t0, t1)
            tasks.append((ci, t0, payload))

    results: dict[tuple[int, int], tuple] = {}
    if spec.threads > 1:
        with ProcessPoolExecutor(max_workers=spec.threads) as pool:
            futures = {(ci, t0): pool.submit(_run_cell_chunk, payload) for ci, t0, payload in tasks}
            for key, fut in futures.items():
                results[key] = fut.result()
    else:
        for ci, t0, payload in tasks:
            results[(ci, t0)] = _run_cell_chunk(payload)

    rows = []
    for ci, cell in enumerate(cells):
        keys = sorted(t0 for (c, t0) in results if c == ci)
        rates = np.concatenate([results[(ci, t0)][0] for t0 in keys], axis=2)
        til_chunks = [results[(ci, t0)][1] for t0 in keys]
        til_worst = np.concatenate(til_chunks) if til_chunks[0] is not None else None
        for si, scheme in enumerate(spec.schemes):
            if scheme.uses_second_set and til_worst is not None:
                mean_til = float(til_worst.mean())
                mean_inv_til = float((1.0 / til_worst).mean())
            else:
                mean_til = mean_inv_til = None
            for gi, sdb in enumerate(cell.snr_db):
                mean, stderr = _mean_stderr(rates[si, gi, :])
                rows.append(ResultRow(
                    kind=spec.kind.value, scheme=scheme.value, convention=spec.convention.value,
                    k_pairs=spec.k_pairs, n_relays=cell.n_relays, n_capped=cell.n_capped,
                    l_slots=spec.l_slots, snr_db=sdb, snr_linear=10.0 ** (sdb / 10.0),
                    trials=spec.trials, master_seed=spec.master_seed,
                    mean_sum_rate=mean, stderr_sum_rate=stderr,
                    mean_kth_min_til=mean_til, mean_inv_kth_min_til=mean_inv_til,
                    metric_kind=None, ks_distance=None,
                ))
    return rows


_FLOAT_FIELDS = {"snr_db", "snr_linear", "mean_sum_rate", "stderr_sum_rate",
                 "mean_kth_min_til", "mean_inv_kth_min_til", "ks_distance"}
_INT_FIELDS = {"k_pairs", "n_relays", "l_slots", "trials", "master_seed"}
_BOOL_FIELDS = {"n_capped"}


def _format_cell(name: str, value) -> str:
    if value is None:
        return ""
    if name in _BOOL_FIELDS:
        return "true" if value else "false"
    if name in _FLOAT_FIELDS:
        return format(float(value), ".9g")
    return str(value)


def emit_results(rows: list[ResultRow], fmt: str, path) -> None:
    """Write rows as CSV (header + one line per row, 9 significant digits)
    or JSON (array of objects with the same field names, full precision)."""
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    path = Path(path)
    names = [f.name for f in fields(ResultRow)]
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            for row in rows:
                d = asdict(row)
                writer.writerow([_format_cell(n, d[n]) for n in names])
    else:
        with open(path, "w") as fh:
            json.dump([asdict(row) for row in rows], fh, indent=2)
            fh.write("\n")


def read_results(path) -> list[ResultRow]:
    """Parse a results file written by emit_results (format from extension)."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path) as fh:
            return [ResultRow(**obj) for obj in json.load(fh)]
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            kwargs = {}
            for name, raw in rec.items():
                if raw == "":
                    kwargs[name] = None
                elif name in _FLOAT_FIELDS:
                    kwargs[name] = float(raw)
                elif name in _INT_FIELDS:
                    kwargs[name] = int(raw)
                elif name in _BOOL_FIELDS:
                    kwargs[name] = raw == "true"
                else:
                    kwargs[name] = raw
            rows.append(ResultRow(**kwargs))
    return rows
