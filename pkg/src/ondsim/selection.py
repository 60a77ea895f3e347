"""Distributed timer-based relay selection, emulated deterministically.

The physical protocol starts one timer per (relay, pair) with initial value
proportional to the metric; timers expire in ascending metric order and a
claimed pair is withdrawn from everyone else.  That process is exactly
sequential global minimization with row/column deletion, which is what we
run: repeatedly take the smallest remaining table entry, assign that relay
to that pair, then drop the relay's row and the pair's column.  Exact ties
(possible only in constructed tests) break by lowest relay index, then
lowest pair index, which is what a row-major argmin returns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .config import Scheme, SystemConfig
from .errors import ConfigurationError
from .metrics import scheduling_metric_table, til_table


@dataclass(frozen=True)
class Assignment:
    """Selected relay sets; position k in each list serves pair k."""

    first_set: tuple[int, ...]
    second_set: tuple[int, ...] | None = None

    def __post_init__(self):
        first = tuple(int(i) for i in self.first_set)
        object.__setattr__(self, "first_set", first)
        if len(set(first)) != len(first):
            raise ValueError(f"first_set has duplicate relays: {first}")
        if self.second_set is not None:
            second = tuple(int(i) for i in self.second_set)
            object.__setattr__(self, "second_set", second)
            if len(second) != len(first):
                raise ValueError("second_set must have the same size as first_set")
            if len(set(second)) != len(second):
                raise ValueError(f"second_set has duplicate relays: {second}")
            if set(first) & set(second):
                raise ValueError("first and second relay sets must be disjoint")

    @property
    def k_pairs(self) -> int:
        return len(self.first_set)


def sequential_min_assign(values: np.ndarray, banned_rows=None):
    """Greedy global-minimum assignment with row/column deletion.

    Returns (relays, metric values), both ordered by pair index.  Rows in
    banned_rows are excluded from candidacy.
    """
    table = np.array(values, dtype=float)
    n, k = table.shape
    if banned_rows is not None:
        table[np.asarray(banned_rows, dtype=int), :] = np.inf
    relays = np.empty(k, dtype=int)
    chosen = np.empty(k, dtype=float)
    for _ in range(k):
        flat = int(np.argmin(table))          # row-major: lowest relay, then lowest pair
        r, c = divmod(flat, k)
        relays[c] = r
        chosen[c] = table[r, c]
        table[r, :] = np.inf
        table[:, c] = np.inf
    return relays, chosen


def select_first_set(real: ChannelRealization, config: SystemConfig) -> list[int]:
    """Choose the K relays of the first set from the scheduling-metric table.

    For K=1 there is nothing to compare (the metric is identically zero),
    so the lowest-index relay is picked for determinism.
    """
    k = real.k_pairs
    if real.n_relays < k:
        raise ConfigurationError("n_relays", f"need at least {k} relays, got {real.n_relays}")
    if k == 1:
        return [0]
    table = scheduling_metric_table(real)
    relays, _ = sequential_min_assign(table.values)
    return relays.tolist()


def select_second_set(real: ChannelRealization, config: SystemConfig, first_set) -> list[int]:
    """Choose the K relays of the second set by total interference level.

    Candidates are the N-K relays outside the first set; the first set must
    already be fixed because the TIL measures interference from it.
    """
    k = real.k_pairs
    if real.n_relays < 2 * k:
        raise ConfigurationError("n_relays", f"alternate relaying needs at least {2 * k} relays, got {real.n_relays}")
    relays, _ = second_set_with_values(real, first_set)
    return relays.tolist()


def second_set_with_values(real: ChannelRealization, first_set):
    """Second-set selection returning both relays and their TIL values."""
    table = til_table(real, first_set)
    return sequential_min_assign(table.values, banned_rows=list(first_set))


def select_max_min_snr(real: ChannelRealization, config: SystemConfig) -> Assignment:
    """Baseline: per pair, pick the unselected relay with the best weaker hop.

    Greedy without replacement over pairs in ascending order; maximizes
    min(|h1[i, k]|^2, |h2[k, i]|^2).  Interference plays no role, which is
    why this baseline saturates once interference dominates.
    """
    k = real.k_pairs
    if real.n_relays < k:
        raise ConfigurationError("n_relays", f"need at least {k} relays, got {real.n_relays}")
    score = np.minimum(real.g1, real.g2t)     # (N, K)
    taken = np.zeros(real.n_relays, dtype=bool)
    chosen = []
    for pair in range(k):
        col = np.where(taken, -np.inf, score[:, pair])
        best = int(np.argmax(col))            # first occurrence: lowest relay index on ties
        chosen.append(best)
        taken[best] = True
    return Assignment(tuple(chosen))


def select_assignment(real: ChannelRealization, config: SystemConfig) -> Assignment:
    """Run the configured scheme's full selection pipeline."""
    if config.scheme is Scheme.MAX_MIN_SNR:
        return select_max_min_snr(real, config)
    first = select_first_set(real, config)
    if config.scheme is Scheme.OND_NO_ALTERNATE:
        return Assignment(tuple(first))
    second = select_second_set(real, config, first)
    return Assignment(tuple(first), tuple(second))
