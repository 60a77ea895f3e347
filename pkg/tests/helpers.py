"""Shared test fixtures: constructed realizations and independent oracles."""

import numpy as np

from ondsim.channel import ChannelRealization, InterRelayChannel


def real_from_gains(g1, g2, hr_gains=None):
    """Build a realization whose squared magnitudes equal the given arrays.

    g1: (N, K) gains source->relay; g2: (K, N) gains relay->destination;
    hr_gains: (N, N) symmetric, zero-diagonal inter-relay gains (zeros if
    omitted).  Coefficients are the positive square roots, so |h|^2
    reproduces the inputs exactly.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    n = g1.shape[0]
    if hr_gains is None:
        hr_gains = np.zeros((n, n))
    hr = InterRelayChannel.from_matrix(np.sqrt(np.asarray(hr_gains, dtype=float)).astype(complex))
    return ChannelRealization(h1=np.sqrt(g1).astype(complex),
                              h2=np.sqrt(g2).astype(complex), hr=hr)


def real_from_complex(h1, h2, hr_matrix):
    return ChannelRealization(h1=np.asarray(h1), h2=np.asarray(h2),
                              hr=InterRelayChannel.from_matrix(np.asarray(hr_matrix)))


def symmetric_gains(rng, n):
    """Random symmetric nonnegative gain matrix with a zero diagonal."""
    m = rng.exponential(1.0, size=(n, n))
    m = np.triu(m, 1)
    return m + m.T


def sort_replay_assignment(values, banned_rows=()):
    """Sort-based reference for sequential-min selection with deletion.

    Sorts every (value, relay, pair) entry ascending and replays the claim
    rule: an entry wins if neither its relay nor its pair is already taken.
    Ties break by relay then pair via the sort key.
    """
    n, k = values.shape
    banned = set(int(b) for b in banned_rows)
    entries = sorted((values[i, j], i, j) for i in range(n) for j in range(k)
                     if i not in banned)
    taken_relays, taken_pairs = set(), set()
    out = [None] * k
    for value, relay, pair in entries:
        if relay in taken_relays or pair in taken_pairs:
            continue
        out[pair] = relay
        taken_relays.add(relay)
        taken_pairs.add(pair)
        if len(taken_pairs) == k:
            break
    return out
