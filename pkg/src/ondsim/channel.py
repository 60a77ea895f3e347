"""Rayleigh block-fading generation for the two-hop interfering-relay network.

One realization holds every coefficient of one fading block:

    h1[i, k] : source k  -> relay i      (N x K)
    h2[k, i] : relay i   -> destination k (K x N)
    hr[i, n] : relay i  <-> relay n       (N x N, reciprocal, zero diagonal)

The inter-relay matrix is reciprocal (TDD), so hr[i, n] == hr[n, i], and it
is never materialized in full for large N: the selection metrics and SINRs
only ever read the N x K block of columns belonging to the first selected
relay set, so those columns are generated on demand.  Squared magnitudes are
the quantities every consumer needs, so they are generated eagerly; complex
coefficients materialize lazily on first access.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .config import Convention, SystemConfig
from .errors import ConfigurationError

# full N x N inter-relay materialization is refused above this (memory guard)
DENSE_HR_LIMIT = 4096


class InterRelayChannel:
    """Reciprocal relay-to-relay channel, column-addressable.

    Backed either by the counter-based generator (lazy, any N) or by an
    explicit dense matrix (tests, small N).  Entry (i, j) with i != j is the
    coefficient between relays i and j; the diagonal is zero (a relay has no
    channel to itself).
    """

    def __init__(self, n_relays: int, *, word=None, mean: float = 1.0, matrix=None):
        self.n = n_relays
        self._word = word
        self._mean = mean
        self._matrix = matrix
        if matrix is not None:
            m = np.asarray(matrix)
            if m.shape != (n_relays, n_relays):
                raise ValueError(f"inter-relay matrix must be ({n_relays}, {n_relays}), got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError("inter-relay matrix has non-finite entries")
            if np.any(np.diagonal(m) != 0):
                raise ValueError("inter-relay matrix must have a zero diagonal")
            if not np.allclose(np.abs(m), np.abs(m.T)):
                raise ValueError("inter-relay matrix must be reciprocal in magnitude")
            self._matrix = m

    @classmethod
    def hashed(cls, seed: int, n_relays: int, mean: float) -> "InterRelayChannel":
        return cls(n_relays, word=rng.stream_word(seed, rng.STREAM_HR), mean=mean)

    @classmethod
    def from_matrix(cls, matrix) -> "InterRelayChannel":
        m = np.asarray(matrix)
        return cls(m.shape[0], matrix=m)

    def _canonical(self, cols):
        """Index pairs (row grid, col grid) canonicalized so (i, j) == (j, i)."""
        i = np.arange(self.n, dtype=np.uint64)[:, None]
        j = np.asarray(cols, dtype=np.uint64)[None, :]
        return np.minimum(i, j), np.maximum(i, j), i == j

    def col_gains(self, cols) -> np.ndarray:
        """Squared magnitudes |hr[:, c]|^2 for the requested columns, shape (N, len(cols))."""
        if self._matrix is not None:
            return np.abs(self._matrix[:, np.asarray(cols, dtype=int)]) ** 2
        a, b, diag = self._canonical(cols)
        g = rng.entry_gains(self._word, a, b, self._mean)
        g[diag] = 0.0
        return g

    def cols(self, cols) -> np.ndarray:
        """Complex coefficients hr[:, c] for the requested columns."""
        if self._matrix is not None:
            return self._matrix[:, np.asarray(cols, dtype=int)].copy()
        a, b, diag = self._canonical(cols)
        z = rng.entry_complex(self._word, a, b, self._mean)
        z[diag] = 0.0
        return z

    def dense(self) -> np.ndarray:
        """Full N x N complex matrix; refused above DENSE_HR_LIMIT relays."""
        if self._matrix is not None:
            return self._matrix
        if self.n > DENSE_HR_LIMIT:
            raise MemoryError(
                f"dense inter-relay matrix for N={self.n} refused (limit {DENSE_HR_LIMIT}); "
                "use col_gains()/cols() for the columns actually needed"
            )
        return self.cols(np.arange(self.n))


class ChannelRealization:
    """All fading coefficients of one block.

    g1, g2 are the squared magnitudes (the quantities selection metrics and
    SINRs consume); h1, h2 are the complex coefficients, materialized on
    first access.  g2 is stored relay-major, i.e. g2[i, k] == |h2[k, i]|^2.
    """

    def __init__(self, h1=None, h2=None, hr: InterRelayChannel | None = None,
                 *, _g1=None, _g2=None, _words=None, _mean: float = 1.0):
        if hr is None:
            raise ValueError("inter-relay channel is required")
        self.hr = hr
        self._mean = _mean
        self._words = _words
        if h1 is not None:
            h1 = np.asarray(h1)
            h2 = np.asarray(h2)
            n, k = h1.shape
            if h2.shape != (k, n):
                raise ValueError(f"h2 must be ({k}, {n}) to match h1 {h1.shape}, got {h2.shape}")
            if not (np.all(np.isfinite(h1)) and np.all(np.isfinite(h2))):
                raise ValueError("channel coefficients must be finite")
            self._h1, self._h2 = h1, h2
            self._g1 = np.abs(h1) ** 2
            self._g2 = np.abs(h2) ** 2       # (K, N)
        else:
            self._h1 = self._h2 = None
            self._g1, self._g2 = _g1, _g2    # _g2 already (K, N)
        if self.hr.n != self.n_relays:
            raise ValueError("inter-relay channel size does not match h1")

    @property
    def n_relays(self) -> int:
        return self._g1.shape[0]

    @property
    def k_pairs(self) -> int:
        return self._g1.shape[1]

    @property
    def g1(self) -> np.ndarray:
        """(N, K) squared gains source k -> relay i."""
        return self._g1

    @property
    def g2t(self) -> np.ndarray:
        """(N, K) squared gains relay i -> destination k (relay-major view)."""
        return self._g2.T

    @property
    def g2(self) -> np.ndarray:
        """(K, N) squared gains relay i -> destination k."""
        return self._g2

    @property
    def h1(self) -> np.ndarray:
        if self._h1 is None:
            n, k = self._g1.shape
            i = np.arange(n, dtype=np.uint64)[:, None]
            kk = np.arange(k, dtype=np.uint64)[None, :]
            self._h1 = rng.entry_complex(self._words[0], i, kk, self._mean)
        return self._h1

    @property
    def h2(self) -> np.ndarray:
        if self._h2 is None:
            n, k = self._g1.shape
            i = np.arange(n, dtype=np.uint64)[:, None]
            kk = np.arange(k, dtype=np.uint64)[None, :]
            self._h2 = rng.entry_complex(self._words[1], i, kk, self._mean).T
        return self._h2


def generate_realization(config: SystemConfig, seed: int) -> ChannelRealization:
    """Draw one seeded block-fading realization.

    Deterministic in (config, seed): the same arguments always produce a
    bit-identical realization, independent of what other trials ran in the
    same process.  Entries are i.i.d. circularly-symmetric complex Gaussian
    with E|h|^2 set by the convention; the inter-relay matrix is reciprocal
    with a zero diagonal.
    """
    config.validate()
    if not isinstance(seed, (int, np.integer)) or not (0 <= int(seed) < 2 ** 64):
        raise ConfigurationError("seed", f"must be a 64-bit unsigned integer, got {seed!r}")
    seed = int(seed)
    mean = config.convention.per_term_mean
    n, k = config.n_relays, config.k_pairs
    w1 = rng.stream_word(seed, rng.STREAM_H1)
    w2 = rng.stream_word(seed, rng.STREAM_H2)
    i = np.arange(n, dtype=np.uint64)[:, None]
    kk = np.arange(k, dtype=np.uint64)[None, :]
    g1 = rng.entry_gains(w1, i, kk, mean)
    g2 = rng.entry_gains(w2, i, kk, mean).T   # stored (K, N)
    hr = InterRelayChannel.hashed(seed, n, mean)
    return ChannelRealization(hr=hr, _g1=g1, _g2=g2, _words=(w1, w2), _mean=mean)
