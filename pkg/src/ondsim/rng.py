"""Counter-based random number generation for channel coefficients.

Every coefficient is a pure function of (seed, stream, row, column), so a
realization can be regenerated entry-by-entry in any order: dense matrices,
single columns of the inter-relay matrix, or just squared magnitudes, all
bit-identical.  This is what makes trial-level parallelism and lazy
materialization reproducible without shared RNG state.

The mixer is the splitmix64 finalizer; statistical quality is asserted by
the test suite (law-of-large-numbers and Kolmogorov-Smirnov checks against
the exponential/uniform laws).
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MULT1 = np.uint64(0xBF58476D1CE4E5B9)
_MULT2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_PHASE_SALT = np.uint64(0xE7037ED1A0B428DB)
_INV53 = float(2.0 ** -53)

# stream salts for the three coefficient matrices
STREAM_H1 = np.uint64(0x243F6A8885A308D3)  # source -> relay
STREAM_H2 = np.uint64(0x13198A2E03707344)  # relay -> destination
STREAM_HR = np.uint64(0xA4093822299F31D0)  # relay <-> relay


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays."""
    x = (x ^ (x >> _S30)) * _MULT1
    x = (x ^ (x >> _S27)) * _MULT2
    return x ^ (x >> _S31)


def stream_word(seed: int, salt: np.uint64) -> np.uint64:
    """Collapse (seed, stream salt) into one 64-bit word."""
    if not (0 <= int(seed) < 2 ** 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    with np.errstate(over="ignore"):
        return _mix(np.asarray(np.uint64(seed) ^ salt))[()]


def entry_hash(word: np.uint64, i, j) -> np.ndarray:
    """64-bit hash of entry (i, j) under a stream word; broadcasts over i/j."""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix(word + (_GAMMA + i))
        return _mix(h + (_GAMMA + j))


def entry_gains(word: np.uint64, i, j, mean: float = 1.0) -> np.ndarray:
    """Squared channel magnitudes |h|^2 ~ Exponential(mean) for entries (i, j)."""
    h = entry_hash(word, i, j)
    u = ((h >> _S11).astype(np.float64) + 1.0) * _INV53  # in (0, 1]
    return (-mean) * np.log(u)


def entry_complex(word: np.uint64, i, j, mean: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex gains with E|h|^2 = mean for entries (i, j).

    The squared magnitude equals entry_gains(...) for the same indices (up to
    one rounding of cos^2 + sin^2), so selection metrics computed from gains
    and from complex coefficients agree.
    """
    h = entry_hash(word, i, j)
    u1 = ((h >> _S11).astype(np.float64) + 1.0) * _INV53
    with np.errstate(over="ignore"):
        u2 = (_mix(h ^ _PHASE_SALT) >> _S11).astype(np.float64) * _INV53
    r = np.sqrt((-mean) * np.log(u1))
    theta = (2.0 * np.pi) * u2
    return r * np.cos(theta) + 1j * (r * np.sin(theta))


def trial_seed(master_seed: int, *key: int) -> int:
    """Derive an independent 64-bit seed for one trial from a master seed.

    Uses numpy's SeedSequence spawn keys, so seeds for distinct (key) tuples
    are decorrelated and independent of the order trials are executed in.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])
