"""Per-block SINRs and achievable rates, treating interference as noise.

Every SINR here is affine in the transmit SNR:

    sinr = a * snr / (1 + b * snr)

with a the desired squared gain and b the sum of interfering squared gains.
The coefficient form is computed once per (realization, assignment) and can
then be evaluated for a whole SNR sweep at once; the public per-SNR
operations are thin wrappers over it.

Steady-state slot accounting: the first and last slots of a block have less
interference than the steady state (no relay has anything to send yet / the
sources have finished), which only helps.  Those edge slots are folded into
the (L-1)/L prefactor instead of being simulated, so block rates err on the
conservative side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .config import Scheme, SystemConfig
from .selection import Assignment


@dataclass(frozen=True)
class SinrReport:
    """Received SINRs per pair and relay set.

    first_hop[k, s]:  at the serving relay of set s for pair k.
    second_hop[k, s]: at destination k when that relay transmits.
    Arrays have one column per relay set (two for alternate relaying).
    """

    first_hop: np.ndarray
    second_hop: np.ndarray

    def __post_init__(self):
        for arr in (self.first_hop, self.second_hop):
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ValueError("SINRs must be finite and nonnegative")

    @property
    def n_sets(self) -> int:
        return self.first_hop.shape[1]


@dataclass(frozen=True)
class RateReport:
    """Achievable per-pair and sum rates of one block, bits per channel use."""

    per_pair_rate: np.ndarray
    sum_rate: float
    scheme: Scheme
    prefactor: float

    def __post_init__(self):
        if np.any(self.per_pair_rate < 0):
            raise ValueError("rates must be nonnegative")
        if abs(self.sum_rate - float(self.per_pair_rate.sum())) > 1e-9:
            raise ValueError("sum_rate inconsistent with per-pair rates")


@dataclass(frozen=True)
class LinkCoefficients:
    """Affine SINR coefficients per (pair, relay set): sinr = a*snr/(1+b*snr)."""

    a1: np.ndarray  # desired gain, first hop
    b1: np.ndarray  # interference gain sum, first hop
    a2: np.ndarray  # desired gain, second hop
    b2: np.ndarray  # interference gain sum, second hop

    def sinrs(self, snr: float) -> SinrReport:
        return SinrReport(
            first_hop=self.a1 * snr / (1.0 + self.b1 * snr),
            second_hop=self.a2 * snr / (1.0 + self.b2 * snr),
        )


def _set_coefficients(real: ChannelRealization, own: np.ndarray, inter_relay: np.ndarray):
    """Hop coefficients for one active relay set (columns of the K x 1 slice).

    own: the K serving relays, ordered by pair.  inter_relay: per-pair sum of
    squared gains from the other set's relays into each serving relay (zero
    when sources and relays never transmit together).
    """
    k = real.k_pairs
    ks = np.arange(k)
    g1 = real.g1[own, :]               # (K, K): [k, m] = |h1[own[k], m]|^2
    a1 = g1[ks, ks]
    b1 = g1.sum(axis=1) - a1 + inter_relay
    g2 = real.g2t[own, :]              # (K, K): [n, m] = |h2[m, own[n]]|^2
    a2 = g2[ks, ks]
    b2 = g2.sum(axis=0) - a2           # destination k hears the other active relays
    return a1, b1, a2, b2


def link_coefficients(real: ChannelRealization, assignment: Assignment, alternate: bool) -> LinkCoefficients:
    """SINR coefficients for every (pair, relay set) of an assignment."""
    k = real.k_pairs
    first = np.asarray(assignment.first_set, dtype=int)
    if alternate:
        second = np.asarray(assignment.second_set, dtype=int)
        # columns of hr at the first set cover every needed inter-relay pair:
        # hr[first[a], second[b]] == hr[second[b], first[a]] by reciprocity
        block = real.hr.col_gains(first)[second, :]   # (K, K): [b, a]
        ir_first = block.sum(axis=0)                  # into first-set relay a, from all of second set
        ir_second = block.sum(axis=1)                 # into second-set relay b, from all of first set
        cols = []
        for own, ir in ((first, ir_first), (second, ir_second)):
            cols.append(_set_coefficients(real, own, ir))
        a1, b1, a2, b2 = (np.stack(arrs, axis=1) for arrs in zip(*cols))
        return LinkCoefficients(a1, b1, a2, b2)
    zero = np.zeros(k)
    a1, b1, a2, b2 = _set_coefficients(real, first, zero)
    return LinkCoefficients(a1[:, None], b1[:, None], a2[:, None], b2[:, None])


def compute_sinrs_alternate(real: ChannelRealization, config: SystemConfig,
                            assignment: Assignment) -> SinrReport:
    """Steady-state SINRs when both relay sets alternate transmit/receive.

    First-hop interference at a serving relay combines the other sources'
    signals and the other set's simultaneous transmissions; second-hop
    interference at a destination comes from the other active relays of the
    same set.
    """
    if assignment.second_set is None:
        raise ValueError("alternate relaying requires an assignment with a second relay set")
    return link_coefficients(real, assignment, alternate=True).sinrs(config.snr)


def compute_sinrs_two_phase(real: ChannelRealization, config: SystemConfig,
                            assignment: Assignment) -> SinrReport:
    """SINRs when sources and relays never transmit simultaneously.

    Same expressions with the inter-relay term absent; only the single
    relay set's column is populated.
    """
    if assignment.second_set is not None:
        raise ValueError("two-phase schedule expects an assignment without a second relay set")
    return link_coefficients(real, assignment, alternate=False).sinrs(config.snr)


def per_pair_rates(first_hop: np.ndarray, second_hop: np.ndarray,
                   scheme: Scheme, l_slots: int) -> np.ndarray:
    """Decode-and-forward rates from hop SINR arrays of shape (..., K, S).

    The weaker hop limits each stream (min), each relay set carries half the
    source's symbols, and alternate relaying pays the (L-1)/L slot overhead.
    """
    stream = 0.5 * np.log2(1.0 + np.minimum(first_hop, second_hop))
    if scheme is Scheme.OND_ALTERNATE:
        return (l_slots - 1) / l_slots * stream.sum(axis=-1)
    return stream.sum(axis=-1)


def rate_prefactor(scheme: Scheme, l_slots: int) -> float:
    return (l_slots - 1) / l_slots if scheme is Scheme.OND_ALTERNATE else 0.5


def block_rate(sinrs: SinrReport, config: SystemConfig) -> RateReport:
    """Achievable rates of one block under the configured scheme."""
    expected_sets = 2 if config.scheme is Scheme.OND_ALTERNATE else 1
    if sinrs.n_sets != expected_sets:
        raise ValueError(
            f"scheme {config.scheme.value} expects {expected_sets} relay set(s), report has {sinrs.n_sets}"
        )
    rates = per_pair_rates(sinrs.first_hop, sinrs.second_hop, config.scheme, config.l_slots)
    return RateReport(
        per_pair_rate=rates,
        sum_rate=float(rates.sum()),
        scheme=config.scheme,
        prefactor=rate_prefactor(config.scheme, config.l_slots),
    )


def scheduling_overhead_bits(k_pairs: int) -> int:
    """Signaling bits needed to announce both relay sets: 2K*ceil(log2 K)."""
    if k_pairs < 1:
        raise ValueError(f"k_pairs must be >= 1, got {k_pairs}")
    return 2 * k_pairs * (k_pairs - 1).bit_length()


def dof_lower_bound_alternate(k_pairs: int, l_slots: int) -> float:
    """High-SNR sum-rate slope achievable with alternate relaying: (L-1)K/L."""
    if l_slots < 3 or l_slots % 2 == 0:
        raise ValueError(f"l_slots must be odd and >= 3, got {l_slots}")
    return (l_slots - 1) * k_pairs / l_slots
