"""System configuration for the K x N x K interfering-relay network."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ConfigurationError


class Convention(enum.Enum):
    """Fading power normalization.

    UNIT_COMPLEX_VARIANCE: E|h|^2 = 1, i.e. |h|^2 ~ Exponential(1).
    UNIT_PER_COMPONENT:    each real component has unit variance, so
                           E|h|^2 = 2 and |h|^2 is chi-square with 2
                           degrees of freedom.

    Relay selection and all slope results are invariant to this global
    scaling; it only moves the metric distributions by a factor of 2.
    """

    UNIT_COMPLEX_VARIANCE = "unit-complex-variance"
    UNIT_PER_COMPONENT = "unit-per-component"

    @property
    def per_term_mean(self) -> float:
        """Mean of one squared channel gain under this convention."""
        return 1.0 if self is Convention.UNIT_COMPLEX_VARIANCE else 2.0


class Scheme(enum.Enum):
    """Relay operation scheme."""

    OND_ALTERNATE = "ond-alternate"
    OND_NO_ALTERNATE = "ond-no-alternate"
    MAX_MIN_SNR = "max-min-snr"

    @property
    def uses_second_set(self) -> bool:
        return self is Scheme.OND_ALTERNATE

    def min_relays(self, k_pairs: int) -> int:
        return 2 * k_pairs if self.uses_second_set else k_pairs


@dataclass(frozen=True)
class SystemConfig:
    """All parameters of one simulated network.

    k_pairs: number of source-destination pairs (K).
    n_relays: number of candidate relays (N); alternate relaying needs
        N >= 2K, the other schemes N >= K.
    l_slots: data transmission slots per block (L); odd, >= 3.
    snr: transmit SNR P/N0 on a linear scale.
    convention: fading power normalization.
    scheme: relay operation scheme.
    """

    k_pairs: int
    n_relays: int
    l_slots: int = 11
    snr: float = 10.0
    convention: Convention = Convention.UNIT_COMPLEX_VARIANCE
    scheme: Scheme = Scheme.OND_ALTERNATE

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not isinstance(self.k_pairs, int) or self.k_pairs < 1:
            raise ConfigurationError("k_pairs", f"must be a positive integer, got {self.k_pairs!r}")
        if not isinstance(self.n_relays, int) or self.n_relays < 1:
            raise ConfigurationError("n_relays", f"must be a positive integer, got {self.n_relays!r}")
        if not isinstance(self.l_slots, int) or self.l_slots < 3 or self.l_slots % 2 == 0:
            raise ConfigurationError("l_slots", f"must be an odd integer >= 3, got {self.l_slots!r}")
        if not (self.snr > 0.0):
            raise ConfigurationError("snr", f"must be positive (linear scale), got {self.snr!r}")
        need = self.scheme.min_relays(self.k_pairs)
        if self.n_relays < need:
            raise ConfigurationError(
                "n_relays",
                f"scheme {self.scheme.value} with k_pairs={self.k_pairs} needs at least {need} relays, "
                f"got {self.n_relays}",
            )
