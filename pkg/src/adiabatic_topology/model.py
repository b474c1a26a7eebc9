"""Parameter types and effective RWA Hamiltonians for two- and three-level systems.

Units: hbar = 1 and every frequency, detuning and energy is a dimensionless
multiple of a reference frequency; times are multiples of its inverse.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class UnitSystem:
    reference_frequency: float = 1.0

    def __post_init__(self):
        if not self.reference_frequency > 0:
            raise ValueError("reference_frequency must be positive")

    def to_dimensionless(self, value: float) -> float:
        return value / self.reference_frequency

    def time_to_dimensionless(self, t: float) -> float:
        return t * self.reference_frequency


@dataclass(frozen=True)
class TwoLevelParams:
    """Rabi frequency and effective (already Stark-summed) detuning."""

    rabi: float
    detuning: float

    def __post_init__(self):
        if self.rabi < 0:
            raise ValueError("rabi must be nonnegative")


class SchemeKind(str, enum.Enum):
    LAMBDA = "lambda"
    LADDER = "ladder"
    VEE = "vee"


@dataclass(frozen=True)
class LevelScheme:
    kind: SchemeKind
    bare_energies: tuple[float, float, float]
    carrier_frequencies: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if len(self.bare_energies) != 3 or len(self.carrier_frequencies) != 2:
            raise ValueError("need three bare energies and two carrier frequencies")
        if min(self.carrier_frequencies) <= 0:
            raise ValueError("carrier frequencies must be positive")

    @property
    def initial_state(self) -> int:
        """Default initially populated level (1-based)."""
        return 2 if self.kind is SchemeKind.VEE else 1


@dataclass(frozen=True)
class ThreeLevelParams:
    delta_p: float
    delta_s: float
    rabi_p: float = 0.0
    rabi_s: float = 0.0

    def __post_init__(self):
        if self.rabi_p < 0 or self.rabi_s < 0:
            raise ValueError("Rabi frequencies must be nonnegative")

    @property
    def two_photon_detuning(self) -> float:
        return self.delta_p - self.delta_s


def detunings_from_scheme(scheme: LevelScheme) -> tuple[float, float, float]:
    """One-photon detunings (pump, Stokes) and the two-photon detuning.

    The sign of each carrier frequency depends on the linkage: absorption
    (lambda pump, ladder pump) subtracts it, emission-like legs add it.
    """
    e1, e2, e3 = scheme.bare_energies
    wp, ws = scheme.carrier_frequencies
    if scheme.kind is SchemeKind.LAMBDA:
        dp, ds = e2 - e1 - wp, e2 - e3 - ws
    elif scheme.kind is SchemeKind.LADDER:
        dp, ds = e2 - e1 - wp, e2 - e3 + ws
    else:
        dp, ds = e2 - e1 + wp, e2 - e3 + ws
    return dp, ds, dp - ds


def h2(rabi, detuning=None) -> np.ndarray:
    """Two-level RWA Hamiltonian ``0.5 * [[0, rabi], [rabi, 2*detuning]]``.

    Accepts a :class:`TwoLevelParams` as the first argument, or two scalars.
    """
    if isinstance(rabi, TwoLevelParams):
        rabi, detuning = rabi.rabi, rabi.detuning
    half = 0.5 * rabi
    return np.array([[0.0, half], [half, float(detuning)]])


def h3(delta_p, delta_s=None, rabi_p=0.0, rabi_s=0.0) -> np.ndarray:
    """Three-level RWA Hamiltonian with pump (1-2) and Stokes (2-3) couplings.

    Diagonal is ``(0, delta_p, delta_p - delta_s)``; there is no 1-3 coupling.
    Accepts a :class:`ThreeLevelParams` as the first argument, or scalars.
    """
    if isinstance(delta_p, ThreeLevelParams):
        p = delta_p
        delta_p, delta_s, rabi_p, rabi_s = p.delta_p, p.delta_s, p.rabi_p, p.rabi_s
    hp, hs = 0.5 * rabi_p, 0.5 * rabi_s
    return np.array(
        [
            [0.0, hp, 0.0],
            [hp, float(delta_p), hs],
            [0.0, hs, float(delta_p - delta_s)],
        ]
    )


def effective_detuning(t: float, static_detuning: float, stark_shift: Callable[[float], float]) -> float:
    """Static (laser) detuning plus the dynamic Stark shift at time ``t``."""
    return static_detuning + stark_shift(t)
