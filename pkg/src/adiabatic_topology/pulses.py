"""Pulse envelopes and complete driving protocols (direct chirp, SCRAP, STIRAP)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import h2, h3

# Gaussian tails are cut where the envelope drops below this fraction of the peak
GAUSSIAN_CUTOFF = 1e-12


class GeometryError(ValueError):
    """Pulse timing contradicts the requested protocol."""


class Shape(str, enum.Enum):
    SINE_SQUARED = "sine_squared"
    GAUSSIAN = "gaussian"
    CONSTANT = "constant"
    FLAT_TOP = "flat_top"


class Sequence(str, enum.Enum):
    INTUITIVE = "intuitive"
    COUNTERINTUITIVE = "counterintuitive"


class ProtocolKind(str, enum.Enum):
    DIRECT_CHIRP = "direct_chirp"
    SCRAP_B = "scrap_b"
    SCRAP_C = "scrap_c"
    STIRAP = "stirap"


@dataclass(frozen=True)
class Envelope:
    """A single pulse.

    ``width`` is the full base length for sine-squared and flat-top pulses
    and the 1/e half-width for Gaussians; it is ignored by constant
    envelopes. A flat-top pulse rises and falls with sine-squared ramps of
    duration ``rise``.
    """

    shape: Shape
    peak: float
    center: float = 0.0
    width: float = 1.0
    rise: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if self.peak < 0:
            raise ValueError("envelope peak must be nonnegative")
        if not self.width > 0:
            raise ValueError("envelope width must be positive")
        if self.shape is Shape.FLAT_TOP and not 0 < self.rise <= 0.5 * self.width:
            raise ValueError("flat-top rise must lie in (0, width/2]")

    def __call__(self, t: float) -> float:
        return envelope_value(self, t)

    def values(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.shape is Shape.SINE_SQUARED:
            x = t - self.center
            inside = np.abs(x) < 0.5 * self.width
            return np.where(inside, self.peak * np.cos(math.pi * x / self.width) ** 2, 0.0)
        if self.shape is Shape.GAUSSIAN:
            return self.peak * np.exp(-(((t - self.center) / self.width) ** 2))
        if self.shape is Shape.FLAT_TOP:
            return np.array([envelope_value(self, x) for x in t.ravel()]).reshape(t.shape)
        return np.full(t.shape, float(self.peak))

    @property
    def support(self) -> tuple[float, float]:
        if self.shape in (Shape.SINE_SQUARED, Shape.FLAT_TOP):
            half = 0.5 * self.width
        elif self.shape is Shape.GAUSSIAN:
            half = self.width * math.sqrt(-math.log(GAUSSIAN_CUTOFF))
        else:
            half = math.inf
        return self.center - half, self.center + half

    @property
    def area(self) -> float:
        """Temporal pulse area (integral of the envelope)."""
        if self.shape is Shape.SINE_SQUARED:
            return 0.5 * self.peak * self.width
        if self.shape is Shape.GAUSSIAN:
            return self.peak * self.width * math.sqrt(math.pi)
        if self.shape is Shape.FLAT_TOP:
            return self.peak * (self.width - self.rise)
        return math.inf if self.peak > 0 else 0.0

    def level_times(self, level: float) -> tuple[float, float]:
        """Times at which the envelope rises through and falls back through ``level``."""
        if not 0 < level < self.peak:
            raise ValueError("level must lie strictly between 0 and the peak")
        r = level / self.peak
        if self.shape is Shape.SINE_SQUARED:
            half = self.width * math.acos(math.sqrt(r)) / math.pi
        elif self.shape is Shape.GAUSSIAN:
            half = self.width * math.sqrt(-math.log(r))
        elif self.shape is Shape.FLAT_TOP:
            half = 0.5 * self.width - self.rise + 2 * self.rise * math.acos(math.sqrt(r)) / math.pi
        else:
            raise ValueError("a constant envelope never crosses a level")
        return self.center - half, self.center + half

    def reflected(self, t0: float, t1: float) -> "Envelope":
        return replace(self, center=t0 + t1 - self.center)


def envelope_value(e: Envelope, t: float) -> float:
    """Envelope value at ``t``; exactly 0 outside a sine-squared support."""
    if e.shape is Shape.SINE_SQUARED:
        x = t - e.center
        if abs(x) >= 0.5 * e.width:
            return 0.0
        c = math.cos(math.pi * x / e.width)
        return e.peak * c * c
    if e.shape is Shape.GAUSSIAN:
        u = (t - e.center) / e.width
        return e.peak * math.exp(-u * u)
    if e.shape is Shape.FLAT_TOP:
        x = abs(t - e.center) - 0.5 * e.width + e.rise
        if x <= 0:
            return float(e.peak)
        if x >= e.rise:
            return 0.0
        c = math.cos(0.5 * math.pi * x / e.rise)
        return e.peak * c * c
    return float(e.peak)


_OFF = Envelope(Shape.CONSTANT, 0.0)


@dataclass(frozen=True)
class Protocol:
    """Time-dependent fields defining one population-transfer run.

    Two-level kinds (direct chirp, SCRAP) use ``pump`` as the Rabi frequency
    and ``second`` as the Stark shift; the detuning is
    ``static_detuning + chirp(t) + stark(t)`` where the chirp is
    ``chirp_rate * (t - pump.center)`` clipped to ``[-chirp_limit, chirp_limit]``.
    STIRAP uses ``pump``/``second`` as pump/Stokes Rabi frequencies with the
    constant one-photon detunings ``static_detuning`` and ``stokes_detuning``.
    """

    kind: ProtocolKind
    pump: Envelope
    second: Envelope = _OFF
    span: tuple[float, float] = (0.0, 1.0)
    static_detuning: float = 0.0
    stokes_detuning: float = 0.0
    chirp_rate: float = 0.0
    chirp_limit: float = math.inf
    sequence: Sequence | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        if self.sequence is not None:
            object.__setattr__(self, "sequence", Sequence(self.sequence))
        t0, t1 = self.span
        if not (math.isfinite(t0) and math.isfinite(t1) and t1 > t0):
            raise ValueError("span must be a finite increasing interval")
        object.__setattr__(self, "span", (float(t0), float(t1)))

    @property
    def n_levels(self) -> int:
        return 3 if self.kind is ProtocolKind.STIRAP else 2

    def chirp(self, t: float) -> float:
        if self.chirp_rate == 0:
            return 0.0
        x = self.chirp_rate * (t - self.pump.center)
        return min(max(x, -self.chirp_limit), self.chirp_limit)

    def rabi(self, t: float) -> float:
        return self.pump(t)

    def detuning(self, t: float) -> float:
        return self.static_detuning + self.chirp(t) + self.second(t)

    def rabi_p(self, t: float) -> float:
        return self.pump(t)

    def rabi_s(self, t: float) -> float:
        return self.second(t)

    def parameters(self, t: float) -> tuple[float, float]:
        """``(rabi, detuning)`` for two-level kinds, ``(rabi_p, rabi_s)`` for STIRAP."""
        if self.kind is ProtocolKind.STIRAP:
            return self.pump(t), self.second(t)
        return self.pump(t), self.detuning(t)

    def trace(self, times) -> np.ndarray:
        return np.array([self.parameters(float(t)) for t in times])

    def hamiltonian(self, t: float) -> np.ndarray:
        if self.kind is ProtocolKind.STIRAP:
            return h3(self.static_detuning, self.stokes_detuning, self.pump(t), self.second(t))
        return h2(self.pump(t), self.detuning(t))

    def reversed(self) -> "Protocol":
        """Protocol with every field reflected in time about the span midpoint."""
        t0, t1 = self.span
        pump = self.pump.reflected(t0, t1)
        return replace(
            self,
            pump=pump,
            second=self.second.reflected(t0, t1),
            chirp_rate=-self.chirp_rate,
            sequence=None if self.sequence is None else (
                Sequence.INTUITIVE if self.sequence is Sequence.COUNTERINTUITIVE else Sequence.COUNTERINTUITIVE
            ),
        )


def stirap_schedule(sequence, tau: float, delay: float | None = None, peak_p: float = 1.0,
                    peak_s: float | None = None, delta_p: float = 0.0, delta_s: float = 0.0,
                    tau_p: float | None = None, tau_s: float | None = None,
                    shape: Shape = Shape.SINE_SQUARED, t_start: float = 0.0) -> Protocol:
    """Two delayed pulses, pump 1-2 and Stokes 2-3.

    ``delay`` separates the two pulse centres (default ``tau/2``); the
    earlier pulse starts at ``t_start``. Counterintuitive puts the Stokes
    pulse first. ``tau_p``/``tau_s`` override the individual lengths.
    """
    sequence = Sequence(sequence)
    shape = Shape(shape)
    if not tau > 0:
        raise ValueError("tau must be positive")
    delay = 0.5 * tau if delay is None else float(delay)
    peak_s = peak_p if peak_s is None else peak_s
    tau_p = tau if tau_p is None else tau_p
    tau_s = tau if tau_s is None else tau_s
    if delay < 0 or delay >= 0.5 * (tau_p + tau_s):
        raise GeometryError("need 0 <= delay < pulse length so that the pulses overlap")
    first_len, second_len = (tau_p, tau_s) if sequence is Sequence.INTUITIVE else (tau_s, tau_p)
    if shape is Shape.SINE_SQUARED:
        c_first = t_start + 0.5 * first_len
    else:
        c_first = t_start + first_len * math.sqrt(-math.log(GAUSSIAN_CUTOFF))
    c_second = c_first + delay
    first = Envelope(shape, peak_p if sequence is Sequence.INTUITIVE else peak_s, c_first, first_len)
    second = Envelope(shape, peak_s if sequence is Sequence.INTUITIVE else peak_p, c_second, second_len)
    pump, stokes = (first, second) if sequence is Sequence.INTUITIVE else (second, first)
    lo = min(pump.support[0], stokes.support[0])
    hi = max(pump.support[1], stokes.support[1])
    return Protocol(ProtocolKind.STIRAP, pump, stokes, (lo, hi), static_detuning=delta_p,
                    stokes_detuning=delta_s, sequence=sequence)


def chirp_schedule(kind, delta_in: float, pump: Envelope, stark: Envelope | None = None,
                   chirp_rate: float = 0.0, span: tuple[float, float] | None = None) -> Protocol:
    """Two-level protocol starting from the detuning ``delta_in < 0``.

    Direct chirp ramps the laser detuning linearly from ``delta_in`` to
    ``-delta_in`` around the pump centre. The SCRAP variants keep the laser
    detuning at ``delta_in`` and sweep the effective detuning with a Stark
    pulse; the pulse ordering is validated against the requested variant.
    """
    kind = ProtocolKind(kind)
    if not delta_in < 0:
        raise ValueError("delta_in must be negative")
    if kind is ProtocolKind.STIRAP:
        raise ValueError("use stirap_schedule for three-level protocols")
    if kind is ProtocolKind.DIRECT_CHIRP:
        if chirp_rate <= 0:
            raise ValueError("direct chirp needs a positive chirp rate")
        if span is None:
            ramp = abs(delta_in) / chirp_rate
            lo, hi = pump.support
            span = (min(lo, pump.center - ramp), max(hi, pump.center + ramp))
        return Protocol(kind, pump, _OFF, span, chirp_rate=chirp_rate, chirp_limit=abs(delta_in))

    if stark is None:
        raise ValueError("SCRAP needs a Stark pulse")
    if not stark.peak > abs(delta_in):
        raise GeometryError("Stark peak must exceed |delta_in| to sweep the detuning through resonance")
    t_up, t_down = stark.level_times(abs(delta_in))
    p_on, p_off = pump.support
    s_on, s_off = stark.support
    if kind is ProtocolKind.SCRAP_B:
        # mute crossing before the pump rises, real crossing under the pump
        ok = t_up < p_on < t_down < p_off and p_off > s_off
    else:
        # real crossing under the pump, mute crossing after the pump is off
        ok = p_on < t_up < p_off < t_down and s_off > p_off and s_on > p_on
    if not ok:
        raise GeometryError(f"pulse ordering does not realise {kind.value}")
    if span is None:
        span = (min(p_on, s_on), max(p_off, s_off))
    return Protocol(kind, pump, stark, span, static_detuning=delta_in)
