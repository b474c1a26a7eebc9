"""Ready-made protocols reproducing the standard transfer scenarios.

Two-level presets are in units of |delta_in|; three-level presets use
``omega_max = 1`` with detunings expressed through the two-photon detuning.
"""
from __future__ import annotations

import math

from .pulses import Envelope, Protocol, ProtocolKind, Sequence, chirp_schedule, stirap_schedule

# SCRAP Stark pulse centre offset from the pump centre, in pump lengths
STARK_OFFSET = 0.375


def landau_zener(chirp_rate: float = 1.0, rabi: float = 1.0, detuning_range: float = 50.0,
                 ramp_fraction: float = 0.2) -> Protocol:
    """Linear chirp across ``[-detuning_range, detuning_range]`` at constant coupling.

    The coupling is ramped on and off smoothly over the outer
    ``ramp_fraction`` of the run, far from resonance, so the finite window
    does not leave 1/detuning ringing in the final populations.
    """
    length = 2 * detuning_range / chirp_rate
    pump = Envelope("flat_top", rabi, 0.0, length, ramp_fraction * length)
    return chirp_schedule("direct_chirp", -detuning_range, pump, chirp_rate=chirp_rate,
                          span=(-0.5 * length, 0.5 * length))


def zero_field(detuning: float = 5.0, length: float = 10.0) -> Protocol:
    return Protocol(ProtocolKind.DIRECT_CHIRP, Envelope("constant", 0.0), span=(0.0, length),
                    static_detuning=detuning)


def direct_chirp(tau: float = 600.0, peak: float = 5.0) -> Protocol:
    """Laser chirp: the detuning ramps from -1 to +1 over the central half of the pump pulse."""
    pump = Envelope("sine_squared", peak, 0.0, tau)
    return chirp_schedule("direct_chirp", -1.0, pump, chirp_rate=4.0 / tau)


def scrap(kind: str, tau: float = 600.0, peak: float = 5.0, stark_peak: float = 2.0) -> Protocol:
    """Stark chirp: static detuning -1 swept through resonance by a positive Stark shift.

    ``scrap_b`` puts the Stark pulse first, ``scrap_c`` puts it last.
    """
    kind = ProtocolKind(kind)
    offset = -STARK_OFFSET if kind is ProtocolKind.SCRAP_B else STARK_OFFSET
    pump = Envelope("sine_squared", peak, 0.0, tau)
    stark = Envelope("sine_squared", stark_peak, offset * tau, tau)
    return chirp_schedule(kind, -1.0, pump, stark)


def stirap(sequence, delta_p: float = 0.0, delta_s: float = 0.0, area: float = 500.0,
           omega_max: float = 1.0, **kw) -> Protocol:
    """Equal sine-squared pulses of length ``area/omega_max`` delayed by half a length."""
    tau = area / omega_max
    return stirap_schedule(sequence, tau, 0.5 * tau, omega_max, omega_max, delta_p=delta_p, delta_s=delta_s, **kw)


def case_213(sequence, delta: float = 0.2, **kw) -> Protocol:
    return stirap(sequence, -0.5 * delta, -1.5 * delta, **kw)


def case_132(sequence, delta: float = 0.2, **kw) -> Protocol:
    return stirap(sequence, 1.5 * delta, 0.5 * delta, **kw)


def case_123(sequence, delta: float = 0.2, **kw) -> Protocol:
    return stirap(sequence, 0.5 * delta, -0.5 * delta, **kw)


def weak_long_pump(delta: float = 0.2, area: float = 500.0, pump_ratio: float = 0.15,
                   pump_length: float = 1.5, delay: float = 0.55, sequence=Sequence.COUNTERINTUITIVE) -> Protocol:
    """Case 123 with a longer, weaker pump whose peak stays below the rabi_s = 0 crossing.

    The Stokes pulse has unit peak and length ``area``; the pump has peak
    ``pump_ratio``, length ``pump_length * area`` and its centre sits
    ``delay * area`` after (counterintuitive) or before (intuitive) the Stokes
    centre. The defaults keep the pump on while the Stokes pulse decays
    through its own crossing, which keeps that avoided crossing open.
    """
    tau = area
    crossing = 2 * math.sqrt(0.5 * delta * delta)
    if pump_ratio >= crossing:
        raise ValueError("pump peak must stay below the rabi_s = 0 crossing")
    return stirap_schedule(sequence, tau, delay * tau, pump_ratio, 1.0, delta_p=0.5 * delta, delta_s=-0.5 * delta,
                           tau_p=pump_length * tau, tau_s=tau)
