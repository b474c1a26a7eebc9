"""Time-dependent Schroedinger propagation and adiabaticity diagnostics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from .pulses import Protocol, ProtocolKind, Shape, envelope_value

DEFAULT_TOL = 1e-10
DEFAULT_SAMPLES = 1024
MARGIN_SAMPLES = 4097
# central-difference step as a fraction of the span
# DOP853 refuses relative tolerances below this
RTOL_FLOOR = 100 * np.finfo(float).eps
DIFF_FRACTION = 2.0 ** -16


class IntegrationError(RuntimeError):
    """The integrator failed or its step size underflowed."""


class DegeneracyWarning(UserWarning):
    """Adiabaticity is undefined at some sampled times (gap closes off the declared crossings)."""


@dataclass
class PropagationResult:
    times: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    adiabaticity_margin: float
    norm_drift: float
    n_steps: int = 0

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_populations(self) -> np.ndarray:
        return self.populations[-1]


def basis_state(label: int, n: int) -> np.ndarray:
    """Diabatic state ``|label>`` (1-based) as a complex vector."""
    if not 1 <= label <= n:
        raise ValueError(f"label must be in 1..{n}")
    psi = np.zeros(n, dtype=complex)
    psi[label - 1] = 1.0
    return psi


def _rhs(protocol: Protocol):
    pump, second = protocol.pump, protocol.second
    if protocol.kind is ProtocolKind.STIRAP:
        dp = protocol.static_detuning
        dd = protocol.static_detuning - protocol.stokes_detuning

        def f(t, y):
            p = 0.5 * envelope_value(pump, t)
            s = 0.5 * envelope_value(second, t)
            a, b, c = y
            return np.array([-1j * (p * b), -1j * (p * a + dp * b + s * c), -1j * (s * b + dd * c)])
    else:
        detuning = protocol.detuning

        def f(t, y):
            o = 0.5 * envelope_value(pump, t)
            d = detuning(t)
            a, b = y
            return np.array([-1j * (o * b), -1j * (o * a + d * b)])
    return f


def _max_step(protocol: Protocol) -> float:
    widths = []
    for e in (protocol.pump, protocol.second):
        if e.peak > 0 and e.shape is not Shape.CONSTANT:
            widths.append(e.rise if e.shape is Shape.FLAT_TOP else e.width)
    span = protocol.span[1] - protocol.span[0]
    # a pulse narrower than one step could be stepped over unseen
    return min([span] + [0.25 * w for w in widths])


def propagate(protocol: Protocol, psi0=None, tol: float = DEFAULT_TOL, n_samples: int = DEFAULT_SAMPLES,
              margin: bool = True) -> PropagationResult:
    """Integrate ``i dpsi/dt = H(t) psi`` over the protocol span.

    Uses the adaptive Dormand-Prince 8(5,3) pair. ``tol`` is the error
    budget for the whole run: the per-step tolerance (``rtol = atol``) is
    ``tol / max(1, span length)``, floored at the solver's limit of 100
    machine epsilons. The state is never renormalised, so ``norm_drift``
    measures integration quality. ``psi0`` may be a vector or a 1-based
    level label (default |1>).

    Raises
    ------
    IntegrationError
        If the solver fails or the step falls below ``1e-12 * span``.
    """
    n = protocol.n_levels
    if psi0 is None:
        psi0 = 1
    if isinstance(psi0, (int, np.integer)):
        psi0 = basis_state(int(psi0), n)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (n,):
        raise ValueError(f"initial state must have {n} components")
    if abs(np.vdot(psi0, psi0).real - 1) > 1e-12:
        raise ValueError("initial state must be normalised")
    t0, t1 = protocol.span
    length = t1 - t0
    times = np.linspace(t0, t1, n_samples)
    states = np.empty((n_samples, n), dtype=complex)
    states[0] = psi0
    step_tol = max(tol / max(1.0, length), RTOL_FLOOR)
    solver = DOP853(_rhs(protocol), t0, psi0, t1, rtol=step_tol, atol=step_tol, max_step=_max_step(protocol))
    k = 1
    steps = 0
    while solver.status == "running":
        message = solver.step()
        steps += 1
        if solver.status == "failed":
            raise IntegrationError(f"integration failed at t={solver.t}: {message}")
        if solver.status == "running" and solver.t - solver.t_old < 1e-12 * length:
            raise IntegrationError(f"step size underflow at t={solver.t}")
        stop = k
        while stop < n_samples and times[stop] < solver.t:
            stop += 1
        if solver.status == "finished":
            stop = n_samples - 1
        if stop > k:
            states[k:stop] = solver.dense_output()(times[k:stop]).T
            k = stop
    states[-1] = solver.y
    populations = np.abs(states) ** 2
    norm_drift = float(np.max(np.abs(populations.sum(axis=1) - 1.0)))
    if margin:
        m = adiabaticity_margin(protocol)
    else:
        m = math.nan
    return PropagationResult(times, states, populations, m, norm_drift, steps)


def _diff(f, t: np.ndarray, h: float):
    vals = np.array([f(x) for x in t])
    deriv = (np.array([f(x + h) for x in t]) - np.array([f(x - h) for x in t])) / (2 * h)
    return vals, deriv


def adiabaticity_margin_2(rabi, detuning, span, n_samples: int = MARGIN_SAMPLES) -> float:
    """Smallest ratio of the eigenvalue gap to the mixing-angle rate.

    ``rabi`` and ``detuning`` are callables of time. The mixing-angle rate is
    ``(rabi' * detuning - rabi * detuning') / (2 * (rabi**2 + detuning**2))``
    with derivatives from central differences. Returns ``inf`` if the angle
    never moves. Interior samples where both fields vanish are reported with
    a :class:`DegeneracyWarning` and left out of the minimum.
    """
    t0, t1 = span
    t = np.linspace(t0, t1, n_samples)
    h = (t1 - t0) * DIFF_FRACTION
    om, dom = _diff(rabi, t, h)
    de, dde = _diff(detuning, t, h)
    r2 = om * om + de * de
    num = 2.0 * r2 ** 1.5
    den = np.abs(dom * de - om * dde)
    singular = r2 == 0
    if np.any(singular[1:-1]):
        warnings.warn(f"gap closes at t = {t[1:-1][singular[1:-1]].tolist()}", DegeneracyWarning, stacklevel=2)
    ok = ~singular & (den > 0)
    if not np.any(ok):
        return math.inf
    return float(np.min(num[ok] / den[ok]))


def _hamiltonians(protocol: Protocol, t: np.ndarray) -> np.ndarray:
    p = protocol.pump.values(t)
    s = protocol.second.values(t)
    if protocol.kind is ProtocolKind.STIRAP:
        h = np.zeros(t.shape + (3, 3))
        h[..., 0, 1] = h[..., 1, 0] = 0.5 * p
        h[..., 1, 2] = h[..., 2, 1] = 0.5 * s
        h[..., 1, 1] = protocol.static_detuning
        h[..., 2, 2] = protocol.static_detuning - protocol.stokes_detuning
        return h
    d = np.array([protocol.detuning(float(x)) for x in t])
    h = np.zeros(t.shape + (2, 2))
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * p
    h[..., 1, 1] = d
    return h


def adiabaticity_margin_3(protocol: Protocol, span=None, n_samples: int = MARGIN_SAMPLES,
                          gap_floor: float = 1e-12) -> float:
    """Smallest gap-to-nonadiabatic-coupling ratio over adjacent sheet pairs.

    The coupling between sorted eigenvectors ``i`` and ``j`` is
    ``|<v_i|dH/dt|v_j>| / gap``, so the ratio is ``gap**2 / |<v_i|dH/dt|v_j>|``;
    this form is independent of eigenvector signs. Exact crossings with one
    field switched off are the declared mute resonances and are skipped;
    other gaps below ``gap_floor`` raise a :class:`DegeneracyWarning`.
    """
    t0, t1 = protocol.span if span is None else span
    t = np.linspace(t0, t1, n_samples)
    dt = (t1 - t0) * DIFF_FRACTION
    hm = _hamiltonians(protocol, t)
    dh = (_hamiltonians(protocol, t + dt) - _hamiltonians(protocol, t - dt)) / (2 * dt)
    values, vectors = np.linalg.eigh(hm)
    # couplings[n, i, j] = <v_i| dH |v_j>
    couplings = np.einsum("nki,nkl,nlj->nij", vectors, dh, vectors)
    if protocol.kind is ProtocolKind.STIRAP:
        on_edge = (hm[:, 0, 1] == 0) | (hm[:, 1, 2] == 0)
    else:
        on_edge = hm[:, 0, 1] == 0
    best = math.inf
    bad = []
    for i in range(values.shape[1] - 1):
        gap = values[:, i + 1] - values[:, i]
        c = np.abs(couplings[:, i, i + 1])
        degenerate = gap < gap_floor
        bad.extend(t[degenerate & ~on_edge].tolist())
        ok = ~degenerate & (c > 0)
        if np.any(ok):
            best = min(best, float(np.min(gap[ok] ** 2 / c[ok])))
    if bad:
        warnings.warn(f"unexpected degeneracy at t = {sorted(set(bad))}", DegeneracyWarning, stacklevel=2)
    return best


def adiabaticity_margin(protocol: Protocol, n_samples: int = MARGIN_SAMPLES) -> float:
    """Protocol-level margin: the two-level criterion or its three-level generalisation."""
    if protocol.kind is ProtocolKind.STIRAP:
        return adiabaticity_margin_3(protocol, n_samples=n_samples)
    return adiabaticity_margin_2(protocol.rabi, protocol.detuning, protocol.span, n_samples)


def landau_zener_oracle(rabi: float, chirp_rate: float) -> float:
    """Asymptotic transfer probability ``1 - exp(-pi * rabi**2 / (2 * chirp_rate))``."""
    if rabi < 0 or chirp_rate <= 0:
        raise ValueError("need rabi >= 0 and chirp_rate > 0")
    return -math.expm1(-math.pi * rabi * rabi / (2.0 * chirp_rate))
