"""Detuning-plane sweeps of final populations and the topology-predicted boundaries."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .model import h3
from .propagator import DEFAULT_TOL, IntegrationError, propagate
from .pulses import Protocol, ProtocolKind, Sequence, Shape, stirap_schedule
from .spectrum import DegenerateCaseError, ParameterPath, TopologyCase, classify_case, track_path

#: marker for grid points whose propagation failed
MISSING = -1.0


@dataclass(frozen=True)
class SweepSpec:
    """A grid of one-photon detunings swept with a fixed STIRAP pulse pair."""

    delta_p_axis: tuple[float, ...]
    delta_s_axis: tuple[float, ...]
    sequence: Sequence = Sequence.COUNTERINTUITIVE
    tau: float = 500.0
    delay: float | None = None
    peak_p: float = 1.0
    peak_s: float = 1.0
    shape: Shape = Shape.SINE_SQUARED
    initial_state: int = 1
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "delta_p_axis", tuple(float(x) for x in self.delta_p_axis))
        object.__setattr__(self, "delta_s_axis", tuple(float(x) for x in self.delta_s_axis))
        object.__setattr__(self, "sequence", Sequence(self.sequence))
        object.__setattr__(self, "shape", Shape(self.shape))
        if not self.delta_p_axis or not self.delta_s_axis:
            raise ValueError("sweep axes must be nonempty")
        for ax in (self.delta_p_axis, self.delta_s_axis):
            if any(b <= a for a, b in zip(ax, ax[1:])):
                raise ValueError("sweep axes must be strictly ascending")
        if not self.tau > 0 or not self.peak_p > 0 or not self.peak_s > 0:
            raise ValueError("tau and peaks must be positive")
        if self.initial_state not in (1, 2, 3):
            raise ValueError("initial_state must be 1, 2 or 3")

    def protocol(self, delta_p: float, delta_s: float) -> Protocol:
        return stirap_schedule(self.sequence, self.tau, self.delay, self.peak_p, self.peak_s,
                               delta_p=delta_p, delta_s=delta_s, shape=self.shape)

    @property
    def omega_max(self) -> float:
        return max(self.peak_p, self.peak_s)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta_p_axis"] = list(self.delta_p_axis)
        d["delta_s_axis"] = list(self.delta_s_axis)
        d["sequence"] = self.sequence.value
        d["shape"] = self.shape.value
        return d


@dataclass
class SweepResult:
    """Final populations on the grid, indexed ``[i_p, i_s]``.

    Failed points hold :data:`MISSING` in every population grid.
    """

    spec: SweepSpec
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    margins: np.ndarray
    norm_drift: np.ndarray
    boundaries: dict
    failures: list = field(default_factory=list)

    @property
    def populations(self) -> np.ndarray:
        return np.stack([self.p1, self.p2, self.p3], axis=-1)

    @property
    def failed_fraction(self) -> float:
        return len(self.failures) / self.p1.size


def _run_point(args):
    spec, dp, ds = args
    try:
        r = propagate(spec.protocol(dp, ds), spec.initial_state, tol=spec.tol)
    except (IntegrationError, ArithmeticError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return (r.final_populations, r.adiabaticity_margin, r.norm_drift), None


def efficiency_map(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Propagate every grid point; assembly order is fixed regardless of ``workers``."""
    points = [(spec, dp, ds) for dp in spec.delta_p_axis for ds in spec.delta_s_axis]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_point, points, chunksize=max(1, len(points) // (8 * workers))))
    else:
        outcomes = [_run_point(p) for p in points]
    shape = (len(spec.delta_p_axis), len(spec.delta_s_axis))
    pops = np.full(shape + (3,), MISSING)
    margins = np.full(shape, math.nan)
    drift = np.full(shape, math.nan)
    failures = []
    for n, (value, error) in enumerate(outcomes):
        i, j = divmod(n, shape[1])
        if value is None:
            failures.append((spec.delta_p_axis[i], spec.delta_s_axis[j], error))
            continue
        pops[i, j], margins[i, j], drift[i, j] = value
    bounds = boundary_curves(spec.omega_max, spec.delta_p_axis, spec.delta_s_axis)
    return SweepResult(spec, pops[..., 0], pops[..., 1], pops[..., 2], margins, drift, bounds, failures)


def _runs(points: np.ndarray, keep: np.ndarray) -> list[np.ndarray]:
    out = []
    start = None
    for k, flag in enumerate(list(keep) + [False]):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            if k - start >= 1:
                out.append(points[start:k])
            start = None
    return out


def boundary_curves(omega_max: float, delta_p_axis, delta_s_axis) -> dict[str, list[np.ndarray]]:
    """Polylines, as ``(delta_p, delta_s)`` columns, bounding the efficient-transfer regions.

    ``delta_p_zero`` / ``delta_s_zero`` are the straight lines; ``hyperbola_p``
    is ``delta_s = delta_p - omega_max**2 / (4 delta_p)`` sampled on the pump
    axis and ``hyperbola_s`` is ``delta_p = delta_s - omega_max**2 / (4 delta_s)``
    sampled on the Stokes axis. Each hyperbola branch is split at its
    singularity and clipped to the sweep window.
    """
    if not omega_max > 0:
        raise ValueError("omega_max must be positive")
    ap = np.asarray(delta_p_axis, dtype=float)
    as_ = np.asarray(delta_s_axis, dtype=float)
    w2 = omega_max * omega_max
    out = {
        "delta_p_zero": [np.column_stack([np.zeros_like(as_), as_])] if ap[0] <= 0 <= ap[-1] else [],
        "delta_s_zero": [np.column_stack([ap, np.zeros_like(ap)])] if as_[0] <= 0 <= as_[-1] else [],
    }
    with np.errstate(divide="ignore"):
        ds = np.where(ap != 0, ap - w2 / (4 * np.where(ap != 0, ap, 1.0)), np.nan)
        dp = np.where(as_ != 0, as_ - w2 / (4 * np.where(as_ != 0, as_, 1.0)), np.nan)
    curves = {"hyperbola_p": (np.column_stack([ap, ds]), ap, ds, as_),
              "hyperbola_s": (np.column_stack([dp, as_]), as_, dp, ap)}
    for name, (pts, base, other, other_axis) in curves.items():
        inside = (base != 0) & np.isfinite(other) & (other >= other_axis[0]) & (other <= other_axis[-1])
        runs = []
        for sign in (-1, 1):
            runs += _runs(pts, inside & (np.sign(base) == sign))
        out[name] = runs
    return out


def boundary_warnings(omega_max: float, delta_p_axis, delta_s_axis) -> list[str]:
    """Warn when a window misses the points where the hyperbolas meet the axes (|delta| = omega_max/2)."""
    half = 0.5 * omega_max
    msgs = []
    for name, ax in (("delta_p", delta_p_axis), ("delta_s", delta_s_axis)):
        if min(ax) > -half or max(ax) < half:
            msgs.append(f"{name} axis [{min(ax)}, {max(ax)}] does not cover the hyperbola vertices at +-{half}")
    return msgs


def _edge_levels(delta_p, delta_s, edge: str, amp: float):
    """Sorted ``(energy, tag)`` on a boundary edge; tag is the isolated label or 'lo'/'hi' of the dressed pair."""
    h = h3(delta_p, delta_s, amp, 0.0) if edge == "pump" else h3(delta_p, delta_s, 0.0, amp)
    iso = 3 if edge == "pump" else 1
    pair = [k for k in (1, 2, 3) if k != iso]
    block = h[np.ix_([k - 1 for k in pair], [k - 1 for k in pair])]
    lo, hi = np.linalg.eigvalsh(block)
    levels = sorted([(h[iso - 1, iso - 1], iso), (lo, "lo"), (hi, "hi")], key=lambda x: x[0])
    energies = [e for e, _ in levels]
    scale = max(1.0, abs(energies[0]), abs(energies[-1]))
    if min(np.diff(energies)) <= 1e-12 * scale:
        raise ValueError(f"edge amplitude {amp} sits on a conical intersection (hyperbola boundary)")
    pair_by_energy = sorted(pair, key=lambda k: h[k - 1, k - 1])
    return [tag for _, tag in levels], iso, pair_by_energy


def _rank_walk(delta_p, delta_s, start: int, first_edge: str, first_amp: float, second_amp: float) -> int:
    tags, iso, pair = _edge_levels(delta_p, delta_s, first_edge, first_amp)
    if start == iso:
        tag = iso
    else:
        tag = "lo" if start == pair[0] else "hi"
    rank = tags.index(tag)
    second_edge = "stokes" if first_edge == "pump" else "pump"
    tags, iso, pair = _edge_levels(delta_p, delta_s, second_edge, second_amp)
    tag = tags[rank]
    if tag == "lo":
        return pair[0]
    if tag == "hi":
        return pair[1]
    return tag


def region_prediction(delta_p: float, delta_s: float, omega_max: float, sequence,
                      initial_state: int = 1, stokes_max: float | None = None) -> int:
    """Adiabatically predicted final level for a delayed pulse pair.

    The (rabi_p, rabi_s) path runs out along one boundary edge (only the
    first pulse on), through the interior, and back along the other edge.
    Sheets cross only on the edges, so the sorted rank of the followed state
    is carried unchanged through the interior; whether a crossing is passed
    on an edge is decided by comparing the edge amplitude with the conical
    intersection position, i.e. by the side of the corresponding hyperbola.

    ``omega_max`` is the pump amplitude on its edge and ``stokes_max`` the
    Stokes amplitude on its edge (default ``omega_max``). A result equal to
    ``initial_state`` means no transfer.
    """
    sequence = Sequence(sequence)
    if delta_p * delta_s == 0:
        raise DegenerateCaseError("prediction undefined on the lines delta_p = 0 or delta_s = 0")
    stokes_max = omega_max if stokes_max is None else stokes_max
    if sequence is Sequence.INTUITIVE:
        args = ("pump", omega_max, stokes_max)
    else:
        args = ("stokes", stokes_max, omega_max)
    if classify_case(delta_p, delta_s) is TopologyCase.DEGENERATE:
        # two-photon resonance: accept only if both sides of delta = 0 agree
        eps = 1e-9 * max(abs(delta_p), abs(delta_s))
        sides = {_rank_walk(delta_p, delta_s + e, initial_state, *args) for e in (-eps, eps)}
        if len(sides) != 1:
            raise DegenerateCaseError("prediction differs on the two sides of delta = 0")
        return sides.pop()
    return _rank_walk(delta_p, delta_s, initial_state, *args)


def edge_amplitudes(protocol: Protocol) -> tuple[float, float]:
    """Pump amplitude when the Stokes pulse first switches on and Stokes amplitude when the pump is off.

    For the counterintuitive order the roles swap: the Stokes amplitude when
    the pump switches on, then the pump amplitude when the Stokes is off.
    Returned as ``(pump_edge, stokes_edge)``.
    """
    if protocol.kind is not ProtocolKind.STIRAP:
        raise ValueError("edge amplitudes are defined for STIRAP protocols")
    p_on, p_off = protocol.pump.support
    s_on, s_off = protocol.second.support
    if p_on <= s_on:
        return protocol.pump(s_on), protocol.second(p_off)
    return protocol.pump(s_off), protocol.second(p_on)


def predict_protocol(protocol: Protocol, initial_state: int = 1) -> int:
    """:func:`region_prediction` for an arbitrary STIRAP protocol."""
    pump_edge, stokes_edge = edge_amplitudes(protocol)
    p_on = protocol.pump.support[0]
    s_on = protocol.second.support[0]
    seq = Sequence.INTUITIVE if p_on < s_on else Sequence.COUNTERINTUITIVE
    return region_prediction(protocol.static_detuning, protocol.stokes_detuning, pump_edge, seq,
                             initial_state, stokes_max=stokes_edge)


def protocol_path(protocol: Protocol, n_samples: int = 2001) -> ParameterPath:
    """The ``(rabi_p, rabi_s)`` curve traced by a STIRAP protocol over its span."""
    if protocol.kind is not ProtocolKind.STIRAP:
        raise ValueError("only three-level protocols trace a path in the (rabi_p, rabi_s) plane")
    t = np.linspace(*protocol.span, n_samples)
    return ParameterPath(np.column_stack([protocol.pump.values(t), protocol.second.values(t)]))


def track_protocol(protocol: Protocol, initial_state: int = 1, n_samples: int = 2001) -> int:
    """Final diabatic state reached by adiabatically following ``initial_state`` along the protocol path."""
    return track_path(protocol.static_detuning, protocol.stokes_detuning, protocol_path(protocol, n_samples),
                      initial_state)
