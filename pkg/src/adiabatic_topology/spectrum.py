"""Eigenenergy surfaces, topology classification and adiabatic connectivity."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import ThreeLevelParams, TwoLevelParams, h3

#: gap below which two sheets are treated as exactly crossing (relative to max(1, |H|))
CROSSING_TOL = 1e-9
#: smallest acceptable maximal eigenvector overlap between consecutive path samples
MIN_OVERLAP = 0.9


class DegenerateCaseError(ValueError):
    """Zero-field energies coincide; adiabatic labels are undefined."""


class AmbiguousPathError(RuntimeError):
    """Consecutive path samples are too far apart for overlap tracking."""


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray


class TopologyCase(str, enum.Enum):
    C123 = "123"
    C132 = "132"
    C213 = "213"
    C231 = "231"
    C312 = "312"
    C321 = "321"
    DEGENERATE = "degenerate"

    @property
    def ordering(self) -> tuple[int, ...]:
        """Diabatic labels from the lowest to the highest zero-field energy."""
        if self is TopologyCase.DEGENERATE:
            raise DegenerateCaseError("degenerate case has no ordering")
        return tuple(int(c) for c in self.value)

    def reversed(self) -> "TopologyCase":
        if self is TopologyCase.DEGENERATE:
            return self
        return TopologyCase(self.value[::-1])


def _unpack3(delta_p, delta_s, rabi_p, rabi_s):
    if isinstance(delta_p, ThreeLevelParams):
        p = delta_p
        return p.delta_p, p.delta_s, p.rabi_p, p.rabi_s
    return delta_p, delta_s, rabi_p, rabi_s


def eigen2_closed(rabi, detuning):
    """Closed-form two-level eigenenergies ``(lower, upper)``.

    Works elementwise on arrays. The smaller-magnitude root is obtained from
    the determinant ``-rabi**2 / 4`` to avoid cancellation.
    """
    if isinstance(rabi, TwoLevelParams):
        rabi, detuning = rabi.rabi, rabi.detuning
    rabi = np.asarray(rabi, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    r = np.hypot(rabi, detuning)
    big = 0.5 * (np.abs(detuning) + r)
    det = -0.25 * rabi * rabi
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big > 0, det / np.where(big > 0, big, 1.0), 0.0)
    # big carries the sign of the detuning
    upper = np.where(detuning >= 0, big, -small)
    lower = np.where(detuning >= 0, small, -big)
    if upper.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def mixing_angle(rabi, detuning) -> float:
    """Mixing angle with ``tan(2*theta) = rabi/detuning`` and ``-pi <= 2*theta <= 0``.

    The upper adiabatic state is ``(cos theta, -sin theta)`` in the diabatic basis.
    """
    if isinstance(rabi, TwoLevelParams):
        rabi, detuning = rabi.rabi, rabi.detuning
    if rabi == 0 and detuning == 0:
        raise ValueError("mixing angle undefined at the conical intersection rabi = detuning = 0")
    # -0.0 for rabi = 0 selects the -pi branch when detuning > 0
    return 0.5 * math.atan2(-abs(float(rabi)), -float(detuning))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=-2)
    pick = np.take_along_axis(vectors, idx[..., None, :], axis=-2)
    return vectors * np.where(pick < 0, -1.0, 1.0)


def eigen3_numeric(delta_p, delta_s=None, rabi_p=0.0, rabi_s=0.0) -> EigenSystem:
    """Ascending eigenvalues and sign-fixed orthonormal eigenvectors of the 3x3 Hamiltonian."""
    h = h3(*_unpack3(delta_p, delta_s, rabi_p, rabi_s))
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values, _fix_signs(vectors))


def eigvals3(delta_p, delta_s, rabi_p, rabi_s) -> np.ndarray:
    """Ascending eigenvalues for broadcast arrays of parameters, shape ``(..., 3)``."""
    dp, ds, p, s = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (delta_p, delta_s, rabi_p, rabi_s)))
    h = np.zeros(dp.shape + (3, 3))
    h[..., 0, 1] = h[..., 1, 0] = 0.5 * p
    h[..., 1, 2] = h[..., 2, 1] = 0.5 * s
    h[..., 1, 1] = dp
    h[..., 2, 2] = dp - ds
    return np.linalg.eigvalsh(h)


def zero_field_energies(delta_p: float, delta_s: float) -> tuple[float, float, float]:
    return 0.0, float(delta_p), float(delta_p - delta_s)


def classify_case(delta_p: float, delta_s: float) -> TopologyCase:
    """Tag listing the diabatic states by ascending zero-field energy."""
    e = zero_field_energies(delta_p, delta_s)
    if e[0] == e[1] or e[0] == e[2] or e[1] == e[2]:
        return TopologyCase.DEGENERATE
    order = sorted(range(3), key=lambda k: e[k])
    return TopologyCase("".join(str(k + 1) for k in order))


def conical_intersections(delta_p: float, delta_s: float) -> list[tuple[float, float]]:
    """Exact sheet crossings on the boundary edges of the (rabi_p, rabi_s) quadrant.

    On ``rabi_s = 0`` level 3 decouples and meets a pump-dressed level at
    ``rabi_p = 2*sqrt(delta_s*(delta_s - delta_p))``; on ``rabi_p = 0`` level 1
    decouples and meets a Stokes-dressed level at
    ``rabi_s = 2*sqrt(delta_p*(delta_p - delta_s))``.
    """
    if delta_p * delta_s == 0:
        raise DegenerateCaseError("conical intersections need delta_p != 0 and delta_s != 0")
    points = []
    a = delta_s * (delta_s - delta_p)
    if a > 0:
        points.append((2.0 * math.sqrt(a), 0.0))
    b = delta_p * (delta_p - delta_s)
    if b > 0:
        points.append((0.0, 2.0 * math.sqrt(b)))
    return points


def _start_vectors(delta_p, delta_s):
    case = classify_case(delta_p, delta_s)
    if case is TopologyCase.DEGENERATE:
        raise DegenerateCaseError(f"zero-field energies degenerate for delta_p={delta_p}, delta_s={delta_s}")
    return case


def _gap_around(values: np.ndarray, j: int) -> float:
    gaps = [values[k + 1] - values[k] for k in (j - 1, j) if 0 <= k < len(values) - 1]
    return min(gaps)


@dataclass(frozen=True)
class ParameterPath:
    """Ordered (rabi_p, rabi_s) samples; consecutive samples must be close."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] < 2:
            raise ValueError("a path needs at least two (rabi_p, rabi_s) samples")
        if np.any(s < 0):
            raise ValueError("Rabi components must be nonnegative")
        object.__setattr__(self, "samples", s)

    def resampled(self, factor: int = 2) -> "ParameterPath":
        """Linear interpolation with ``factor`` times as many intervals."""
        n = len(self.samples)
        u = np.linspace(0, n - 1, factor * (n - 1) + 1)
        k = np.arange(n)
        return ParameterPath(np.column_stack([np.interp(u, k, self.samples[:, i]) for i in range(2)]))


def track_path(delta_p: float, delta_s: float, path, start_label: int,
               crossing_tol: float = CROSSING_TOL, min_overlap: float = MIN_OVERLAP) -> int:
    """Follow the adiabatic state that starts as ``start_label`` along ``path``.

    The branch is continued by maximal eigenvector overlap. Samples where the
    followed sheet is degenerate with a neighbour (an exact crossing) are
    skipped, so the label passes straight through mute resonances.

    Returns the 1-based diabatic label reached at the zero-field end point.
    """
    if not isinstance(path, ParameterPath):
        path = ParameterPath(path)
    _start_vectors(delta_p, delta_s)
    s = path.samples
    if s[0, 0] != 0 or s[0, 1] != 0 or s[-1, 0] != 0 or s[-1, 1] != 0:
        raise ValueError("path must start and end at zero fields")
    if start_label not in (1, 2, 3):
        raise ValueError("start_label must be 1, 2 or 3")
    ref = np.zeros(3)
    ref[start_label - 1] = 1.0
    for rabi_p, rabi_s in s[1:]:
        h = h3(delta_p, delta_s, rabi_p, rabi_s)
        values, vectors = np.linalg.eigh(h)
        ov = np.abs(vectors.T @ ref)
        j = int(np.argmax(ov))
        if _gap_around(values, j) < crossing_tol * max(1.0, np.linalg.norm(h, 2)):
            continue
        if ov[j] < min_overlap:
            raise AmbiguousPathError(
                f"maximal overlap {ov[j]:.3f} < {min_overlap} at (rabi_p, rabi_s)=({rabi_p}, {rabi_s}); sample the path more densely"
            )
        ref = vectors[:, j]
    return int(np.argmax(np.abs(ref))) + 1


@dataclass(frozen=True)
class SurfaceGrid:
    """Eigenvalue sheets on a (rabi_p, rabi_s) grid.

    ``sheets[i, j]`` holds the ascending eigenvalues at
    ``(axis_p[i], axis_s[j])``; ``labels[i, j, k]`` is the diabatic state
    connected to sheet ``k`` along the straight ray from the origin (0 when
    labels are undefined because the zero-field energies are degenerate).
    """

    delta_p: float
    delta_s: float
    axis_p: np.ndarray
    axis_s: np.ndarray
    sheets: np.ndarray
    labels: np.ndarray


def _edge_labels(delta_p, delta_s, rabis, edge: str, crossing_tol: float) -> np.ndarray:
    """Label permutations along one boundary edge, continued from the origin."""
    out = np.zeros((len(rabis), 3), dtype=int)
    refs = np.eye(3)
    perm = np.array(classify_case(delta_p, delta_s).ordering)
    for n, x in enumerate(rabis):
        h = h3(delta_p, delta_s, x, 0.0) if edge == "p" else h3(delta_p, delta_s, 0.0, x)
        values, vectors = np.linalg.eigh(h)
        gaps = np.diff(values)
        if np.min(gaps) >= crossing_tol * max(1.0, np.linalg.norm(h, 2)):
            ov = np.abs(vectors.T @ refs)  # ov[sheet, label]
            sheet_of = np.argmax(ov, axis=0)
            if len(set(sheet_of.tolist())) != 3 or np.min(ov[sheet_of, range(3)]) < MIN_OVERLAP:
                raise AmbiguousPathError(f"grid axis too coarse for label tracking near {x}")
            perm = np.empty(3, dtype=int)
            perm[sheet_of] = np.arange(1, 4)
            refs = vectors[:, sheet_of]
        out[n] = perm
    return out


def surface_grid(delta_p: float, delta_s: float, axis_p, axis_s, allow_degenerate: bool = False,
                 crossing_tol: float = CROSSING_TOL) -> SurfaceGrid:
    """Sample the three eigenenergy sheets and attach continuity labels.

    Interior points (both fields nonzero) carry no crossings, so their labels
    are the zero-field ordering. Boundary rows are tracked outward from the
    origin, which swaps labels across each conical intersection.
    """
    axis_p = np.asarray(axis_p, dtype=float)
    axis_s = np.asarray(axis_s, dtype=float)
    for ax in (axis_p, axis_s):
        if ax.ndim != 1 or ax.size == 0:
            raise ValueError("grid axes must be nonempty 1-D arrays")
        if ax[0] != 0 or np.any(np.diff(ax) <= 0):
            raise ValueError("grid axes must be strictly ascending and start at 0")
    pp, ss = np.meshgrid(axis_p, axis_s, indexing="ij")
    sheets = eigvals3(delta_p, delta_s, pp, ss)
    labels = np.zeros(sheets.shape, dtype=int)
    case = classify_case(delta_p, delta_s)
    if case is TopologyCase.DEGENERATE:
        if not allow_degenerate:
            raise DegenerateCaseError(f"labels undefined: degenerate zero-field energies for ({delta_p}, {delta_s})")
    else:
        labels[...] = case.ordering
        labels[:, 0] = _edge_labels(delta_p, delta_s, axis_p, "p", crossing_tol)
        labels[0, :] = _edge_labels(delta_p, delta_s, axis_s, "s", crossing_tol)
    return SurfaceGrid(float(delta_p), float(delta_s), axis_p, axis_s, sheets, labels)
