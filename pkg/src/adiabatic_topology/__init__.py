"""Eigenenergy-surface topology and adiabatic population transfer in two- and three-level systems."""

__version__ = "0.1.0"

from .model import (LevelScheme, SchemeKind, ThreeLevelParams, TwoLevelParams, UnitSystem, detunings_from_scheme,
                    effective_detuning, h2, h3)
from .propagator import (PropagationResult, adiabaticity_margin, adiabaticity_margin_2, adiabaticity_margin_3,
                         landau_zener_oracle, propagate)
from .pulses import Envelope, Protocol, ProtocolKind, Sequence, Shape, chirp_schedule, envelope_value, stirap_schedule
from .spectrum import (EigenSystem, ParameterPath, SurfaceGrid, TopologyCase, classify_case, conical_intersections,
                       eigen2_closed, eigen3_numeric, mixing_angle, surface_grid, track_path)
from .sweep import SweepResult, SweepSpec, boundary_curves, efficiency_map, region_prediction
