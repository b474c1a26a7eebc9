"""TOML run configuration: schema validation, presets and object builders.

Every section and key is checked against a fixed schema so that a typo is
reported instead of silently falling back to a default. Floats are kept as
Python floats throughout, so a value written with 17 significant digits
survives the round trip exactly.
"""
from __future__ import annotations

import copy
import sys
from dataclasses import replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import presets
from .model import SchemeKind
from .pulses import Envelope, Protocol, ProtocolKind, Sequence, chirp_schedule, stirap_schedule
from .sweep import SweepSpec


class ConfigError(ValueError):
    """Malformed, incomplete or inconsistent configuration."""


_NUM = (int, float)
_ENVELOPE = {"shape": str, "peak": _NUM, "center": _NUM, "width": _NUM, "rise": _NUM}

SCHEMA = {
    "preset": str,
    "units": {"reference_frequency": _NUM, "name": str},
    "system": {"scheme": str, "delta_p": _NUM, "delta_s": _NUM, "initial_state": int},
    "grid": {"rabi_p_max": _NUM, "rabi_s_max": _NUM, "n_p": int, "n_s": int},
    "protocol": {
        "kind": str, "sequence": str, "tau": _NUM, "delay": _NUM, "peak_p": _NUM, "peak_s": _NUM,
        "tau_p": _NUM, "tau_s": _NUM, "shape": str, "delta_in": _NUM, "chirp_rate": _NUM,
        "static_detuning": _NUM, "span": list, "pump": _ENVELOPE, "stark": _ENVELOPE,
    },
    "sweep": {
        "delta_p_min": _NUM, "delta_p_max": _NUM, "n_p": int,
        "delta_s_min": _NUM, "delta_s_max": _NUM, "n_s": int,
        "sequence": str, "tau": _NUM, "delay": _NUM, "peak_p": _NUM, "peak_s": _NUM, "shape": str,
    },
    "boundaries": {"omega_max": _NUM},
    "numerics": {"tol": _NUM, "samples": int, "workers": int},
    "output": {"dir": str, "pgm": bool},
}

DEFAULTS = {
    "units": {"reference_frequency": 1.0, "name": "reference frequency"},
    "system": {"scheme": "lambda"},
    "numerics": {"tol": 1e-10, "samples": 1024, "workers": 1},
    "output": {"dir": "out", "pgm": False},
}


def _sweep_axes(lo, hi, n):
    return {"delta_p_min": lo, "delta_p_max": hi, "n_p": n, "delta_s_min": lo, "delta_s_max": hi, "n_s": n}


PRESETS = {
    "case-213": {"system": {"delta_p": -0.5, "delta_s": -1.5},
                 "grid": {"rabi_p_max": 4.0, "rabi_s_max": 4.0, "n_p": 81, "n_s": 81}},
    "case-132": {"system": {"delta_p": 1.5, "delta_s": 0.5},
                 "grid": {"rabi_p_max": 4.0, "rabi_s_max": 4.0, "n_p": 81, "n_s": 81}},
    "case-123": {"system": {"delta_p": 0.5, "delta_s": -0.5},
                 "grid": {"rabi_p_max": 4.0, "rabi_s_max": 4.0, "n_p": 81, "n_s": 81}},
    "stirap-resonant": {
        "system": {"delta_p": 0.0, "delta_s": 0.0},
        "protocol": {"kind": "stirap", "sequence": "counterintuitive", "tau": 500.0, "delay": 250.0,
                     "peak_p": 1.0, "peak_s": 1.0, "shape": "sine_squared"},
    },
    "landau-zener": {
        "protocol": {"kind": "direct_chirp", "delta_in": -50.0, "chirp_rate": 1.0, "span": [-50.0, 50.0],
                     "pump": {"shape": "flat_top", "peak": 1.0, "center": 0.0, "width": 100.0, "rise": 20.0}},
    },
    "zero-field": {
        "protocol": {"kind": "direct_chirp", "static_detuning": 5.0, "span": [0.0, 10.0],
                     "pump": {"shape": "constant", "peak": 0.0}},
    },
    "direct-chirp": {
        "protocol": {"kind": "direct_chirp", "delta_in": -1.0, "chirp_rate": 4.0 / 600.0,
                     "pump": {"shape": "sine_squared", "peak": 5.0, "center": 0.0, "width": 600.0}},
    },
    "scrap-b": {
        "protocol": {"kind": "scrap_b", "delta_in": -1.0,
                     "pump": {"shape": "sine_squared", "peak": 5.0, "center": 0.0, "width": 600.0},
                     "stark": {"shape": "sine_squared", "peak": 2.0, "center": -225.0, "width": 600.0}},
    },
    "scrap-c": {
        "protocol": {"kind": "scrap_c", "delta_in": -1.0,
                     "pump": {"shape": "sine_squared", "peak": 5.0, "center": 0.0, "width": 600.0},
                     "stark": {"shape": "sine_squared", "peak": 2.0, "center": 225.0, "width": 600.0}},
    },
    "plane-500": {
        "sweep": dict(_sweep_axes(-1.2, 1.2, 41), sequence="counterintuitive", tau=500.0, delay=250.0,
                      peak_p=1.0, peak_s=1.0, shape="sine_squared"),
        "output": {"pgm": True},
    },
    "plane-100": {
        "sweep": dict(_sweep_axes(-1.2, 1.2, 41), sequence="counterintuitive", tau=100.0, delay=50.0,
                      peak_p=1.0, peak_s=1.0, shape="sine_squared"),
        "output": {"pgm": True},
    },
}


def _check(doc: dict, schema: dict, where: str) -> None:
    for key, value in doc.items():
        path = f"{where}.{key}" if where else key
        if key not in schema:
            raise ConfigError(f"unknown key '{path}'")
        expected = schema[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{path}' must be a section")
            _check(value, expected, path)
        elif isinstance(value, bool) and expected is not bool:
            raise ConfigError(f"'{path}' has the wrong type")
        elif not isinstance(value, expected):
            raise ConfigError(f"'{path}' has the wrong type")


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve(doc: dict, overrides: dict | None = None) -> dict:
    """Validate ``doc``, expand its preset and apply defaults and ``overrides``."""
    _check(doc, SCHEMA, "")
    cfg = _merge(DEFAULTS, {})
    name = doc.get("preset")
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset '{name}'; choose from {', '.join(sorted(PRESETS))}")
        cfg = _merge(cfg, PRESETS[name])
    cfg = _merge(cfg, doc)
    if overrides:
        cfg = _merge(cfg, overrides)
    _check(cfg, SCHEMA, "")
    return cfg


def load(path: str | None, preset: str | None = None, overrides: dict | None = None) -> dict:
    doc = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from exc
    if preset is not None:
        doc = {**doc, "preset": preset}
    return resolve(doc, overrides)


def _need(cfg: dict, section: str, *keys):
    sec = cfg.get(section)
    if sec is None:
        raise ConfigError(f"missing section [{section}]")
    missing = [k for k in keys if k not in sec]
    if missing:
        raise ConfigError(f"[{section}] is missing {', '.join(missing)}")
    return sec


def detunings(cfg: dict) -> tuple[float, float]:
    s = _need(cfg, "system", "delta_p", "delta_s")
    return float(s["delta_p"]), float(s["delta_s"])


def initial_state(cfg: dict, n_levels: int) -> int:
    try:
        scheme = SchemeKind(cfg["system"]["scheme"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    k = cfg["system"].get("initial_state", 2 if scheme is SchemeKind.VEE and n_levels == 3 else 1)
    if not 1 <= k <= n_levels:
        raise ConfigError(f"initial_state must lie in 1..{n_levels}")
    return k


def grid_axes(cfg: dict) -> tuple[np.ndarray, np.ndarray]:
    g = _need(cfg, "grid", "rabi_p_max", "rabi_s_max", "n_p", "n_s")
    if g["n_p"] < 1 or g["n_s"] < 1:
        raise ConfigError("grid sizes must be at least 1")
    if g["rabi_p_max"] <= 0 or g["rabi_s_max"] <= 0:
        raise ConfigError("grid extents must be positive")
    return np.linspace(0.0, g["rabi_p_max"], g["n_p"]), np.linspace(0.0, g["rabi_s_max"], g["n_s"])


def _envelope(d: dict) -> Envelope:
    if "shape" not in d or "peak" not in d:
        raise ConfigError("envelopes need shape and peak")
    return Envelope(d["shape"], float(d["peak"]), float(d.get("center", 0.0)), float(d.get("width", 1.0)),
                    float(d.get("rise", 0.0)))


def build_protocol(cfg: dict):
    p = _need(cfg, "protocol", "kind")
    try:
        kind = ProtocolKind(p["kind"])
        span = p.get("span")
        if span is not None:
            if len(span) != 2:
                raise ConfigError("span must be [t0, t1]")
            span = (float(span[0]), float(span[1]))
        if kind is ProtocolKind.STIRAP:
            dp, ds = detunings(cfg)
            proto = stirap_schedule(p.get("sequence", "counterintuitive"), float(p.get("tau", 500.0)),
                                    p.get("delay"), float(p.get("peak_p", 1.0)), p.get("peak_s"), dp, ds,
                                    p.get("tau_p"), p.get("tau_s"), p.get("shape", "sine_squared"))
            if span is not None:
                proto = replace(proto, span=span)
            return proto
        if "pump" not in p:
            raise ConfigError("two-level protocols need a [protocol.pump] envelope")
        pump = _envelope(p["pump"])
        rate = float(p.get("chirp_rate", 0.0))
        if kind is ProtocolKind.DIRECT_CHIRP and rate == 0.0:
            if span is None:
                raise ConfigError("an unchirped protocol needs an explicit span")
            proto = Protocol(kind, pump, span=span)
        else:
            if "delta_in" not in p:
                raise ConfigError("[protocol] is missing delta_in")
            stark = _envelope(p["stark"]) if "stark" in p else None
            proto = chirp_schedule(kind, float(p["delta_in"]), pump, stark, chirp_rate=rate, span=span)
        return replace(proto, static_detuning=proto.static_detuning + float(p.get("static_detuning", 0.0)))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def build_sweep(cfg: dict) -> SweepSpec:
    s = _need(cfg, "sweep", "delta_p_min", "delta_p_max", "n_p", "delta_s_min", "delta_s_max", "n_s")
    if s["n_p"] < 1 or s["n_s"] < 1:
        raise ConfigError("sweep sizes must be at least 1")
    ap = np.linspace(s["delta_p_min"], s["delta_p_max"], s["n_p"])
    as_ = np.linspace(s["delta_s_min"], s["delta_s_max"], s["n_s"])
    try:
        spec = SweepSpec(ap, as_, s.get("sequence", "counterintuitive"), float(s.get("tau", 500.0)), s.get("delay"),
                         float(s.get("peak_p", 1.0)), float(s.get("peak_s", 1.0)), s.get("shape", "sine_squared"),
                         initial_state(cfg, 3), float(cfg["numerics"]["tol"]))
        spec.protocol(float(ap[0]), float(as_[0]))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return spec


def boundary_window(cfg: dict) -> tuple[float, np.ndarray, np.ndarray]:
    b = _need(cfg, "boundaries", "omega_max")
    s = _need(cfg, "sweep", "delta_p_min", "delta_p_max", "n_p", "delta_s_min", "delta_s_max", "n_s")
    if not b["omega_max"] > 0:
        raise ConfigError("omega_max must be positive")
    if s["n_p"] < 1 or s["n_s"] < 1:
        raise ConfigError("axis sizes must be at least 1")
    return (float(b["omega_max"]), np.linspace(s["delta_p_min"], s["delta_p_max"], s["n_p"]),
            np.linspace(s["delta_s_min"], s["delta_s_max"], s["n_s"]))
