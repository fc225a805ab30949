"""Vehicle and controller parameters.

Owns every physical constant and controller gain in one place, with the
stock vehicle (5 kg airframe, 0.2539 m lateral arms, tilting top rotors
0.14838 m above the center of mass) as code defaults so the simulator runs
with no config file. Parameters load from a YAML document; any key left out
falls back to the default. The schema is documented in configs/SCHEMA.md.

All units SI, all angles radians.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import yaml


class ParamError(ValueError):
    """A parameter failed validation; the message names the field."""


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the airframe.

    J is the diagonal of the inertia tensor (principal axes assumed, as the
    dynamics model requires). k_r is the yaw torque each newton of propeller
    thrust produces through rotor drag; its sign convention (which rotor spins
    which way) lives in the actuation module. b2, the drop of the bottom rotor
    pair below the center of mass, cancels out of every torque expression and
    only exists to keep the geometry well defined.
    """

    m: float = 5.0
    g: float = 9.8
    l: float = 0.2539
    b1: float = 0.14838
    b2: float = 0.14838
    J: tuple[float, float, float] = (0.366, 0.171, 0.391)
    k_r: float = 0.0008


@dataclass(frozen=True)
class ControllerGains:
    """Cascaded controller gains.

    k_p/k_d act on position and velocity error, k_p_q on the attitude error
    vector, K_p_w/K_d_w on body-rate error (diagonal, one entry per axis).
    """

    k_p: float = 16.0
    k_d: float = 10.0
    k_p_q: float = 10.0
    K_p_w: tuple[float, float, float] = (2.5, 2.0, 5.0)
    K_d_w: tuple[float, float, float] = (0.1, 0.2, 0.1)


def default_params() -> tuple[VehicleParams, ControllerGains]:
    """The stock parameter set (the values every scenario uses unless overridden)."""
    return VehicleParams(), ControllerGains()


def validate(vp: VehicleParams, cg: ControllerGains) -> None:
    """Raise ParamError naming the offending field if any invariant is broken."""
    scalar_rules = [
        ("m", vp.m, "> 0"),
        ("g", vp.g, "> 0"),
        ("l", vp.l, "> 0"),
        ("b1", vp.b1, "> 0"),
        ("k_p", cg.k_p, "> 0"),
        ("k_d", cg.k_d, "> 0"),
        ("k_p_q", cg.k_p_q, "> 0"),
    ]
    for name, value, _ in scalar_rules:
        if not value > 0:
            raise ParamError(f"{name} must be positive, got {value}")
    if not vp.b2 >= 0:
        raise ParamError(f"b2 must be nonnegative, got {vp.b2}")
    if not vp.k_r >= 0:
        raise ParamError(f"k_r must be nonnegative, got {vp.k_r}")
    for name, triple in [("J", vp.J), ("K_p_w", cg.K_p_w), ("K_d_w", cg.K_d_w)]:
        if len(triple) != 3:
            raise ParamError(f"{name} must have 3 entries, got {len(triple)}")
        for i, entry in enumerate(triple):
            if not entry > 0:
                raise ParamError(f"{name}[{i}] must be positive, got {entry}")


_VEHICLE_KEYS = {f.name for f in fields(VehicleParams)}
_GAIN_KEYS = {f.name for f in fields(ControllerGains)}


def _coerce(name: str, value):
    if name in ("J", "K_p_w", "K_d_w"):
        if not isinstance(value, (list, tuple)):
            raise ParamError(f"{name} must be a list of 3 numbers, got {value!r}")
        return tuple(float(v) for v in value)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParamError(f"{name} must be a number, got {value!r}")
    return float(value)


def load_params(config_text: str) -> tuple[VehicleParams, ControllerGains]:
    """Parse a YAML parameter document.

    An empty document (or one with only some keys) fills the gaps with the
    defaults. Unknown keys and malformed values are errors, as are values that
    break the physical invariants.
    """
    try:
        doc = yaml.safe_load(config_text)
    except yaml.YAMLError as exc:
        raise ParamError(f"config does not parse as YAML: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ParamError(f"config root must be a mapping, got {type(doc).__name__}")

    vehicle_kwargs = {}
    gain_kwargs = {}
    for key, value in doc.items():
        if key in _VEHICLE_KEYS:
            vehicle_kwargs[key] = _coerce(key, value)
        elif key in _GAIN_KEYS:
            gain_kwargs[key] = _coerce(key, value)
        else:
            raise ParamError(f"unknown parameter {key!r}")

    vp = VehicleParams(**vehicle_kwargs)
    cg = ControllerGains(**gain_kwargs)
    validate(vp, cg)
    return vp, cg


def serialize_params(vp: VehicleParams, cg: ControllerGains) -> str:
    """Render a parameter set back to YAML that load_params reparses identically."""
    doc = {
        "m": vp.m, "g": vp.g, "l": vp.l, "b1": vp.b1, "b2": vp.b2,
        "J": list(vp.J), "k_r": vp.k_r,
        "k_p": cg.k_p, "k_d": cg.k_d, "k_p_q": cg.k_p_q,
        "K_p_w": list(cg.K_p_w), "K_d_w": list(cg.K_d_w),
    }
    return yaml.safe_dump(doc, sort_keys=False)
