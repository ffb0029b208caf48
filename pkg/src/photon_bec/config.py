"""Line-oriented run configuration.

Format: UTF-8 ``key = value`` lines, ``#`` starts a comment, keys are dotted
(``material.n0 = 1.44``). Everything is SI; wavelengths are in metres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from photon_bec.core import CavityGeometry, MaterialParams, PulseSpec, check_pairing, time_scales
from photon_bec.errors import ValidationError

REQUIRED = (
    "material.n0",
    "material.n2",
    "material.alpha",
    "geometry.dimensionality",
    "geometry.L",
    "geometry.finesse",
    "pulse.lambda_p",
    "pulse.photon_density",
)


@dataclass(frozen=True)
class SolverSettings:
    delta_T: float = 1.0
    kappa_floor: float = 1e-12
    max_iter: int = 200
    energy_factor: float = 1.5
    rho_ref: float | None = None


@dataclass(frozen=True)
class SimSettings:
    n_bins: int = 128
    eps_max_factor: float = 12.0
    initial: str = "gaussian"
    width_factor: float = 0.1
    t_end: float | None = None
    t_end_factor: float = 300.0
    rate_constant: float | None = None
    dt_init: float | None = None
    max_rel_change: float = 1e-2
    record_every: int = 20
    conservation_tol: float = 1e-6
    noise: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    material: MaterialParams
    geometry: CavityGeometry
    pulse: PulseSpec
    solver: SolverSettings = field(default_factory=SolverSettings)
    sim: SimSettings | None = None
    margin_threshold: float = 10.0


_SECTIONS = {
    "material": MaterialParams,
    "geometry": CavityGeometry,
    "pulse": PulseSpec,
    "solver": SolverSettings,
    "sim": SimSettings,
}
_STRING_KEYS = {"geometry.dimensionality", "sim.initial"}
_INT_KEYS = {"solver.max_iter", "sim.n_bins", "sim.record_every"}


def known_keys():
    keys = ["margin_threshold"]
    for section, cls in _SECTIONS.items():
        keys.extend(f"{section}.{f.name}" for f in fields(cls))
    return keys


def sweepable_keys():
    return [k for k in known_keys() if k not in _STRING_KEYS and k not in _INT_KEYS]


def parse_text(text: str, source="<config>") -> dict:
    values = {}
    allowed = set(known_keys())
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise ValidationError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValidationError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ValidationError(f"{source}:{lineno}: missing value for {key!r}")
        if key in _STRING_KEYS:
            values[key] = value
            continue
        try:
            number = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: {key} expects a number, got {value!r}") from None
        values[key] = number
    return values


def build_config(values: dict) -> RunConfig:
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ValidationError("missing required keys: " + ", ".join(missing))
    groups: dict = {name: {} for name in _SECTIONS}
    for key, value in values.items():
        if key == "margin_threshold":
            continue
        section, name = key.split(".", 1)
        groups[section][name] = value
    material = MaterialParams(**groups["material"])
    geometry = CavityGeometry(**groups["geometry"])
    pulse_kw = dict(groups["pulse"])
    if "duration" not in pulse_kw:
        pulse_kw["duration"] = time_scales(material, geometry)[0]
    pulse = PulseSpec(**pulse_kw)
    check_pairing(material, geometry, pulse)
    solver = SolverSettings(**groups["solver"])
    if solver.max_iter < 1 or not solver.delta_T > 0 or not solver.kappa_floor > 0:
        raise ValidationError("solver.max_iter must be >= 1, solver.delta_T and solver.kappa_floor > 0")
    sim = SimSettings(**groups["sim"]) if groups["sim"] else None
    if sim is not None:
        _validate_sim(sim)
    margin = values.get("margin_threshold", 10.0)
    if not margin > 0:
        raise ValidationError("margin_threshold must be > 0")
    return RunConfig(material, geometry, pulse, solver, sim, margin)


def _validate_sim(sim: SimSettings):
    if sim.n_bins < 16:
        raise ValidationError("sim.n_bins must be >= 16")
    if sim.initial not in ("gaussian", "uniform", "monochromatic"):
        raise ValidationError("sim.initial must be gaussian, uniform or monochromatic")
    for name in ("eps_max_factor", "width_factor", "t_end_factor", "max_rel_change", "conservation_tol"):
        if not getattr(sim, name) > 0:
            raise ValidationError(f"sim.{name} must be > 0")
    if sim.record_every < 1:
        raise ValidationError("sim.record_every must be >= 1")
    if not sim.noise >= 0:
        raise ValidationError("sim.noise must be >= 0")


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    return build_config(parse_text(text, str(path)))


def config_values(cfg: RunConfig) -> dict:
    """Flat ``key -> value`` view of a config, the inverse of ``build_config``."""
    out = {"margin_threshold": cfg.margin_threshold}
    for section in ("material", "geometry", "pulse", "solver", "sim"):
        obj = getattr(cfg, section)
        if obj is None:
            continue
        for f in fields(obj):
            value = getattr(obj, f.name)
            if value is None:
                continue
            if hasattr(value, "value"):
                value = value.value
            out[f"{section}.{f.name}"] = value
    return out


def with_value(cfg: RunConfig, key: str, value) -> RunConfig:
    """Copy of ``cfg`` with one dotted key replaced, revalidated."""
    if key not in sweepable_keys():
        raise ValidationError(f"{key!r} is not sweepable; choose from: " + ", ".join(sweepable_keys()))
    values = config_values(cfg)
    values[key] = value
    if cfg.pulse.duration == time_scales(cfg.material, cfg.geometry)[0] and key != "pulse.duration":
        # duration was defaulted to tau_cav; let it follow the swept geometry
        values.pop("pulse.duration", None)
    return build_config(values)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in config_values(cfg).items())


__all__ = ["RunConfig", "SimSettings", "SolverSettings", "load_config", "parse_text", "build_config",
           "known_keys", "sweepable_keys", "with_value", "dump_config", "replace"]
