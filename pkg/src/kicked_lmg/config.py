"""Run configuration for the command-line pipeline.

A run is described by one YAML mapping with five groups (model,
resonance, drive, numerics, output) plus an optional poincare group
used by the phase-portrait command. The whole mapping is validated
before any computation starts; unknown keys anywhere are rejected with
the full key path in the error. Every field has a default, so an empty
file (or no file at all) runs the headline configuration.

Recognized keys and defaults:

model:      J: 300.0             spin size, or J_list: [J1, J2, ...]
            omega0: 1.0          linear precession frequency
            gamma_x: -0.95       quadratic coupling strength
resonance:  r: 1                 map steps per chain closure
            s: 1                 angle cycles per chain closure
            T_target: 8.0        resonant return time, or exclusively
            E_R: <float>         the resonant scaled energy itself
drive:      epsilon: <float>     single kick strength, or
            eps_grid: {start: 1e-5, stop: 0.2, points_per_decade: 20}
numerics:   drift_tol: 1e-10     energy-drift contract of the flow
            quad_tol: 1e-10      period-quadrature tolerance
            z_tol: 1e-8          separatrix edge bisection tolerance
            jump_threshold: 5.0  edge detector, multiples of the median
            n_grid: 200          scan-line resolution
            n_iter: 2000         iterates per scanned orbit
            fd_step: 1e-6        monodromy finite-difference step
            overlap_floor: 0.5   doublet projection floor
            tracking_mode: continuation    (or subspace)
output:     directory: out
            formats: [csv]       subset of {csv, json}
poincare:   seeds: [[phi, z], ...]    required inside the group
            taus: [<float>, ...]      default: the resonant kick period
            epsilons: [<float>, ...]  default: the drive grid
            n_iter: <int>             default: numerics.n_iter
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError

EPS_GRID_DEFAULT = {"start": 1e-5, "stop": 0.2, "points_per_decade": 20}


def log_grid(start: float, stop: float, points_per_decade: int) -> tuple[float, ...]:
    """Logarithmic kick-strength grid, endpoints included."""
    if start <= 0 or stop <= start:
        raise ConfigError(f"eps_grid needs 0 < start < stop, got [{start}, {stop}]")
    if points_per_decade < 1:
        raise ConfigError(f"eps_grid.points_per_decade must be >= 1, got {points_per_decade}")
    decades = math.log10(stop / start)
    n = max(2, int(round(points_per_decade * decades)) + 1)
    return tuple(float(e) for e in np.geomspace(start, stop, n))


@dataclass(frozen=True)
class ModelConfig:
    j_list: tuple[float, ...] = (300.0,)
    omega0: float = 1.0
    gamma_x: float = -0.95


@dataclass(frozen=True)
class ResonanceConfig:
    r: int = 1
    s: int = 1
    t_target: float | None = 8.0
    e_r: float | None = None


@dataclass(frozen=True)
class DriveConfig:
    epsilons: tuple[float, ...] = field(
        default_factory=lambda: log_grid(**EPS_GRID_DEFAULT)
    )
    grid_spec: dict | None = field(default_factory=lambda: dict(EPS_GRID_DEFAULT))


@dataclass(frozen=True)
class NumericsConfig:
    drift_tol: float = 1e-10
    quad_tol: float = 1e-10
    z_tol: float = 1e-8
    jump_threshold: float = 5.0
    n_grid: int = 200
    n_iter: int = 2000
    fd_step: float = 1e-6
    overlap_floor: float = 0.5
    tracking_mode: str = "continuation"


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv",)


@dataclass(frozen=True)
class PoincareConfig:
    seeds: tuple[tuple[float, float], ...]
    taus: tuple[float, ...]
    epsilons: tuple[float, ...]
    n_iter: int


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    resonance: ResonanceConfig = field(default_factory=ResonanceConfig)
    drive: DriveConfig = field(default_factory=DriveConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    poincare: PoincareConfig | None = None


# ---------------------------------------------------------------------------
# strict mapping -> dataclass conversion


def _require_mapping(obj, path: str) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{path} must be a mapping, got {type(obj).__name__}")
    return dict(obj)


def _reject_unknown(d: dict, path: str) -> None:
    if d:
        key = sorted(str(k) for k in d)[0]
        where = f"{path}.{key}" if path else key
        raise ConfigError(f"unknown key {where!r}")


def _number(d: dict, key: str, path: str, default, positive=False, allow_none=False):
    if key not in d:
        return default
    v = d.pop(key)
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key} must be a number, got {v!r}")
    v = float(v)
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key} must be positive, got {v!r}")
    return v


def _integer(d: dict, key: str, path: str, default, minimum=1):
    if key not in d:
        return default
    v = d.pop(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}.{key} must be an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(f"{path}.{key} must be >= {minimum}, got {v}")
    return v


def _model_from(d: dict) -> ModelConfig:
    d = _require_mapping(d, "model")
    if "J" in d and "J_list" in d:
        raise ConfigError("model takes J or J_list, not both")
    if "J_list" in d:
        raw = d.pop("J_list")
        if not isinstance(raw, (list, tuple)) or not raw:
            raise ConfigError("model.J_list must be a nonempty list")
        j_list = []
        for i, v in enumerate(raw):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
                raise ConfigError(f"model.J_list[{i}] must be a positive number, got {v!r}")
            j_list.append(float(v))
        j_list = tuple(j_list)
    else:
        j = _number(d, "J", "model", 300.0, positive=True)
        j_list = (float(j),)
    omega0 = _number(d, "omega0", "model", 1.0)
    gamma_x = _number(d, "gamma_x", "model", -0.95)
    _reject_unknown(d, "model")
    return ModelConfig(j_list=j_list, omega0=float(omega0), gamma_x=float(gamma_x))


def _resonance_from(d: dict) -> ResonanceConfig:
    d = _require_mapping(d, "resonance")
    r = _integer(d, "r", "resonance", 1)
    s = _integer(d, "s", "resonance", 1)
    if "E_R" in d and "T_target" in d:
        raise ConfigError("resonance takes E_R or T_target, not both")
    e_r = _number(d, "E_R", "resonance", None, allow_none=True)
    t_target = _number(d, "T_target", "resonance", None, positive=True, allow_none=True)
    if e_r is None and t_target is None:
        t_target = 8.0
    _reject_unknown(d, "resonance")
    return ResonanceConfig(r=r, s=s, t_target=t_target, e_r=e_r)


def _drive_from(d: dict) -> DriveConfig:
    d = _require_mapping(d, "drive")
    if "epsilon" in d and "eps_grid" in d:
        raise ConfigError("drive takes epsilon or eps_grid, not both")
    if "epsilon" in d:
        eps = _number(d, "epsilon", "drive", None)
        if eps < 0:
            raise ConfigError(f"drive.epsilon must be >= 0, got {eps!r}")
        _reject_unknown(d, "drive")
        return DriveConfig(epsilons=(float(eps),), grid_spec=None)
    g = _require_mapping(d.pop("eps_grid", None), "drive.eps_grid")
    spec = dict(EPS_GRID_DEFAULT)
    spec["start"] = _number(g, "start", "drive.eps_grid", spec["start"], positive=True)
    spec["stop"] = _number(g, "stop", "drive.eps_grid", spec["stop"], positive=True)
    spec["points_per_decade"] = _integer(
        g, "points_per_decade", "drive.eps_grid", spec["points_per_decade"]
    )
    _reject_unknown(g, "drive.eps_grid")
    _reject_unknown(d, "drive")
    return DriveConfig(epsilons=log_grid(**spec), grid_spec=spec)


def _numerics_from(d: dict) -> NumericsConfig:
    d = _require_mapping(d, "numerics")
    base = NumericsConfig()
    kwargs = dict(
        drift_tol=_number(d, "drift_tol", "numerics", base.drift_tol, positive=True),
        quad_tol=_number(d, "quad_tol", "numerics", base.quad_tol, positive=True),
        z_tol=_number(d, "z_tol", "numerics", base.z_tol, positive=True),
        jump_threshold=_number(
            d, "jump_threshold", "numerics", base.jump_threshold, positive=True
        ),
        n_grid=_integer(d, "n_grid", "numerics", base.n_grid, minimum=16),
        n_iter=_integer(d, "n_iter", "numerics", base.n_iter, minimum=100),
        fd_step=_number(d, "fd_step", "numerics", base.fd_step, positive=True),
        overlap_floor=_number(
            d, "overlap_floor", "numerics", base.overlap_floor, positive=True
        ),
        tracking_mode=d.pop("tracking_mode", base.tracking_mode),
    )
    if kwargs["overlap_floor"] >= 1.0:
        raise ConfigError(
            f"numerics.overlap_floor must lie in (0, 1), got {kwargs['overlap_floor']}"
        )
    if kwargs["tracking_mode"] not in ("continuation", "subspace"):
        raise ConfigError(
            f"numerics.tracking_mode must be continuation or subspace, "
            f"got {kwargs['tracking_mode']!r}"
        )
    _reject_unknown(d, "numerics")
    return NumericsConfig(**kwargs)


def _output_from(d: dict) -> OutputConfig:
    d = _require_mapping(d, "output")
    directory = d.pop("directory", "out")
    if not isinstance(directory, str) or not directory:
        raise ConfigError(f"output.directory must be a nonempty string, got {directory!r}")
    formats = d.pop("formats", ["csv"])
    if isinstance(formats, str):
        formats = [formats]
    if not isinstance(formats, (list, tuple)) or not formats:
        raise ConfigError("output.formats must be a nonempty list")
    for f in formats:
        if f not in ("csv", "json"):
            raise ConfigError(f"output.formats entries must be csv or json, got {f!r}")
    _reject_unknown(d, "output")
    return OutputConfig(directory=directory, formats=tuple(formats))


def _poincare_from(
    d: dict | None, resonance: ResonanceConfig, drive: DriveConfig, numerics: NumericsConfig
) -> PoincareConfig | None:
    if d is None:
        return None
    d = _require_mapping(d, "poincare")
    raw_seeds = d.pop("seeds", None)
    if not isinstance(raw_seeds, (list, tuple)) or not raw_seeds:
        raise ConfigError("poincare.seeds must be a nonempty list of [phi, z] pairs")
    seeds = []
    for i, pair in enumerate(raw_seeds):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"poincare.seeds[{i}] must be a [phi, z] pair, got {pair!r}")
        phi, z = pair
        for v in (phi, z):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"poincare.seeds[{i}] entries must be numbers, got {v!r}")
        if abs(float(z)) > 1.0:
            raise ConfigError(f"poincare.seeds[{i}] has |z| > 1: {z!r}")
        seeds.append((float(phi), float(z)))
    raw_taus = d.pop("taus", None)
    if raw_taus is None:
        if resonance.t_target is None:
            raise ConfigError("poincare.taus is required when resonance gives E_R")
        taus = (resonance.s * resonance.t_target / resonance.r,)
    else:
        if not isinstance(raw_taus, (list, tuple)) or not raw_taus:
            raise ConfigError("poincare.taus must be a nonempty list")
        taus = []
        for i, v in enumerate(raw_taus):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
                raise ConfigError(f"poincare.taus[{i}] must be a positive number, got {v!r}")
            taus.append(float(v))
        taus = tuple(taus)
    raw_eps = d.pop("epsilons", None)
    if raw_eps is None:
        epsilons = drive.epsilons
    else:
        if not isinstance(raw_eps, (list, tuple)) or not raw_eps:
            raise ConfigError("poincare.epsilons must be a nonempty list")
        epsilons = []
        for i, v in enumerate(raw_eps):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0:
                raise ConfigError(
                    f"poincare.epsilons[{i}] must be a nonnegative number, got {v!r}"
                )
            epsilons.append(float(v))
        epsilons = tuple(epsilons)
    n_iter = _integer(d, "n_iter", "poincare", numerics.n_iter, minimum=1)
    _reject_unknown(d, "poincare")
    return PoincareConfig(seeds=tuple(seeds), taus=taus, epsilons=epsilons, n_iter=n_iter)


def config_from_dict(raw: dict | None) -> RunConfig:
    raw = _require_mapping(raw, "config")
    model = _model_from(raw.pop("model", None))
    resonance = _resonance_from(raw.pop("resonance", None))
    drive = _drive_from(raw.pop("drive", None))
    numerics = _numerics_from(raw.pop("numerics", None))
    output = _output_from(raw.pop("output", None))
    poincare = _poincare_from(raw.pop("poincare", None), resonance, drive, numerics)
    _reject_unknown(raw, "")
    return RunConfig(
        model=model,
        resonance=resonance,
        drive=drive,
        numerics=numerics,
        output=output,
        poincare=poincare,
    )


def load_config(path: str | Path | None) -> RunConfig:
    """Parse and validate a YAML run configuration.

    None loads the all-defaults configuration, matching an empty file.
    """
    if path is None:
        return config_from_dict({})
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_dict(raw)


def config_to_dict(cfg: RunConfig) -> dict:
    """Fully resolved mapping, defaults included, for the config echo."""
    drive: dict = (
        {"epsilon": cfg.drive.epsilons[0]}
        if cfg.drive.grid_spec is None
        else {"eps_grid": dict(cfg.drive.grid_spec)}
    )
    drive["resolved_epsilons"] = list(cfg.drive.epsilons)
    out = {
        "model": {
            "J_list": list(cfg.model.j_list),
            "omega0": cfg.model.omega0,
            "gamma_x": cfg.model.gamma_x,
        },
        "resonance": {
            "r": cfg.resonance.r,
            "s": cfg.resonance.s,
            # exactly one of the two resonance pins is active
            **(
                {"E_R": cfg.resonance.e_r}
                if cfg.resonance.e_r is not None
                else {"T_target": cfg.resonance.t_target}
            ),
        },
        "drive": drive,
        "numerics": {
            "drift_tol": cfg.numerics.drift_tol,
            "quad_tol": cfg.numerics.quad_tol,
            "z_tol": cfg.numerics.z_tol,
            "jump_threshold": cfg.numerics.jump_threshold,
            "n_grid": cfg.numerics.n_grid,
            "n_iter": cfg.numerics.n_iter,
            "fd_step": cfg.numerics.fd_step,
            "overlap_floor": cfg.numerics.overlap_floor,
            "tracking_mode": cfg.numerics.tracking_mode,
        },
        "output": {
            "directory": cfg.output.directory,
            "formats": list(cfg.output.formats),
        },
    }
    if cfg.poincare is not None:
        out["poincare"] = {
            "seeds": [list(p) for p in cfg.poincare.seeds],
            "taus": list(cfg.poincare.taus),
            "epsilons": list(cfg.poincare.epsilons),
            "n_iter": cfg.poincare.n_iter,
        }
    return out


def echo_config(cfg: RunConfig, directory: str | Path) -> Path:
    """Write the resolved configuration next to the results."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "config_resolved.yaml"
    path.write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
    return path
