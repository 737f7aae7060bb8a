"""Run configuration: INI files with dotted ``section.key`` names, or a run manifest.

Example::

    [medium]
    L = 1e-4
    Gamma2 = 1.8849555921538758e7

    [drive]
    Omega_over_Gamma = 8

    [pulse]
    T = 20e-9
    shape = gaussian

Keys not given fall back to the Rb-87 preset. Unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, ParameterDomainError
from .medium import DerivedParams, DressedConfig, MediumConfig, rb87_dressed_preset, rb87_preset
from .pulses import DEFAULT_POINTS, TimeGrid, default_grid
from .propagator import DEFAULT_NODES

SHAPES = ("gaussian", "double_hump")

# config key -> MediumConfig field
MEDIUM_KEYS = {
    "medium.G1": "G1",
    "medium.G2": "G2",
    "medium.L": "L",
    "medium.Gamma1": "Gamma1",
    "medium.Gamma2": "Gamma2",
    "medium.lambda1": "lambda1",
    "medium.lambda2": "lambda2",
    "medium.density": "atom_density",
    "medium.Gamma_ref": "Gamma_ref",
}
OTHER_KEYS = {
    "drive.Omega_over_Gamma",
    "pulse.T",
    "pulse.shape",
    "pulse.separation",
    "grid.n_points",
    "grid.t_min",
    "grid.t_max",
    "grid.quad_nodes",
    "grid.z_planes",
    "dressed.Omega0",
    "dressed.Gamma3",
    "dressed.Delta",
}
KNOWN_KEYS = set(MEDIUM_KEYS) | OTHER_KEYS


@dataclass(frozen=True)
class RunConfig:
    medium: MediumConfig = dataclasses.field(default_factory=rb87_preset)
    omega_over_gamma: float = 8.0
    T: float = 20e-9
    shape: str = "gaussian"
    separation: float | None = None
    grid_points: int = DEFAULT_POINTS
    t_min: float | None = None
    t_max: float | None = None
    quad_nodes: int = DEFAULT_NODES
    z_planes: int = 2
    dressed: DressedConfig | None = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ConfigError(f"pulse.shape must be one of {SHAPES}, got {self.shape!r}")
        if not self.T > 0:
            raise ConfigError(f"pulse.T must be positive, got {self.T!r}")
        if not self.omega_over_gamma > 0:
            raise ConfigError(f"drive.Omega_over_Gamma must be positive, got {self.omega_over_gamma!r}")
        if self.z_planes < 2:
            raise ConfigError(f"grid.z_planes must be >= 2, got {self.z_planes!r}")
        if (self.t_min is None) != (self.t_max is None):
            raise ConfigError("grid.t_min and grid.t_max must be given together")

    @property
    def Omega(self) -> float:
        return self.omega_over_gamma * self.medium.Gamma_ref

    @property
    def hump_separation(self) -> float:
        return 2 * self.T if self.separation is None else self.separation

    def grid_for(self, params: DerivedParams, extra: float = 0.0) -> TimeGrid:
        if self.t_min is not None:
            return TimeGrid(self.t_min, self.t_max, self.grid_points)
        return default_grid(params, self.T, extra=extra + self.hump_span(), n_points=self.grid_points)

    def hump_span(self) -> float:
        """Extra time the input occupies beyond a single pulse at t = 0."""
        return self.hump_separation if self.shape == "double_hump" else 0.0

    def flat(self) -> dict:
        """Dotted-key snapshot that ``config_from_flat`` turns back into an equal config."""
        d = {key: getattr(self.medium, field) for key, field in MEDIUM_KEYS.items()}
        d.update({
            "drive.Omega_over_Gamma": self.omega_over_gamma,
            "pulse.T": self.T,
            "pulse.shape": self.shape,
            "grid.n_points": self.grid_points,
            "grid.quad_nodes": self.quad_nodes,
            "grid.z_planes": self.z_planes,
        })
        if self.separation is not None:
            d["pulse.separation"] = self.separation
        if self.t_min is not None:
            d["grid.t_min"] = self.t_min
            d["grid.t_max"] = self.t_max
        if self.dressed is not None:
            d["dressed.Omega0"] = self.dressed.Omega0
            d["dressed.Gamma3"] = self.dressed.Gamma3
            d["dressed.Delta"] = self.dressed.Delta
        return d


def _number(key, raw, kind=float):
    try:
        value = kind(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None
    return value


def config_from_flat(values: dict) -> RunConfig:
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    try:
        medium = dataclasses.replace(
            rb87_preset(),
            **{field: _number(key, values[key]) for key, field in MEDIUM_KEYS.items() if key in values},
        )
        dressed = None
        dressed_keys = [k for k in values if k.startswith("dressed.")]
        if dressed_keys:
            preset = rb87_dressed_preset()
            Omega0 = _number("dressed.Omega0", values.get("dressed.Omega0", preset.Omega0))
            dressed = DressedConfig(
                base=medium,
                Omega0=Omega0,
                Gamma3=_number("dressed.Gamma3", values.get("dressed.Gamma3", preset.Gamma3)),
                Delta=_number("dressed.Delta", values.get("dressed.Delta", Omega0)),
            )
        opt = {}
        if "drive.Omega_over_Gamma" in values:
            opt["omega_over_gamma"] = _number("drive.Omega_over_Gamma", values["drive.Omega_over_Gamma"])
        if "pulse.T" in values:
            opt["T"] = _number("pulse.T", values["pulse.T"])
        if "pulse.shape" in values:
            opt["shape"] = str(values["pulse.shape"]).strip()
        if "pulse.separation" in values:
            opt["separation"] = _number("pulse.separation", values["pulse.separation"])
        if "grid.n_points" in values:
            opt["grid_points"] = _number("grid.n_points", values["grid.n_points"], int)
        if "grid.quad_nodes" in values:
            opt["quad_nodes"] = _number("grid.quad_nodes", values["grid.quad_nodes"], int)
        if "grid.z_planes" in values:
            opt["z_planes"] = _number("grid.z_planes", values["grid.z_planes"], int)
        if "grid.t_min" in values:
            opt["t_min"] = _number("grid.t_min", values["grid.t_min"])
        if "grid.t_max" in values:
            opt["t_max"] = _number("grid.t_max", values["grid.t_max"])
        return RunConfig(medium=medium, dressed=dressed, **opt)
    except ParameterDomainError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    """Read an INI config file, or the ``config`` block of a run manifest (``.json``)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix == ".json":
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(doc, dict) or not isinstance(doc.get("config"), dict):
            raise ConfigError(f"{path}: manifest has no 'config' object")
        return config_from_flat(doc["config"])
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keys are case sensitive (G1, Gamma2, ...)
    try:
        parser.read_string(path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    flat = {f"{section}.{key}": value for section in parser.sections() for key, value in parser[section].items()}
    return config_from_flat(flat)
