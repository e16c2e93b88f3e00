"""Experiment configuration: INI files in, resolved dataclasses out.

Every run is fully determined by one :class:`ExperimentConfig`; all seeds
are explicit fields so a written manifest reproduces the run bit for bit
(timing columns aside).  Unknown sections or keys are an error rather than
a silent ignore.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field


class ConfigError(Exception):
    """Raised for unparsable, unknown or out-of-range configuration."""


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_optional_float(text: str) -> float | None:
    return None if not text.strip() else float(text)


def _parse_optional_str(text: str) -> str | None:
    return text.strip() or None


@dataclass
class GridConfig:
    n: int = 190
    step: float = 10.0
    z0: float = 0.5


@dataclass
class PhysicsConfig:
    omega: float = 42.58
    mu: float = 1.2566e-06
    sigma: float = 0.6
    epsilon: float = 50.0


@dataclass
class ModelConfig:
    kind: str = "spherical"  # "spherical" or "direct"
    n_tilde: int = 2


@dataclass
class CoilConfig:
    count: int = 8
    n_true: int = 2
    seed: int = 101
    magnitude_decay: float = 0.3
    files: str | None = None  # comma-separated complex-image paths


@dataclass
class PhantomConfig:
    file: str | None = None


@dataclass
class MaskConfig:
    fraction: float = 0.25
    turns: int = 12
    seed: int = 202
    file: str | None = None


@dataclass
class NoiseConfig:
    sigma: float = 0.05
    seed: int = 303


@dataclass
class RegularizationConfig:
    alpha_data: tuple[float, ...] = (0.4018,)
    alpha_tv: float = 0.0062
    alpha_coeff: float = 0.2149
    tv_pixelwise: bool = True
    coil_prox_pixelwise: bool = False


@dataclass
class SolverSettings:
    iters: int = 1500
    tau_v: float = 0.125
    tau_q: float = 23.0
    delta: float = 1.0 / 24.0
    step_rule: str = "fixed"
    log_every: int = 1
    stop_tol: float | None = None
    norm_safety: float = 1.1
    norm_iters: int = 30
    norm_seed: int = 404


@dataclass
class PerturbationConfig:
    gamma: float = 0.0  # fraction of the mean coil magnitude


@dataclass
class ExperimentConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    coils: CoilConfig = field(default_factory=CoilConfig)
    phantom: PhantomConfig = field(default_factory=PhantomConfig)
    mask: MaskConfig = field(default_factory=MaskConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    regularization: RegularizationConfig = field(default_factory=RegularizationConfig)
    solver: SolverSettings = field(default_factory=SolverSettings)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)

    def validate(self) -> "ExperimentConfig":
        g, m = self.grid, self.model
        if g.n < 4:
            raise ConfigError("grid.n must be at least 4")
        if g.step <= 0:
            raise ConfigError("grid.step must be positive")
        if g.z0 == 0:
            raise ConfigError("grid.z0 must be nonzero")
        if m.kind not in ("spherical", "direct"):
            raise ConfigError("model.kind must be 'spherical' or 'direct'")
        if not 0 <= m.n_tilde <= 8:
            raise ConfigError("model.n_tilde must lie in [0, 8]")
        if not 0 <= self.coils.n_true <= 8:
            raise ConfigError("coils.n_true must lie in [0, 8]")
        if self.coils.count < 1:
            raise ConfigError("coils.count must be positive")
        if not 0.0 < self.mask.fraction <= 1.0:
            raise ConfigError("mask.fraction must lie in (0, 1]")
        if self.mask.turns < 1:
            raise ConfigError("mask.turns must be positive")
        if self.noise.sigma < 0:
            raise ConfigError("noise.sigma must be nonnegative")
        r = self.regularization
        if any(a < 0 for a in r.alpha_data) or r.alpha_tv < 0 or r.alpha_coeff < 0:
            raise ConfigError("regularization weights must be nonnegative")
        if not r.alpha_data:
            raise ConfigError("alpha_data needs at least one entry")
        s = self.solver
        if s.iters < 1:
            raise ConfigError("solver.iters must be positive")
        if min(s.tau_v, s.tau_q, s.delta) <= 0:
            raise ConfigError("solver step sizes must be positive")
        if s.step_rule not in ("fixed", "adaptive"):
            raise ConfigError("solver.step_rule must be 'fixed' or 'adaptive'")
        if s.log_every < 1:
            raise ConfigError("solver.log_every must be positive")
        if s.norm_safety <= 1.0:
            raise ConfigError("solver.norm_safety must exceed 1")
        if self.perturbation.gamma < 0:
            raise ConfigError("perturbation.gamma must be nonnegative")
        return self


# section name -> (attribute on ExperimentConfig, {key: parser})
_SCHEMA = {
    "grid": ("grid", {"n": int, "step": float, "z0": float}),
    "physics": (
        "physics",
        {"omega": float, "mu": float, "sigma": float, "epsilon": float},
    ),
    "model": ("model", {"kind": str, "n_tilde": int}),
    "coils": (
        "coils",
        {
            "count": int,
            "n_true": int,
            "seed": int,
            "magnitude_decay": float,
            "files": _parse_optional_str,
        },
    ),
    "phantom": ("phantom", {"file": _parse_optional_str}),
    "mask": (
        "mask",
        {"fraction": float, "turns": int, "seed": int, "file": _parse_optional_str},
    ),
    "noise": ("noise", {"sigma": float, "seed": int}),
    "regularization": (
        "regularization",
        {
            "alpha_data": _parse_float_list,
            "alpha_tv": float,
            "alpha_coeff": float,
            "tv_pixelwise": _parse_bool,
            "coil_prox_pixelwise": _parse_bool,
        },
    ),
    "solver": (
        "solver",
        {
            "iters": int,
            "tau_v": float,
            "tau_q": float,
            "delta": float,
            "step_rule": str,
            "log_every": int,
            "stop_tol": _parse_optional_float,
            "norm_safety": float,
            "norm_iters": int,
            "norm_seed": int,
        },
    ),
    "perturbation": ("perturbation", {"gamma": float}),
}


def config_from_ini_text(text: str) -> ExperimentConfig:
    """Parse INI text into a validated :class:`ExperimentConfig`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed INI: {exc}") from exc

    cfg = ExperimentConfig()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        attr, keys = _SCHEMA[section]
        target = getattr(cfg, attr)
        for key, raw in parser.items(section):
            if key not in keys:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            try:
                setattr(target, key, keys[key](raw))
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"bad value for {section}.{key}: {raw!r} ({exc})"
                ) from exc
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_ini_text(text)


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_ini_text(cfg: ExperimentConfig) -> str:
    """Render a config as INI, every key explicit (the run manifest).

    Optional-path keys with value ``None`` are written as empty strings,
    which parse back to ``None``.
    """
    out = io.StringIO()
    for section, (attr, keys) in _SCHEMA.items():
        target = getattr(cfg, attr)
        out.write(f"[{section}]\n")
        for key in keys:
            out.write(f"{key} = {_format_value(getattr(target, key))}\n")
        out.write("\n")
    return out.getvalue()


def save_config(path, cfg: ExperimentConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(config_to_ini_text(cfg))


def replace(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy a config with dotted overrides, e.g. ``replace(cfg, **{"solver.iters": 5})``."""
    new = config_from_ini_text(config_to_ini_text(cfg))
    for dotted, value in overrides.items():
        section, _, key = dotted.partition(".")
        if not key:
            raise ConfigError(f"override must look like 'section.key': {dotted!r}")
        if section not in _SCHEMA or key not in _SCHEMA[section][1]:
            raise ConfigError(f"unknown override {dotted!r}")
        setattr(getattr(new, _SCHEMA[section][0]), key, value)
    return new.validate()
