"""Experiment configuration: dataclass defaults, TOML files and flag overrides."""
from __future__ import annotations

import logging
import os
import tomllib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from .errors import ConfigError, SingularParameterError
from .padic import GroupSpec

logger = logging.getLogger(__name__)

KERNEL_KINDS = ("bessel", "log_bessel", "tabulated", "adjacency")
FORMATS = ("csv", "json")
SNAPSHOT_TIMES = (0.0, 1.0, 200.0, 500.0, 1000.0, 4000.0, 10000.0)


def default_out_dir() -> Path:
    return Path(os.environ.get("ULTRAWALKS_OUT", os.path.join(os.getcwd(), "ultrawalks-out")))


@dataclass(frozen=True)
class KernelChoice:
    kind: str = "bessel"
    alpha: Optional[float] = 1.2
    path: Optional[Path] = None

    def describe(self) -> str:
        if self.kind == "bessel":
            return f"bessel(alpha={self.alpha:g})"
        if self.kind in ("tabulated", "adjacency"):
            return f"{self.kind}({self.path})"
        return self.kind


@dataclass(frozen=True)
class AveragingConfig:
    T: float = 10000.0
    steps: Optional[int] = None
    tau_cluster: float = 1e-8


@dataclass(frozen=True)
class SweepConfig:
    """Parameter sweeps and trajectory grids behind the figure data."""

    enabled: bool = True
    snapshot_alphas: Tuple[float, ...] = (0.1, 0.5, 0.9, 1.2, 2.0, 5.0)
    snapshot_time: float = 200.0
    chi_alphas: Tuple[float, ...] = (0.5, 1.0, 1.2, 2.0, 3.0, 4.0, 4.5, 5.0)
    trajectory_target: Optional[int] = None
    trajectory_horizon: float = 100.0
    trajectory_points: int = 501


@dataclass(frozen=True)
class ExperimentConfig:
    p: int = 2
    l: int = 5
    kernel: KernelChoice = field(default_factory=KernelChoice)
    times: Tuple[float, ...] = SNAPSHOT_TIMES
    averaging: AveragingConfig = field(default_factory=AveragingConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    out: Path = field(default_factory=default_out_dir)
    formats: Tuple[str, ...] = FORMATS
    workers: int = 4

    @property
    def spec(self) -> GroupSpec:
        return GroupSpec(self.p, self.l)

    def with_overrides(
        self,
        *,
        p: Optional[int] = None,
        l: Optional[int] = None,
        alpha: Optional[float] = None,
        kernel_file: Optional[Path] = None,
        adjacency_file: Optional[Path] = None,
        times: Optional[Tuple[float, ...]] = None,
        T: Optional[float] = None,
        steps: Optional[int] = None,
        tau: Optional[float] = None,
        out: Optional[Path] = None,
        formats: Optional[Tuple[str, ...]] = None,
        workers: Optional[int] = None,
    ) -> "ExperimentConfig":
        """Return a copy with every non-None flag applied on top of this config."""

        kernel = self.kernel
        if alpha is not None:
            kernel = KernelChoice(kind="bessel", alpha=float(alpha))
        if kernel_file is not None:
            kernel = KernelChoice(kind="tabulated", alpha=None, path=Path(kernel_file))
        if adjacency_file is not None:
            kernel = KernelChoice(kind="adjacency", alpha=None, path=Path(adjacency_file))
        averaging = self.averaging
        if T is not None:
            averaging = replace(averaging, T=float(T))
        if steps is not None:
            averaging = replace(averaging, steps=int(steps))
        if tau is not None:
            averaging = replace(averaging, tau_cluster=float(tau))
        updates: Dict[str, Any] = {"kernel": kernel, "averaging": averaging}
        for name, value in (("p", p), ("l", l), ("out", out), ("workers", workers)):
            if value is not None:
                updates[name] = value
        if times is not None:
            updates["times"] = tuple(float(t) for t in times)
        if formats is not None:
            updates["formats"] = tuple(formats)
        if "out" in updates:
            updates["out"] = Path(updates["out"])
        return replace(self, **updates)

    def validate(self) -> "ExperimentConfig":
        GroupSpec(self.p, self.l)
        if list(self.times) != sorted(self.times) or any(t < 0 for t in self.times):
            raise ConfigError("times must be nonnegative and ascending", field="times")
        if self.averaging.T <= 0:
            raise ConfigError("averaging window must be positive", field="T")
        if self.averaging.steps is not None and self.averaging.steps < 2:
            raise ConfigError("quadrature needs at least 2 points", field="steps")
        if self.averaging.tau_cluster <= 0:
            raise ConfigError("clustering tolerance must be positive", field="tau_cluster")
        unknown = set(self.formats) - set(FORMATS)
        if unknown or not self.formats:
            raise ConfigError(f"formats must be a nonempty subset of {FORMATS}", field="formats")
        if self.workers < 1:
            raise ConfigError("need at least one worker", field="workers")
        kernel = self.kernel
        if kernel.kind not in KERNEL_KINDS:
            raise ConfigError(f"unknown kernel kind {kernel.kind!r}", field="kernel.kind")
        if kernel.kind == "bessel":
            if kernel.alpha is None:
                raise ConfigError("bessel kernels need alpha", field="kernel.alpha")
            if abs(kernel.alpha) <= 1e-12:
                raise SingularParameterError("alpha=0 is a pole of Gamma(alpha)")
            if kernel.alpha < 0:
                raise ConfigError(f"alpha must be positive, got {kernel.alpha!r}", field="kernel.alpha")
        if kernel.kind in ("tabulated", "adjacency") and kernel.path is None:
            raise ConfigError(f"{kernel.kind} kernels need a file path", field="kernel.path")
        return self


_SECTIONS = {"kernel": KernelChoice, "averaging": AveragingConfig, "sweep": SweepConfig}


def _section(cls: type, table: Mapping[str, Any], path: Path, name: str) -> Any:
    allowed = {f.name for f in fields(cls)}
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", path=path, field=name)
    values = dict(table)
    for key, value in values.items():
        if isinstance(value, list):
            values[key] = tuple(value)
    if "path" in values and values["path"] is not None:
        values["path"] = (path.parent / values["path"]).resolve()
    return cls(**values)


def config_from_mapping(document: Mapping[str, Any], path: Path) -> ExperimentConfig:
    top_level = {f.name for f in fields(ExperimentConfig)}
    unknown = set(document) - top_level
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", path=path)
    values: Dict[str, Any] = {}
    for key, value in document.items():
        if key in _SECTIONS:
            if not isinstance(value, Mapping):
                raise ConfigError("expected a table", path=path, field=key)
            values[key] = _section(_SECTIONS[key], value, path, key)
        elif key == "times":
            values[key] = tuple(float(t) for t in value)
        elif key == "formats":
            values[key] = tuple(value)
        elif key == "out":
            values[key] = Path(value)
        else:
            values[key] = value
    return ExperimentConfig(**values)


def load_config(path: Path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as handle:
            document = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML ({exc})", path=path) from exc
    config = config_from_mapping(document, path)
    logger.info("loaded config %s: p=%d l=%d kernel=%s", path, config.p, config.l, config.kernel.describe())
    return config
