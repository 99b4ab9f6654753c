"""Experiment orchestration: figure data, snapshots and the run manifest."""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import ExperimentConfig
from .dynamics import WalkKind, WalkSnapshot, classical_transition, quantum_transition, trajectories
from .errors import ConfigError
from .generator import GeneratorMatrix, build_adjacency_generator, build_generator, load_adjacency_file
from .kernel import KernelProfile, SymbolKind, bessel_profile, load_kernel_file
from .limiting import LimitingDistribution, alpha_sweep, compare, limiting_quadrature, limiting_spectral
from .matrix_io import MatrixFile, write_matrix
from .padic import GroupSpec, sphere_representatives
from .spectral import SpectralData, closed_form_spectrum, eigendecompose
from .validation import run_validation

logger = logging.getLogger(__name__)

DEFAULT_TRAJECTORY_TARGET = 12


def _tag(value: float) -> str:
    # shortest digits that round-trip, so distinct times never share a file
    return np.format_float_positional(float(value), trim="-")


class OutputLayout:
    """Where each kind of result lands under the output directory."""

    def __init__(self, base_dir: Path):
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def ensure_dir(self, name: str) -> Path:
        directory = self.base_dir / name
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def generator_stem(self) -> Path:
        return self.base_dir / "generator"

    def snapshot_stem(self, kind: WalkKind, t: float) -> Path:
        folder = "ctmc" if kind is WalkKind.CLASSICAL else "ctqmc"
        return self.ensure_dir(folder) / f"t{_tag(t)}"

    def trajectory_stem(self, kind: WalkKind) -> Path:
        folder = "ctmc" if kind is WalkKind.CLASSICAL else "ctqmc"
        return self.ensure_dir(folder) / "trajectories"

    def alpha_snapshot_stem(self, alpha: float, t: float) -> Path:
        return self.ensure_dir("alpha_snapshots") / f"alpha{_tag(alpha)}_t{_tag(t)}"

    def limiting_stem(self, method: str) -> Path:
        return self.ensure_dir("limiting") / method

    def sweep_stem(self, alpha: float) -> Path:
        return self.ensure_dir("chi_sweep") / f"alpha{_tag(alpha)}"

    def relative(self, path: Path) -> str:
        return Path(path).relative_to(self.base_dir).as_posix()


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    figure: str
    description: str


@dataclass
class Manifest:
    base_dir: Path
    entries: List[ManifestEntry] = field(default_factory=list)
    validation_passed: Optional[bool] = None

    def add(self, layout: OutputLayout, paths: Sequence[Path], figure: str, description: str) -> None:
        for path in paths:
            self.entries.append(ManifestEntry(layout.relative(path), figure, description))

    def as_dict(self) -> Dict[str, object]:
        return {
            "validation_passed": self.validation_passed,
            "files": [
                {"path": e.path, "figure": e.figure, "description": e.description} for e in self.entries
            ],
        }


def write_json_document(path: Path, document: object) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n")
    return path


def profile_from_config(config: ExperimentConfig) -> Optional[KernelProfile]:
    kernel = config.kernel
    spec = config.spec
    if kernel.kind == "adjacency":
        return None
    if kernel.kind == "tabulated":
        profile = load_kernel_file(kernel.path)
        if profile.spec != spec:
            raise ConfigError(f"kernel file is for {profile.spec}, config asks for {spec}", path=kernel.path)
        return profile
    alpha = 1.0 if kernel.kind == "log_bessel" else kernel.alpha
    return bessel_profile(spec, alpha)


def generator_from_config(config: ExperimentConfig) -> GeneratorMatrix:
    profile = profile_from_config(config)
    if profile is not None:
        return build_generator(profile)
    adjacency = load_adjacency_file(config.kernel.path)
    if adjacency.spec != config.spec:
        raise ConfigError(f"adjacency file is for {adjacency.spec}, config asks for {config.spec}", path=config.kernel.path)
    return build_adjacency_generator(config.spec, adjacency)


def spectrum_summary(s: SpectralData) -> Dict[str, object]:
    g = s.generator
    forecast = None
    if g.profile is not None:
        forecast = [
            {"eigenvalue": value, "multiplicity": mult} for value, mult in closed_form_spectrum(g.profile).pairs
        ]
    return {
        "p": s.spec.p,
        "l": s.spec.l,
        "source": g.source.value,
        "tau_cluster": s.groups.tau,
        "collapsed": s.groups.collapsed,
        "eigenspaces": [
            {"eigenvalue": cluster.eigenvalue, "multiplicity": cluster.dimension} for cluster in s.groups.clusters
        ],
        "forecast": forecast,
    }


def snapshot_file(snapshot: WalkSnapshot) -> MatrixFile:
    header = {
        "p": str(snapshot.spec.p),
        "l": str(snapshot.spec.l),
        "kind": snapshot.kind.value,
        "t": repr(snapshot.t),
        "provenance": snapshot.provenance.value,
    }
    return MatrixFile(header=header, values=snapshot.matrix)


def generator_file(g: GeneratorMatrix) -> MatrixFile:
    header = {"p": str(g.spec.p), "l": str(g.spec.l), "kind": "generator", "provenance": g.source.value}
    if g.profile is not None:
        header["kernel"] = g.profile.describe()
    return MatrixFile(header=header, values=g.entries)


def limiting_file(limit: LimitingDistribution) -> MatrixFile:
    params = ";".join(f"{key}={value!r}" for key, value in limit.params.items())
    header = {
        "p": str(limit.spec.p),
        "l": str(limit.spec.l),
        "kind": "limiting",
        "method": f"{limit.method}({params})",
        "provenance": "spectral" if limit.method == "spectral" else "quadrature",
    }
    return MatrixFile(header=header, values=limit.chi)


def _figure_tags(profile: Optional[KernelProfile]) -> Dict[str, str]:
    if profile is not None and profile.kind is SymbolKind.LOG_BESSEL:
        return {"ctmc": "figure-6", "ctqmc": "figure-7", "limiting": "figure-8"}
    return {"ctmc": "figure-2", "ctqmc": "figure-3", "limiting": "figure-5"}


def _trajectory_target(spec: GroupSpec, configured: Optional[int]) -> int:
    if configured is not None:
        return configured
    return DEFAULT_TRAJECTORY_TARGET if DEFAULT_TRAJECTORY_TARGET < spec.size else 0


def _alpha_snapshot(spec: GroupSpec, alpha: float, t: float, tau: float) -> WalkSnapshot:
    s = eigendecompose(build_generator(bessel_profile(spec, alpha)), tau)
    return quantum_transition(s, t)


class ExperimentRunner:
    """Computes every figure's data for one configuration on a worker pool."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config.validate()
        self.layout = OutputLayout(config.out)
        self.executor = ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix="ultrawalks")

    def _write(self, stem: Path, matrix: MatrixFile) -> List[Path]:
        return write_matrix(stem, matrix, self.config.formats)

    def run(self) -> Manifest:
        config = self.config
        spec = config.spec
        tau = config.averaging.tau_cluster
        manifest = Manifest(base_dir=self.layout.base_dir)
        layout = self.layout

        g = generator_from_config(config)
        tags = _figure_tags(g.profile)
        logger.info("run on %s with %s kernel", spec, config.kernel.describe())
        s = eigendecompose(g, tau)

        manifest.add(layout, self._write(layout.generator_stem(), generator_file(g)), "figure-1", "generator matrix J^(l)")
        spectrum_path = write_json_document(layout.base_dir / "spectrum.json", spectrum_summary(s))
        manifest.add(layout, [spectrum_path], "spectrum", "eigenvalues with multiplicities")

        classical = [self.executor.submit(classical_transition, s, t) for t in config.times]
        quantum = [self.executor.submit(quantum_transition, s, t) for t in config.times]
        for future in classical:
            snapshot = future.result()
            paths = self._write(layout.snapshot_stem(WalkKind.CLASSICAL, snapshot.t), snapshot_file(snapshot))
            manifest.add(layout, paths, tags["ctmc"], f"CTMC transition matrix at t={_tag(snapshot.t)}")
        for future in quantum:
            snapshot = future.result()
            paths = self._write(layout.snapshot_stem(WalkKind.QUANTUM, snapshot.t), snapshot_file(snapshot))
            manifest.add(layout, paths, tags["ctqmc"], f"CTQMC transition matrix at t={_tag(snapshot.t)}")

        self._write_trajectories(s, manifest, tags)

        spectral = limiting_spectral(s, tau)
        quadrature = limiting_quadrature(s, config.averaging.T, config.averaging.steps, executor=self.executor)
        for limit in (spectral, quadrature):
            paths = self._write(layout.limiting_stem(limit.method), limiting_file(limit))
            manifest.add(layout, paths, tags["limiting"], f"limiting distribution ({limit.method})")
        comparison = {limit.method: compare(limit).as_dict() for limit in (spectral, quadrature)}
        comparison_path = write_json_document(layout.limiting_stem("comparison").with_suffix(".json"), comparison)
        manifest.add(layout, [comparison_path], tags["limiting"], "chi against the stationary distribution")

        if config.sweep.enabled and g.profile is not None and g.profile.kind is not SymbolKind.TABULATED:
            self._write_sweeps(spec, manifest)

        suite = run_validation(g, config.times, tau, spectral=s, limits=[quadrature])
        validation_path = write_json_document(layout.base_dir / "validation.json", suite.as_dict())
        manifest.add(layout, [validation_path], "validation", "invariant checks")
        manifest.validation_passed = suite.passed

        write_json_document(layout.base_dir / "manifest.json", manifest.as_dict())
        logger.info("wrote %d files to %s", len(manifest.entries), layout.base_dir)
        return manifest

    def _write_trajectories(self, s: SpectralData, manifest: Manifest, tags: Dict[str, str]) -> None:
        sweep = self.config.sweep
        target = _trajectory_target(s.spec, sweep.trajectory_target)
        states = [target] + sphere_representatives(s.spec, target)
        times = np.linspace(0.0, sweep.trajectory_horizon, sweep.trajectory_points)
        for kind, tag in ((WalkKind.CLASSICAL, tags["ctmc"]), (WalkKind.QUANTUM, tags["ctqmc"])):
            series = trajectories(s, target, states, times, kind)
            header = {
                "p": str(s.spec.p),
                "l": str(s.spec.l),
                "kind": f"{kind.value}-trajectory",
                "target": str(target),
                "columns": ";".join(["t"] + [str(state) for state in states]),
                "provenance": "spectral",
            }
            values = np.column_stack([times, series])
            paths = self._write(self.layout.trajectory_stem(kind), MatrixFile(header=header, values=values))
            manifest.add(self.layout, paths, tag, f"{kind.value} transition probabilities into state {target}")

    def _write_sweeps(self, spec: GroupSpec, manifest: Manifest) -> None:
        config = self.config
        sweep = config.sweep
        tau = config.averaging.tau_cluster
        futures = [
            self.executor.submit(_alpha_snapshot, spec, alpha, sweep.snapshot_time, tau)
            for alpha in sweep.snapshot_alphas
        ]
        for alpha, future in zip(sweep.snapshot_alphas, futures):
            paths = self._write(self.layout.alpha_snapshot_stem(alpha, sweep.snapshot_time), snapshot_file(future.result()))
            manifest.add(self.layout, paths, "figure-4", f"CTQMC at t={_tag(sweep.snapshot_time)}, alpha={_tag(alpha)}")

        points = alpha_sweep(
            spec, sweep.chi_alphas, config.averaging.T, config.averaging.steps, tau, executor=self.executor
        )
        for point in points:
            paths = self._write(self.layout.sweep_stem(point.alpha), limiting_file(point.quadrature))
            manifest.add(self.layout, paths, "figure-9", f"limiting distribution, alpha={_tag(point.alpha)}")
        curve = MatrixFile(
            header={
                "p": str(spec.p),
                "l": str(spec.l),
                "kind": "chi-max-curve",
                "columns": "alpha;chi_max;chi_max_spectral;diagonal_ratio",
                "provenance": "quadrature",
            },
            values=np.array([[pt.alpha, pt.chi_max, pt.chi_max_spectral, pt.diagonal_ratio] for pt in points]),
        )
        paths = write_matrix(self.layout.ensure_dir("chi_sweep") / "chi_max", curve, ["csv"])
        manifest.add(self.layout, paths, "figure-10", "||chi||_max against alpha")

    def shutdown(self) -> None:
        self.executor.shutdown(wait=True, cancel_futures=True)


def run(config: ExperimentConfig) -> Manifest:
    runner = ExperimentRunner(config)
    try:
        return runner.run()
    finally:
        runner.shutdown()
