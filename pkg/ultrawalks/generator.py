"""Dense p^l x p^l generator (rate) matrices J^(l).

Kernel generators discretize the convolution operator ``J * phi - phi``:
off-diagonal entries are ``p^{-l} J(|I - K|_p)`` and the diagonal is chosen so
that every row sums to zero. Adjacency generators reduce the same shape to a
graph: ``p^{-l} A_{I,K}`` off the diagonal and ``-p^{-l} val(K)`` on it.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DomainError
from .kernel import KernelProfile, SymbolKind
from .padic import GroupSpec, check_state, valuation_matrix

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-12
STRUCTURE_TOL = 1e-14


class GeneratorSource(str, Enum):
    KERNEL = "kernel"
    ADJACENCY = "adjacency"


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    spec: GroupSpec
    entries: np.ndarray
    source: GeneratorSource
    profile: Optional[KernelProfile] = None
    diagonal_formula_gap: float = 0.0

    @property
    def size(self) -> int:
        return self.spec.size


@dataclass(frozen=True, eq=False)
class AdjacencySpec:
    """A simple undirected graph on a vertex subset of G_l."""

    spec: GroupSpec
    vertices: FrozenSet[int]
    matrix: np.ndarray

    @classmethod
    def from_edges(cls, spec: GroupSpec, vertices: Iterable[int], edges: Iterable[Sequence[int]]) -> "AdjacencySpec":
        vertex_set = frozenset(check_state(spec, v) for v in vertices)
        matrix = np.zeros((spec.size, spec.size), dtype=np.int64)
        for edge in edges:
            if len(edge) != 2:
                raise DomainError(f"edge {edge!r} must have two endpoints")
            i, k = (check_state(spec, v) for v in edge)
            if i == k:
                raise DomainError(f"self-loop at vertex {i}")
            if i not in vertex_set or k not in vertex_set:
                raise DomainError(f"edge ({i}, {k}) leaves the vertex set")
            matrix[i, k] = matrix[k, i] = 1
        return cls(spec=spec, vertices=vertex_set, matrix=matrix)

    def valences(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def check(self) -> None:
        a = self.matrix
        if a.shape != (self.spec.size, self.spec.size):
            raise DomainError(f"adjacency shape {a.shape} does not match {self.spec}")
        if not np.array_equal(a, a.T):
            raise DomainError("adjacency matrix is not symmetric")
        if np.any(np.diag(a) != 0):
            raise DomainError("adjacency matrix has a nonzero diagonal")
        if not np.all((a == 0) | (a == 1)):
            raise DomainError("adjacency entries must be 0 or 1")
        outside = np.ones(self.spec.size, dtype=bool)
        outside[list(self.vertices)] = False
        if np.any(a[outside, :]) or np.any(a[:, outside]):
            raise DomainError("adjacency has edges at vertices outside the vertex set")


def build_generator(profile: KernelProfile) -> GeneratorMatrix:
    spec = profile.spec
    p, l = spec.p, spec.l
    # index l of the lookup is the diagonal placeholder
    level_values = np.array(list(profile.values) + [0.0]) * float(p) ** -l
    entries = level_values[valuation_matrix(spec)]
    off_diagonal_sums = entries.sum(axis=1)
    np.fill_diagonal(entries, -off_diagonal_sums)

    closed_diagonal = profile.tail_mass - 1.0
    gap = float(np.max(np.abs(closed_diagonal + off_diagonal_sums)))
    logger.debug("generator for %s on %s: diagonal formula gap %.3e", profile.describe(), spec, gap)
    return GeneratorMatrix(
        spec=spec,
        entries=entries,
        source=GeneratorSource.KERNEL,
        profile=profile,
        diagonal_formula_gap=gap,
    )


def build_adjacency_generator(spec: GroupSpec, adj: AdjacencySpec) -> GeneratorMatrix:
    if adj.spec != spec:
        raise DomainError(f"adjacency built for {adj.spec}, not {spec}")
    adj.check()
    scale = float(spec.p) ** -spec.l
    entries = scale * adj.matrix.astype(float)
    np.fill_diagonal(entries, -scale * adj.valences())
    return GeneratorMatrix(spec=spec, entries=entries, source=GeneratorSource.ADJACENCY)


def load_adjacency_file(path: Path) -> AdjacencySpec:
    """Read ``{"p", "l", "vertices": [...], "edges": [[I, K], ...]}``."""

    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc.msg})", path=path) from exc
    for key in ("p", "l", "vertices", "edges"):
        if key not in document:
            raise ConfigError("missing required key", path=path, field=key)
    try:
        spec = GroupSpec(int(document["p"]), int(document["l"]))
        return AdjacencySpec.from_edges(spec, document["vertices"], document["edges"])
    except DomainError as exc:
        raise ConfigError(str(exc), path=path) from exc


@dataclass
class ValidationReport:
    passed: bool
    max_row_sum_deviation: float
    max_asymmetry: float
    min_off_diagonal: float
    diagonal_formula_gap: float
    ultrametric: str  # "pass", "fail" or "not applicable"
    failures: List[str] = field(default_factory=list)
    witnesses: List[Tuple[int, int]] = field(default_factory=list)

    def as_dict(self) -> Dict[str, object]:
        return {
            "passed": self.passed,
            "max_row_sum_deviation": self.max_row_sum_deviation,
            "max_asymmetry": self.max_asymmetry,
            "min_off_diagonal": self.min_off_diagonal,
            "diagonal_formula_gap": self.diagonal_formula_gap,
            "ultrametric": self.ultrametric,
            "failures": list(self.failures),
            "witnesses": [list(pair) for pair in self.witnesses],
        }


def _diagonal_tolerance(g: GeneratorMatrix) -> float:
    if g.profile is not None and g.profile.kind is SymbolKind.TABULATED:
        return 1e-9
    return ROW_SUM_TOL


def validate_generator(g: GeneratorMatrix, max_witnesses: int = 8) -> ValidationReport:
    entries = g.entries
    n = g.spec.size
    failures: List[str] = []
    witnesses: List[Tuple[int, int]] = []

    row_dev = float(np.max(np.abs(entries.sum(axis=1)))) if n else 0.0
    if row_dev > ROW_SUM_TOL:
        failures.append(f"row sums deviate from zero by {row_dev:.3e}")
        worst = int(np.argmax(np.abs(entries.sum(axis=1))))
        witnesses.append((worst, worst))

    asymmetry_matrix = np.abs(entries - entries.T)
    asymmetry = float(asymmetry_matrix.max())
    if asymmetry > 0.0:
        failures.append(f"matrix is not exactly symmetric (max gap {asymmetry:.3e})")
        i, k = np.unravel_index(int(np.argmax(asymmetry_matrix)), asymmetry_matrix.shape)
        witnesses.append((int(i), int(k)))

    off = entries[~np.eye(n, dtype=bool)]
    min_off = float(off.min()) if off.size else 0.0
    if min_off < 0.0:
        failures.append(f"negative off-diagonal entry {min_off:.3e}")

    if g.diagonal_formula_gap > _diagonal_tolerance(g):
        failures.append(f"diagonal formulas disagree by {g.diagonal_formula_gap:.3e}")

    if g.source is GeneratorSource.ADJACENCY:
        ultrametric = "not applicable"
    else:
        valuations = valuation_matrix(g.spec)
        bad: List[Tuple[int, int]] = []
        for m in range(g.spec.l):
            mask = valuations == m
            reference = float(np.median(entries[mask]))
            deviant = np.argwhere(mask & (np.abs(entries - reference) > STRUCTURE_TOL))
            bad.extend((int(i), int(k)) for i, k in deviant[:max_witnesses])
        ultrametric = "fail" if bad else "pass"
        if bad:
            failures.append(f"entries not constant on norm classes ({len(bad)} witnesses shown)")
            witnesses.extend(bad[:max_witnesses])

    report = ValidationReport(
        passed=not failures,
        max_row_sum_deviation=row_dev,
        max_asymmetry=asymmetry,
        min_off_diagonal=min_off,
        diagonal_formula_gap=g.diagonal_formula_gap,
        ultrametric=ultrametric,
        failures=failures,
        witnesses=witnesses,
    )
    if not report.passed:
        logger.warning("generator on %s failed validation: %s", g.spec, "; ".join(failures))
    return report


def entry_counts_by_norm(g: GeneratorMatrix) -> Dict[int, int]:
    """Count off-diagonal entries equal to p^{-l} J(p^{-m}) for each level m."""

    if g.profile is None:
        raise DomainError("entry counts by norm need a kernel-built generator")
    n = g.spec.size
    off = g.entries[~np.eye(n, dtype=bool)]
    scale = float(g.spec.p) ** -g.spec.l
    return {m: int(np.count_nonzero(off == scale * value)) for m, value in enumerate(g.profile.values)}
