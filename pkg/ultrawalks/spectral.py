"""Eigendecomposition of generator matrices and the closed-form spectrum.

For a kernel generator the characters of G_l diagonalize J^(l): the trivial
character has eigenvalue 0, and the (p-1)p^{j-1} characters of conductor p^j
share the eigenvalue J-hat(p^j) - 1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from .errors import DomainError, NumericError
from .generator import GeneratorMatrix, GeneratorSource
from .kernel import KernelProfile
from .padic import GroupSpec

logger = logging.getLogger(__name__)

DEFAULT_TAU_CLUSTER = 1e-8
FORECAST_DISTINCT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Eigenspace:
    eigenvalue: float
    indices: Tuple[int, ...]
    projector: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class EigenspacePartition:
    clusters: Tuple[Eigenspace, ...]
    tau: float
    expected: Optional[int] = None

    @property
    def collapsed(self) -> bool:
        return self.expected is not None and len(self.clusters) < self.expected

    @property
    def sizes(self) -> List[int]:
        return [cluster.dimension for cluster in self.clusters]

    def completeness_error(self) -> float:
        n = self.clusters[0].projector.shape[0]
        total = sum(cluster.projector for cluster in self.clusters)
        return float(np.max(np.abs(total - np.eye(n))))


@dataclass(frozen=True, eq=False)
class SpectralData:
    generator: GeneratorMatrix
    eigenvalues: np.ndarray
    vectors: np.ndarray
    groups: EigenspacePartition

    @property
    def spec(self) -> GroupSpec:
        return self.generator.spec


@dataclass(frozen=True)
class SpectrumForecast:
    pairs: Tuple[Tuple[float, int], ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(mult for _, mult in self.pairs)

    def expanded(self) -> np.ndarray:
        values = [value for value, mult in self.pairs for _ in range(mult)]
        return np.sort(np.array(values))


def closed_form_spectrum(profile: KernelProfile) -> SpectrumForecast:
    spec = profile.spec
    p = spec.p
    pairs = [(0.0, 1)]
    for j in range(1, spec.l + 1):
        pairs.append((profile.symbol(j) - 1.0, (p - 1) * p ** (j - 1)))
    return SpectrumForecast(pairs=tuple(pairs))


def _forecast_count(g: GeneratorMatrix) -> Optional[int]:
    """Distinct closed-form eigenvalues, independent of the clustering tolerance."""

    if g.source is not GeneratorSource.KERNEL or g.profile is None:
        return None
    values = sorted({value for value, _ in closed_form_spectrum(g.profile).pairs})
    distinct = 1
    for previous, current in zip(values, values[1:]):
        if current - previous > FORECAST_DISTINCT_TOL:
            distinct += 1
    return distinct


def _cluster(eigenvalues: np.ndarray, vectors: np.ndarray, tau: float, expected: Optional[int]) -> EigenspacePartition:
    if tau <= 0:
        raise DomainError(f"clustering tolerance must be positive, got {tau!r}")
    runs: List[List[int]] = [[0]]
    for k in range(1, len(eigenvalues)):
        if eigenvalues[k] - eigenvalues[k - 1] > tau:
            runs.append([k])
        else:
            runs[-1].append(k)
    clusters = []
    for run in runs:
        block = vectors[:, run]
        clusters.append(
            Eigenspace(
                eigenvalue=float(np.mean(eigenvalues[run])),
                indices=tuple(run),
                projector=block @ block.T,
            )
        )
    partition = EigenspacePartition(clusters=tuple(clusters), tau=tau, expected=expected)
    if partition.collapsed:
        logger.warning(
            "tau=%g merged eigenspaces: %d clusters, %d expected", tau, len(clusters), expected
        )
    return partition


def eigendecompose(g: GeneratorMatrix, tau_cluster: float = DEFAULT_TAU_CLUSTER) -> SpectralData:
    try:
        eigenvalues, vectors = linalg.eigh(g.entries, driver="evd")
    except linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver failed for {g.spec}: {exc}") from exc
    groups = _cluster(eigenvalues, vectors, tau_cluster, _forecast_count(g))
    logger.debug("decomposed %s generator on %s into %d eigenspaces", g.source.value, g.spec, len(groups.clusters))
    return SpectralData(generator=g, eigenvalues=eigenvalues, vectors=vectors, groups=groups)


def group_eigenvalues(s: SpectralData, tau_cluster: float) -> EigenspacePartition:
    """Single-linkage clusters of the sorted eigenvalues with gap threshold tau."""

    return _cluster(s.eigenvalues, s.vectors, tau_cluster, _forecast_count(s.generator))


def stationary_distribution(s: SpectralData) -> np.ndarray:
    """Normalized invariant measure from the zero eigenspace.

    Rows of a symmetric generator sum to zero, so the uniform vector is always
    invariant; for a connected chain the zero eigenspace is one-dimensional
    and this returns p^{-l} in every entry.
    """

    zero = s.groups.clusters[-1]
    if abs(zero.eigenvalue) > s.groups.tau:
        raise NumericError("generator has no zero eigenvalue")
    weights = zero.projector @ np.ones(s.spec.size)
    return weights / weights.sum()


def spectral_gap(s: SpectralData) -> float:
    nonzero = [cluster.eigenvalue for cluster in s.groups.clusters if abs(cluster.eigenvalue) > s.groups.tau]
    if not nonzero:
        return 0.0
    return -max(nonzero)
