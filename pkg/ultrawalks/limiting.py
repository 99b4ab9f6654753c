"""Long-time averages of the quantum walk and their comparison with p^{-l}.

``chi = lim (1/T) int_0^T pi(t) dt``. The quadrature path evaluates that
average on a finite window; the spectral path drops the oscillating cross
terms and keeps ``chi_{I,J} = sum_lambda (P_lambda)_{I,J}^2``.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError
from .generator import build_generator
from .kernel import bessel_profile
from .padic import GroupSpec
from .spectral import DEFAULT_TAU_CLUSTER, SpectralData, eigendecompose, group_eigenvalues

logger = logging.getLogger(__name__)

# complex128 cells evaluated per quadrature batch
_BATCH_CELLS = 2**21


@dataclass(frozen=True, eq=False)
class LimitingDistribution:
    spec: GroupSpec
    chi: np.ndarray
    method: str
    params: Dict[str, float]
    warnings: Tuple[str, ...] = ()

    @property
    def tolerance(self) -> float:
        return 1e-10 if self.method == "spectral" else 1e-8


@dataclass(frozen=True)
class ComparisonReport:
    p_sta: float
    chi_min: float
    chi_max: float
    chi_diag_mean: float
    chi_diag_min: float
    chi_offdiag_mean: float
    dominance: bool
    diagonal_dominance: bool

    def as_dict(self) -> Dict[str, object]:
        return {
            "p_sta": self.p_sta,
            "chi_min": self.chi_min,
            "chi_max": self.chi_max,
            "chi_diag_mean": self.chi_diag_mean,
            "chi_diag_min": self.chi_diag_min,
            "chi_offdiag_mean": self.chi_offdiag_mean,
            "dominance": self.dominance,
            "diagonal_dominance": self.diagonal_dominance,
        }


def default_steps(T: float) -> int:
    """Grid with spacing 0.1 on [0, T]."""

    return max(2, int(round(10 * T)) + 1)


def _outer_products(s: SpectralData) -> np.ndarray:
    """Row k holds v_k v_k^T flattened, so U(t) = phases(t) @ W."""

    n = s.spec.size
    return np.einsum("ik,jk->kij", s.vectors, s.vectors).reshape(n, n * n)


def _integrate_chunk(s: SpectralData, outer: np.ndarray, times: np.ndarray, h: float) -> np.ndarray:
    angles = np.outer(times, s.eigenvalues)
    real = np.cos(angles) @ outer
    imag = np.sin(angles) @ outer
    n = s.spec.size
    values = (real**2 + imag**2).reshape(len(times), n, n)
    return trapezoid(values, dx=h, axis=0)


def limiting_quadrature(
    s: SpectralData,
    T: float,
    steps: Optional[int] = None,
    executor: Optional[Executor] = None,
) -> LimitingDistribution:
    """Composite-trapezoid average of pi(t) over ``steps`` uniform points on [0, T]."""

    if T <= 0:
        raise DomainError(f"averaging window T must be positive, got {T!r}")
    steps = default_steps(T) if steps is None else int(steps)
    if steps < 2:
        raise DomainError(f"quadrature needs at least 2 points, got {steps}")

    times = np.linspace(0.0, T, steps)
    h = T / (steps - 1)
    n = s.spec.size
    batch = max(2, _BATCH_CELLS // (n * n))
    # consecutive chunks share an endpoint so their trapezoids add up
    bounds = list(range(0, steps - 1, batch - 1)) + [steps - 1]
    chunks = [times[a : b + 1] for a, b in zip(bounds, bounds[1:])]

    outer = _outer_products(s)
    if executor is None:
        partials = [_integrate_chunk(s, outer, chunk, h) for chunk in chunks]
    else:
        futures = [executor.submit(_integrate_chunk, s, outer, chunk, h) for chunk in chunks]
        partials = [future.result() for future in futures]

    total = np.zeros((n, n))
    for partial in partials:
        total += partial
    logger.debug("quadrature on %s: %d points in %d chunks", s.spec, steps, len(chunks))
    return LimitingDistribution(
        spec=s.spec,
        chi=total / T,
        method="quadrature",
        params={"T": float(T), "steps": steps},
    )


def limiting_spectral(s: SpectralData, tau_cluster: float = DEFAULT_TAU_CLUSTER) -> LimitingDistribution:
    partition = s.groups if tau_cluster == s.groups.tau else group_eigenvalues(s, tau_cluster)
    chi = np.zeros((s.spec.size, s.spec.size))
    for cluster in partition.clusters:
        chi += cluster.projector**2
    warnings: List[str] = []
    if partition.collapsed:
        message = (
            f"tau={tau_cluster:g} gives {len(partition.clusters)} eigenspaces, "
            f"{partition.expected} expected; cross terms of merged eigenvalues are kept"
        )
        logger.warning(message)
        warnings.append(message)
    return LimitingDistribution(
        spec=s.spec,
        chi=chi,
        method="spectral",
        params={"tau_cluster": float(tau_cluster)},
        warnings=tuple(warnings),
    )


def compare(limit: LimitingDistribution) -> ComparisonReport:
    spec = limit.spec
    chi = limit.chi
    n = spec.size
    p_sta = float(spec.p) ** -spec.l
    diagonal = np.diag(chi)
    off = chi[~np.eye(n, dtype=bool)]
    chi_min = float(chi.min())
    return ComparisonReport(
        p_sta=p_sta,
        chi_min=chi_min,
        chi_max=float(chi.max()),
        chi_diag_mean=float(diagonal.mean()),
        chi_diag_min=float(diagonal.min()),
        chi_offdiag_mean=float(off.mean()) if off.size else math.nan,
        dominance=chi_min > p_sta,
        diagonal_dominance=bool(diagonal.min() > p_sta),
    )


@dataclass(frozen=True, eq=False)
class SweepPoint:
    alpha: float
    spectral: LimitingDistribution
    quadrature: LimitingDistribution

    @property
    def chi_max(self) -> float:
        """||chi||_max of the finite-window average."""

        return float(self.quadrature.chi.max())

    @property
    def chi_max_spectral(self) -> float:
        return float(self.spectral.chi.max())

    @property
    def diagonal_ratio(self) -> float:
        report = compare(self.quadrature)
        return report.chi_diag_mean / report.chi_offdiag_mean


def alpha_sweep(
    spec: GroupSpec,
    alphas: Sequence[float],
    T: float,
    steps: Optional[int] = None,
    tau_cluster: float = DEFAULT_TAU_CLUSTER,
    executor: Optional[Executor] = None,
) -> List[SweepPoint]:
    """Limiting distributions of the Bessel walks for each alpha."""

    points = []
    for alpha in alphas:
        s = eigendecompose(build_generator(bessel_profile(spec, alpha)), tau_cluster)
        points.append(
            SweepPoint(
                alpha=float(alpha),
                spectral=limiting_spectral(s, tau_cluster),
                quadrature=limiting_quadrature(s, T, steps, executor=executor),
            )
        )
        logger.info("alpha=%g: ||chi||_max = %.6f", alpha, points[-1].chi_max)
    return points
