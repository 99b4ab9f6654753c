"""Classical (heat) and quantum (Schrodinger) propagation on G_l.

The reference path goes through the eigendecomposition: ``e^{tJ}`` and
``e^{itJ}`` are ``V diag(f(lambda)) V^T``. Two independent paths rebuild the
same matrices from the kernel's Fourier symbol alone: the heat kernel Z_0 for
the classical chain and the oscillatory integral for the quantum amplitudes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence

import numpy as np

from .errors import DomainError
from .kernel import KernelProfile, SymbolKind
from .padic import GroupSpec, check_state, norm_of_difference, valuation_matrix
from .spectral import SpectralData

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-10
ENTRY_SLACK = 1e-12


class WalkKind(str, Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


class Provenance(str, Enum):
    SPECTRAL = "spectral"
    OSCILLATORY = "oscillatory"
    HEAT_KERNEL = "heat-kernel"


@dataclass(frozen=True, eq=False)
class WalkSnapshot:
    spec: GroupSpec
    t: float
    kind: WalkKind
    matrix: np.ndarray
    provenance: Provenance


@dataclass(frozen=True)
class HeatKernelValue:
    m: int
    t: float
    value: float


def _check_time(t: float) -> float:
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    return float(t)


def classical_transition(s: SpectralData, t: float) -> WalkSnapshot:
    """p(t) = e^{tJ}; rows converge to the uniform distribution p^{-l}."""

    t = _check_time(t)
    matrix = (s.vectors * np.exp(t * s.eigenvalues)) @ s.vectors.T
    return WalkSnapshot(s.spec, t, WalkKind.CLASSICAL, matrix, Provenance.SPECTRAL)


def amplitude_matrix(s: SpectralData, t: float) -> np.ndarray:
    """The unitary U(t) = e^{itJ}."""

    t = _check_time(t)
    return (s.vectors * np.exp(1j * t * s.eigenvalues)) @ s.vectors.T


def quantum_transition(s: SpectralData, t: float) -> WalkSnapshot:
    """pi_{I,J}(t) = |<e_I| e^{itJ} |e_J>|^2."""

    amplitudes = amplitude_matrix(s, t)
    matrix = amplitudes.real**2 + amplitudes.imag**2
    return WalkSnapshot(s.spec, float(t), WalkKind.QUANTUM, matrix, Provenance.SPECTRAL)


def evolve_state(s: SpectralData, psi: np.ndarray, t: float) -> np.ndarray:
    return amplitude_matrix(s, t) @ np.asarray(psi, dtype=complex)


def evolve_distribution(s: SpectralData, u: np.ndarray, t: float) -> np.ndarray:
    return np.asarray(u, dtype=float) @ classical_transition(s, t).matrix


def character_sphere_sum(spec: GroupSpec, valuation: int, j: int) -> float:
    """Sum of chi_p(x xi) over the characters xi of G_l with |xi|_p = p^j.

    ``valuation`` is that of x (``l`` for x = 0). The sum is p^j - p^{j-1}
    when valuation >= j, -p^{j-1} when valuation == j - 1, and 0 otherwise.
    """

    if not 0 <= j <= spec.l:
        raise DomainError(f"frequency index j={j} outside [0, {spec.l}]")
    if j == 0:
        return 1.0
    p = spec.p
    if valuation >= j:
        return float(p**j - p ** (j - 1))
    if valuation == j - 1:
        return -float(p ** (j - 1))
    return 0.0


def _amplitudes_by_valuation(profile: KernelProfile, t: float) -> np.ndarray:
    spec = profile.spec
    phases = [np.exp(-1j * t * profile.symbol(j)) for j in range(1, spec.l + 1)]
    prefactor = float(spec.p) ** -spec.l * np.exp(1j * t)
    out = np.empty(spec.l + 1, dtype=complex)
    for v in range(spec.l + 1):
        # the unit ball carries J-hat = 1
        total = np.exp(-1j * t) + sum(phase * character_sphere_sum(spec, v, j) for j, phase in enumerate(phases, start=1))
        out[v] = prefactor * total
    return out


def amplitude_oscillatory(profile: KernelProfile, r: int, v: int, t: float) -> complex:
    """Transition amplitude from the oscillatory integral over the frequency balls."""

    t = _check_time(t)
    valuation = norm_of_difference(profile.spec, r, v).v
    return complex(_amplitudes_by_valuation(profile, t)[valuation])


def oscillatory_transition(profile: KernelProfile, t: float) -> WalkSnapshot:
    t = _check_time(t)
    amplitudes = _amplitudes_by_valuation(profile, t)[valuation_matrix(profile.spec)]
    matrix = amplitudes.real**2 + amplitudes.imag**2
    return WalkSnapshot(profile.spec, t, WalkKind.QUANTUM, matrix, Provenance.OSCILLATORY)


def heat_kernel_value(profile: KernelProfile, m: int, t: float) -> HeatKernelValue:
    """Z_0(x, t) at |x|_p = p^{-m}, x != 0, as the finite character sum."""

    t = _check_time(t)
    if m < 0:
        raise DomainError(f"sphere index m={m} must be >= 0")
    if m >= profile.spec.l and profile.kind is SymbolKind.TABULATED:
        raise DomainError(f"tabulated kernels define Z_0 only for m < {profile.spec.l}")
    p = profile.spec.p
    total = 1.0
    for j in range(1, m + 1):
        total += (p**j - p ** (j - 1)) * np.exp(-t * (1.0 - profile.symbol(j)))
    total -= p**m * np.exp(-t * (1.0 - profile.symbol(m + 1)))
    return HeatKernelValue(m=m, t=t, value=float(total))


def heat_kernel_ball_mass(profile: KernelProfile, n: int, t: float) -> float:
    """Integral of Z_0(., t) over the ball p^n Z_p."""

    t = _check_time(t)
    p = profile.spec.p
    total = 1.0
    for j in range(1, n + 1):
        total += (p**j - p ** (j - 1)) * np.exp(-t * (1.0 - profile.symbol(j)))
    return float(p**-n * total)


def classical_transition_via_heat(profile: KernelProfile, t: float) -> WalkSnapshot:
    """p_{r,v}(t) = p^{-l} Z_0(|v - r|_p, t) off the diagonal, mass complement on it."""

    t = _check_time(t)
    spec = profile.spec
    by_level = np.array([heat_kernel_value(profile, m, t).value for m in range(spec.l)] + [0.0])
    matrix = float(spec.p) ** -spec.l * by_level[valuation_matrix(spec)]
    np.fill_diagonal(matrix, 1.0 - matrix.sum(axis=1))
    return WalkSnapshot(spec, t, WalkKind.CLASSICAL, matrix, Provenance.HEAT_KERNEL)


def trajectories(
    s: SpectralData,
    target: int,
    states: Sequence[int],
    times: Sequence[float],
    kind: WalkKind,
) -> np.ndarray:
    """Time series of p_{I,target}(t) or pi_{I,target}(t); shape (len(times), len(states))."""

    check_state(s.spec, target)
    rows = [check_state(s.spec, state) for state in states]
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise DomainError("trajectory times must be nonnegative")
    weights = s.vectors[rows, :] * s.vectors[target, :]
    if kind is WalkKind.CLASSICAL:
        return (weights @ np.exp(np.outer(s.eigenvalues, times))).T
    amplitudes = weights @ np.exp(1j * np.outer(s.eigenvalues, times))
    return (amplitudes.real**2 + amplitudes.imag**2).T


def snapshot_violations(snapshot: WalkSnapshot, tol: float = STOCHASTIC_TOL) -> List[str]:
    """Stochasticity checks; quantum snapshots must also be column-stochastic."""

    matrix = snapshot.matrix
    problems = []
    row_dev = float(np.max(np.abs(matrix.sum(axis=1) - 1.0)))
    if row_dev > tol:
        problems.append(f"rows sum to 1 within {row_dev:.3e} only")
    if snapshot.kind is WalkKind.QUANTUM:
        col_dev = float(np.max(np.abs(matrix.sum(axis=0) - 1.0)))
        if col_dev > tol:
            problems.append(f"columns sum to 1 within {col_dev:.3e} only")
    if matrix.min() < -ENTRY_SLACK or matrix.max() > 1.0 + ENTRY_SLACK:
        problems.append(f"entries leave [0, 1]: min {matrix.min():.3e}, max {matrix.max():.3e}")
    return problems
