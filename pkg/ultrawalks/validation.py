"""The invariant suite behind ``ultrawalks validate`` and ``validation.json``."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .dynamics import (
    amplitude_matrix,
    classical_transition,
    classical_transition_via_heat,
    oscillatory_transition,
    quantum_transition,
    snapshot_violations,
)
from .generator import GeneratorMatrix, GeneratorSource, entry_counts_by_norm, validate_generator
from .kernel import SymbolKind, fourier_symbol_closed, fourier_symbol_from_profile
from .limiting import LimitingDistribution, limiting_spectral
from .padic import GroupSpec, sphere_size, valuation_matrix
from .spectral import SpectralData, closed_form_spectrum, eigendecompose

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 256
SEMIGROUP_TIMES = (0.5, 1.0, 3.0)


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    status: str  # "pass", "fail" or "skip"
    detail: str = ""


@dataclass
class ValidationSuite:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status != "fail" for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if check.status == "fail"]

    def record(self, module: str, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(module, name, "pass" if ok else "fail", detail))

    def skip(self, module: str, name: str, reason: str) -> None:
        self.checks.append(CheckResult(module, name, "skip", reason))

    def as_dict(self) -> Dict[str, object]:
        return {
            "passed": self.passed,
            "checks": [
                {"module": c.module, "name": c.name, "status": c.status, "detail": c.detail}
                for c in self.checks
            ],
        }


def _max_gap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def _check_padic(suite: ValidationSuite, spec: GroupSpec) -> None:
    n = spec.size
    valuations = valuation_matrix(spec)
    counts = [int(np.count_nonzero(valuations[0] == m)) for m in range(spec.l)]
    expected = [sphere_size(spec, m) for m in range(spec.l)]
    suite.record("padic", "sphere counts", counts == expected, f"{counts}")

    if n > EXHAUSTIVE_LIMIT:
        suite.skip("padic", "ultrametric inequality", f"{n} states exceed the exhaustive limit")
        suite.skip("padic", "translation invariance", f"{n} states exceed the exhaustive limit")
        return
    # larger valuation means smaller norm
    violations = 0
    for j in range(n):
        bound = np.minimum(valuations[:, j][:, None], valuations[j, :][None, :])
        violations += int(np.count_nonzero(valuations < bound))
    suite.record("padic", "ultrametric inequality", violations == 0, f"{violations} violating triples")

    shifted_ok = all(
        np.array_equal(np.roll(np.roll(valuations, shift, axis=0), shift, axis=1), valuations)
        for shift in range(n)
    )
    suite.record("padic", "translation invariance", shifted_ok)


def _check_kernel(suite: ValidationSuite, g: GeneratorMatrix) -> None:
    profile = g.profile
    if profile is None:
        suite.skip("kernel", "normalization", "adjacency generator")
        return
    tol = 1e-9 if profile.kind is SymbolKind.TABULATED else 1e-12
    mass = profile.total_mass()
    suite.record("kernel", "normalization", abs(mass - 1.0) <= tol, f"mass={mass!r}")
    symbol = profile.fourier_symbol()
    try:
        symbol.check()
        suite.record("kernel", "symbol bounds", True)
    except ValueError as exc:
        suite.record("kernel", "symbol bounds", False, str(exc))
    if profile.kind is SymbolKind.TABULATED:
        suite.skip("kernel", "closed-form symbol agreement", "tabulated kernel")
        return
    gap = max(
        abs(fourier_symbol_from_profile(profile, j) - fourier_symbol_closed(profile.spec, profile.alpha, j))
        for j in range(profile.spec.l + 1)
    )
    suite.record("kernel", "closed-form symbol agreement", gap <= 1e-10, f"max gap {gap:.3e}")
    values = symbol.values
    monotone = all(b < a for a, b in zip(values, values[1:]))
    suite.record("kernel", "strictly decreasing symbol", monotone)


def _check_generator(suite: ValidationSuite, g: GeneratorMatrix) -> None:
    report = validate_generator(g)
    suite.record("generator", "structure", report.passed, "; ".join(report.failures) or f"ultrametric: {report.ultrametric}")
    if g.profile is None:
        return
    counts = entry_counts_by_norm(g)
    p, l = g.spec.p, g.spec.l
    expected = {m: p**l * (p - 1) * p ** (l - m - 1) for m in range(l)}
    suite.record("generator", "entry counts by norm", counts == expected, f"{counts}")


def _check_spectral(suite: ValidationSuite, s: SpectralData) -> None:
    v = s.vectors
    n = s.spec.size
    suite.record("spectral", "orthonormality", _max_gap(v.T @ v, np.eye(n)) <= 1e-10)
    rebuilt = (v * s.eigenvalues) @ v.T
    suite.record("spectral", "reconstruction", _max_gap(rebuilt, s.generator.entries) <= 1e-9)
    top = float(s.eigenvalues.max())
    suite.record("spectral", "negative semidefinite", top <= 1e-10, f"max eigenvalue {top:.3e}")

    if s.generator.source is GeneratorSource.KERNEL and s.generator.profile is not None:
        forecast = closed_form_spectrum(s.generator.profile).expanded()
        gap = _max_gap(np.sort(s.eigenvalues), forecast)
        suite.record("spectral", "closed-form spectrum", gap <= 1e-9, f"max gap {gap:.3e}")
    else:
        suite.skip("spectral", "closed-form spectrum", "adjacency generator")

    projectors = [cluster.projector for cluster in s.groups.clusters]
    completeness = s.groups.completeness_error()
    idempotence = max(_max_gap(P @ P, P) for P in projectors)
    cross = max(
        (_max_gap(P @ Q, np.zeros_like(P)) for i, P in enumerate(projectors) for Q in projectors[i + 1 :]),
        default=0.0,
    )
    suite.record(
        "spectral",
        "projectors",
        max(completeness, idempotence, cross) <= 1e-9 and not s.groups.collapsed,
        f"{len(projectors)} eigenspaces",
    )


def _check_dynamics(suite: ValidationSuite, s: SpectralData, times: Sequence[float]) -> None:
    n = s.spec.size
    profile = s.generator.profile
    for t in times:
        p = classical_transition(s, t)
        pi = quantum_transition(s, t)
        problems = snapshot_violations(p) + snapshot_violations(pi)
        u = amplitude_matrix(s, t)
        unitary_gap = _max_gap(u @ u.conj().T, np.eye(n))
        if unitary_gap > 1e-10:
            problems.append(f"unitarity gap {unitary_gap:.3e}")
        if _max_gap(p.matrix, p.matrix.T) > 1e-10 or _max_gap(pi.matrix, pi.matrix.T) > 1e-10:
            problems.append("snapshot is not symmetric")
        suite.record("dynamics", f"snapshots t={t:g}", not problems, "; ".join(problems))
        if profile is None:
            continue
        heat_gap = _max_gap(classical_transition_via_heat(profile, t).matrix, p.matrix)
        suite.record("dynamics", f"heat-kernel path t={t:g}", heat_gap <= 1e-9, f"max gap {heat_gap:.3e}")
        osc_gap = _max_gap(oscillatory_transition(profile, t).matrix, pi.matrix)
        suite.record("dynamics", f"oscillatory path t={t:g}", osc_gap <= 1e-9, f"max gap {osc_gap:.3e}")

    semigroup_gap = max(
        _max_gap(
            classical_transition(s, t1 + t2).matrix,
            classical_transition(s, t1).matrix @ classical_transition(s, t2).matrix,
        )
        for t1 in SEMIGROUP_TIMES
        for t2 in SEMIGROUP_TIMES
    )
    suite.record("dynamics", "semigroup", semigroup_gap <= 1e-9, f"max gap {semigroup_gap:.3e}")

    if profile is not None:
        gap = 1.0 - profile.symbol(1)
        late = classical_transition(s, 50.0 / gap).matrix
        deviation = float(np.max(np.abs(late - float(s.spec.p) ** -s.spec.l)))
        suite.record("dynamics", "convergence to p^-l", deviation < 1e-10, f"deviation {deviation:.3e} at t={50.0 / gap:g}")


def _check_limits(suite: ValidationSuite, limits: Sequence[LimitingDistribution]) -> None:
    for limit in limits:
        chi = limit.chi
        tol = limit.tolerance
        problems = []
        row_dev = float(np.max(np.abs(chi.sum(axis=1) - 1.0)))
        col_dev = float(np.max(np.abs(chi.sum(axis=0) - 1.0)))
        if max(row_dev, col_dev) > tol:
            problems.append(f"row/column sums deviate by {max(row_dev, col_dev):.3e}")
        if chi.min() < -tol or chi.max() > 1.0 + tol:
            problems.append("entries leave [0, 1]")
        if _max_gap(chi, chi.T) > tol:
            problems.append("chi is not symmetric")
        problems.extend(limit.warnings)
        suite.record("limiting", f"{limit.method} chi", not problems, "; ".join(problems))


def run_validation(
    g: GeneratorMatrix,
    times: Sequence[float],
    tau_cluster: float = 1e-8,
    spectral: Optional[SpectralData] = None,
    limits: Sequence[LimitingDistribution] = (),
) -> ValidationSuite:
    suite = ValidationSuite()
    s = spectral if spectral is not None else eigendecompose(g, tau_cluster)
    _check_padic(suite, g.spec)
    _check_kernel(suite, g)
    _check_generator(suite, g)
    _check_spectral(suite, s)
    _check_dynamics(suite, s, times)
    _check_limits(suite, [limiting_spectral(s, tau_cluster), *limits])
    for failure in suite.failures:
        logger.warning("validation failed: %s / %s %s", failure.module, failure.name, failure.detail)
    return suite
