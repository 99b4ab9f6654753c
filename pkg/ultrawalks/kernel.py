"""Radial kernel profiles J(|x|_p) on Z_p and their Fourier symbols.

A profile stores the per-level values J(p^{-m}), m = 0..l-1, plus the mass of
the kernel on the ball p^l Z_p (the "tail"). The generator matrix depends on
the tail only through that mass, and so does the symbol at every frequency
p^j with j <= l.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .errors import ConfigError, DomainError, KernelInvalidError, MassViolationError, SingularParameterError
from .padic import GroupSpec, sphere_size

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
BESSEL_MASS_TOL = 1e-12
TABULATED_MASS_TOL = 1e-9


class SymbolKind(str, Enum):
    BESSEL = "bessel"
    LOG_BESSEL = "log_bessel"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class FourierSymbol:
    """Values of J-hat on the frequency spheres |xi|_p = p^j, j = 0..l."""

    spec: GroupSpec
    values: Tuple[float, ...]

    def __getitem__(self, j: int) -> float:
        return self.values[j]

    def check(self, tol: float = 1e-10) -> None:
        if abs(self.values[0] - 1.0) > tol:
            raise KernelInvalidError(f"symbol at p^0 is {self.values[0]!r}, expected 1")
        for j, value in enumerate(self.values):
            if abs(value) > 1.0 + tol:
                raise KernelInvalidError(f"|symbol(p^{j})| = {abs(value)!r} exceeds 1")


@dataclass(frozen=True)
class KernelProfile:
    spec: GroupSpec
    values: Tuple[float, ...]
    tail_mass: float
    kind: SymbolKind
    alpha: Optional[float] = None

    @property
    def level_masses(self) -> Tuple[float, ...]:
        """Mass of the kernel on each sphere |x|_p = p^{-m}."""

        p = self.spec.p
        return tuple(p**-m * (1.0 - 1.0 / p) * value for m, value in enumerate(self.values))

    def total_mass(self) -> float:
        return math.fsum(self.level_masses) + self.tail_mass

    def symbol(self, j: int) -> float:
        """J-hat(p^j); Bessel kinds accept any j >= 0, tabulated kernels j <= l."""

        if self.kind is SymbolKind.TABULATED:
            return fourier_symbol_from_profile(self, j)
        if j < 0:
            raise DomainError(f"frequency index j={j} must be >= 0")
        return _bessel_symbol(self.spec.p, self.alpha, j)

    def fourier_symbol(self) -> FourierSymbol:
        return FourierSymbol(
            spec=self.spec,
            values=tuple(fourier_symbol_from_profile(self, j) for j in range(self.spec.l + 1)),
        )

    def describe(self) -> str:
        if self.kind is SymbolKind.BESSEL:
            return f"bessel(alpha={self.alpha:g})"
        return self.kind.value


def _is_near(value: float, target: float) -> bool:
    return abs(value - target) <= SINGULAR_TOL


def gamma_p(spec: GroupSpec, alpha: float) -> float:
    """Gamma(alpha) = (1 - p^{alpha-1}) / (1 - p^{-alpha})."""

    if _is_near(alpha, 0.0):
        raise SingularParameterError("alpha=0 is a pole of Gamma(alpha)")
    if _is_near(alpha, 1.0):
        raise SingularParameterError("alpha=1 is a zero of Gamma(alpha); use the logarithmic kernel")
    p = spec.p
    return (1.0 - p ** (alpha - 1.0)) / (1.0 - p ** (-alpha))


def _bessel_symbol(p: int, alpha: float, j: int) -> float:
    return 1.0 if j == 0 else p ** (-j * alpha)


def fourier_symbol_closed(spec: GroupSpec, alpha: float, j: int) -> float:
    """max{1, |xi|_p}^{-alpha} evaluated on the sphere |xi|_p = p^j."""

    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if not 0 <= j <= spec.l:
        raise DomainError(f"frequency index j={j} outside [0, {spec.l}]")
    return _bessel_symbol(spec.p, alpha, j)


def _complement_tail(spec: GroupSpec, values: Sequence[float]) -> float:
    # 1 - sum_{I != 0} p^{-l} J(|I|_p), grouped by sphere
    p, l = spec.p, spec.l
    return 1.0 - math.fsum(sphere_size(spec, m) * p**-l * value for m, value in enumerate(values))


def _finish_profile(spec: GroupSpec, values: Tuple[float, ...], kind: SymbolKind, alpha: Optional[float]) -> KernelProfile:
    if any(value < 0 for value in values):
        raise KernelInvalidError(f"negative kernel value in {values!r}")
    tail = _complement_tail(spec, values)
    if tail < -BESSEL_MASS_TOL:
        raise KernelInvalidError(f"tail mass {tail!r} is negative")
    profile = KernelProfile(spec=spec, values=values, tail_mass=max(tail, 0.0), kind=kind, alpha=alpha)
    logger.debug("built %s kernel on %s, tail mass %.17g", profile.describe(), spec, profile.tail_mass)
    return profile


def log_bessel_profile(spec: GroupSpec) -> KernelProfile:
    """J_1(x) = (1 - p^{-1}) log_p(p / |x|_p) on Z_p."""

    p = spec.p
    values = tuple((1.0 - 1.0 / p) * (m + 1) for m in range(spec.l))
    return _finish_profile(spec, values, SymbolKind.LOG_BESSEL, 1.0)


def bessel_profile(spec: GroupSpec, alpha: float) -> KernelProfile:
    """Bessel potential J_alpha restricted to Z_p; alpha = 1 gives the log kernel."""

    if _is_near(alpha, 0.0):
        raise SingularParameterError("alpha=0 is a pole of Gamma(alpha)")
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if _is_near(alpha, 1.0):
        return log_bessel_profile(spec)
    p = spec.p
    log_p = math.log(p)
    # (p^{-m(a-1)} - p^{a-1}) / Gamma(a) in expm1 form, exact to rounding near a = 1
    ratio = math.expm1(-alpha * log_p) * p ** (alpha - 1.0) / math.expm1((alpha - 1.0) * log_p)
    values = tuple(ratio * math.expm1(-(m + 1) * (alpha - 1.0) * log_p) for m in range(spec.l))
    return _finish_profile(spec, values, SymbolKind.BESSEL, float(alpha))


def analytic_tail_mass(profile: KernelProfile) -> float:
    """Closed-form mass of a Bessel kernel on p^l Z_p."""

    spec = profile.spec
    p, l = spec.p, spec.l
    if profile.kind is SymbolKind.LOG_BESSEL:
        return p**-l * ((l + 1) * (1.0 - 1.0 / p) + 1.0 / p)
    if profile.kind is SymbolKind.BESSEL:
        shift = (profile.alpha - 1.0) * math.log(p)
        return p**-l * (1.0 - (1.0 - 1.0 / p) * math.expm1(-l * shift) / math.expm1(shift))
    raise DomainError("tabulated kernels carry no closed-form tail")


def fourier_symbol_from_profile(profile: KernelProfile, j: int) -> float:
    """J-hat(p^j) from the radial values.

    Sums the sphere integrals of the character: p^{-m}(1 - p^{-1}) J(p^{-m})
    for m >= j and -p^{-j} J(p^{-(j-1)}) for the sphere m = j - 1. The part
    m >= l is the tail mass, analytic for Bessel kernels.
    """

    spec = profile.spec
    if not 0 <= j <= spec.l:
        raise DomainError(f"frequency index j={j} outside [0, {spec.l}]")
    if profile.kind is SymbolKind.TABULATED:
        tail = profile.tail_mass
    else:
        tail = analytic_tail_mass(profile)
    inside = math.fsum(profile.level_masses[j:]) + tail
    if j == 0:
        return inside
    return inside - spec.p**-j * profile.values[j - 1]


def tabulated_profile(spec: GroupSpec, values: Sequence[float], tail_mass: float) -> KernelProfile:
    values = tuple(float(value) for value in values)
    if len(values) != spec.l:
        raise KernelInvalidError(f"expected {spec.l} kernel values for {spec}, got {len(values)}")
    if any(value < 0 for value in values) or tail_mass < 0:
        raise KernelInvalidError("kernel values and tail mass must be nonnegative")
    profile = KernelProfile(spec=spec, values=values, tail_mass=float(tail_mass), kind=SymbolKind.TABULATED)
    mass = profile.total_mass()
    if abs(mass - 1.0) > TABULATED_MASS_TOL:
        raise MassViolationError(mass, TABULATED_MASS_TOL)
    return profile


def load_kernel_file(path: Path) -> KernelProfile:
    """Read a tabulated kernel from JSON ``{"p", "l", "values", "tail_mass"}``."""

    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc.msg})", path=path) from exc
    for field in ("p", "l", "values", "tail_mass"):
        if field not in document:
            raise ConfigError("missing required key", path=path, field=field)
    try:
        spec = GroupSpec(int(document["p"]), int(document["l"]))
        return tabulated_profile(spec, document["values"], float(document["tail_mass"]))
    except DomainError as exc:
        raise ConfigError(str(exc), path=path) from exc
