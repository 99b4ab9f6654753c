"""Arithmetic on the finite quotient group G_l = Z_p / p^l Z_p.

States are plain integers ``0 <= I < p**l`` read as base-p digit strings
``I = I_0 + I_1 p + ... + I_{l-1} p^{l-1}``. The p-adic norm of a difference
is returned as an exact valuation; floats only appear when a kernel is
evaluated on it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .errors import DomainError

logger = logging.getLogger(__name__)

MAX_STATES = 2**20


def is_prime(n: int) -> bool:
    """Trial division; adequate for the small primes used here."""

    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    divisor = 3
    while divisor * divisor <= n:
        if n % divisor == 0:
            return False
        divisor += 2
    return True


@dataclass(frozen=True)
class GroupSpec:
    """The group G_l for a prime p, i.e. the leaves of a p-ary tree of depth l."""

    p: int
    l: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise DomainError(f"p must be a prime, got {self.p!r}")
        if not isinstance(self.l, int) or self.l < 1:
            raise DomainError(f"l must be an integer >= 1, got {self.l!r}")
        if self.p**self.l > MAX_STATES:
            raise DomainError(f"p**l = {self.p}**{self.l} exceeds the dense limit of {MAX_STATES} states")

    @property
    def size(self) -> int:
        return self.p**self.l

    def __str__(self) -> str:
        return f"G_{self.l}(p={self.p})"


@dataclass(frozen=True)
class PadicValuation:
    """Valuation ``v`` of a difference in G_l; ``v == l`` marks the zero class."""

    spec: GroupSpec
    v: int

    @property
    def is_zero(self) -> bool:
        return self.v >= self.spec.l

    @property
    def exact_norm(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(1, self.spec.p**self.v)

    @property
    def norm(self) -> float:
        return float(self.exact_norm)


def check_state(spec: GroupSpec, value: int) -> int:
    if not 0 <= value < spec.size:
        raise DomainError(f"state {value} outside [0, {spec.size}) for {spec}")
    return int(value)


def encode_digits(spec: GroupSpec, value: int) -> Tuple[int, ...]:
    """Base-p digits (I_0, ..., I_{l-1}), least significant first."""

    check_state(spec, value)
    digits = []
    for _ in range(spec.l):
        value, digit = divmod(value, spec.p)
        digits.append(digit)
    return tuple(digits)


def decode_digits(spec: GroupSpec, digits: Tuple[int, ...]) -> int:
    if len(digits) != spec.l:
        raise DomainError(f"expected {spec.l} digits, got {len(digits)}")
    value = 0
    for digit in reversed(digits):
        if not 0 <= digit < spec.p:
            raise DomainError(f"digit {digit} is not a base-{spec.p} digit")
        value = value * spec.p + digit
    return value


def _valuation(spec: GroupSpec, diff: int) -> int:
    diff %= spec.size
    if diff == 0:
        return spec.l
    v = 0
    while diff % spec.p == 0:
        diff //= spec.p
        v += 1
    return v


def norm_of_difference(spec: GroupSpec, i: int, k: int) -> PadicValuation:
    """Valuation of (I - K) mod p^l, i.e. the lowest differing base-p digit."""

    check_state(spec, i)
    check_state(spec, k)
    return PadicValuation(spec=spec, v=_valuation(spec, i - k))


def enumerate_states(spec: GroupSpec) -> List[int]:
    """Ascending state order; every matrix in the package uses it."""

    return list(range(spec.size))


def valuation_matrix(spec: GroupSpec) -> np.ndarray:
    """Integer matrix of valuations of I - K over all pairs, ``l`` on the diagonal."""

    states = np.arange(spec.size, dtype=np.int64)
    diffs = (states[:, None] - states[None, :]) % spec.size
    valuations = np.zeros(diffs.shape, dtype=np.int64)
    for m in range(1, spec.l + 1):
        valuations += (diffs % spec.p**m == 0)
    return valuations


def sphere_size(spec: GroupSpec, m: int) -> int:
    """Number of nonzero states with norm p^{-m}."""

    if not 0 <= m < spec.l:
        raise DomainError(f"sphere index m={m} outside [0, {spec.l})")
    return (spec.p - 1) * spec.p ** (spec.l - m - 1)


def sphere_representatives(spec: GroupSpec, center: int) -> List[int]:
    """One state on each sphere around ``center``, nearest sphere last."""

    check_state(spec, center)
    return [(center + spec.p**m) % spec.size for m in range(spec.l)]
