import json
import math

import numpy as np
import pytest

from ultrawalks.errors import (
    ConfigError,
    DomainError,
    KernelInvalidError,
    MassViolationError,
    SingularParameterError,
)
from ultrawalks.kernel import (
    SymbolKind,
    analytic_tail_mass,
    bessel_profile,
    fourier_symbol_closed,
    fourier_symbol_from_profile,
    gamma_p,
    load_kernel_file,
    log_bessel_profile,
    tabulated_profile,
)
from ultrawalks.padic import GroupSpec


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_gamma_singular_points(alpha):
    with pytest.raises(SingularParameterError):
        gamma_p(GroupSpec(2, 3), alpha)


def test_gamma_value():
    # (1 - 2) / (1 - 1/4)
    assert gamma_p(GroupSpec(2, 3), 2.0) == pytest.approx(-4.0 / 3.0)


@pytest.mark.parametrize("p,l,alpha", [(2, 5, 1.2), (2, 5, 0.5), (3, 3, 2.0), (5, 2, 4.5), (2, 4, 0.1)])
def test_bessel_mass_is_one(p, l, alpha):
    profile = bessel_profile(GroupSpec(p, l), alpha)
    assert profile.kind is SymbolKind.BESSEL
    assert profile.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert profile.tail_mass == pytest.approx(analytic_tail_mass(profile), abs=1e-12)
    assert all(value > 0 for value in profile.values)


def test_bessel_at_one_is_log_kernel():
    spec = GroupSpec(2, 5)
    profile = bessel_profile(spec, 1.0)
    assert profile.kind is SymbolKind.LOG_BESSEL
    assert profile.values == log_bessel_profile(spec).values
    assert profile.values[0] == pytest.approx(0.5)
    assert profile.tail_mass == pytest.approx(analytic_tail_mass(profile), abs=1e-12)


def test_bessel_rejects_bad_alpha():
    spec = GroupSpec(2, 3)
    with pytest.raises(SingularParameterError):
        bessel_profile(spec, 0.0)
    with pytest.raises(DomainError):
        bessel_profile(spec, -1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.2, 3.0])
def test_symbol_from_profile_matches_closed_form(alpha):
    spec = GroupSpec(3, 3)
    profile = bessel_profile(spec, alpha)
    for j in range(spec.l + 1):
        expected = fourier_symbol_closed(spec, alpha, j)
        assert fourier_symbol_from_profile(profile, j) == pytest.approx(expected, abs=1e-12)
    profile.fourier_symbol().check()


def test_symbol_decreases_with_frequency():
    profile = bessel_profile(GroupSpec(2, 5), 1.2)
    values = [profile.symbol(j) for j in range(8)]
    assert values[0] == 1.0
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[1] == pytest.approx(2**-1.2)


def test_tabulated_profile_mass():
    spec = GroupSpec(2, 1)
    profile = tabulated_profile(spec, [1.0], 0.5)
    assert profile.total_mass() == pytest.approx(1.0)
    with pytest.raises(MassViolationError) as excinfo:
        tabulated_profile(spec, [1.0], 0.6)
    assert excinfo.value.mass == pytest.approx(1.1)


def test_tabulated_profile_shape_and_sign():
    spec = GroupSpec(2, 2)
    with pytest.raises(KernelInvalidError):
        tabulated_profile(spec, [1.0], 0.5)
    with pytest.raises(KernelInvalidError):
        tabulated_profile(spec, [-1.0, 5.0], 0.5)


def test_tabulated_symbol_uses_stored_tail():
    spec = GroupSpec(2, 1)
    profile = tabulated_profile(spec, [1.0], 0.5)
    assert profile.symbol(0) == pytest.approx(1.0)
    # tail 0.5 minus p^-1 J(1)
    assert profile.symbol(1) == pytest.approx(0.0)


def test_load_kernel_file(tmp_path):
    path = tmp_path / "kernel.json"
    path.write_text(json.dumps({"p": 2, "l": 1, "values": [1.0], "tail_mass": 0.5}))
    profile = load_kernel_file(path)
    assert profile.kind is SymbolKind.TABULATED
    assert math.isclose(profile.total_mass(), 1.0)

    path.write_text(json.dumps({"p": 2, "l": 1, "values": [1.0]}))
    with pytest.raises(ConfigError, match="tail_mass"):
        load_kernel_file(path)

    path.write_text(json.dumps({"p": 2, "l": 1, "values": [1.0], "tail_mass": 0.9}))
    with pytest.raises(ConfigError, match="kernel.json"):
        load_kernel_file(path)


@pytest.mark.parametrize("offset", [1e-8, -1e-8])
def test_bessel_is_continuous_through_one(offset):
    spec = GroupSpec(2, 5)
    near = bessel_profile(spec, 1.0 + offset)
    assert near.kind is SymbolKind.BESSEL
    np.testing.assert_allclose(near.values, log_bessel_profile(spec).values, atol=1e-6)
    assert near.tail_mass == pytest.approx(analytic_tail_mass(near), abs=1e-13)
    assert fourier_symbol_from_profile(near, 0) == pytest.approx(1.0, abs=1e-13)
    for j in range(spec.l + 1):
        expected = fourier_symbol_closed(spec, 1.0 + offset, j)
        assert fourier_symbol_from_profile(near, j) == pytest.approx(expected, abs=1e-12)
