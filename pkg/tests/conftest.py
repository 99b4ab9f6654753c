import sys
from pathlib import Path

import pytest

# Ensure the project root is importable when running tests from within the repo.
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from ultrawalks.generator import build_generator  # noqa: E402
from ultrawalks.kernel import bessel_profile  # noqa: E402
from ultrawalks.padic import GroupSpec  # noqa: E402
from ultrawalks.spectral import eigendecompose  # noqa: E402


@pytest.fixture
def base_spec() -> GroupSpec:
    return GroupSpec(2, 5)


@pytest.fixture
def base_walk(base_spec):
    return eigendecompose(build_generator(bessel_profile(base_spec, 1.2)))


@pytest.fixture
def two_state():
    """p=2, l=1, alpha=2: one off-diagonal rate q = (1 - 2^-alpha) / 2 = 0.375."""

    spec = GroupSpec(2, 1)
    return eigendecompose(build_generator(bessel_profile(spec, 2.0)))
