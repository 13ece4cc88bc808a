import numpy as np
import pytest

from ncmink import DMStateParams, GaussianBump, PhysicalConstants, QuadratureConfig
from ncmink.testfn import single_term


@pytest.fixture(scope="session")
def cfg():
    return QuadratureConfig()


@pytest.fixture(scope="session")
def tight_cfg():
    return QuadratureConfig(rel_tol=1e-6, abs_tol=1e-12)


@pytest.fixture(scope="session")
def constants():
    # Planck-scale coupling keeps state moments O(1) in the random tests.
    return PhysicalConstants(planck_length=0.1)


@pytest.fixture(scope="session")
def params(constants):
    psi = GaussianBump((0.1, 0.0, 0.2, 0.0), 25.0)
    return DMStateParams(state_alpha=1.0, psi=psi, constants=constants)


def random_smearing(rng, center_scale=0.6, width_lo=8.0, width_hi=40.0):
    """Single-term smearing in the regime where the log forms stay negative."""
    v = tuple(rng.normal(size=4))
    center = tuple(rng.normal(scale=center_scale, size=4))
    width = float(rng.uniform(width_lo, width_hi))
    weight = float(rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]))
    return single_term(v, GaussianBump(center, width), weight)


def random_bump(rng, center_scale=1.0, width_lo=5.0, width_hi=5e3):
    center = tuple(rng.normal(scale=center_scale, size=4))
    width = float(np.exp(rng.uniform(np.log(width_lo), np.log(width_hi))))
    return GaussianBump(center, width)
