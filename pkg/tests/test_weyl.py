import cmath
import math

import numpy as np
import pytest

from conftest import random_smearing
from ncmink import (
    DMStateParams,
    GaussianBump,
    PhysicalConstants,
    WeylCalculus,
    WeylElement,
    moment1,
    sigma,
)
from ncmink.testfn import single_term


@pytest.fixture(scope="module")
def calc(constants, cfg):
    return WeylCalculus(constants, cfg, pairing="krein")


def test_inverse_pair_gives_unit(calc):
    rng = np.random.default_rng(3)
    f = random_smearing(rng)
    product = calc.mul(WeylElement.generator(f), WeylElement.generator(-f))
    assert len(product.terms) == 1
    smearing, coeff = product.terms[0]
    assert smearing.is_zero()
    assert coeff == 1.0 + 0.0j


def test_unit_is_neutral(calc):
    rng = np.random.default_rng(5)
    g = WeylElement.generator(random_smearing(rng))
    assert calc.mul(WeylElement.unit(), g) == g
    assert calc.mul(g, WeylElement.unit()) == g


def test_spacelike_pair_commutes(cfg, constants):
    calc = WeylCalculus(constants, cfg, pairing="plain")
    f = single_term((1, 0.3, 0, 0), GaussianBump((0, 2.0, 0, 0), 900.0), 1.0)
    g = single_term((0.5, 1, 0, 0), GaussianBump((0.1, 0, 0, 0), 900.0), 1.0)
    product = calc.mul(WeylElement.generator(f), WeylElement.generator(g))
    phase = product.terms[0][1]
    assert abs(phase - 1.0) <= 10 * product.phase_error + 1e-9


def test_star_involution():
    rng = np.random.default_rng(7)
    f, g = random_smearing(rng), random_smearing(rng)
    a = WeylElement.generator(f, 0.3 - 1.2j) + WeylElement.generator(g, 2.0j)
    assert a.star().star() == a
    assert WeylElement.unit().star() == WeylElement.unit()
    c = 1.5 - 0.5j
    starred = WeylElement.generator(f, c).star()
    assert starred.terms[0][0] == -f
    assert starred.terms[0][1] == c.conjugate()


def test_star_antimultiplicative(calc):
    rng = np.random.default_rng(11)
    a = WeylElement.generator(random_smearing(rng), 1.1 - 0.2j)
    b = WeylElement.generator(random_smearing(rng), 0.4 + 0.9j)
    left = calc.mul(a, b).star()
    right = calc.mul(b.star(), a.star())
    assert tuple(f for f, _ in left.terms) == tuple(f for f, _ in right.terms)
    budget = left.phase_error + right.phase_error + 1e-12
    for (_, cl), (_, cr) in zip(left.terms, right.terms):
        assert abs(cl - cr) <= budget


def test_cocycle_associativity(calc):
    rng = np.random.default_rng(13)
    for _ in range(30):
        f, g, h = (random_smearing(rng) for _ in range(3))
        wf, wg, wh = (WeylElement.generator(x) for x in (f, g, h))
        left = calc.mul(calc.mul(wf, wg), wh)
        right = calc.mul(wf, calc.mul(wg, wh))
        assert tuple(x for x, _ in left.terms) == tuple(x for x, _ in right.terms)
        budget = left.phase_error + right.phase_error + 1e-12
        assert abs(left.terms[0][1] - right.terms[0][1]) <= budget


def test_omega_normalization_and_modulus(calc, params):
    assert calc.eval_omega(WeylElement.unit(), params).value == 1.0 + 0.0j
    rng = np.random.default_rng(17)
    for _ in range(5):
        f = random_smearing(rng)
        value = calc.eval_omega(WeylElement.generator(f), params).value
        assert abs(value) <= 1.0 + 1e-12


def test_omega_positivity_on_squares(calc, params):
    rng = np.random.default_rng(19)
    pool = [random_smearing(rng) for _ in range(6)]
    for _ in range(10):
        picks = rng.choice(len(pool), size=3, replace=False)
        a = WeylElement.from_dict(
            {pool[k]: complex(rng.normal(), rng.normal()) for k in picks}
        )
        om = calc.eval_omega(calc.mul(calc.star(a), a), params)
        assert om.value.real >= -2.0 * om.error_estimate
        assert abs(om.value.imag) <= 2.0 * om.error_estimate + 1e-12


def test_tau_normalization_and_unbounded_modulus(calc, constants, cfg):
    params_large_alpha = DMStateParams(
        state_alpha=50.0,
        psi=GaussianBump((0.0, 3.0, 0.0, 0.0), 400.0),
        constants=constants,
    )
    assert calc.eval_tau(WeylElement.unit(), params_large_alpha).value == 1.0 + 0.0j
    # timelike mean with a large regulator drives Delta(f, f) negative
    f = single_term((1, 0, 0, 0), GaussianBump((0, 0, 0, 0), 400.0), 1.0)
    tau = calc.eval_tau(WeylElement.generator(f), params_large_alpha)
    assert abs(tau.value) > 1.0


def test_triple_product_phase_recovers_sigma(cfg, constants, params):
    """tau on W(f) W(g) W(-f-g) is the pure phase exp[-(i/2) sigma(f, g)]."""
    calc = WeylCalculus(constants, cfg, pairing="plain")
    rng = np.random.default_rng(23)
    for _ in range(5):
        f, g = random_smearing(rng), random_smearing(rng)
        triple = calc.mul(
            calc.mul(WeylElement.generator(f), WeylElement.generator(g)),
            WeylElement.generator(-(f + g)),
        )
        tau = calc.eval_tau(triple, params)
        s = sigma(f, g, constants, cfg)
        budget = 2 * (triple.phase_error + 0.5 * s.error_estimate) + 1e-12
        assert abs(cmath.phase(tau.value) - (-0.5 * s.value)) <= budget
        assert abs(abs(tau.value) - 1.0) <= budget


def test_classical_limit_is_pure_phase(cfg):
    constants0 = PhysicalConstants(0.0)
    params0 = DMStateParams(
        state_alpha=1.0, psi=GaussianBump((0, 0, 0, 0), 10.0), constants=constants0
    )
    calc0 = WeylCalculus(constants0, cfg, pairing="krein")
    rng = np.random.default_rng(29)
    for _ in range(5):
        f = random_smearing(rng)
        value = calc0.eval_omega(WeylElement.generator(f), params0).value
        assert value == cmath.exp(1j * moment1(f))


def test_pairing_flag_validation(cfg, constants):
    with pytest.raises(ValueError):
        WeylCalculus(constants, cfg, pairing="twisted")
