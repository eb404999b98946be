import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s3kepler.errors import DegenerateInputError, NonRealResultError
from s3kepler.lrl import (
    a_squared_from_l2,
    a_squared_scalar,
    build_A_from_R,
    dressing,
    f_closed_form,
    f_closed_form_complex,
    f_pair,
    f_pair_unreduced,
    hamiltonian_from_casimir,
    quantum_residuals,
    r_of_gamma,
    spectral_params,
    t_scalar,
    verify_R_squared,
    verify_T_condition,
)
from s3kepler.so4 import LEVI_CIVITA, build_irrep, dot, function_of_gamma
from s3kepler.spectrum import level_energy

reals = st.floats(-20, 20, allow_nan=False)


def test_scalar_examples():
    assert r_of_gamma(0, 0) == 0
    assert r_of_gamma(1, 2.75) == 1.25
    assert r_of_gamma(2, -1) == 13
    assert a_squared_scalar(0, 0, 1) == 1
    assert a_squared_scalar(1, 2.75, 1) == 1.25


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 10), reals, reals)
def test_a_squared_groupings_agree(g, h, alpha):
    lhs = a_squared_scalar(g, h, alpha)
    rhs = a_squared_from_l2(g * (g + 1), h, alpha)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), g**4, abs(h) * g * g)


def test_spectral_params_examples():
    sp = spectral_params(2.75, 1.0)
    assert (sp.mu, sp.rho2) == (4.0, 0.25)
    sp0 = spectral_params(3.0, 0.0)
    assert (sp0.mu, sp0.rho2) == (4.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(reals, reals)
def test_vieta(h, alpha):
    sp = spectral_params(h, alpha)
    assert abs(sp.mu * sp.rho2 - alpha**2) <= 1e-12 * max(1.0, alpha**2)
    assert sp.rho2 >= 0
    # both are roots of z^2 - (h+1) z - alpha^2
    for z in (sp.k1, sp.k2):
        assert abs(z * z - (h + 1) * z - alpha**2) <= 1e-10 * max(1.0, z * z, abs(h * z), alpha**2)


def test_f_pair_examples():
    sp = spectral_params(2.75, 1.0)
    assert f_pair(1, sp) == pytest.approx(0.8, abs=1e-15)
    assert f_pair(0, sp) == 4.0
    with pytest.raises(DegenerateInputError):
        f_pair(0, spectral_params(3.0, 0.0))


def test_f_pair_reduced_matches_unreduced(rng):
    for _ in range(50):
        h, alpha, g = rng.uniform(-1, 20), rng.uniform(0.1, 3), rng.uniform(0, 6)
        sp = spectral_params(h, alpha)
        if abs(sp.mu - g * g) < 1e-3:
            continue
        assert abs(f_pair(g, sp) - f_pair_unreduced(g, sp)) <= 1e-12 * max(1, abs(f_pair(g, sp)))


def closed_form_mpmath(x, rho):
    zm, zp = mpmath.mpc(x, -rho), mpmath.mpc(x, rho)
    return complex(1j / zm * mpmath.gamma((zm + 1) / 2) / mpmath.gamma(zm / 2)
                   * mpmath.gamma(-zp / 2) / mpmath.gamma(-(zp - 1) / 2))


@pytest.mark.parametrize("x", [0.5, 1, 1.7, 3, 6.2])
def test_functional_equation_examples(x):
    rho = 0.5
    prod = f_closed_form_complex(x, rho) * f_closed_form_complex(x - 1, rho) * (x * x + rho * rho)
    assert abs(prod - 1) < 1e-10
    assert abs(f_closed_form_complex(x, rho) - closed_form_mpmath(x, rho)) < 1e-12 * abs(closed_form_mpmath(x, rho))


def test_closed_form_two_paths_at_one():
    assert abs(f_closed_form(1, 0.5) - 1 / (f_closed_form(0, 0.5) * 1.25)) < 1e-10


@pytest.mark.parametrize("rho", [0.1, 0.5, math.sqrt(0.25), 2.0])
def test_closed_form_real_and_negative_on_integers(rho):
    for x in range(0, 12):
        val = f_closed_form_complex(x, rho)
        assert abs(val.imag) <= 1e-10 * abs(val)
        assert val.real < 0
    assert f_closed_form(0, rho) == pytest.approx(-1 / rho, rel=1e-12)


def test_closed_form_is_complex_off_the_integers():
    # the pair equation holds for complex values, but the value itself is not real
    with pytest.raises(NonRealResultError):
        f_closed_form(0.5, 0.5)


@pytest.mark.parametrize("rho2", [0.0, 0.25, 1 / 9, 4.0])
def test_dressing_positive_and_solves_pair_equation(rho2):
    rho = math.sqrt(rho2)
    for x in range(1, 15):
        assert dressing(x, rho) > 0
        assert abs(dressing(x, rho) * dressing(x - 1, rho) * (x * x + rho2) - 1) < 1e-10


def test_functional_equation_dense_grid():
    for k in (0.5, 1, 1.5, 2):
        for alpha in (0.5, 1, 2):
            rho = spectral_params(level_energy(int(2 * k + 1), alpha), alpha).rho
            for x in np.arange(0.5, 10.0 + 1e-12, 0.25):
                prod = f_closed_form_complex(x, rho) * f_closed_form_complex(x - 1, rho) * (x * x + rho * rho)
                assert abs(prod - 1) < 1e-10


def test_build_A_examples():
    ops = build_irrep("1/2")
    sp = spectral_params(2.75, 1.0)
    A = build_A_from_R(ops, sp)
    AA = np.einsum("iab,jbc->ijac", A, A)
    r_mat = function_of_gamma(lambda g: r_of_gamma(g, 2.75), ops)
    target = 1j * np.einsum("ijk,kab,bc->ijac", LEVI_CIVITA, ops.L, r_mat)
    assert np.abs(AA - AA.transpose(1, 0, 2, 3) - target).max() < 1e-9
    a2 = function_of_gamma(lambda g: a_squared_scalar(g, 2.75, 1.0), ops)
    assert np.abs(dot(A, A) - a2).max() < 1e-9
    half = function_of_gamma(lambda g: math.sqrt(dressing(round(g), sp.rho)), ops)
    assert np.abs(np.einsum("ab,ibc,cd->iad", half, A, half) - ops.R).max() < 1e-10


def test_T_condition_examples():
    ops = build_irrep("1/2")
    res = verify_T_condition(ops, spectral_params(2.75, 1.0))
    assert max(res.values()) <= 1e-9
    res = verify_T_condition(build_irrep(2), spectral_params(level_energy(5, 0.5), 0.5))
    assert max(res.values()) <= 1e-9
    assert abs(t_scalar(1, spectral_params(2.75, 1.0)) - 1) < 1e-12


@pytest.mark.parametrize("k,alpha,h,mu1", [("1/2", 1, 2.75, 3), (1, 1, level_energy(3, 1), 8), ("1/2", 0, 3, 3)])
def test_R_squared_examples(k, alpha, h, mu1):
    sp = spectral_params(h, alpha)
    assert abs(sp.mu - 1 - mu1) < 1e-12
    assert max(verify_R_squared(build_irrep(k), sp).values()) <= 1e-10


def test_hamiltonian_from_casimir_examples():
    assert np.abs(hamiltonian_from_casimir(build_irrep("1/2"), 1.0) - 2.75 * np.eye(4)).max() < 1e-10
    np.testing.assert_allclose(hamiltonian_from_casimir(build_irrep(0), 1.3), [[-1.69]], atol=1e-14)
    assert np.abs(hamiltonian_from_casimir(build_irrep(1), 0.0) - 8 * np.eye(9)).max() < 1e-10


@pytest.mark.parametrize("k", ["0", "1/2", "1", "3/2", "2"])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_quantum_grid(k, alpha):
    res = quantum_residuals(k, alpha)
    assert max(res.values()) <= 1e-9, res
    assert res["A_dot_L"] <= 1e-10 and res["A_hermitian"] <= 1e-10


def test_free_case_uses_gamma_squared_dressing():
    res = quantum_residuals("3/2", 0.0)
    assert max(res.values()) <= 1e-9
