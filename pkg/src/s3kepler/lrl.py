"""Quantum Laplace-Runge-Lenz vector inside the irrep (k, k).

The dressed vector ``R_i = f^{1/2}(gamma) A_i f^{1/2}(gamma)`` closes the
so(4) algebra with ``L`` once the dressing obeys the pair equation
``f(gamma) f(gamma - 1) = 1 / (gamma^2 + rho^2)``. Here the construction is
run backwards: ``A`` is rebuilt from the ``R`` of the irrep and the algebra it
must satisfy (commutator, square, Casimir relation) is checked as matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NonRealResultError, PreconditionError
from .numerics import complex_gamma, hermitian_eigen
from .so4 import LEVI_CIVITA, OperatorSet, build_irrep, commutator_residual, dot
from .spectrum import level_energy

IMAG_TOL = 1e-10


def r_of_gamma(gamma, h):
    """Coefficient in ``[A_i, A_j] = i eps_ijk L_k r(gamma)``."""
    return 2.0 * gamma * (gamma + 1.0) - h


def a_squared_scalar(gamma, h, alpha):
    """``A^2`` on the shell ``L^2 = gamma (gamma + 1)``."""
    L2 = gamma * (gamma + 1.0)
    return alpha**2 + h * (L2 + 1.0) - L2**2 - 2.0 * L2


def a_squared_from_l2(L2, h, alpha):
    """Same quantity grouped in ``L^2``: ``alpha^2 + h(L^2+1) - (L^2+1)^2 + 1``."""
    return alpha**2 + h * (L2 + 1.0) - (L2 + 1.0) ** 2 + 1.0


@dataclass(frozen=True)
class SpectralParams:
    """Energy ``h``, coupling ``alpha`` and the two roots tied to them.

    ``k1 = mu`` and ``k2 = -rho2`` are the roots of
    ``z^2 - (h + 1) z - alpha^2``.
    """

    h: float
    alpha: float
    mu: float
    rho2: float

    @property
    def k1(self) -> float:
        return self.mu

    @property
    def k2(self) -> float:
        return -self.rho2

    @property
    def rho(self) -> float:
        return math.sqrt(self.rho2)


def spectral_params(h: float, alpha: float) -> SpectralParams:
    b = (h + 1.0) / 2.0
    root = math.sqrt(b * b + alpha * alpha)
    # take the root free of cancellation, the other one from mu * rho2 = alpha^2
    if b >= 0:
        mu = b + root
        rho2 = alpha * alpha / mu if mu > 0 else 0.0
    else:
        rho2 = root - b
        mu = alpha * alpha / rho2
    return SpectralParams(h=h, alpha=alpha, mu=mu, rho2=rho2)


def f_pair(gamma, sp: SpectralParams):
    """``f(gamma) f(gamma - 1) = 1 / (gamma^2 + rho^2)``."""
    denom = gamma * gamma + sp.rho2
    if denom == 0:
        raise DegenerateInputError("f(gamma) f(gamma-1) diverges at gamma = rho = 0")
    return 1.0 / denom


def pair_denominator(gamma, sp: SpectralParams):
    """``alpha^2 + h gamma^2 - gamma^2 (gamma^2 - 1)``."""
    g2 = gamma * gamma
    return sp.alpha**2 + sp.h * g2 - g2 * (g2 - 1.0)


def f_pair_unreduced(gamma, sp: SpectralParams):
    """The pair product before cancelling ``mu - gamma^2``."""
    return (sp.mu - gamma * gamma) / pair_denominator(gamma, sp)


def f_closed_form_complex(x, rho) -> complex:
    """Gamma-function solution of the pair equation, as a complex number.

    ``f(x) = i/(x - i rho) G((x - i rho + 1)/2) / G((x - i rho)/2)
    * G(-(x + i rho)/2) / G(-(x + i rho - 1)/2)``. The pair equation holds for
    every real ``x``; the value itself is real only at integer ``x``.
    """
    if not rho > 0:
        raise DegenerateInputError("closed form needs rho > 0")
    zm = complex(x, -rho)
    zp = complex(x, rho)
    return (
        1j / zm
        * complex_gamma((zm + 1.0) / 2.0) / complex_gamma(zm / 2.0)
        * complex_gamma(-zp / 2.0) / complex_gamma(-(zp - 1.0) / 2.0)
    )


def f_closed_form(x, rho) -> float:
    """Real value of :func:`f_closed_form_complex`, checked to be real."""
    val = f_closed_form_complex(x, rho)
    if abs(val.imag) > IMAG_TOL * abs(val):
        raise NonRealResultError(f"f({x}) = {val} is not real")
    return val.real


def dressing(x, rho) -> float:
    """Positive dressing function used to build ``A`` from ``R``.

    The closed form is negative on the integers (``f(0) = -1/rho``); its
    negative solves the same pair equation. For ``rho = 0`` the pair equation
    ``f(x) f(x-1) = 1/x^2`` is solved by ``[G((x+1)/2) / G(x/2 + 1)]^2 / 2``.
    """
    if rho > 0:
        return -f_closed_form(x, rho)
    ratio = complex_gamma((x + 1.0) / 2.0) / complex_gamma(x / 2.0 + 1.0)
    return (ratio * ratio).real / 2.0


def _dressing_values(ops: OperatorSet, sp: SpectralParams) -> np.ndarray:
    shells = np.rint(ops.gamma_values)
    values = np.array([dressing(g, sp.rho) for g in shells])
    bad = shells[~(values > 0)]
    if bad.size:
        raise PreconditionError(f"dressing is not positive at gamma = {sorted(set(bad))}")
    return values


def build_A_from_R(ops: OperatorSet, sp: SpectralParams) -> np.ndarray:
    """``A_i = f^{-1/2}(gamma) R_i f^{-1/2}(gamma)``."""
    inv_sqrt = ops.spectral(_dressing_values(ops, sp) ** -0.5)
    return np.einsum("ab,ibc,cd->iad", inv_sqrt, ops.R, inv_sqrt)


def _sandwich(left, A, right):
    return np.einsum("ab,ibc,cd->iad", left, A, right)


def verify_T_condition(ops: OperatorSet, sp: SpectralParams) -> dict:
    """Check that the dressed commutator closes on ``L``.

    ``matrix``: max-abs of ``f^{1/2}(A_i f A_j - A_j f A_i) f^{1/2} - i eps_ijk L_k``
    with ``A`` rebuilt from ``R``. ``scalar``: max ``|T(gamma) - 1|`` of the
    shell-wise expression over ``gamma = 1 .. 2k``; on ``gamma = 0`` ``L_k``
    vanishes and ``T`` is unconstrained.
    """
    f = _dressing_values(ops, sp)
    A = build_A_from_R(ops, sp)
    F = ops.spectral(f)
    half = ops.spectral(np.sqrt(f))
    AfA = np.einsum("iab,bc,jcd->ijad", A, F, A)
    inner = AfA - AfA.transpose(1, 0, 2, 3)
    comm = np.einsum("ab,ijbc,cd->ijad", half, inner, half)
    target = 1j * np.einsum("ijk,kab->ijab", LEVI_CIVITA, ops.L)
    matrix = float(np.abs(comm - target).max())

    scalar = 0.0
    for g in range(1, int(round(2 * float(ops.k))) + 1):
        scalar = max(scalar, abs(t_scalar(g, sp) - 1.0))
    return {"matrix": matrix, "scalar": scalar}


def t_scalar(gamma, sp: SpectralParams) -> float:
    r = r_of_gamma(gamma, sp.h)
    a2 = a_squared_scalar(gamma, sp.h, sp.alpha)
    up = f_pair(gamma + 1, sp) * (gamma * r - a2)
    down = f_pair(gamma, sp) * ((gamma + 1) * r + a2)
    return (up + down) / (2 * gamma + 1)


def r_squared_scalar(gamma, sp: SpectralParams) -> float:
    """Shell value of ``R^2`` from the pair products."""
    r = r_of_gamma(gamma, sp.h)
    a2 = a_squared_scalar(gamma, sp.h, sp.alpha)
    out = f_pair(gamma + 1, sp) * (gamma + 1) * (a2 - gamma * r)
    if gamma != 0:
        out += f_pair(gamma, sp) * gamma * (a2 + (gamma + 1) * r)
    return out / (2 * gamma + 1)


def verify_R_squared(ops: OperatorSet, sp: SpectralParams) -> dict:
    """``R^2 + L^2 = mu - 1`` with ``R^2 = f^{1/2} A_i f A_i f^{1/2}``."""
    f = _dressing_values(ops, sp)
    A = build_A_from_R(ops, sp)
    F = ops.spectral(f)
    half = ops.spectral(np.sqrt(f))
    R2 = half @ np.einsum("iab,bc,icd->ad", A, F, A) @ half
    matrix = float(np.abs(R2 + ops.L2 - (sp.mu - 1.0) * ops.identity).max())
    scalar = 0.0
    for g in range(int(round(2 * float(ops.k))) + 1):
        scalar = max(scalar, abs(r_squared_scalar(g, sp) - (sp.mu - 1.0 - g * (g + 1))))
    return {"matrix": matrix, "scalar": scalar}


def hamiltonian_from_casimir(ops: OperatorSet, alpha: float) -> np.ndarray:
    """``h = C - alpha^2 (C + 1)^{-1}`` with ``C = R^2 + L^2``."""
    w, V = hermitian_eigen(dot(ops.R, ops.R) + ops.L2)
    return (V * (w - alpha**2 / (w + 1.0))) @ V.conj().T


def quantum_residuals(k, alpha: float) -> dict:
    """Every matrix identity of the construction for one ``(k, alpha)`` cell.

    The energy is the level value for ``n = 2k + 1``.
    """
    ops = build_irrep(k)
    n = int(round(2 * float(ops.k))) + 1
    h = level_energy(n, alpha)
    sp = spectral_params(h, alpha)
    A = build_A_from_R(ops, sp)
    half = ops.spectral(_dressing_values(ops, sp) ** 0.5)

    r_mat = ops.spectral(r_of_gamma(ops.gamma_values, h))
    a2_mat = ops.spectral(a_squared_scalar(ops.gamma_values, h, alpha))
    AA = np.einsum("iab,jbc->ijac", A, A)
    comm_A = AA - AA.transpose(1, 0, 2, 3)
    target_A = 1j * np.einsum("ijk,kab,bc->ijac", LEVI_CIVITA, ops.L, r_mat)
    h_mat = hamiltonian_from_casimir(ops, alpha)
    T = verify_T_condition(ops, sp)
    R2 = verify_R_squared(ops, sp)
    return {
        "RR_commutator": commutator_residual(ops.R, ops.R, ops.L),
        "AA_commutator": float(np.abs(comm_A - target_A).max()),
        "A_squared": float(np.abs(dot(A, A) - a2_mat).max()),
        "R2_plus_L2": R2["matrix"],
        "R2_shell": R2["scalar"],
        "casimir_hamiltonian": float(np.abs(h_mat - h * ops.identity).max()),
        "T_matrix": T["matrix"],
        "T_shell": T["scalar"],
        "A_dot_L": float(max(np.abs(dot(A, ops.L)).max(), np.abs(dot(ops.L, A)).max())),
        "A_hermitian": float(np.abs(A - A.conj().transpose(0, 2, 1)).max()),
        "round_trip": float(np.abs(_sandwich(half, A, half) - ops.R).max()),
    }
