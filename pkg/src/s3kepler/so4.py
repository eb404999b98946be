"""Matrix realisation of the so(4) irrep (k, k).

Two commuting spin-k copies ``M = S (x) 1`` and ``N = 1 (x) S`` give
``L = M + N`` and ``R = M - N``. Functions of the angular momentum are applied
through the eigendecomposition of ``L^2`` with ``L^2 = gamma (gamma + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateInputError, PreconditionError
from .numerics import hermitian_eigen

LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0

ORTHOGONALITY_TOL = 1e-10


def half_integer(j) -> Fraction:
    """Validate ``j`` as a non-negative half-integer."""
    exact = Fraction(j)
    frac = exact.limit_denominator(1000)
    if frac < 0 or (2 * frac).denominator != 1 or abs(float(frac - exact)) > 1e-12:
        raise ValueError(f"{j!r} is not a non-negative half-integer")
    return frac


def build_spin_matrices(j) -> np.ndarray:
    """Spin matrices ``S_x, S_y, S_z`` in the basis ``m = j, j-1, ..., -j``."""
    j = float(half_integer(j))
    m = np.arange(j, -j - 1.0, -1.0)
    raise_ = np.diag(np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0)), 1).astype(complex)
    lower = raise_.conj().T
    return np.array([
        0.5 * (raise_ + lower),
        -0.5j * (raise_ - lower),
        np.diag(m).astype(complex),
    ])


def dot(U, V) -> np.ndarray:
    """Operator scalar product ``sum_i U_i V_i``."""
    return np.einsum("iab,ibc->ac", U, V)


def cross(U, V) -> np.ndarray:
    """Operator cross product ``(U x V)_i = eps_ijk U_j V_k`` (ordered)."""
    return np.einsum("ijk,jab,kbc->iac", LEVI_CIVITA, U, V)


def commutator_residual(U, V, W, coeff=1j) -> float:
    """Max-abs of ``[U_i, V_j] - coeff * eps_ijk W_k`` over all ``i, j``."""
    UV = np.einsum("iab,jbc->ijac", U, V)
    comm = UV - np.einsum("jab,ibc->ijac", V, U)
    return float(np.abs(comm - coeff * np.einsum("ijk,kab->ijab", LEVI_CIVITA, W)).max())


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Generators of one irrep; matrices have shape ``(3, dim, dim)``."""

    k: Fraction
    M: np.ndarray
    N: np.ndarray
    L: np.ndarray
    R: np.ndarray
    L2: np.ndarray
    gamma: np.ndarray
    gamma_values: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.L2.shape[0]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def spectral(self, values) -> np.ndarray:
        """Matrix diagonal in the ``L^2`` eigenbasis with the given entries."""
        return (self.basis * values) @ self.basis.conj().T


def gamma_of(L2):
    """``gamma = sqrt(L^2 + 1/4) - 1/2`` with its eigen-decomposition.

    Returns ``(gamma_matrix, gamma_eigenvalues, eigenvectors)``.
    """
    w, V = hermitian_eigen(L2)
    if w.size and w.min() < -1e-9 * max(1.0, abs(w).max()):
        raise PreconditionError("L^2 must be positive semidefinite")
    g = np.sqrt(np.clip(w, 0.0, None) + 0.25) - 0.5
    return (V * g) @ V.conj().T, g, V


def build_irrep(k) -> OperatorSet:
    k = half_integer(k)
    S = build_spin_matrices(k)
    eye = np.eye(S.shape[1])
    M = np.array([np.kron(s, eye) for s in S])
    N = np.array([np.kron(eye, s) for s in S])
    L = M + N
    L2 = dot(L, L)
    gamma, g, V = gamma_of(L2)
    return OperatorSet(k=k, M=M, N=N, L=L, R=M - N, L2=L2, gamma=gamma, gamma_values=g, basis=V)


def function_of_gamma(F, ops: OperatorSet, shift: int = 0) -> np.ndarray:
    """Spectral calculus ``F(gamma + shift)``.

    For ``shift < 0`` the shells with ``gamma + shift < 0`` get coefficient 0:
    in the shift formula those rows multiply an operator that vanishes there.
    """
    g = ops.gamma_values
    values = []
    for gv in g:
        arg = gv + shift
        if arg < -0.5:
            values.append(0.0)
            continue
        val = complex(F(arg))
        if not np.isfinite(val):
            raise DegenerateInputError(f"function is not finite at gamma = {arg:.6g}")
        values.append(val)
    values = np.array(values)
    if np.all(values.imag == 0.0):
        values = values.real
    return ops.spectral(values)


def _require_orthogonal(A, ops):
    if np.abs(dot(A, ops.L)).max() > ORTHOGONALITY_TOL:
        raise PreconditionError("vector operator must satisfy A . L = 0")


def shift_formula_residual(A, F, ops: OperatorSet) -> float:
    """Residual of moving ``A_i`` through ``F(gamma)``.

    Compares ``A_i F(gamma)`` with
    ``F(gamma+1) (2 gamma+1)^-1 [(gamma+1) A_i + i (L x A)_i]
    + F(gamma-1) (2 gamma+1)^-1 [gamma A_i - i (L x A)_i]``.
    """
    A = np.asarray(A)
    _require_orthogonal(A, ops)
    lhs = np.einsum("iab,bc->iac", A, function_of_gamma(F, ops))
    LxA = cross(ops.L, A)
    gamma, one = ops.gamma, ops.identity
    up = np.einsum("ab,ibc->iac", gamma + one, A) + 1j * LxA
    down = np.einsum("ab,ibc->iac", gamma, A) - 1j * LxA
    w_up = function_of_gamma(lambda g: F(g + 1) / (2 * g + 1), ops)
    w_down = function_of_gamma(lambda g: F(g) / (2 * g + 3), ops, shift=-1)
    rhs = np.einsum("ab,ibc->iac", w_up, up) + np.einsum("ab,ibc->iac", w_down, down)
    return float(np.abs(lhs - rhs).max())


def verify_shift_formula(A, F, ops: OperatorSet) -> float:
    return shift_formula_residual(A, F, ops)


def verify_A5(A, ops: OperatorSet) -> float:
    """Residual of ``A_i L^2 - (L^2 + 2) A_i - 2 i (L x A)_i``."""
    A = np.asarray(A)
    _require_orthogonal(A, ops)
    L2 = ops.L2
    lhs = np.einsum("iab,bc->iac", A, L2)
    rhs = np.einsum("ab,ibc->iac", L2 + 2 * ops.identity, A) + 2j * cross(ops.L, A)
    return float(np.abs(lhs - rhs).max())


def algebra_residuals(ops: OperatorSet) -> dict:
    """Commutation relations and Casimir identities of one irrep."""
    k = float(ops.k)
    casimir = k * (k + 1) * ops.identity
    L, R, M, N = ops.L, ops.R, ops.M, ops.N
    C1, C2 = dot(M, M), dot(N, N)
    RL = dot(R, R) + ops.L2
    return {
        "MM": commutator_residual(M, M, M),
        "NN": commutator_residual(N, N, N),
        "MN": commutator_residual(M, N, np.zeros_like(M)),
        "LL": commutator_residual(L, L, L),
        "RR": commutator_residual(R, R, L),
        "LR": commutator_residual(L, R, R),
        "C1": float(np.abs(C1 - casimir).max()),
        "C2": float(np.abs(C2 - casimir).max()),
        "C1_from_RL": float(np.abs(C1 - RL / 4).max()),
        "C2_from_RL": float(np.abs(C2 - RL / 4).max()),
        "R_dot_L": float(np.abs(dot(R, L)).max()),
        "gamma": float(np.abs(ops.gamma @ (ops.gamma + ops.identity) - ops.L2).max()),
    }
