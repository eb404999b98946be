"""Small self-contained numerical kernels.

* :func:`hermitian_eigen` -- cyclic complex Jacobi rotations.
* :func:`tridiag_eigen_lowest` -- Sturm-sequence bisection.
* :func:`complex_gamma` -- Lanczos approximation, g = 7, nine terms.

Dense matrices are plain ``numpy`` arrays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConvergenceError, DegenerateInputError, PreconditionError

HERMITIAN_TOL = 1e-10


@numba.njit(cache=True)
def _jacobi(a, v, max_sweeps, tol):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if math.sqrt(off) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mod = abs(b)
                if mod == 0.0:
                    continue
                phase = b / mod
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mod)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                upp = c
                upq = s
                uqp = -s * phase.conjugate()
                uqq = c * phase.conjugate()
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * upp + akq * uqp
                    a[k, q] = akp * upq + akq * uqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = upp * apk + uqp.conjugate() * aqk
                    a[q, k] = upq * apk + uqq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * upp + vkq * uqp
                    v[k, q] = vkp * upq + vkq * uqq
    return -1


def hermitian_eigen(M, max_sweeps: int = 100):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.

    Columns of the returned ``V`` are eigenvectors: ``M @ V = V @ diag(w)``.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise PreconditionError("matrix has non-finite entries")
    n = M.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0), dtype=complex)
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.conj().T).max() > HERMITIAN_TOL * scale:
        raise PreconditionError("matrix is not Hermitian")

    a = np.ascontiguousarray(0.5 * (M + M.conj().T), dtype=complex)
    v = np.eye(n, dtype=complex)
    tol = np.finfo(float).eps * scale * 1e-2
    if _jacobi(a, v, max_sweeps, tol) < 0:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class TridiagonalSpec:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).ravel()
        e = np.asarray(self.offdiag, dtype=float).ravel()
        if len(d) == 0 or len(e) != len(d) - 1:
            raise ValueError("offdiag must have exactly one entry fewer than diag")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm(self) -> float:
        """Infinity norm."""
        a = np.abs(self.diag).copy()
        a[:-1] += np.abs(self.offdiag)
        a[1:] += np.abs(self.offdiag)
        return float(a.max())


@numba.njit(cache=True, nogil=True)
def _sturm_count(d, e2, sigma, pivmin):
    # number of eigenvalues strictly below sigma
    count = 0
    q = d[0] - sigma
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        q = d[i] - sigma - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@numba.njit(cache=True, nogil=True)
def _bisect_lowest(d, e2, count, lo, hi, pivmin, max_iter):
    eps = 2.220446049250313e-16
    out = np.empty(count)
    for k in range(count):
        a = lo
        b = hi
        for _ in range(max_iter):
            mid = 0.5 * (a + b)
            if b - a <= 2.0 * eps * max(abs(a), abs(b)) + pivmin or mid == a or mid == b:
                break
            if _sturm_count(d, e2, mid, pivmin) > k:
                b = mid
            else:
                a = mid
        out[k] = 0.5 * (a + b)
        lo = a
    return out


def tridiag_eigen_lowest(T: TridiagonalSpec, count: int) -> np.ndarray:
    """The ``count`` smallest eigenvalues of ``T`` in ascending order."""
    n = len(T.diag)
    if not 1 <= count <= n:
        raise ValueError(f"count must lie in [1, {n}], got {count}")
    d, e = T.diag, T.offdiag
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    span = max(hi - lo, 1.0)
    lo -= 1e-9 * span
    hi += 1e-9 * span
    e2 = e * e
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max()) if len(e2) else 1.0)
    return _bisect_lowest(d, e2, int(count), lo, hi, pivmin, 500)


LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z) -> complex:
    """Gamma function at a complex argument.

    Uses the reflection formula ``Gamma(z) Gamma(1 - z) = pi / sin(pi z)`` for
    ``Re z < 1/2``.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise DegenerateInputError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    z -= 1.0
    acc = LANCZOS_COEFFS[0]
    for i, c in enumerate(LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc
