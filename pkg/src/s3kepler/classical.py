"""Classical Kepler problem on S^3 in stereographic coordinates.

Observables are evaluated together with their exact gradients in phase space
(``jets``), so Poisson brackets can be formed analytically and compared with
central finite differences.

Bracket orientation: ``{F, G} = sum_i dF/dp_i dG/dx_i - dF/dx_i dG/dp_i``.
With it ``{L_1, L_2} = -L_3``, ``{K_i, K_j} = -eps_ijk L_k`` and
``{A_i, A_j} = eps_ijk L_k (h - 2 L^2)``, the sign layout used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ConvergenceError, DegenerateInputError, SingularityError
from .geometry import DEFAULT_PARAMS, SystemParams
from .rng import SplitMix64

EPS = np.zeros((3, 3, 3))
EPS[0, 1, 2] = EPS[1, 2, 0] = EPS[2, 0, 1] = 1.0
EPS[0, 2, 1] = EPS[2, 1, 0] = EPS[1, 0, 2] = -1.0

VECTOR_OBSERVABLES = ("L", "K", "A", "R", "n")
SCALAR_OBSERVABLES = ("H", "h", "Lsq")


@dataclass(frozen=True)
class PhasePoint:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(3)
        p = np.array(self.p, dtype=float).reshape(3)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise ValueError("phase point must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    @classmethod
    def from_vector(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        return cls(z[:3], z[3:])


@dataclass(frozen=True)
class ObservableFrame:
    L: np.ndarray
    K: np.ndarray
    A: np.ndarray
    R: np.ndarray
    H: float
    h: float


def _radius(x):
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise DegenerateInputError("observable is singular at x = 0")
    return r


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def rescaled(H, params: SystemParams = DEFAULT_PARAMS):
    """``h = m H / (2 lam^2)``."""
    return params.m * H / (2.0 * params.lam**2)


def hamiltonian(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> float:
    return float(_hamiltonian(pp.x, pp.p, params))


def _hamiltonian(x, p, params):
    m, lam, alpha = params.m, params.lam, params.alpha
    r = _radius(x)
    x2 = _dot(x, x)
    kinetic = _dot(p, p) * (x2 + lam**2) ** 2 / (2.0 * m)
    return kinetic + 2.0 * lam * alpha / m * (x2 - lam**2) / r


def angular_momentum(pp: PhasePoint) -> np.ndarray:
    return np.cross(pp.x, pp.p)


def k_vector(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    return _k_vector(pp.x, pp.p, params)


def _k_vector(x, p, params):
    lam = params.lam
    x2 = _dot(x, x)[..., None]
    px = _dot(p, x)[..., None]
    return (p * (x2 - lam**2) - 2.0 * x * px) / (2.0 * lam)


def lrl_vector(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    """Laplace-Runge-Lenz vector ``K x L + alpha x/|x|``."""
    return _lrl_vector(pp.x, pp.p, params)


def _lrl_vector(x, p, params):
    r = _radius(x)[..., None]
    return np.cross(_k_vector(x, p, params), np.cross(x, p)) + params.alpha * x / r


def _lower_root(h, alpha):
    return h / 2.0 - np.sqrt(h * h / 4.0 + alpha * alpha)


def _r_vector(x, p, params):
    A = _lrl_vector(x, p, params)
    L = np.cross(x, p)
    h = rescaled(_hamiltonian(x, p, params), params)
    bracket = _dot(L, L) - _lower_root(h, params.alpha)
    if np.any(bracket <= 0.0):
        raise DegenerateInputError(
            "R is undefined: L^2 - (h/2 - sqrt(h^2/4 + alpha^2)) <= 0"
        )
    return A / np.sqrt(bracket)[..., None]


def r_vector(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    """Rescaled LRL vector that closes an so(3) + so(3) bracket algebra with L."""
    return _r_vector(pp.x, pp.p, params)


def observable_frame(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> ObservableFrame:
    H = hamiltonian(pp, params)
    return ObservableFrame(
        L=angular_momentum(pp),
        K=k_vector(pp, params),
        A=lrl_vector(pp, params),
        R=r_vector(pp, params),
        H=H,
        h=rescaled(H, params),
    )


def jets(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> dict:
    """Values and exact phase-space gradients of every named observable.

    Returns a mapping ``name -> (value, jacobian)`` where vector observables
    have a ``(3, 6)`` jacobian and scalars a ``(6,)`` gradient, columns ordered
    ``(x_1, x_2, x_3, p_1, p_2, p_3)``. ``R`` is omitted when it is undefined
    at ``pp``.
    """
    x, p = pp.x, pp.p
    m, lam, alpha = params.m, params.lam, params.alpha
    r = float(_radius(x))
    x2 = x @ x
    p2 = p @ p
    px = p @ x
    eye = np.eye(3)

    L = np.cross(x, p)
    JL = np.hstack([np.einsum("ijb,b->ij", EPS, p), np.einsum("iaj,a->ij", EPS, x)])

    K = (p * (x2 - lam**2) - 2.0 * x * px) / (2.0 * lam)
    dKdx = (np.outer(p, x) - px * eye - np.outer(x, p)) / lam
    dKdp = ((x2 - lam**2) * eye - 2.0 * np.outer(x, x)) / (2.0 * lam)
    JK = np.hstack([dKdx, dKdp])

    n = x / r
    Jn = np.hstack([(eye - np.outer(n, n)) / r, np.zeros((3, 3))])

    A = np.cross(K, L) + alpha * n
    JA = (
        np.einsum("iab,aj,b->ij", EPS, JK, L)
        + np.einsum("iab,a,bj->ij", EPS, K, JL)
        + alpha * Jn
    )

    s = x2 + lam**2
    H = p2 * s * s / (2.0 * m) + 2.0 * lam * alpha / m * (x2 - lam**2) / r
    dHdx = 2.0 * p2 * s * x / m + 2.0 * lam * alpha / m * (1.0 + lam**2 / x2) * n
    dHdp = p * s * s / m
    gH = np.concatenate([dHdx, dHdp])

    scale = m / (2.0 * lam**2)
    h, gh = scale * H, scale * gH
    Lsq, gLsq = L @ L, 2.0 * L @ JL

    out = {
        "L": (L, JL),
        "K": (K, JK),
        "A": (A, JA),
        "n": (n, Jn),
        "H": (H, gH),
        "h": (h, gh),
        "Lsq": (Lsq, gLsq),
    }

    root = math.sqrt(h * h / 4.0 + alpha * alpha)
    bracket = Lsq - (h / 2.0 - root)
    if bracket > 0.0:
        dlower = 0.5 - h / (4.0 * root) if root > 0.0 else 0.0
        scl = bracket**-0.5
        gscl = -0.5 * bracket**-1.5 * (gLsq - dlower * gh)
        out["R"] = (A * scl, scl * JA + np.outer(A, gscl))
    return out


def observable_value(name: str, pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS) -> float:
    """Evaluate an observable id such as ``"A2"``, ``"H"`` or ``"Lsq"``."""
    x, p = pp.x, pp.p
    if name == "H":
        return float(_hamiltonian(x, p, params))
    if name == "h":
        return float(rescaled(_hamiltonian(x, p, params), params))
    if name == "Lsq":
        L = np.cross(x, p)
        return float(L @ L)
    vec, idx = _split_id(name)
    return float(_vector_value(vec, pp, params)[idx])


def _vector_value(vec, pp, params):
    x, p = pp.x, pp.p
    if vec == "L":
        return np.cross(x, p)
    if vec == "K":
        return _k_vector(x, p, params)
    if vec == "A":
        return _lrl_vector(x, p, params)
    if vec == "R":
        return _r_vector(x, p, params)
    if vec == "n":
        return x / _radius(x)
    raise ValueError(f"unknown vector observable {vec!r}")


def _split_id(name):
    if len(name) == 2 and name[0] in VECTOR_OBSERVABLES and name[1] in "123":
        return name[0], int(name[1]) - 1
    raise ValueError(f"unknown observable id {name!r}")


def _gradient(name, table):
    if name in SCALAR_OBSERVABLES:
        return table[name][1]
    vec, idx = _split_id(name)
    if vec not in table:
        raise DegenerateInputError(f"observable {name} is undefined at this point")
    return table[vec][1][idx]


def _fd_gradient(func, z, step):
    # central differences; works for scalar or vector valued func
    cols = []
    for i in range(6):
        dz = np.zeros(6)
        dz[i] = step
        hi = np.asarray(func(PhasePoint.from_vector(z + dz)))
        lo = np.asarray(func(PhasePoint.from_vector(z - dz)))
        cols.append((hi - lo) / (2.0 * step))
    return np.stack(cols, axis=-1)


def _orient(gF, gG):
    return gF[3:] @ gG[:3] - gF[:3] @ gG[3:]


def poisson_bracket(
    F,
    G,
    pp: PhasePoint,
    params: SystemParams = DEFAULT_PARAMS,
    mode: str = "analytic",
    step: float = 1e-5,
) -> float:
    """Poisson bracket ``{F, G}`` at ``pp``.

    ``F`` and ``G`` are observable ids (``"L1"``, ``"A3"``, ``"H"``, ...). In
    ``"finite-difference"`` mode they may also be callables taking a
    :class:`PhasePoint` and returning a float.
    """
    if mode == "analytic":
        if callable(F) or callable(G):
            raise ValueError("analytic mode needs observable ids, not callables")
        table = jets(pp, params)
        return float(_orient(_gradient(F, table), _gradient(G, table)))
    if mode != "finite-difference":
        raise ValueError(f"unknown bracket mode {mode!r}")
    if not step > 0:
        raise ValueError("finite-difference step must be positive")

    def as_func(obs):
        if callable(obs):
            return obs
        return lambda q: observable_value(obs, q, params)

    z = pp.z
    gF = _fd_gradient(as_func(F), z, step)
    gG = _fd_gradient(as_func(G), z, step)
    return float(_orient(gF, gG))


def bracket_matrix(U: str, V: str, pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS,
                   mode: str = "analytic", step: float = 1e-5) -> np.ndarray:
    """The 3x3 table ``{U_i, V_j}`` for two vector observables."""
    if mode == "analytic":
        table = jets(pp, params)
        if U not in table or V not in table:
            raise DegenerateInputError("vector observable undefined at this point")
        JU, JV = table[U][1], table[V][1]
        return JU[:, 3:] @ JV[:, :3].T - JU[:, :3] @ JV[:, 3:].T
    if mode != "finite-difference":
        raise ValueError(f"unknown bracket mode {mode!r}")
    z = pp.z
    JU = _fd_gradient(lambda q: _vector_value(U, q, params), z, step)
    JV = _fd_gradient(lambda q: _vector_value(V, q, params), z, step)
    return JU[:, 3:] @ JV[:, :3].T - JU[:, :3] @ JV[:, 3:].T


# -- trajectories -----------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    params: SystemParams = field(default=DEFAULT_PARAMS)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> PhasePoint:
        return PhasePoint(self.x[i], self.p[i])


@numba.njit(cache=True)
def _velocity(z, m, lam, alpha, out):
    x2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2]
    p2 = z[3] * z[3] + z[4] * z[4] + z[5] * z[5]
    r = math.sqrt(x2)
    s = x2 + lam * lam
    a = s * s / m
    c = 2.0 * p2 * s / m + 2.0 * lam * alpha / m * (1.0 + lam * lam / x2) / r
    for i in range(3):
        out[i] = a * z[3 + i]
        out[3 + i] = -c * z[i]


@numba.njit(cache=True)
def _segment_distance(a, b):
    # distance from the origin to the chord a -> b
    d0 = b[0] - a[0]
    d1 = b[1] - a[1]
    d2 = b[2] - a[2]
    dd = d0 * d0 + d1 * d1 + d2 * d2
    t = 0.0
    if dd > 0.0:
        t = -(a[0] * d0 + a[1] * d1 + a[2] * d2) / dd
        t = min(1.0, max(0.0, t))
    c0 = a[0] + t * d0
    c1 = a[1] + t * d1
    c2 = a[2] + t * d2
    return math.sqrt(c0 * c0 + c1 * c1 + c2 * c2)


@numba.njit(cache=True)
def _midpoint_run(z0, m, lam, alpha, dt, n_steps, fp_tol, max_iter, r_min):
    out = np.empty((n_steps + 1, 6))
    out[0] = z0
    z = z0.copy()
    zn = np.empty(6)
    mid = np.empty(6)
    v = np.empty(6)
    for step in range(n_steps):
        _velocity(z, m, lam, alpha, v)
        for i in range(6):
            zn[i] = z[i] + dt * v[i]
        converged = False
        for _ in range(max_iter):
            for i in range(6):
                mid[i] = 0.5 * (z[i] + zn[i])
            if math.sqrt(mid[0] ** 2 + mid[1] ** 2 + mid[2] ** 2) < r_min:
                return out, step, 2
            _velocity(mid, m, lam, alpha, v)
            err = 0.0
            scale = 1.0
            for i in range(6):
                new = z[i] + dt * v[i]
                err = max(err, abs(new - zn[i]))
                scale = max(scale, abs(new))
                zn[i] = new
            if not math.isfinite(err):
                break
            if err <= fp_tol * scale:
                converged = True
                break
        if not converged:
            return out, step, 1
        if _segment_distance(z, zn) < r_min:
            return out, step, 2
        z[:] = zn
        out[step + 1] = z
    return out, n_steps, 0


def integrate(
    pp0: PhasePoint,
    params: SystemParams = DEFAULT_PARAMS,
    dt: float = 1e-3,
    n_steps: int = 100_000,
    fp_tol: float = 1e-13,
    max_iter: int = 50,
) -> Trajectory:
    """Implicit-midpoint integration of Hamilton's equations.

    Each step solves ``z1 = z0 + dt * J grad H((z0 + z1) / 2)`` by fixed-point
    iteration until successive iterates agree to ``fp_tol`` (relative to
    ``max(1, |z|)``). Runs are aborted with :class:`SingularityError` once the
    chord between two steps passes within ``10 * fp_tol`` of the centre and
    with :class:`ConvergenceError` after ``max_iter`` iterations; both carry
    the accepted part of the trajectory as ``partial``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not fp_tol > 0:
        raise ValueError("fp_tol must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if np.linalg.norm(pp0.x) == 0.0:
        raise DegenerateInputError("initial point sits on the centre of force")

    out, done, status = _midpoint_run(
        pp0.z, params.m, params.lam, params.alpha, float(dt), int(n_steps),
        float(fp_tol), int(max_iter), 10.0 * fp_tol,
    )
    out = out[: done + 1]
    traj = Trajectory(t=dt * np.arange(done + 1), x=out[:, :3].copy(), p=out[:, 3:].copy(), params=params)
    if status == 1:
        raise ConvergenceError(f"fixed-point iteration failed at step {done}", partial=traj)
    if status == 2:
        raise SingularityError(f"trajectory reached the centre of force at step {done}", partial=traj)
    return traj


@dataclass(frozen=True)
class DriftReport:
    """Maximum deviation of each conserved quantity from its initial value."""

    H: float
    H_relative: float
    L: np.ndarray
    A: np.ndarray
    R: np.ndarray | None

    def as_dict(self) -> dict:
        out = {"H": self.H, "H_relative": self.H_relative}
        for name in ("L", "A", "R"):
            vals = getattr(self, name)
            if vals is not None:
                out.update({f"{name}{i + 1}": float(v) for i, v in enumerate(vals)})
        return out


def conserved_drift(traj: Trajectory, params: SystemParams | None = None) -> DriftReport:
    params = params or traj.params
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    x, p = traj.x, traj.p
    H = _hamiltonian(x, p, params)
    L = np.cross(x, p)
    A = _lrl_vector(x, p, params)
    try:
        R = _r_vector(x, p, params)
        dR = np.max(np.abs(R - R[0]), axis=0)
    except DegenerateInputError:
        dR = None
    dH = float(np.max(np.abs(H - H[0])))
    return DriftReport(
        H=dH,
        H_relative=dH / abs(H[0]) if H[0] != 0 else dH,
        L=np.max(np.abs(L - L[0]), axis=0),
        A=np.max(np.abs(A - A[0]), axis=0),
        R=dR,
    )


# -- identity suite ---------------------------------------------------------

def sample_phase_points(seed: int, count: int, box: float = 2.0,
                        r_min: float = 0.1, l_min: float = 1e-3) -> list[PhasePoint]:
    """Draw ``count`` points uniformly from ``[-box, box]^6``.

    Draw order per candidate is ``x1, x2, x3, p1, p2, p3``; candidates with
    ``|x| < r_min`` or ``|L| < l_min`` are rejected.
    """
    gen = SplitMix64(seed)
    points = []
    while len(points) < count:
        z = [gen.uniform(-box, box) for _ in range(6)]
        pp = PhasePoint(z[:3], z[3:])
        if np.linalg.norm(pp.x) < r_min or np.linalg.norm(np.cross(pp.x, pp.p)) < l_min:
            continue
        points.append(pp)
    return points


def identity_residuals(pp: PhasePoint, params: SystemParams = DEFAULT_PARAMS,
                       mode: str = "analytic", step: float = 1e-5) -> dict:
    """Max-abs residual of every classical identity at one phase point.

    Keys prefixed ``bracket_`` depend on ``mode``; the rest are algebraic
    identities. Entries involving ``R`` are absent where ``R`` is undefined.
    Inequality checks report the size of the violation (0 when satisfied).
    """
    alpha = params.alpha
    table = jets(pp, params)
    L, K, A, h = table["L"][0], table["K"][0], table["A"][0], table["h"][0]
    Lsq = L @ L
    eL = np.einsum("ijk,k->ij", EPS, L)
    root = math.sqrt(h * h / 4.0 + alpha * alpha)
    upper = h / 2.0 + root

    def br(U, V):
        return bracket_matrix(U, V, pp, params, mode, step)

    out = {
        "bracket_LL": np.abs(br("L", "L") + eL).max(),
        "bracket_KK": np.abs(br("K", "K") + eL).max(),
        "bracket_LK": np.abs(br("L", "K") + np.einsum("ijk,k->ij", EPS, K)).max(),
        "bracket_AA": np.abs(br("A", "A") - eL * (h - 2.0 * Lsq)).max(),
        "bracket_LA": np.abs(br("L", "A") + np.einsum("ijk,k->ij", EPS, A)).max(),
        "A_dot_L": abs(A @ L),
        "A_squared": abs(A @ A - (alpha**2 - Lsq**2 + h * Lsq)),
        "A_squared_factorized": abs(A @ A + (Lsq - upper) * (Lsq - (h / 2.0 - root))),
        "L_squared_bounds": max(0.0, -Lsq, Lsq - upper),
    }
    if "R" in table:
        R = table["R"][0]
        casimir = R @ R + Lsq
        out.update({
            "bracket_RR": np.abs(br("R", "R") + eL).max(),
            "bracket_LR": np.abs(br("L", "R") + np.einsum("ijk,k->ij", EPS, R)).max(),
            "R_dot_L": abs(R @ L),
            "casimir": abs(casimir - upper),
            "h_from_casimir": abs(h - (casimir - alpha**2 / casimir)),
        })
    if alpha == 0.0:
        H = table["H"][0]
        out["free_casimir"] = abs(H - 4.0 * params.lam**2 * (Lsq + K @ K) / (2.0 * params.m))
        out["L_dot_K"] = abs(L @ K)
    return {k: float(v) for k, v in out.items()}
