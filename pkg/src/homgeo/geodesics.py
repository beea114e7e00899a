"""Geodesic vectors of left-invariant Finsler metrics.

A nonzero ``X`` is a geodesic vector iff ``g_X(X, [X, Z]) = 0`` for every
``Z``. The covector ``r_j = g_X(X, [X, e_j])`` is the residual used
throughout; it is positively homogeneous of degree two in ``X``.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .lie import LieAlgebra, ad_matrix, bracket, derived_subalgebra
from .norms import (DomainError, GenericNorm, RandersNorm, cartan_tensor, evaluate,
                    fundamental_matrix, fundamental_tensor, validate)
from .riemann import ad_skew_defect, derived_pairing

log = logging.getLogger(__name__)

BERWALD_TOL = 1e-10
DRIFT_GEODESIC_TOL = 1e-9
GENERIC_TOLERANCE = 1e-7
THREADS_ENV = "HOMGEO_THREADS"
POLISH_STEPS = 20


class GeodesicSolverError(RuntimeError):
    """No seed of the multistart solver converged."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class GeodesicResidual:
    components: np.ndarray
    norm: float

    @property
    def is_geodesic(self) -> bool:
        return self.norm == 0.0


@dataclass
class SolverConfig:
    """Settings for the multistart geodesic-vector and orbit solvers.

    ``seeds=None`` picks 500 in dimension 3 and ``200 * dim`` otherwise.
    """

    seeds: int | None = None
    tolerance: float = 1e-11
    max_iter: int = 200
    dedup_angle: float = 1e-4
    subspace_verify_samples: int = 50
    subspace_tolerance: float = 1e-8
    seed: int = 0
    threads: int | None = None

    def seed_count(self, dim: int) -> int:
        if self.seeds is not None:
            return int(self.seeds)
        return 500 if dim == 3 else 200 * dim

    def thread_count(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        return max(1, int(os.environ.get(THREADS_ENV, "1")))


@dataclass
class Component:
    kind: str  # "isolated_ray" | "linear_subspace"
    basis: np.ndarray  # rows
    verification_residual: float

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


@dataclass
class GeodesicVectorReport:
    solutions: np.ndarray  # rows, a-unit vectors
    residuals: np.ndarray
    components: list[Component]
    solver_stats: dict = field(default_factory=dict)


def _check_norm(L: LieAlgebra, F) -> None:
    if F.dim != L.dim:
        raise ValueError(f"norm has dimension {F.dim}, algebra has {L.dim}")
    if isinstance(F, RandersNorm):
        validate(F)


def geodesic_residual(L: LieAlgebra, F, X) -> GeodesicResidual:
    """Residual ``r_j = g_X(X, [X, e_j])`` through the fundamental tensor."""
    X = np.asarray(X, dtype=float)
    if not np.any(X):
        raise DomainError("geodesic residual is undefined at the zero vector")
    if isinstance(F, RandersNorm):
        r = ad_matrix(L, X).T @ (fundamental_matrix(F, X) @ X)
    else:
        E = np.eye(L.dim)
        r = np.array([fundamental_tensor(F, X, X, bracket(L, X, e)) for e in E])
    return GeodesicResidual(r, float(np.linalg.norm(r)))


def randers_residual_closed_form(L: LieAlgebra, F: RandersNorm, y, z) -> float:
    """``a(X + y / |y|_a, [y, z]) * F(y)`` for a Randers norm with drift ``X``."""
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DomainError("residual is undefined at the zero vector")
    alpha = F.a.norm(y)
    return F.a(F.drift + y / alpha, bracket(L, y, z)) * evaluate(F, y)


def _randers_residual_vector(L: LieAlgebra, F: RandersNorm, y) -> np.ndarray:
    A = F.a.matrix
    alpha = np.sqrt(y @ A @ y)
    q = A @ (y / alpha + F.drift)
    B = np.einsum("i,ijk->jk", y, L.structure)
    return evaluate(F, y) * (B @ q)


def _randers_jacobian(L: LieAlgebra, F: RandersNorm, y) -> tuple[np.ndarray, np.ndarray]:
    """Residual vector and its Jacobian with respect to ``y``."""
    A = F.a.matrix
    c = L.structure
    Ay = A @ y
    alpha = np.sqrt(y @ Ay)
    q = Ay / alpha + F.oneform
    B = np.einsum("i,ijk->jk", y, c)
    s = B @ q
    Fy = alpha + F.oneform @ y
    grad_F = q
    dq = A / alpha - np.outer(Ay, Ay) / alpha**3
    J = np.outer(s, grad_F) + Fy * (np.einsum("mjk,k->jm", c, q) + B @ dq)
    return Fy * s, J


def _residual_and_jacobian(L, F, y, fd_step=1e-6):
    if isinstance(F, RandersNorm):
        return _randers_jacobian(L, F, y)
    r0 = geodesic_residual(L, F, y).components
    J = np.empty((L.dim, L.dim))
    for m in range(L.dim):
        e = np.zeros(L.dim)
        e[m] = fd_step
        J[:, m] = (geodesic_residual(L, F, y + e).components
                   - geodesic_residual(L, F, y - e).components) / (2 * fd_step)
    return r0, J


def sphere_seeds(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Scrambled Halton points pushed onto the unit sphere through the normal quantile."""
    pts = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    g = _normal.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _solve_one(L, F, frame, z0, tol, max_iter):
    """Levenberg-Marquardt on ``|r|^2`` over the unit sphere in orthonormal coordinates."""
    z = z0 / np.linalg.norm(z0)
    r, J = _residual_and_jacobian(L, F, frame @ z)
    J = J @ frame
    rn = np.linalg.norm(r)
    mu = 1e-3 * max(1.0, np.max(np.abs(J)) ** 2)
    n = z.shape[0]
    polish = 0
    for it in range(max_iter):
        if rn <= tol:
            # a few extra steps tighten solutions where the residual vanishes quadratically
            polish += 1
            if polish > POLISH_STEPS or rn <= 1e-3 * tol:
                return z, rn, it, True
        P = np.eye(n) - np.outer(z, z)
        Jt = J @ P
        H = Jt.T @ Jt
        g = Jt.T @ r
        accepted = False
        for _ in range(30):
            step = -np.linalg.solve(H + mu * np.eye(n), g)
            step = P @ step
            zn = z + step
            zn /= np.linalg.norm(zn)
            rn_new_vec, Jn = _residual_and_jacobian(L, F, frame @ zn)
            rn_new = np.linalg.norm(rn_new_vec)
            if rn_new < rn:
                z, r, J, rn = zn, rn_new_vec, Jn @ frame, rn_new
                mu = max(mu / 3.0, 1e-15)
                accepted = True
                break
            mu *= 4.0
        if not accepted:
            break
    return z, rn, max_iter, rn <= tol


def _dedup(points: np.ndarray, angle: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    cos_tol = np.cos(angle)
    for p in points:
        if all(p @ k < cos_tol for k in kept):
            kept.append(p)
    return np.array(kept) if kept else np.zeros((0, points.shape[1] if points.ndim == 2 else 0))


def _span_basis(vectors: np.ndarray) -> np.ndarray:
    """Principal directions of ``vectors`` above ``1e-6 * sqrt(count)``."""
    _, s, vt = np.linalg.svd(vectors, full_matrices=False)
    return vt[s > 1e-6 * np.sqrt(vectors.shape[0])]


def _distance_to_span(p, Q) -> float:
    return float(np.linalg.norm(p - Q.T @ (Q @ p)))


def _verify_span(unit_residual, Q, samples, rng) -> float:
    """Largest residual over random unit vectors in ``span(Q)`` (plus ``+-`` each basis row)."""
    k = Q.shape[0]
    if k == 1:
        probes = np.vstack([Q, -Q])
    else:
        coeffs = rng.standard_normal((samples, k))
        probes = coeffs @ Q
        probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    worst = 0.0
    for p in probes:
        worst = max(worst, unit_residual(p))
    return worst


def _classify(points: np.ndarray, unit_residual, cfg: SolverConfig, verify_tol, rng):
    n = points.shape[0]
    assigned = np.zeros(n, dtype=bool)
    components: list[Component] = []
    member_tol = max(10 * cfg.dedup_angle, 1e-6)

    def check(Q):
        worst = _verify_span(unit_residual, Q, cfg.subspace_verify_samples, rng)
        return worst <= verify_tol, worst

    for i in range(n):
        if assigned[i]:
            continue
        Q = points[i:i + 1]
        ok, worst = check(Q)
        if not ok:
            assigned[i] = True
            components.append(Component("isolated_ray", Q.copy(), unit_residual(points[i])))
            continue
        grown = True
        while grown:
            grown = False
            dist = np.array([_distance_to_span(p, Q) for p in points])
            for j in np.argsort(-dist, kind="stable"):
                if dist[j] <= member_tol:
                    break
                cand = _span_basis(np.vstack([Q, points[j]]))
                if cand.shape[0] <= Q.shape[0]:
                    continue
                ok_c, worst_c = check(cand)
                if ok_c:
                    Q, worst, grown = cand, worst_c, True
                    break
        members = np.array([_distance_to_span(p, Q) <= member_tol for p in points])
        basis = Q
        if Q.shape[0] > 1:
            refit = _span_basis(points[members])[: Q.shape[0]]
            ok_r, worst_r = check(refit)
            if ok_r and refit.shape[0] == Q.shape[0]:
                basis, worst = refit, worst_r
        assigned |= members
        components.append(Component("linear_subspace", basis, worst))
    return components


def find_geodesic_vectors(L: LieAlgebra, F, cfg: SolverConfig | None = None) -> GeodesicVectorReport:
    """Locate all geodesic vectors on the unit sphere of the underlying inner product.

    Seeds cover the sphere quasi-uniformly; each is driven to a zero of the
    residual, duplicates within ``cfg.dedup_angle`` are merged, and the
    survivors are grouped into verified linear subspaces and isolated rays.
    Returned vectors are in algebra coordinates.
    """
    cfg = cfg or SolverConfig()
    _check_norm(L, F)
    if isinstance(F, RandersNorm):
        frame = F.a.orthonormal_basis()
        tol = cfg.tolerance
        verify_tol = cfg.subspace_tolerance
    else:
        frame = np.eye(L.dim)
        tol = max(cfg.tolerance, GENERIC_TOLERANCE)
        verify_tol = max(cfg.subspace_tolerance, 1e-6)

    count = cfg.seed_count(L.dim)
    seeds = sphere_seeds(L.dim, count, cfg.seed)

    def run(k):
        return k, _solve_one(L, F, frame, seeds[k], tol, cfg.max_iter)

    threads = cfg.thread_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(count)))
    else:
        results = [run(k) for k in range(count)]
    results.sort(key=lambda item: item[0])

    converged = [z for _, (z, rn, _, ok) in results if ok]
    stats = {"seeds": count, "converged": len(converged),
             "iterations": int(sum(it for _, (_, _, it, _) in results)), "seed": cfg.seed}
    if not converged:
        raise GeodesicSolverError(f"none of {count} seeds converged to tolerance {tol:g}", stats)
    unique = _dedup(np.array(converged), cfg.dedup_angle)
    stats["unique"] = unique.shape[0]
    stats["dedup_removed"] = len(converged) - unique.shape[0]

    def unit_residual(z):
        return geodesic_residual(L, F, frame @ z).norm

    rng = np.random.default_rng(cfg.seed)
    comps = _classify(unique, unit_residual, cfg, verify_tol, rng)
    for c in comps:
        c.basis = c.basis @ frame.T
    solutions = unique @ frame.T
    residuals = np.array([geodesic_residual(L, F, y).norm for y in solutions])
    log.debug("geodesic vectors: %s", stats)
    return GeodesicVectorReport(solutions, residuals, comps, stats)


@dataclass(frozen=True)
class BerwaldReport:
    skew_defect: float
    derived_pairing_defect: float
    is_berwald: bool


def berwald_check(L: LieAlgebra, F: RandersNorm) -> BerwaldReport:
    """A left-invariant Randers norm is Berwald iff ``ad_X`` is skew and ``X`` is orthogonal to ``[g, g]``."""
    _check_norm(L, F)
    skew = ad_skew_defect(L, F.a, F.drift)
    pairing = derived_pairing(L, F.a, F.drift)
    return BerwaldReport(skew, pairing, skew <= BERWALD_TOL and pairing <= BERWALD_TOL)


def berwald_implies_geodesic_drift(L: LieAlgebra, F: RandersNorm) -> GeodesicResidual:
    """Residual of the drift vector of a Berwald Randers norm; it must vanish."""
    report = berwald_check(L, F)
    if not report.is_berwald:
        raise PreconditionError(
            f"norm is not of Berwald type (skew defect {report.skew_defect:.3e}, "
            f"derived pairing {report.derived_pairing_defect:.3e})")
    if not np.any(F.drift):
        return GeodesicResidual(np.zeros(L.dim), 0.0)
    res = geodesic_residual(L, F, F.drift)
    if res.norm > DRIFT_GEODESIC_TOL:
        raise AssertionError(f"Berwald drift has residual {res.norm:.3e}")
    return res


def biinvariance_defect(L: LieAlgebra, F, samples: int = 200, rng=None) -> float:
    """Largest violation of the Ad-invariance identity over random tuples.

    The identity is ``g_Y([X,U],V) + g_Y(U,[X,V]) + 2 C_Y([X,Y],U,V) = 0``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _check_norm(L, F)
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        Y = rng.standard_normal(L.dim)
        Y /= np.linalg.norm(Y)
        X, U, V = rng.standard_normal((3, L.dim))
        val = (fundamental_tensor(F, Y, bracket(L, X, U), V)
               + fundamental_tensor(F, Y, U, bracket(L, X, V))
               + 2.0 * cartan_tensor(F, Y, bracket(L, X, Y), U, V))
        worst = max(worst, abs(val))
    return worst
