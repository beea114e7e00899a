"""Adjoint orbits and critical points of the squared norm restricted to them.

The orbit of ``X`` is explored with exact one-parameter flows
``Y -> exp(t ad_Z) Y``, so iterates never leave the orbit. The first
variation of ``Q = F^2`` along ``Z`` is ``2 g_Y([Z, Y], Y)``; its zeros on the
orbit are exactly the geodesic vectors lying there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .geodesics import SolverConfig, _check_norm, _residual_and_jacobian, geodesic_residual
from .lie import LieAlgebra, ad_matrix, bracket
from .norms import DomainError, evaluate, fundamental_tensor

__all__ = [
    "ad_matrix", "orbit_flow", "restricted_norm", "restricted_norm_derivative",
    "first_variations", "find_orbit_critical_points", "OrbitCriticalReport",
    "CriticalPoint", "geodesic_rays_on_orbit_family",
]

CRITICAL_TOL = 1e-9
MATCH_TOL = 1e-8
DEGENERATE_TOL = 1e-12


def orbit_flow(L: LieAlgebra, X, Z, t: float) -> np.ndarray:
    """``exp(t ad_Z) X``."""
    X = np.asarray(X, dtype=float)
    if t == 0:
        return X.copy()
    return expm(t * ad_matrix(L, Z)) @ X


def restricted_norm(F, Y) -> float:
    """``Q(Y) = F(Y)^2``."""
    f = evaluate(F, Y)
    return f * f


def restricted_norm_derivative(L: LieAlgebra, F, X, Z) -> float:
    """``d/dt Q(exp(t ad_Z) X)`` at ``t = 0``, i.e. ``2 g_X([Z, X], X)``."""
    X = np.asarray(X, dtype=float)
    if not np.any(X):
        raise DomainError("restricted norm is not differentiable at the zero vector")
    return 2.0 * fundamental_tensor(F, X, bracket(L, Z, X), X)


def first_variations(L: LieAlgebra, F, Y) -> np.ndarray:
    """First variations of ``Q`` at ``Y`` along every basis direction."""
    return np.array([restricted_norm_derivative(L, F, Y, e) for e in np.eye(L.dim)])


@dataclass
class CriticalPoint:
    point: np.ndarray
    value: float
    first_variation: float
    geodesic_residual: float

    @property
    def is_geodesic_vector(self) -> bool:
        return self.geodesic_residual <= MATCH_TOL


@dataclass
class OrbitCriticalReport:
    base: np.ndarray
    critical_points: list[CriticalPoint]
    degenerate_constant: bool = False
    trivial_orbit: bool = False
    stats: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.critical_points)

    @property
    def matched_geodesic_vectors(self) -> list[bool]:
        return [c.is_geodesic_vector for c in self.critical_points]


def _variation_jacobian(L, F, Y):
    # d_k(Y) = -2 r_k(Y); moving along Z changes Y by [Z, Y] = -ad_Y Z
    r, Jr = _residual_and_jacobian(L, F, Y)
    return -2.0 * r, 2.0 * Jr @ ad_matrix(L, Y)


def _gradient_phase(L, F, Y, sign, steps):
    """Ascent (``sign=+1``) or descent (``sign=-1``) of ``Q`` along orbit flows."""
    q = restricted_norm(F, Y)
    eta = 0.5
    for _ in range(steps):
        d = first_variations(L, F, Y)
        if np.max(np.abs(d)) <= CRITICAL_TOL:
            break
        while eta > 1e-12:
            Yn = orbit_flow(L, Y, sign * eta * d, 1.0)
            qn = restricted_norm(F, Yn)
            if sign * (qn - q) >= 0.25 * eta * float(d @ d):
                Y, q = Yn, qn
                eta = min(2.0 * eta, 4.0)
                break
            eta *= 0.5
        else:
            break
    return Y


def _newton_phase(L, F, Y, max_iter):
    """Levenberg-Marquardt on the first variations, retracting with orbit flows."""
    d, J = _variation_jacobian(L, F, Y)
    dn = np.max(np.abs(d))
    mu = 1e-3 * max(1.0, np.max(np.abs(J)) ** 2)
    n = L.dim
    for _ in range(max_iter):
        if dn <= 1e-3 * CRITICAL_TOL:
            break
        H = J.T @ J
        g = J.T @ d
        for _ in range(30):
            z = -np.linalg.solve(H + mu * np.eye(n), g)
            Yn = orbit_flow(L, Y, z, 1.0)
            dn_vec, Jn = _variation_jacobian(L, F, Yn)
            if np.linalg.norm(dn_vec) < np.linalg.norm(d):
                Y, d, J = Yn, dn_vec, Jn
                dn = np.max(np.abs(d))
                mu = max(mu / 3.0, 1e-15)
                break
            mu *= 4.0
        else:
            break
    return Y, dn


def find_orbit_critical_points(L: LieAlgebra, F, X, cfg: SolverConfig | None = None,
                               gradient_steps: int = 200) -> OrbitCriticalReport:
    """Critical points of ``Q`` on the adjoint orbit through ``X``.

    Seeds are ``exp(ad_Z) X`` for random ``Z``. From every seed the search
    runs a plain Newton phase and, separately, Newton after gradient ascent
    and after gradient descent, so both extrema are always reached.
    Orbits on which ``Q`` is constant are flagged instead of enumerated.
    """
    cfg = cfg or SolverConfig()
    _check_norm(L, F)
    X = np.asarray(X, dtype=float)
    if not np.any(X):
        raise DomainError("orbit base point must be nonzero")
    scale = float(np.linalg.norm(X))

    def critical(Y, dmax):
        return CriticalPoint(Y, restricted_norm(F, Y), float(dmax), geodesic_residual(L, F, Y).norm)

    tangent = np.array([bracket(L, e, X) for e in np.eye(L.dim)])
    if np.max(np.abs(tangent)) <= 1e-14 * max(1.0, scale):
        dmax = np.max(np.abs(first_variations(L, F, X)))
        return OrbitCriticalReport(X, [critical(X, dmax)], trivial_orbit=True,
                                   stats={"seeds": 0})

    rng = np.random.default_rng(cfg.seed)
    n_seeds = cfg.seeds if cfg.seeds is not None else 20 * L.dim
    seeds = [X] + [orbit_flow(L, X, rng.standard_normal(L.dim) * np.pi, 1.0)
                   for _ in range(n_seeds - 1)]

    qs = np.array([restricted_norm(F, Y) for Y in seeds])
    if np.ptp(qs) <= DEGENERATE_TOL * max(1.0, float(np.max(np.abs(qs)))):
        probe = np.max([np.max(np.abs(first_variations(L, F, Y))) for Y in seeds])
        if probe <= CRITICAL_TOL:
            dmax = np.max(np.abs(first_variations(L, F, X)))
            return OrbitCriticalReport(X, [critical(X, dmax)], degenerate_constant=True,
                                       stats={"seeds": len(seeds)})

    found: list[CriticalPoint] = []
    failed: list[int] = []
    for k, Y0 in enumerate(seeds):
        starts = [Y0,
                  _gradient_phase(L, F, Y0, +1, gradient_steps),
                  _gradient_phase(L, F, Y0, -1, gradient_steps)]
        ok_any = False
        for S in starts:
            Y, dmax = _newton_phase(L, F, S, cfg.max_iter)
            if dmax > CRITICAL_TOL:
                continue
            ok_any = True
            if all(np.linalg.norm(Y - c.point) > 1e-6 * scale for c in found):
                found.append(critical(Y, dmax))
        if not ok_any:
            failed.append(k)
    found.sort(key=lambda c: (-c.value, tuple(np.round(c.point, 9))))
    stats = {"seeds": len(seeds), "failed_seeds": failed, "seed": cfg.seed}
    return OrbitCriticalReport(X, found, stats=stats)


def geodesic_rays_on_orbit_family(L: LieAlgebra, F, base_points, cfg: SolverConfig | None = None,
                                  angle: float = 1e-4) -> np.ndarray:
    """Distinct unit geodesic directions collected from critical points of many orbits.

    Used to exhibit ever more homogeneous geodesics on higher-rank compact
    algebras: each orbit contributes its critical points, and rays are merged
    when closer than ``angle`` radians.
    """
    rays: list[np.ndarray] = []
    for X in base_points:
        rep = find_orbit_critical_points(L, F, X, cfg)
        if rep.degenerate_constant:
            continue
        for c in rep.critical_points:
            if not c.is_geodesic_vector:
                continue
            u = c.point / np.linalg.norm(c.point)
            if all(u @ v < np.cos(angle) for v in rays):
                rays.append(u)
    return np.array(rays)
