"""Minkowski norms on a Lie algebra.

Randers norms ``F(y) = sqrt(a(y, y)) + a(X, y)`` carry closed-form fundamental
and Cartan tensors. Any other smooth, positively 1-homogeneous norm can be
wrapped in :class:`GenericNorm`; its tensors come from central differences,
which also serve as the cross-check for the Randers formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

SYMMETRY_TOL = 1e-12
VALIDITY_MARGIN = 1e-12
FD2_STEP = 1e-4
FD3_STEP = 5e-3


class NormError(ValueError):
    """Invalid norm data.

    ``condition`` names the failed check and ``value`` carries the offending
    number, when there is one.
    """

    def __init__(self, message: str, condition: str = "", value: float | None = None):
        super().__init__(message)
        self.condition = condition
        self.value = value


class DomainError(ValueError):
    """A norm or one of its tensors was evaluated at the zero vector."""


@dataclass(frozen=True, eq=False)
class InnerProduct:
    """Symmetric positive-definite bilinear form on the algebra."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NormError(f"metric must be a square matrix, got shape {m.shape}", "shape")
        asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        if asym > SYMMETRY_TOL:
            raise NormError(f"metric is not symmetric (defect {asym:.3e})", "symmetric", asym)
        m = 0.5 * (m + m.T)
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo <= 0.0:
            raise NormError(f"metric is not positive definite (smallest eigenvalue {lo:.3e})",
                            "positive_definite", lo)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        chol = np.linalg.cholesky(m)
        # columns of frame are an a-orthonormal basis
        frame = np.linalg.inv(chol).T
        frame.setflags(write=False)
        object.__setattr__(self, "_chol", chol)
        object.__setattr__(self, "_frame", frame)

    @classmethod
    def identity(cls, dim: int) -> "InnerProduct":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u, v) -> float:
        # symmetrized so that a(u, v) == a(v, u) bitwise
        A = self.matrix
        return 0.5 * (float(u @ (A @ v)) + float(v @ (A @ u)))

    def norm(self, u) -> float:
        return float(np.sqrt(u @ self.matrix @ u))

    def flat(self, u) -> np.ndarray:
        return self.matrix @ u

    def orthonormal_basis(self) -> np.ndarray:
        """Columns form an ``a``-orthonormal basis."""
        return self._frame

    def from_euclidean(self, z) -> np.ndarray:
        """Map Euclidean coordinates in the orthonormal frame to algebra coordinates."""
        return self._frame @ z

    def to_euclidean(self, y) -> np.ndarray:
        return self._chol.T @ y


@dataclass(frozen=True, eq=False)
class RandersNorm:
    """Randers norm built from an inner product and a drift vector.

    Construction does not check ``a(X, X) < 1``; call :func:`validate`.
    """

    a: InnerProduct
    drift: np.ndarray

    def __post_init__(self):
        if not isinstance(self.a, InnerProduct):
            object.__setattr__(self, "a", InnerProduct(self.a))
        d = np.array(self.drift, dtype=float)
        if d.shape != (self.a.dim,):
            raise NormError(f"drift has shape {d.shape}, expected ({self.a.dim},)", "shape")
        d.setflags(write=False)
        object.__setattr__(self, "drift", d)
        b = self.a.matrix @ d
        b.setflags(write=False)
        object.__setattr__(self, "_oneform", b)

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def oneform(self) -> np.ndarray:
        """The 1-form ``b = a(X, .)`` as a coefficient vector."""
        return self._oneform

    @property
    def drift_norm(self) -> float:
        return self.a.norm(self.drift)

    def __call__(self, y) -> float:
        return evaluate(self, y)


@dataclass(frozen=True, eq=False)
class GenericNorm:
    """Black-box Minkowski norm ``F: R^dim \\ {0} -> R_+``."""

    evaluator: Callable[[np.ndarray], float]
    dim: int

    def __call__(self, y) -> float:
        return evaluate(self, y)

    def homogeneity_defect(self, samples: int = 20, rng=None) -> float:
        """Largest relative violation of ``F(t y) = t F(y)`` over random ``y``, ``t``."""
        rng = np.random.default_rng(rng)
        worst = 0.0
        for _ in range(samples):
            y = rng.standard_normal(self.dim)
            t = float(np.exp(rng.uniform(-2.0, 2.0)))
            fy = self.evaluator(y)
            worst = max(worst, abs(self.evaluator(t * y) - t * fy) / max(abs(t * fy), 1e-300))
        return worst


def _nonzero(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DomainError("norm is not smooth at the zero vector")
    return y


def evaluate(F, y) -> float:
    """Value of the norm at a nonzero vector."""
    y = _nonzero(y)
    if isinstance(F, RandersNorm):
        return F.a.norm(y) + float(F.oneform @ y)
    return float(F.evaluator(y))


def validate(F: RandersNorm) -> None:
    """Raise :class:`NormError` unless ``F`` defines a Minkowski norm."""
    a = F.a if isinstance(F.a, InnerProduct) else InnerProduct(F.a)
    sq = float(F.drift @ a.matrix @ F.drift)
    if not sq < 1.0 - VALIDITY_MARGIN:
        raise NormError(f"drift norm must be < 1, got |b| = {np.sqrt(sq):.17g} (a(X,X) = {sq:.17g})",
                        "drift_norm", float(np.sqrt(sq)))


def is_valid(F: RandersNorm) -> bool:
    try:
        validate(F)
    except NormError:
        return False
    return True


def fundamental_tensor(F, y, u, v) -> float:
    """``g_y(u, v)``: closed form for Randers norms, central differences otherwise."""
    if not isinstance(F, RandersNorm):
        return fundamental_tensor_fd(F, y, u, v)
    y = _nonzero(y)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    a = F.a
    b = F.oneform
    Ay = a.matrix @ y
    alpha = np.sqrt(float(y @ Ay))
    beta = float(b @ y)
    auv = a(u, v)
    bu, bv = float(b @ u), float(b @ v)
    uy, vy = float(Ay @ u), float(Ay @ v)
    mixed = (bv * uy) / alpha + (bu * vy) / alpha
    return auv + bu * bv + auv * beta / alpha - (vy * uy) * beta / alpha**3 + mixed


def fundamental_matrix(F, y) -> np.ndarray:
    """Gram matrix ``[g_y(e_i, e_j)]``."""
    y = _nonzero(y)
    if isinstance(F, RandersNorm):
        A = F.a.matrix
        b = F.oneform
        Ay = A @ y
        alpha = np.sqrt(float(y @ Ay))
        beta = float(b @ y)
        G = (A * (1.0 + beta / alpha) + np.outer(b, b)
             - np.outer(Ay, Ay) * (beta / alpha**3)
             + (np.outer(b, Ay) + np.outer(Ay, b)) / alpha)
        return 0.5 * (G + G.T)
    n = y.shape[0]
    E = np.eye(n)
    G = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = fundamental_tensor_fd(F, y, E[i], E[j])
    return G


def _half_square(F, y) -> float:
    f = evaluate(F, y)
    return 0.5 * f * f


def fundamental_tensor_fd(F, y, u, v, step: float = FD2_STEP) -> float:
    """Central mixed second difference of ``F^2 / 2`` along ``u`` and ``v``.

    The stencil is built from ``u + v`` and ``u - v`` so the result is exactly
    symmetric in ``(u, v)``.
    """
    y = _nonzero(y)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    h = step * max(1.0, float(np.linalg.norm(y)))
    s, d = h * (u + v), h * (u - v)
    plus = _half_square(F, y + s) + _half_square(F, y - s)
    minus = _half_square(F, y + d) + _half_square(F, y - d)
    return (plus - minus) / (4.0 * h * h)


def _cube_difference(F, y, u, v, w, h) -> float:
    total = 0.0
    for su in (1.0, -1.0):
        for sv in (1.0, -1.0):
            for sw in (1.0, -1.0):
                f = evaluate(F, y + h * (su * u + sv * v + sw * w))
                total += su * sv * sw * f * f
    return total / (8.0 * h**3)


def cartan_tensor_fd(F, y, u, v, w, step: float = FD3_STEP, stencil: str = "cube") -> float:
    """``C_y(u, v, w) = 1/4 d^3/dr ds dt F^2(y + r u + s v + t w)`` by differences.

    ``stencil="cube"`` uses the eight sign combinations of ``(u, v, w)`` at
    steps ``h`` and ``h/2`` with one Richardson extrapolation.
    ``stencil="nested"`` differentiates :func:`fundamental_tensor_fd` along
    ``w``; it shares no evaluation points with the cube stencil.
    """
    y = _nonzero(y)
    u, v, w = (np.asarray(z, dtype=float) for z in (u, v, w))
    h = step * max(1.0, float(np.linalg.norm(y)))
    if stencil == "cube":
        coarse = _cube_difference(F, y, u, v, w, h)
        fine = _cube_difference(F, y, u, v, w, 0.5 * h)
        return 0.25 * (4.0 * fine - coarse) / 3.0
    if stencil == "nested":
        gp = fundamental_tensor_fd(F, y + h * w, u, v)
        gm = fundamental_tensor_fd(F, y - h * w, u, v)
        return 0.5 * (gp - gm) / (2.0 * h)
    raise ValueError(f"unknown stencil {stencil!r}")


def cartan_tensor(F, y, u, v, w) -> float:
    """Cartan tensor ``C_y(u, v, w)``.

    For Randers norms ``F^2/2 = alpha^2/2 + alpha*beta + beta^2/2`` and only the
    middle term has a third derivative, which is taken analytically here.
    """
    if not isinstance(F, RandersNorm):
        return cartan_tensor_fd(F, y, u, v, w)
    y = _nonzero(y)
    u, v, w = (np.asarray(z, dtype=float) for z in (u, v, w))
    a = F.a
    b = F.oneform
    Ay = a.matrix @ y
    alpha = np.sqrt(float(y @ Ay))
    beta = float(b @ y)
    uy, vy, wy = float(Ay @ u), float(Ay @ v), float(Ay @ w)
    uv, uw, vw = a(u, v), a(u, w), a(v, w)

    d2_uv = uv / alpha - uy * vy / alpha**3
    d2_uw = uw / alpha - uy * wy / alpha**3
    d2_vw = vw / alpha - vy * wy / alpha**3
    d3 = (-(uv * wy + uw * vy + vw * uy) / alpha**3
          + 3.0 * uy * vy * wy / alpha**5)
    return 0.5 * (beta * d3 + d2_uv * float(b @ w) + d2_uw * float(b @ v) + d2_vw * float(b @ u))
