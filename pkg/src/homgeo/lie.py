"""Finite-dimensional real Lie algebras given by structure constants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ANTISYMMETRY_TOL = 1e-12
JACOBI_WARN_TOL = 1e-9
RANK_RTOL = 1e-10


class LieAlgebraError(ValueError):
    """Raised for malformed structure constants or frame parameters."""


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Real Lie algebra with ``[e_i, e_j] = sum_k structure[i, j, k] e_k``.

    The structure array is copied and made read-only on construction.
    """

    structure: np.ndarray
    name: str | None = None
    dim: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.structure, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] < 1:
            raise LieAlgebraError(f"structure must have shape (n, n, n), got {c.shape}")
        defect = np.max(np.abs(c + c.transpose(1, 0, 2)))
        if defect > ANTISYMMETRY_TOL:
            raise LieAlgebraError(f"structure constants are not antisymmetric (defect {defect:.3e})")
        c.setflags(write=False)
        object.__setattr__(self, "structure", c)
        object.__setattr__(self, "dim", c.shape[0])

    @classmethod
    def from_upper(cls, entries, dim: int, name: str | None = None) -> "LieAlgebra":
        """Build from brackets ``{(i, j): vector}`` with ``i < j`` (0-based).

        The remaining entries follow by antisymmetry.
        """
        c = np.zeros((dim, dim, dim))
        for (i, j), vec in entries.items():
            if i == j:
                raise LieAlgebraError(f"diagonal bracket [e_{i}, e_{i}] must not be given")
            c[i, j] = vec
            c[j, i] = -np.asarray(vec, dtype=float)
        return cls(c, name=name)

    @classmethod
    def from_partial(cls, structure, name: str | None = None) -> "LieAlgebra":
        """Complete a table in which only the ``i < j`` entries are trusted."""
        c = np.array(structure, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise LieAlgebraError(f"structure must have shape (n, n, n), got {c.shape}")
        upper = np.triu(np.ones(c.shape[:2], dtype=bool), k=1)
        full = np.where(upper[:, :, None], c, 0.0)
        return cls(full - full.transpose(1, 0, 2), name=name)

    def bracket(self, x, y) -> np.ndarray:
        return bracket(self, x, y)

    def __repr__(self):
        label = self.name or "unnamed"
        return f"LieAlgebra({label!r}, dim={self.dim})"


def _as_vector(L: LieAlgebra, x, label: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (L.dim,):
        raise LieAlgebraError(f"{label} has shape {v.shape}, expected ({L.dim},)")
    return v


def bracket(L: LieAlgebra, x, y) -> np.ndarray:
    """Lie bracket ``[x, y]`` of two coordinate vectors."""
    x = _as_vector(L, x, "x")
    y = _as_vector(L, y, "y")
    return np.einsum("i,j,ijk->k", x, y, L.structure)


def basis(dim: int) -> np.ndarray:
    return np.eye(dim)


def jacobi_defect(L: LieAlgebra) -> float:
    """Largest sup-norm of the cyclic sum ``[[e_i,e_j],e_k] + cyclic`` over basis triples."""
    c = L.structure
    # [[e_i,e_j],e_k]_m = sum_l c[i,j,l] c[l,k,m]
    t = np.einsum("ijl,lkm->ijkm", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(cyc))) if cyc.size else 0.0


def abelian(dim: int) -> LieAlgebra:
    return LieAlgebra(np.zeros((dim, dim, dim)), name=f"abelian({dim})")


def heisenberg() -> LieAlgebra:
    """Three-dimensional Heisenberg algebra, ``[e1, e2] = e3``."""
    return LieAlgebra.from_upper({(0, 1): [0.0, 0.0, 1.0]}, 3, name="heisenberg")


def milnor_unimodular(lam1: float, lam2: float, lam3: float) -> LieAlgebra:
    """Unimodular Milnor frame.

    ``[e1, e2] = lam3 e3``, ``[e2, e3] = lam1 e1``, ``[e3, e1] = lam2 e2``.
    """
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = lam3, -lam3
    c[1, 2, 0], c[2, 1, 0] = lam1, -lam1
    c[2, 0, 1], c[0, 2, 1] = lam2, -lam2
    return LieAlgebra(c, name=f"milnor_unimodular({lam1:g},{lam2:g},{lam3:g})")


def milnor_nonunimodular(alpha: float, beta: float, gamma: float, delta: float,
                         tol: float = 1e-10) -> LieAlgebra:
    """Non-unimodular Milnor frame.

    ``[e1, e2] = alpha e2 + beta e3``, ``[e2, e3] = 0``,
    ``[e1, e3] = gamma e2 + delta e3``, subject to ``alpha + delta = 2`` and
    ``alpha*gamma + beta*delta = 0``.
    """
    trace = alpha + delta
    if abs(trace - 2.0) > tol:
        raise LieAlgebraError(f"trace constraint alpha + delta = 2 violated: trace is {trace:g}")
    cross = alpha * gamma + beta * delta
    if abs(cross) > tol:
        raise LieAlgebraError(
            f"constraint alpha*gamma + beta*delta = 0 violated: value is {cross:g}")
    return LieAlgebra.from_upper(
        {(0, 1): [0.0, alpha, beta], (0, 2): [0.0, gamma, delta]}, 3,
        name=f"milnor_nonunimodular({alpha:g},{beta:g},{gamma:g},{delta:g})",
    )


def direct_sum(*algebras: LieAlgebra, name: str | None = None) -> LieAlgebra:
    """Block-diagonal direct sum; the summands commute with each other."""
    n = sum(a.dim for a in algebras)
    c = np.zeros((n, n, n))
    off = 0
    for a in algebras:
        s = slice(off, off + a.dim)
        c[s, s, s] = a.structure
        off += a.dim
    return LieAlgebra(c, name=name or " + ".join(a.name or "?" for a in algebras))


def derived_subalgebra(L: LieAlgebra) -> np.ndarray:
    """Orthonormal (Euclidean) basis of ``[g, g]`` as the rows of an array.

    Returns an array of shape ``(r, dim)``; ``r`` may be zero.
    """
    stacked = L.structure.reshape(-1, L.dim)
    if not np.any(stacked):
        return np.zeros((0, L.dim))
    _, s, vt = np.linalg.svd(stacked, full_matrices=False)
    cutoff = RANK_RTOL * max(1.0, s[0])
    rows = vt[s > cutoff]
    # clear rounding noise so coordinate subspaces come out exactly
    rows[np.abs(rows) < 1e-14] = 0.0
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def ad_matrix(L: LieAlgebra, z) -> np.ndarray:
    """Matrix of ``ad_z``: column ``j`` holds the coordinates of ``[z, e_j]``."""
    z = _as_vector(L, z, "z")
    return np.einsum("i,ijk->kj", z, L.structure)
