"""Left-invariant Riemannian geometry on a Lie algebra.

Everything is evaluated on left-invariant vector fields, where inner products
of fields are constant and the Levi-Civita connection is purely algebraic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .lie import LieAlgebra, ad_matrix, bracket, derived_subalgebra
from .norms import DomainError, InnerProduct

ORTHOGONALITY_TOL = 1e-10
SIGN_TOL = 1e-9


def _inner(a) -> InnerProduct:
    return a if isinstance(a, InnerProduct) else InnerProduct(a)


@dataclass(frozen=True, eq=False)
class ConnectionTable:
    """Christoffel table ``nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k``."""

    algebra: LieAlgebra
    a: InnerProduct

    @cached_property
    def gamma(self) -> np.ndarray:
        c = self.algebra.structure
        A = self.a.matrix
        # cA[i, j, l] = a([e_i, e_j], e_l)
        cA = np.einsum("ijk,kl->ijl", c, A)
        # Koszul: 2 a(nabla_x y, z) = a([x,y],z) - a([y,z],x) + a([z,x],y)
        K = cA - np.einsum("jmi->ijm", cA) + np.einsum("mij->ijm", cA)
        g = 0.5 * np.einsum("ijm,mn->ijn", K, np.linalg.inv(A))
        g.setflags(write=False)
        return g

    def covariant(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.gamma)

    def operator(self, x) -> np.ndarray:
        """Matrix of ``y -> nabla_x y``."""
        return np.einsum("i,ijk->kj", x, self.gamma)

    def curvature(self, x, y) -> np.ndarray:
        """Matrix of ``z -> R(x, y) z``."""
        Nx, Ny = self.operator(x), self.operator(y)
        return Nx @ Ny - Ny @ Nx - self.operator(bracket(self.algebra, x, y))


def connection(L: LieAlgebra, a) -> ConnectionTable:
    return ConnectionTable(L, _inner(a))


def levi_civita(L: LieAlgebra, a, x, y) -> np.ndarray:
    """``nabla_x y`` for the left-invariant metric ``a``."""
    return connection(L, a).covariant(np.asarray(x, float), np.asarray(y, float))


def curvature(L: LieAlgebra, a, x, y, z) -> np.ndarray:
    return connection(L, a).curvature(np.asarray(x, float), np.asarray(y, float)) @ np.asarray(z, float)


def ricci(L: LieAlgebra, a, u, table: ConnectionTable | None = None) -> float:
    """Ricci curvature in the direction of ``u`` (normalized internally)."""
    a = _inner(a)
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        raise DomainError("Ricci curvature needs a nonzero direction")
    table = table or connection(L, a)
    uhat = u / a.norm(u)
    total = 0.0
    for f in a.orthonormal_basis().T:
        total += a(table.curvature(f, uhat) @ uhat, f)
    return float(total)


def ad_skew_defect(L: LieAlgebra, a, x) -> float:
    """Largest ``|a([x,u],v) + a(u,[x,v])|`` over an ``a``-orthonormal basis."""
    a = _inner(a)
    M = ad_matrix(L, x)
    A = a.matrix
    P = a.orthonormal_basis()
    S = P.T @ (M.T @ A + A @ M) @ P
    return float(np.max(np.abs(S)))


def derived_pairing(L: LieAlgebra, a, x) -> float:
    """Largest ``|a(x, d)|`` over the unit basis of ``[g, g]``."""
    a = _inner(a)
    D = derived_subalgebra(L)
    if D.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(D @ (a.matrix @ np.asarray(x, float)))))


@dataclass(frozen=True)
class MilnorLemmaReport:
    orthogonal_to_derived: bool
    ricci: float
    skew_defect: float
    verdict: str  # "pass" | "fail" | "not_applicable"


def milnor_lemma_check(L: LieAlgebra, a, x) -> MilnorLemmaReport:
    """Check the sign of Ricci on directions orthogonal to the commutator ideal.

    For ``x`` orthogonal to ``[g, g]`` the Ricci curvature must be
    non-positive, vanishing exactly when ``ad_x`` is skew-adjoint.
    """
    a = _inner(a)
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise DomainError("Milnor lemma check needs a nonzero vector")
    ortho = derived_pairing(L, a, x) / a.norm(x) <= ORTHOGONALITY_TOL
    ric = ricci(L, a, x)
    skew = ad_skew_defect(L, a, x / a.norm(x))
    if not ortho:
        return MilnorLemmaReport(False, ric, skew, "not_applicable")
    ok = ric <= SIGN_TOL and ((abs(ric) <= SIGN_TOL) == (skew <= SIGN_TOL))
    return MilnorLemmaReport(True, ric, skew, "pass" if ok else "fail")
