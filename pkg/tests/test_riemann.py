import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homgeo.lie import (abelian, ad_matrix, bracket, derived_subalgebra, heisenberg,
                        milnor_nonunimodular, milnor_unimodular)
from homgeo.norms import DomainError, InnerProduct
from homgeo.riemann import (ad_skew_defect, connection, curvature, derived_pairing, levi_civita,
                            milnor_lemma_check, ricci)

from conftest import random_spd

I3 = np.eye(3)
e1, e2, e3 = I3


def besse_ricci(L, A, x):
    """Ricci(x, x) for a unit ``x`` from the classical left-invariant formula.

    Ric(x,x) = -1/2 sum|[x,f_i]|^2 - 1/2 B(x,x) + 1/4 sum a([f_i,f_j],x)^2 - a([H,x],x)
    with B the Killing form and a(H, y) = tr ad_y.
    """
    a = InnerProduct(A)
    P = a.orthonormal_basis().T
    adx = ad_matrix(L, x)
    total = -0.5 * sum(a(bracket(L, x, f), bracket(L, x, f)) for f in P)
    total -= 0.5 * np.trace(adx @ adx)
    total += 0.25 * sum(a(bracket(L, f, g), x) ** 2 for f in P for g in P)
    H = sum(np.trace(ad_matrix(L, f)) * f for f in P)
    total -= a(bracket(L, H, x), x)
    return total


def milnor_ricci(lam):
    """Principal Ricci curvatures of a Milnor unimodular frame with the identity metric."""
    l1, l2, l3 = lam
    mu = 0.5 * (l1 + l2 + l3) - np.array(lam)
    return 2 * np.array([mu[1] * mu[2], mu[2] * mu[0], mu[0] * mu[1]])


def test_levi_civita_examples():
    np.testing.assert_array_equal(levi_civita(abelian(3), I3, e1, e2), 0)
    np.testing.assert_allclose(levi_civita(milnor_unimodular(1, 1, 1), I3, e1, e2), 0.5 * e3, atol=1e-15)
    np.testing.assert_allclose(levi_civita(heisenberg(), I3, e1, e2), 0.5 * e3, atol=1e-15)


def test_ricci_examples():
    assert ricci(abelian(3), I3, e1) == 0
    assert ricci(milnor_unimodular(1, 1, 1), I3, e1) == pytest.approx(0.5, abs=1e-14)
    assert ricci(heisenberg(), I3, e1) == pytest.approx(-0.5, abs=1e-14)
    assert ricci(heisenberg(), I3, e3) == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(DomainError):
        ricci(heisenberg(), I3, np.zeros(3))


def test_ricci_matches_milnor_formula(rng):
    for _ in range(100):
        lam = rng.uniform(-2, 2, 3)
        L = milnor_unimodular(*lam)
        expected = milnor_ricci(lam)
        for k in range(3):
            assert ricci(L, I3, I3[k]) == pytest.approx(expected[k], abs=1e-12)


def test_ricci_matches_classical_formula(rng):
    frames = [lambda: milnor_unimodular(*rng.uniform(-2, 2, 3)),
              lambda: milnor_nonunimodular(2.0, rng.uniform(-2, 2), 0.0, 0.0),
              lambda: heisenberg()]
    for make in frames:
        for _ in range(30):
            L = make()
            A = random_spd(rng, 3, 2.0)
            x = rng.standard_normal(3)
            x /= np.sqrt(x @ A @ x)
            assert ricci(L, A, x) == pytest.approx(besse_ricci(L, A, x), abs=1e-10)


def test_nonunimodular_ricci_classical(rng):
    # alpha + delta = 2 with alpha*gamma + beta*delta = 0
    for _ in range(30):
        alpha, beta = rng.uniform(0.2, 1.8), rng.uniform(-2, 2)
        delta = 2 - alpha
        gamma = -beta * delta / alpha
        L = milnor_nonunimodular(alpha, beta, gamma, delta)
        A = random_spd(rng, 3, 1.5)
        x = rng.standard_normal(3)
        x /= np.sqrt(x @ A @ x)
        assert ricci(L, A, x) == pytest.approx(besse_ricci(L, A, x), abs=1e-10)


def _random_algebras(rng):
    yield milnor_unimodular(*rng.uniform(-2, 2, 3))
    yield heisenberg()
    yield milnor_nonunimodular(2.0, 2.0, 0.0, 0.0)
    yield milnor_nonunimodular(2.0, 0.0, 0.0, 0.0)


def test_torsion_free_and_metric_compatible(rng):
    for L in _random_algebras(rng):
        A = random_spd(rng, 3, 2.0)
        a = InnerProduct(A)
        T = connection(L, a)
        for _ in range(200):
            x, y, z = rng.standard_normal((3, 3))
            np.testing.assert_allclose(T.covariant(x, y) - T.covariant(y, x), bracket(L, x, y),
                                       atol=1e-10)
            assert a(T.covariant(x, y), z) + a(y, T.covariant(x, z)) == pytest.approx(0, abs=1e-10)


def test_module_functions_agree_with_table(rng):
    L = milnor_unimodular(1, -1, 0.5)
    A = random_spd(rng, 3)
    x, y, z = rng.standard_normal((3, 3))
    T = connection(L, A)
    np.testing.assert_allclose(levi_civita(L, A, x, y), T.covariant(x, y), atol=1e-15)
    np.testing.assert_allclose(curvature(L, A, x, y, z), T.curvature(x, y) @ z, atol=1e-15)


def test_curvature_antisymmetries(rng):
    for L in _random_algebras(rng):
        a = InnerProduct(random_spd(rng, 3, 2.0))
        T = connection(L, a)
        for _ in range(50):
            x, y, z, w = rng.standard_normal((4, 3))
            Rxy = T.curvature(x, y)
            assert a(Rxy @ z, w) == pytest.approx(-a(T.curvature(y, x) @ z, w), abs=1e-9)
            assert a(Rxy @ z, w) == pytest.approx(-a(Rxy @ w, z), abs=1e-9)
            # first Bianchi identity
            bianchi = Rxy @ z + T.curvature(y, z) @ x + T.curvature(z, x) @ y
            np.testing.assert_allclose(bianchi, 0, atol=1e-9)


def test_biinvariant_curvature_formula(rng):
    # R(x, y) z = -1/4 [[x, y], z] for a bi-invariant metric
    L = milnor_unimodular(1, 1, 1)
    for _ in range(20):
        x, y, z = rng.standard_normal((3, 3))
        np.testing.assert_allclose(curvature(L, I3, x, y, z),
                                   -0.25 * bracket(L, bracket(L, x, y), z), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3),
       st.lists(st.floats(-3, 3), min_size=3, max_size=3),
       st.floats(0.01, 100))
def test_ricci_depends_on_direction_only(lam, u, t):
    u = np.array(u)
    if np.linalg.norm(u) < 1e-3:
        return
    L = milnor_unimodular(*lam)
    A = np.diag([1.0, 2.0, 3.0])
    assert ricci(L, A, t * u) == pytest.approx(ricci(L, A, u), abs=1e-10 * (1 + abs(ricci(L, A, u))))


def test_ad_skew_defect_examples():
    assert ad_skew_defect(milnor_unimodular(1, 1, 1), I3, [0.3, -1.2, 2.0]) <= 1e-14
    assert ad_skew_defect(abelian(3), I3, e1) == 0
    # symmetric part of ad_{e1} is diag(0, 2, 0): defect 2 * a([e1,e2], e2) = 4
    assert ad_skew_defect(milnor_nonunimodular(2, 0, 0, 0), I3, e1) == pytest.approx(4.0)


def test_ad_skew_defect_is_metric_invariant_quantity(rng):
    # skew-adjoint for a (so(3), a) pair iff the metric is bi-invariant
    L = milnor_unimodular(1, 1, 1)
    assert ad_skew_defect(L, 2.5 * I3, rng.standard_normal(3)) <= 1e-13
    assert ad_skew_defect(L, np.diag([1.0, 1.0, 4.0]), e1) > 0.1


def test_derived_pairing():
    assert derived_pairing(heisenberg(), I3, 0.3 * e3) == pytest.approx(0.3)
    assert derived_pairing(heisenberg(), I3, e1) == 0
    assert derived_pairing(abelian(3), I3, e1) == 0


def test_milnor_lemma_examples():
    rep = milnor_lemma_check(heisenberg(), I3, e1)
    assert rep.orthogonal_to_derived and rep.verdict == "pass"
    assert rep.ricci == pytest.approx(-0.5, abs=1e-14)
    rep = milnor_lemma_check(abelian(3), I3, [1.0, 2.0, 3.0])
    assert rep.verdict == "pass" and rep.ricci == 0 and rep.skew_defect == 0
    rep = milnor_lemma_check(milnor_unimodular(1, 1, 1), I3, e1)
    assert rep.verdict == "not_applicable" and not rep.orthogonal_to_derived
    with pytest.raises(DomainError):
        milnor_lemma_check(heisenberg(), I3, np.zeros(3))


def orthogonal_to_derived(L, A, rng):
    """Random vector a-orthogonal to [g, g], or None when [g, g] is everything."""
    D = derived_subalgebra(L)
    if D.shape[0] == 3:
        return None
    if D.shape[0] == 0:
        return rng.standard_normal(3)
    # kernel of z -> D A z
    _, s, Vt = np.linalg.svd(D @ A)
    K = Vt[D.shape[0]:]
    return rng.standard_normal(K.shape[0]) @ K


def random_degenerate_unimodular(rng):
    lam = rng.uniform(-2, 2, 3)
    zeros = rng.choice([1, 2, 3], p=[0.6, 0.3, 0.1])
    lam[rng.choice(3, size=zeros, replace=False)] = 0.0
    return milnor_unimodular(*lam)


def test_milnor_lemma_sweep(rng):
    checked = 0
    equal_cases = 0
    while checked < 200:
        L = random_degenerate_unimodular(rng)
        A = random_spd(rng, 3, 2.0)
        x = orthogonal_to_derived(L, A, rng)
        if x is None:
            continue
        rep = milnor_lemma_check(L, A, x)
        assert rep.orthogonal_to_derived
        assert rep.verdict == "pass", rep
        assert rep.ricci <= 1e-9
        assert (abs(rep.ricci) <= 1e-9) == (rep.skew_defect <= 1e-9)
        equal_cases += abs(rep.ricci) <= 1e-9
        checked += 1
    # the sweep must exercise both sides of the equivalence
    assert 0 < equal_cases < 200
