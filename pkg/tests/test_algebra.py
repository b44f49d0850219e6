import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from linfgeom.algebra import (Derivation, Layout, apply_delta, commutator, de_rham, delta,
                              delta_inv, exterior_base, lift_to_forms)
from randgen import random_bihomogeneous, random_element

L2 = Layout(2, 2)
seeds = st.integers(0, 10 ** 9)


def test_generators_and_signs():
    L = L2
    v1, v2 = L.V(0), L.V(1)
    assert v1 * v2 == -(v2 * v1)
    assert not (v1 * v1)
    assert L.Y(0) * L.DX(1) == L.DX(1) * L.Y(0)
    assert L.DY(0) * L.DX(0) == -(L.DX(0) * L.DY(0))


def test_de_rham_examples():
    L, dr = L2, de_rham(L2)
    assert dr.apply(L.Y(0)) == L.DY(0)
    assert dr.apply(L.V(0) * L.V(1)) == L.DV(0) * L.V(1) - L.V(0) * L.DV(1)
    assert not dr.apply(dr.apply(L.Y(0) * L.V(0)))
    assert not dr.apply(L.X(0) * L.DX(1))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_odd_derivations_square_to_zero(seed):
    rng = random.Random(seed)
    e = random_element(rng, L2, 5)
    for D in (delta(L2), de_rham(L2), exterior_base(L2)):
        assert not D.apply(D.apply(e))
    assert not delta_inv(delta_inv(e))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_graded_leibniz(seed):
    rng = random.Random(seed)
    a, b = random_element(rng, L2, 3), random_element(rng, L2, 3)
    for D in (delta(L2), de_rham(L2), exterior_base(L2)):
        lhs = D.apply(a * b)
        rhs = L2.zero()
        for par, part in a.parity_parts().items():
            rhs = rhs + D.apply(part) * b + (part * D.apply(b)).scale(-1 if par else 1)
        assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_associative_and_graded_commutative(seed):
    rng = random.Random(seed)
    a, b, c = (random_element(rng, L2, 3) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    for pa, xa in a.parity_parts().items():
        for pb, xb in b.parity_parts().items():
            assert xa * xb == (xb * xa).scale(-1 if pa & pb else 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_homotopy_identity(seed):
    rng = random.Random(seed)
    e = random_bihomogeneous(rng, L2)
    assert apply_delta(delta_inv(e)) + delta_inv(apply_delta(e)) == e


def test_homotopy_kills_bidegree_zero():
    e = L2.X(0) * L2.V(0) * L2.DV(1) + L2.DY(1)
    assert not delta_inv(e)
    assert not apply_delta(e)


def test_retraction_identities():
    rng = random.Random(7)
    for _ in range(50):
        e = random_element(rng, L2, 5)
        proj = e.filter(lambda m, ex: L2.n_dx(m) == 0 and L2.n_y(ex) == 0)
        assert e - apply_delta(delta_inv(e)) - delta_inv(apply_delta(e)) == proj
        assert not delta_inv(proj)
        assert not delta_inv(e).filter(lambda m, ex: L2.n_dx(m) == 0 and L2.n_y(ex) == 0)


def test_commutator_of_odd_derivations():
    L = L2
    D1 = Derivation(L, 1, {("e", L.y[0]): L.V(0)})
    D2 = Derivation(L, 1, {("o", L.v[0]): L.Y(1) * L.DX(0)})
    C = commutator(D1, D2)
    e = L.Y(0) * L.V(1)
    assert C.apply(e) == D1.apply(D2.apply(e)) + D2.apply(D1.apply(e))


def test_lift_anticommutes_with_de_rham():
    L = L2
    D = Derivation(L, 1, {("e", L.y[0]): L.X(1) * L.DX(0) * L.Y(1),
                          ("o", L.v[1]): L.V(0) * L.V(1) + L.X(0) * L.DX(1) * L.V(0)})
    Df, dr = lift_to_forms(D), de_rham(L)
    rng = random.Random(3)
    for _ in range(20):
        e = random_element(rng, L, 4)
        assert Df.apply(dr.apply(e)) + dr.apply(Df.apply(e)) == L.zero()


def test_weight_capped_products_match_truncation():
    rng = random.Random(11)
    for _ in range(30):
        a, b = random_element(rng, L2, 5), random_element(rng, L2, 5)
        for w in range(5):
            assert a.mul(b, wmax=w) == (a * b).truncate_weight(w)
            D = lift_to_forms(Derivation(L2, 1, {("e", L2.y[0]): a.parity_parts().get(1) or L2.V(0)}))
            assert D.apply(b, wmax=w) == D.apply(b).truncate_weight(w)


def test_deriv_left_right():
    L = L2
    m = L.V(0) * L.DY(1) * L.Y(0)
    assert m.deriv_left(("o", L.v[0])) == L.DY(1) * L.Y(0)
    assert m.deriv_right(("o", L.v[0])) == -(L.DY(1) * L.Y(0))


def test_exact_fraction_coefficients():
    e = L2.Y(0) * L2.DX(0)
    assert delta_inv(e.scale(Fraction(3))) == (L2.Y(0) * L2.Y(0)).scale(Fraction(3, 2))
