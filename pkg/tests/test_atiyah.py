import dataclasses

import pytest

import oracles as O
from linfgeom import atiyah as A
from linfgeom.fedosov import bracket_value as bv
from linfgeom.fedosov import solve
from linfgeom.spec_io import parse_spec

from conftest import CORPUS, solved



def Y(L, i):
    return ("e", L.y[i])


def V(L, a):
    return ("o", L.v[a])


# Atiyah class -------------------------------------------------------------------

@pytest.mark.parametrize("name", CORPUS)
def test_atiyah_class_is_closed(name):
    st = solved(name)
    assert A.atiyah_closedness(st, A.atiyah_class(st)) == {}


@pytest.mark.parametrize("name", ["metric_plane", "weil_plane", "so3_bundle", "so2_curved", "generic_gauge.spec"])
def test_constant_part_against_tensor_oracle(name):
    st = solved(name)
    cp = A.constant_part(A.atiyah_class(st))
    n = st.spec.d + st.spec.r
    for I in range(n):
        for K in range(n):
            assert cp[I][K] == O.atiyah_constant_part(st, I, K), (I, K)


def _weight_two_oracle(st, I, K):
    """Weight <= 2, y-free terms of the displayed entries from the brackets."""
    L, d, r = st.L, st.spec.d, st.spec.r
    out = Y(L, K) if K < d else V(L, K - d)
    exp = L.zero()
    if I < d:
        i = I
        for j in range(d):
            exp += L.DY(j) * bv(st, 0, 2, out, [Y(L, j), Y(L, i)])
            for b in range(r):
                exp += L.DY(j) * L.V(b) * bv(st, 1 if K < d else 0, 3, out, [Y(L, j), Y(L, i), V(L, b)])
        for b in range(r):
            exp += L.DV(b) * bv(st, 1 if K < d else 0, 2, out, [Y(L, i), V(L, b)])
            for c in range(r):
                if K >= d:
                    # appears with the opposite sign to the naive expansion
                    exp -= L.DV(b) * L.V(c) * bv(st, 1, 3, out, [Y(L, i), V(L, b), V(L, c)])
    else:
        a = I - d
        for j in range(d):
            exp += L.DY(j) * bv(st, 0 if K >= d else 1, 2, out, [Y(L, j), V(L, a)])
            for b in range(r):
                if K >= d:
                    exp += L.DY(j) * L.V(b) * bv(st, 1, 3, out, [Y(L, j), V(L, b), V(L, a)])
        for b in range(r):
            if K >= d:
                exp += L.DV(b) * bv(st, 1, 2, out, [V(L, b), V(L, a)])
    return exp


@pytest.mark.parametrize("name", ["metric_plane", "so3_bundle", "generic_gauge.spec"])
def test_weight_two_entries_from_brackets(name):
    st = solved(name)
    L = st.L
    at = A.atiyah_class(st)
    sel = lambda e: e.filter(lambda m, ex: L.weight(m, ex) <= 2 and L.n_y(ex) == 0)  # noqa: E731
    n = st.spec.d + st.spec.r
    for I in range(n):
        for K in range(n):
            assert sel(at.entries[I][K]) == sel(_weight_two_oracle(st, I, K)), (I, K)


def test_torsion_term_sign_is_not_the_naive_one():
    st = solved("metric_plane")
    L = st.L
    at = A.atiyah_class(st)
    d = st.spec.d
    pick = lambda e: e.filter(lambda m, ex: L.n_Dv(ex) == 1 and L.n_v(m) == 1 and L.n_y(ex) == 0)  # noqa: E731
    naive = L.zero()
    for b in range(st.spec.r):
        for c in range(st.spec.r):
            naive += L.DV(b) * L.V(c) * bv(st, 1, 3, V(L, 0), [Y(L, 0), V(L, b), V(L, c)])
    assert naive
    assert pick(at.entries[0][d]) == naive.scale(-1)


def test_zero_spec_has_vanishing_atiyah_class():
    st = solved("zero")
    at = A.atiyah_class(st)
    assert all(not e for row in at.entries for e in row)
    assert not A.chern_class(st, 1) and not A.chern_class(st, 2)


# Chern classes and transgression ------------------------------------------------

@pytest.mark.parametrize("k", [1, 2])
def test_chern_classes_are_total_cocycles(k):
    st = solved("metric_plane")
    c = A.chern_class(st, k)
    assert not A.closedness_defect(st, c, A.chern_weight_cap(st, k) - 1)


@pytest.mark.parametrize("name,k", [("metric_plane", 1), ("metric_plane", 2), ("so3_bundle", 1), ("weil_plane", 1)])
def test_transgression_certificate(name, k):
    st = solved(name)
    cert = A.transgress(st, A.chern_class(st, k), A.chern_weight_cap(st, k))
    assert cert.ok
    L = st.L
    assert all(L.n_dx(m) == 0 for (m, ex) in cert.alpha.terms)


def test_transgression_rejects_non_cocycle():
    st = solved("metric_plane")
    L = st.L
    with pytest.raises(A.NotClosedError):
        A.transgress(st, L.DX(0) * L.Y(0), 4)


# Weil algebra -------------------------------------------------------------------

@pytest.mark.parametrize("name", ["weil_plane", "metric_plane", "so2_curved"])
def test_weil_differential_on_generators(name):
    st = solved(name)
    for a in range(st.spec.r):
        assert A.weil_differential(st, st.L.V(a)) == O.weil_differential(st, "v", a)
        assert A.weil_differential(st, st.L.DV(a)) == O.weil_differential(st, "Dv", a)
    for i in range(st.spec.d):
        assert A.weil_differential(st, st.L.DY(i)) == O.weil_differential(st, "Dy", i)


@pytest.mark.parametrize("name", ["weil_plane", "so3_bundle"])
def test_weil_differential_squares_to_zero(name):
    st = solved(name)
    for _, g in A.weil_generators(st.L):
        assert not A.weil_differential(st, A.weil_differential(st, g))


def test_weil_differential_splits():
    st = solved("weil_plane")
    for _, g in A.weil_generators(st.L):
        whole = A.weil_differential(st, g)
        assert whole == A.weil_differential(st, g, "dr") + A.weil_differential(st, g, "rho_mu")


def test_de_rham_part_of_weil_differential():
    st = solved("weil_plane")
    L = st.L
    s = st.spec
    for a in range(s.r):
        want = L.DV(a)
        for b in range(s.r):
            for j in range(s.d):
                want += L.from_poly(s.Gp(a, j, b)) * L.DY(j) * L.V(b)
        assert A.weil_differential(st, L.V(a), "dr") == want
        assert not A.weil_differential(st, L.DV(a), "dr").filter(lambda m, ex: L.n_Dv(ex) == 2)


def test_weil_differential_rejects_non_weil():
    st = solved("weil_plane")
    with pytest.raises(ValueError):
        A.weil_differential(st, st.L.Y(0))


def test_flat_lift_is_flat_to_first_order():
    st = solved("weil_plane")
    L = st.L
    dpar = A.horizontal(st)
    for _, g in A.weil_generators(L):
        lifted = A.flat_lift(st, g, 1)
        assert A.weil_project(lifted) == g
        assert not dpar.apply(lifted).filter(lambda m, ex: L.n_y(ex) == 0)


# modular class ------------------------------------------------------------------

def test_first_chern_class_is_de_rham_of_modular_class():
    rep = A.check_c1_modular(solved("metric_plane"))
    assert rep.modular
    assert rep.difference == rep.transgressed - rep.dr_modular
    assert rep.ok


def test_modular_class_on_affine_line():
    st = solved("affine_line")
    cert = A.transgress(st, A.chern_class(st, 1), A.chern_weight_cap(st, 1))
    assert A.weil_project(cert.alpha) == A.weil_differential(st, A.modular_class(st), "dr")


def test_dy_dy_terms_survive_without_metric():
    st = solved("so3_bundle")
    L = st.L
    cert = A.transgress(st, A.chern_class(st, 1), A.chern_weight_cap(st, 1))
    alpha = A.weil_project(cert.alpha)
    assert alpha.filter(lambda m, ex: L.n_Dy(m) == 2)
    with pytest.raises(A.MetricError):
        A.check_c1_modular(st)


def test_incompatible_metric_is_rejected():
    good = parse_spec("dim = 1\nrank = 1\n" + '[metric]\n(1,1) = "1"\n')
    bad = dataclasses.replace(good, gamma_prime=parse_spec(
        "dim = 1\nrank = 1\n" + '[gamma_prime]\n(1,1,1) = "x1"\n').gamma_prime)
    st = solve(bad, 3)
    with pytest.raises(A.MetricError):
        A.check_c1_modular(st)


# action algebroids --------------------------------------------------------------

@pytest.mark.parametrize("name", ["affine_line", "so2_plane", "so2_curved"])
@pytest.mark.parametrize("k", [1, 2])
def test_action_chern_matches_equivariant_curvature(name, k):
    rep = A.action_chern(solved(name), k)
    assert rep.vanishing == []
    assert rep.certificate.ok
    assert rep.transgressed == rep.equivariant


def test_action_third_class_on_affine_line():
    assert A.action_chern(solved("affine_line", 5), 3).ok


def test_action_requires_flag():
    with pytest.raises(A.NotActionError):
        A.action_chern(solved("metric_plane"), 1)
