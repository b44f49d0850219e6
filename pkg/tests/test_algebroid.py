from fractions import Fraction

import pytest

import oracles as O
from linfgeom.algebroid import (analyse, basic_curvature, bianchi_form, check_anchor, check_basic, hat_basic,
                                hat_basic_alt, jacobiator)
from linfgeom.fedosov import bracket_value
from linfgeom.poly import Poly, parse_poly
from linfgeom.spec_io import parse_spec

from conftest import CORPUS, solved, spec


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_is_valid(name):
    assert analyse(spec(name)).ok


def test_anchor_is_bracket_homomorphism_on_metric_plane():
    s = spec("metric_plane")
    fields = [[s.R(i, a) for i in range(s.d)] for a in range(s.r)]
    br = O.vector_field_bracket(s.d, fields[0], fields[1])
    want = [sum((s.C(a, 0, 1) * s.R(i, a) for a in range(s.r)), Poly(s.nvars)) for i in range(s.d)]
    assert br == want


def test_anchor_violation_reported():
    s = parse_spec("dim = 2\nrank = 2\n" + '[rho]\n(1,1) = "x2"\n(2,2) = "1"\n')
    bad = check_anchor(s)
    assert bad == {(0, 0, 1): parse_poly("-1", nvars=2)}


def test_jacobi_violator():
    s = spec("jacobi_violator")
    assert not check_anchor(s)
    got = jacobiator(s)
    want = O.jacobiator(s, 0, 1, 2)
    assert {e: p for (e, a, b, c), p in got.items()} == want
    assert got == {(1, 0, 1, 2): parse_poly("1", nvars=1)}


def test_bianchi_form_matches_jacobiator_under_anchor():
    text = "dim = 1\nrank = 3\n" + """
[gamma_prime]
(1,1,2) = "x1"
(3,1,1) = "1"
[bracket]
(1,1,2) = "1"
(2,1,3) = "1"
"""
    s = parse_spec(text)
    assert not check_anchor(s)
    assert jacobiator(s)
    assert bianchi_form(s) == jacobiator(s)


@pytest.mark.parametrize("name", CORPUS)
def test_basic_connection_two_forms(name):
    s = spec(name)
    assert hat_basic(s) == hat_basic_alt(s)


def test_check_basic_on_action():
    s = spec("so2_plane")
    # flat chart connection: check-nabla_{e} d_j = -(d_j rho(e)) = -[d_j, rho(e)]
    chk = check_basic(s)
    assert chk[(0, 0, 1)] == parse_poly("1", nvars=2)
    assert chk[(1, 0, 0)] == parse_poly("-1", nvars=2)


@pytest.mark.parametrize("name", ["metric_plane", "weil_plane", "so3_bundle"])
def test_torsion_bracket_against_basic_curvature(name):
    """mu_3(y_j, v_b, v_c) = R^bas(v_b, v_c) y_j - 1/2 (R'(-, d_j) v_b) rho(v_c) + (b <-> c)."""
    st = solved(name)
    s, L = st.spec, st.L
    Rb = basic_curvature(s)
    half = Fraction(1, 2)
    for a in range(s.r):
        for j in range(s.d):
            for b in range(s.r):
                for c in range(s.r):
                    want = Rb.get((a, b, c, j), Poly(s.nvars))
                    for i in range(s.d):
                        want = want - (O.curvature_prime(s, a, i, j, b) * s.R(i, c)
                                       - O.curvature_prime(s, a, i, j, c) * s.R(i, b)) * half
                    got = bracket_value(st, 1, 3, ("o", L.v[a]), [("e", L.y[j]), ("o", L.v[b]), ("o", L.v[c])])
                    assert got == L.from_poly(want)


def test_basic_curvature_vanishes_for_flat_action():
    assert not basic_curvature(spec("so2_plane"))
