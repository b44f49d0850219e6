"""Independent closed-form evaluations used as test oracles.

Everything here is written directly from tensor calculus on the input data
(Christoffel symbols, anchor, bracket) and never calls the recursion solver.
Index conventions are geometric and 0-based:

* ``nabla_j d_k = Gamma^i_{jk} d_i``            -> ``spec.G(i, j, k)``
* ``nabla'_j v_b = Gamma'^a_{jb} v_a``          -> ``spec.Gp(a, j, b)``
* ``rho(v_a) = rho^i_a d_i``                    -> ``spec.R(i, a)``
* ``mu(v_b, v_c) = mu^a_{bc} v_a``              -> ``spec.M(a, b, c)``
"""

from fractions import Fraction

from linfgeom.algebroid import basic_curvature
from linfgeom.poly import Poly


def curvature(spec, i, j, m, k):
    """R(d_j, d_m) d_k, component i."""
    out = spec.diff(spec.G(i, m, k), j) - spec.diff(spec.G(i, j, k), m)
    for n in range(spec.d):
        out = out + spec.G(i, j, n) * spec.G(n, m, k) - spec.G(i, m, n) * spec.G(n, j, k)
    return out


def curvature_prime(spec, a, i, m, b):
    """R'(d_i, d_m) v_b, component a."""
    out = spec.diff(spec.Gp(a, m, b), i) - spec.diff(spec.Gp(a, i, b), m)
    for c in range(spec.r):
        out = out + spec.Gp(a, i, c) * spec.Gp(c, m, b) - spec.Gp(a, m, c) * spec.Gp(c, i, b)
    return out


def l2(spec, i, m, j, k):
    """dx^m-component of l2(y_j, y_k), output y_i."""
    third = Fraction(1, 3)
    return (curvature(spec, i, j, m, k) + curvature(spec, i, k, m, j)) * third + spec.phi_at(3, (i, m, j, k))


def l2_prime(spec, a, m, i, b):
    """dx^m-component of l2'(y_i, v_b), output v_a."""
    return curvature_prime(spec, a, i, m, b) * Fraction(1, 2) + spec.psi_at(3, (a, b, i, m))


def rho2(spec, i, j, a):
    """(nabla_j rho)(v_a) - rho(nabla'_j v_a), component i."""
    out = spec.diff(spec.R(i, a), j)
    for n in range(spec.d):
        out = out + spec.G(i, j, n) * spec.R(n, a)
    for b in range(spec.r):
        out = out - spec.R(i, b) * spec.Gp(b, j, a)
    return out


def cov_rho2(spec, i, k, j, a):
    """(nabla_k rho2)(y_j, v_a), the covariant derivative of the rho2 tensor."""
    out = spec.diff(rho2(spec, i, j, a), k)
    for n in range(spec.d):
        out = out + spec.G(i, k, n) * rho2(spec, n, j, a) - spec.G(n, k, j) * rho2(spec, i, n, a)
    for b in range(spec.r):
        out = out - spec.Gp(b, k, a) * rho2(spec, i, j, b)
    return out


def rho3(spec, i, j, k, a):
    """Arity-three anchor bracket rho(y_j, y_k, v_a), component i."""
    half, third = Fraction(1, 2), Fraction(1, 3)
    out = -(cov_rho2(spec, i, k, j, a) + cov_rho2(spec, i, j, k, a)) * half
    for n in range(spec.d):
        out = out - (curvature(spec, i, n, j, k) + curvature(spec, i, n, k, j)) * (half * third) * spec.R(n, a)
        out = out - spec.phi_at(3, (i, j, n, k)) * spec.R(n, a)
    for b in range(spec.r):
        out = out + spec.R(i, b) * spec.psi_at(3, (b, a, j, k))
    return out


def cov_mu(spec, a, k, b, c):
    """(nabla'_k mu)(v_b, v_c), component a."""
    out = spec.diff(spec.M(a, b, c), k)
    for e in range(spec.r):
        out = out + spec.Gp(a, k, e) * spec.M(e, b, c)
        out = out - spec.M(a, e, c) * spec.Gp(e, k, b) - spec.M(a, b, e) * spec.Gp(e, k, c)
    return out


def mu3(spec, a, k, b, c):
    """Arity-three torsion bracket mu(y_k, v_b, v_c), component a."""
    half = Fraction(1, 2)
    out = -cov_mu(spec, a, k, b, c)
    for i in range(spec.d):
        out = out + (curvature_prime(spec, a, i, k, b) * spec.R(i, c)
                     - curvature_prime(spec, a, i, k, c) * spec.R(i, b)) * half
        out = out + spec.psi_at(3, (a, b, k, i)) * spec.R(i, c) - spec.psi_at(3, (a, c, k, i)) * spec.R(i, b)
    return out


def jacobiator(spec, a, b, c):
    """Cyclic sum of mu(mu(v_a, v_b), v_c) for constant data with zero anchor."""
    out = {}
    for e in range(spec.r):
        tot = Poly(spec.nvars)
        for (p, q, s) in ((a, b, c), (b, c, a), (c, a, b)):
            for f in range(spec.r):
                tot = tot + spec.M(e, f, s) * spec.M(f, p, q)
        if tot:
            out[e] = tot
    return out


def vector_field_bracket(d, X, Y):
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i for lists of polynomials."""
    return [sum((X[j] * Y[i].diff(j) - Y[j] * X[i].diff(j) for j in range(d)), Poly(X[0].nvars))
            for i in range(d)]


def atiyah_constant_part(st, I, K):
    """Weight-one part of the displayed Atiyah entry (I, K), built from l2, l2', rho2 and mu."""
    s, L = st.spec, st.L
    P = L.from_poly
    d, r = s.d, s.r
    Iy, Ky = I < d, K < d
    i, k = (I if Iy else I - d), (K if Ky else K - d)
    e = L.zero()
    for j in range(d):
        for m in range(d):
            if Iy and Ky:
                e = e + L.DY(j) * L.DX(m) * P(l2(s, k, m, j, i))
            elif not Iy and not Ky:
                e = e + L.DY(j) * L.DX(m) * P(l2_prime(s, k, m, j, i))
        if not Iy and Ky:
            e = e + L.DY(j) * P(rho2(s, k, j, i))
    for b in range(r):
        if Iy and Ky:
            e = e + L.DV(b) * P(rho2(s, k, i, b))
        if Iy and not Ky:
            for m in range(d):
                e = e + L.DV(b) * L.DX(m) * P(l2_prime(s, k, m, i, b))
        if not Iy and not Ky:
            e = e + L.DV(b) * P(s.M(k, b, i))
    return e


def weil_differential(st, name, idx):
    """D on the Weil generator ``name`` in {"Dy", "v", "Dv"} with index ``idx``."""
    s, L = st.spec, st.L
    P = L.from_poly
    d, r = s.d, s.r
    out = L.zero()
    if name == "Dy":
        i = idx
        for a in range(r):
            out += P(s.R(i, a)) * L.DV(a)
            for j in range(d):
                co = -s.diff(s.R(i, a), j)
                for b in range(r):
                    co = co + s.R(i, b) * s.Gp(b, j, a)
                out += P(co) * L.DY(j) * L.V(a)
    elif name == "v":
        a = idx
        out += L.DV(a)
        for b in range(r):
            for j in range(d):
                out += P(s.Gp(a, j, b)) * L.DY(j) * L.V(b)
            for c in range(r):
                out -= P(s.C(a, b, c)).scale(Fraction(1, 2)) * L.V(b) * L.V(c)
    else:
        a = idx
        Rb = basic_curvature(s)
        for b in range(r):
            for c in range(r):
                co = sum((s.Gp(a, i, c) * s.R(i, b) for i in range(d)), s.zero()) - s.C(a, b, c)
                out -= P(co) * L.DV(b) * L.V(c)
                for j in range(d):
                    p = Rb.get((a, b, c, j))
                    if p:
                        out -= P(p).scale(Fraction(1, 2)) * L.DY(j) * L.V(b) * L.V(c)
            for j in range(d):
                out += P(s.Gp(a, j, b)) * L.DY(j) * L.DV(b)
                for m in range(d):
                    out += P(curvature_prime(s, a, j, m, b)).scale(Fraction(1, 2)) * L.DY(j) * L.DY(m) * L.V(b)
    return out
