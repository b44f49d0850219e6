"""Tensor-level checks of the Lie algebroid axioms and the basic connections.

All tensors are frame components over the chart with 0-based indices.  The
bracket on sections is rebuilt from the structure functions ``C^a_{bc}``
(``[v_b, v_c] = C^a_{bc} v_a``) with the Leibniz rule
``[f a, b] = f [a, b] - rho(b)(f) a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .poly import Poly
from .spec_io import GeometrySpec

Index = Tuple[int, ...]


@dataclass
class AlgebroidReport:
    anchor: Dict[Index, Poly] = field(default_factory=dict)      # (i, b, c)
    jacobiator: Dict[Index, Poly] = field(default_factory=dict)  # (e, a, b, c)
    bianchi: Dict[Index, Poly] = field(default_factory=dict)     # (e, a, b, c)

    @property
    def ok(self) -> bool:
        return not (self.anchor or self.jacobiator)


def _sum(polys, nvars) -> Poly:
    out = Poly(nvars)
    for p in polys:
        out = out + p
    return out


def check_anchor(spec: GeometrySpec) -> Dict[Index, Poly]:
    """Nonzero components of ``[rho(v_b), rho(v_c)] - rho([v_b, v_c])`` for b < c."""
    d, r, nv = spec.d, spec.r, spec.nvars
    out = {}
    for b in range(r):
        for c in range(b + 1, r):
            for i in range(d):
                val = _sum((spec.R(j, b) * spec.diff(spec.R(i, c), j) - spec.R(j, c) * spec.diff(spec.R(i, b), j)
                            for j in range(d)), nv)
                val = val - _sum((spec.R(i, a) * spec.C(a, b, c) for a in range(r)), nv)
                if val:
                    out[(i, b, c)] = val
    return out


def bracket_of_brackets(spec: GeometrySpec, a: int, b: int, c: int) -> List[Poly]:
    """Frame components of ``[[v_a, v_b], v_c]``."""
    r, nv = spec.r, spec.nvars
    out = []
    for e in range(r):
        val = Poly(nv)
        for f in range(r):
            val = val + spec.C(f, a, b) * spec.C(e, f, c)
        # [C^f_{ab} v_f, v_c] = C^f_{ab} [v_f, v_c] - rho(v_c)(C^f_{ab}) v_f
        val = val - _sum((spec.R(j, c) * spec.diff(spec.C(e, a, b), j) for j in range(spec.d)), nv)
        out.append(val)
    return out


def jacobiator(spec: GeometrySpec) -> Dict[Index, Poly]:
    """Nonzero components of the cyclic sum of ``[[v_a, v_b], v_c]`` for a < b < c."""
    out = {}
    r = spec.r
    for a in range(r):
        for b in range(a + 1, r):
            for c in range(b + 1, r):
                parts = [bracket_of_brackets(spec, *t) for t in ((a, b, c), (b, c, a), (c, a, b))]
                for e in range(r):
                    val = parts[0][e] + parts[1][e] + parts[2][e]
                    if val:
                        out[(e, a, b, c)] = val
    return out


def curvature_prime(spec: GeometrySpec, a: int, i: int, m: int, b: int) -> Poly:
    """``R'(d_i, d_m) v_b``, component a."""
    out = spec.diff(spec.Gp(a, m, b), i) - spec.diff(spec.Gp(a, i, b), m)
    for c in range(spec.r):
        out = out + spec.Gp(a, i, c) * spec.Gp(c, m, b) - spec.Gp(a, m, c) * spec.Gp(c, i, b)
    return out


def curvature(spec: GeometrySpec, i: int, j: int, m: int, k: int) -> Poly:
    """``R(d_j, d_m) d_k``, component i."""
    out = spec.diff(spec.G(i, m, k), j) - spec.diff(spec.G(i, j, k), m)
    for n in range(spec.d):
        out = out + spec.G(i, j, n) * spec.G(n, m, k) - spec.G(i, m, n) * spec.G(n, j, k)
    return out


def cov_mu(spec: GeometrySpec, e: int, i: int, b: int, c: int) -> Poly:
    """``(nabla'_i mu)(v_b, v_c)``, component e."""
    out = spec.diff(spec.M(e, b, c), i)
    for f in range(spec.r):
        out = out + spec.Gp(e, i, f) * spec.M(f, b, c)
        out = out - spec.M(e, f, c) * spec.Gp(f, i, b) - spec.M(e, b, f) * spec.Gp(f, i, c)
    return out


def bianchi_form(spec: GeometrySpec) -> Dict[Index, Poly]:
    """Torsion form of the Jacobi condition, cyclic in (a, b, c):

    ``mu(mu(v_a, v_b), v_c) + (nabla'_{rho(v_a)} mu)(v_b, v_c) - R'(rho(v_a), rho(v_b)) v_c``.
    Agrees with the Jacobiator whenever the anchor condition holds.
    """
    d, r, nv = spec.d, spec.r, spec.nvars
    out = {}

    def term(a, b, c, e):
        val = _sum((spec.M(e, f, c) * spec.M(f, a, b) for f in range(r)), nv)
        val = val + _sum((spec.R(i, a) * cov_mu(spec, e, i, b, c) for i in range(d)), nv)
        val = val - _sum((spec.R(i, a) * spec.R(m, b) * curvature_prime(spec, e, i, m, c)
                          for i in range(d) for m in range(d)), nv)
        return val

    for a in range(r):
        for b in range(a + 1, r):
            for c in range(b + 1, r):
                for e in range(r):
                    val = term(a, b, c, e) + term(b, c, a, e) + term(c, a, b, e)
                    if val:
                        out[(e, a, b, c)] = val
    return out


def check_bianchi(spec: GeometrySpec) -> Dict[Index, Poly]:
    return jacobiator(spec)


def analyse(spec: GeometrySpec) -> AlgebroidReport:
    return AlgebroidReport(anchor=check_anchor(spec), jacobiator=jacobiator(spec), bianchi=bianchi_form(spec))


# basic connections -------------------------------------------------------------

def rho2(spec: GeometrySpec, i: int, j: int, a: int) -> Poly:
    """``(nabla_j rho)(v_a) - rho(nabla'_j v_a)``, component i."""
    out = spec.diff(spec.R(i, a), j)
    for n in range(spec.d):
        out = out + spec.G(i, j, n) * spec.R(n, a)
    for b in range(spec.r):
        out = out - spec.R(i, b) * spec.Gp(b, j, a)
    return out


@dataclass
class BasicConnections:
    """Frame coefficients.

    ``hat[(c, a, b)]``   : component c of hat-nabla^bas_{v_a} v_b
    ``check[(i, a, j)]`` : component i of check-nabla^bas_{v_a} d_j
    ``curv[(e, b, c, j)]``: component e of R^bas(v_b, v_c) y_j  (a V-valued form)
    """

    hat: Dict[Index, Poly]
    check: Dict[Index, Poly]
    curv: Dict[Index, Poly]


def hat_basic(spec: GeometrySpec) -> Dict[Index, Poly]:
    d, r, nv = spec.d, spec.r, spec.nvars
    out = {}
    for c in range(r):
        for a in range(r):
            for b in range(r):
                val = _sum((spec.R(i, a) * spec.Gp(c, i, b) for i in range(d)), nv) - spec.M(c, a, b)
                if val:
                    out[(c, a, b)] = val
    return out


def hat_basic_alt(spec: GeometrySpec) -> Dict[Index, Poly]:
    """Same connection written as ``[v_a, v_b] + nabla'_{rho(v_b)} v_a``."""
    d, r, nv = spec.d, spec.r, spec.nvars
    out = {}
    for c in range(r):
        for a in range(r):
            for b in range(r):
                val = spec.C(c, a, b) + _sum((spec.R(i, b) * spec.Gp(c, i, a) for i in range(d)), nv)
                if val:
                    out[(c, a, b)] = val
    return out


def check_basic(spec: GeometrySpec) -> Dict[Index, Poly]:
    d, r, nv = spec.d, spec.r, spec.nvars
    out = {}
    for i in range(d):
        for a in range(r):
            for j in range(d):
                val = _sum((spec.R(k, a) * spec.G(i, k, j) for k in range(d)), nv) - rho2(spec, i, j, a)
                if val:
                    out[(i, a, j)] = val
    return out


def basic_curvature(spec: GeometrySpec) -> Dict[Index, Poly]:
    """``R^bas(v_b, v_c) y_j`` from the five-term expression

    ``nabla'_j [v_b, v_c] - [nabla'_j v_b, v_c] - [v_b, nabla'_j v_c]
      + nabla'_{check_b y_j} v_c - nabla'_{check_c y_j} v_b``.
    """
    d, r, nv = spec.d, spec.r, spec.nvars
    chk = check_basic(spec)
    Z = Poly(nv)

    def bracket_sec(s1, s2):
        # [s1, s2] for sections given by frame coefficients
        out = []
        for e in range(r):
            val = Z
            for f in range(r):
                for g in range(r):
                    if s1[f] and s2[g]:
                        val = val + s1[f] * s2[g] * spec.C(e, f, g)
            # rho(s1)(s2^e) - rho(s2)(s1^e)
            for f in range(r):
                for i in range(d):
                    if s1[f]:
                        val = val + s1[f] * spec.R(i, f) * spec.diff(s2[e], i)
                    if s2[f]:
                        val = val - s2[f] * spec.R(i, f) * spec.diff(s1[e], i)
            out.append(val)
        return out

    def nabla_p(j, s):
        # nabla'_{d_j} s
        return [spec.diff(s[e], j) + _sum((spec.Gp(e, j, f) * s[f] for f in range(r)), nv) for e in range(r)]

    def nabla_p_along(X, s):
        return [_sum((X[k] * nabla_p(k, s)[e] for k in range(d)), nv) for e in range(r)]

    def unit(b):
        return [Poly.const(nv, 1) if e == b else Poly(nv) for e in range(r)]

    out = {}
    for b in range(r):
        for c in range(r):
            vb, vc = unit(b), unit(c)
            br = [spec.C(e, b, c) for e in range(r)]
            for j in range(d):
                t1 = nabla_p(j, br)
                t2 = bracket_sec(nabla_p(j, vb), vc)
                t3 = bracket_sec(vb, nabla_p(j, vc))
                Xb = [chk.get((i, b, j), Z) for i in range(d)]
                Xc = [chk.get((i, c, j), Z) for i in range(d)]
                t4 = nabla_p_along(Xb, vc)
                t5 = nabla_p_along(Xc, vb)
                for e in range(r):
                    val = t1[e] - t2[e] - t3[e] + t4[e] - t5[e]
                    if val:
                        out[(e, b, c, j)] = val
    return out


def basic_connections(spec: GeometrySpec) -> BasicConnections:
    return BasicConnections(hat=hat_basic(spec), check=check_basic(spec), curv=basic_curvature(spec))
