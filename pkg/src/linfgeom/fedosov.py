"""Recursive solution of the deformed Chevalley-Eilenberg differential.

The full differential is ``Q = delta + sum_n Q_n`` where each component is
stored per *sector* (how many v-factors it adds) and *label* ``n``:

====== =========================== ============================
sector on y^i                      on v^a
====== =========================== ============================
0      d^nabla_n                   d^nabla'_n
1      d^rho_n                     d^mu_n
====== =========================== ============================

Label ``n`` raises the weight ``#y + #v + #Dy + #Dv`` by ``n - 1``; label 1 of
sector 0 also carries the chart differential ``x^i -> dx^i``.  The nilpotency
equation splits by sector and label; sectors 0 and 1 are solved with the
contraction ``delta_inv`` and sector 2 is the algebroid test.

Input tensors are geometric: ``nabla_j d_k = Gamma^i_{jk} d_i``,
``nabla'_j v_b = Gamma'^a_{jb} v_a``, ``rho(v_a) = rho^i_a d_i`` and
``mu(v_b, v_c) = mu^a_{bc} v_a``.  On the dual generators this gives

* ``d^nabla_1(y^i)  = -Gamma^i_{jk} dx^j y^k``
* ``d^nabla'_1(v^a) = -Gamma'^a_{jb} dx^j v^b``
* ``d^rho_1(y^i)    = -rho^i_a v^a``
* ``d^mu_2(v^a)     = 1/2 mu^a_{bc} v^b v^c``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .algebra import (Derivation, Element, Layout, apply_delta, commutator_on, delta,
                      delta_inv, lift_to_forms)
from .spec_io import GeometrySpec, interpolate


class ConsistencyError(RuntimeError):
    """An identity that holds by construction failed; indicates a solver bug."""


def layout_for(spec: GeometrySpec) -> Layout:
    return Layout(spec.d, spec.r, family=(spec.nvars == spec.d + 1))


def _E(L: Layout, p) -> Element:
    return L.from_poly(p)


def initial_images(spec: GeometrySpec, L: Layout):
    """Label-1 images of both sectors and the label-2 bracket image."""
    d, r = spec.d, spec.r
    conn: Dict = {}
    for i in range(d):
        conn[("e", L.x[i])] = L.DX(i)
    for i in range(d):
        img = L.zero()
        for j in range(d):
            for k in range(d):
                g = spec.G(i, j, k)
                if g:
                    img.iadd(_E(L, g) * L.DX(j) * L.Y(k), Fraction(-1))
        conn[("e", L.y[i])] = img
    for a in range(r):
        img = L.zero()
        for j in range(d):
            for b in range(r):
                g = spec.Gp(a, j, b)
                if g:
                    img.iadd(_E(L, g) * L.DX(j) * L.V(b), Fraction(-1))
        conn[("o", L.v[a])] = img
    anchor: Dict = {}
    for i in range(d):
        img = L.zero()
        for a in range(r):
            p = spec.R(i, a)
            if p:
                img.iadd(_E(L, p) * L.V(a), Fraction(-1))
        anchor[("e", L.y[i])] = img
    bracket: Dict = {}
    for a in range(r):
        img = L.zero()
        for b in range(r):
            for c in range(r):
                p = spec.M(a, b, c)
                if p:
                    img.iadd(_E(L, p) * L.V(b) * L.V(c), Fraction(1, 2))
        bracket[("o", L.v[a])] = img
    return conn, anchor, bracket


def gauge_images(spec: GeometrySpec, L: Layout, n: int) -> Dict:
    """delta_inv of the label-n sector-0 images prescribed by the gauge tensors.

    phi_{n+1}: y^i -> 1/(n+1)! phi^i_{j1..j(n+1)} y^j1..y^j(n+1)
    psi_{n+1}: v^a -> 1/n!     psi^a_{b j1..jn}    y^j1..y^jn v^b
    """
    out = {}
    phi = spec.phi.get(n + 1, {})
    if phi:
        f = Fraction(1, math.factorial(n + 1))
        imgs = {i: L.zero() for i in range(spec.d)}
        for idx, p in phi.items():
            mono = L.one()
            for j in idx[1:]:
                mono = mono * L.Y(j)
            imgs[idx[0]].iadd(_E(L, p) * mono, f)
        for i, img in imgs.items():
            if img:
                out[("e", L.y[i])] = img
    psi = spec.psi.get(n + 1, {})
    if psi:
        f = Fraction(1, math.factorial(n))
        imgs = {a: L.zero() for a in range(spec.r)}
        for idx, p in psi.items():
            mono = L.one()
            for j in idx[2:]:
                mono = mono * L.Y(j)
            imgs[idx[0]].iadd(_E(L, p) * mono * L.V(idx[1]), f)
        for a, img in imgs.items():
            if img:
                out[("o", L.v[a])] = img
    return out


@dataclass
class RecursionState:
    """Solved components up to label ``N``; immutable once returned by :func:`solve`."""

    spec: GeometrySpec
    L: Layout
    N: int
    Q: Dict[int, Dict[int, Derivation]]  # sector -> label -> derivation
    gauge: str
    checks: List[str] = field(default_factory=list)
    _forms: Dict = field(default_factory=dict, repr=False)

    # named accessors -------------------------------------------------------
    def comp(self, sector: int, n: int) -> Derivation:
        return self.Q.get(sector, {}).get(n) or Derivation(self.L, 1)

    def gens_y(self):
        return [("e", k) for k in self.L.y]

    def gens_v(self):
        return [("o", j) for j in self.L.v]

    def dnabla(self, n: int) -> Derivation:
        D = self.comp(0, n)
        keep = self.gens_y() + ([("e", k) for k in self.L.x] if n == 1 else [])
        return D.restrict(keep)

    def dnabla_prime(self, n: int) -> Derivation:
        return self.comp(0, n).restrict(self.gens_v())

    def drho(self, n: int) -> Derivation:
        return self.comp(1, n).restrict(self.gens_y())

    def dmu(self, n: int) -> Derivation:
        return self.comp(1, n).restrict(self.gens_v())

    def image(self, sector: int, n: int, var) -> Element:
        return self.comp(sector, n).image(var)

    def total(self, sectors=(0, 1), labels=None, with_delta=True) -> Derivation:
        """Sum of the requested components as one derivation on C*(g)."""
        D = delta(self.L) if with_delta else Derivation(self.L, 1)
        for s in sectors:
            for n, comp in sorted(self.Q.get(s, {}).items()):
                if labels is None or n in labels:
                    D = D + comp
        return D

    # lifted to Kähler forms ----------------------------------------------
    def forms(self, sector: int, n: int) -> Derivation:
        key = (sector, n)
        if key not in self._forms:
            self._forms[key] = lift_to_forms(self.comp(sector, n))
        return self._forms[key]

    def forms_total(self, sectors=(0, 1), with_delta=True, labels=None) -> Derivation:
        D = delta(self.L) if with_delta else Derivation(self.L, 1)
        for s in sectors:
            for n in sorted(self.Q.get(s, {})):
                if labels is None or n in labels:
                    D = D + self.forms(s, n)
        return D


def _half_bracket_sum(Q, sector: int, n: int, var) -> Element:
    """Label-n part of 1/2 sum [Q^{s1}_k, Q^{s2}_l](g) over k + l = n, s1 + s2 = sector."""
    acc = None
    for k in range(1, n):
        l = n - k
        for s1 in range(0, sector + 1):
            s2 = sector - s1
            A = Q.get(s1, {}).get(k)
            B = Q.get(s2, {}).get(l)
            if A is None or B is None:
                continue
            term = commutator_on(A, B, var)
            if acc is None:
                acc = term.scale(Fraction(1, 2))
            else:
                acc.iadd(term, Fraction(1, 2))
    return acc


def solve(spec: GeometrySpec, N: Optional[int] = None) -> RecursionState:
    """Solve every sector-0 and sector-1 component up to label N.

    For label n >= 2 and each generator g the component image is
    ``-delta_inv(R_n(g)) + delta(gauge_n(g))`` with ``R_n`` the quadratic part
    built from lower labels.  Before contracting, ``delta(R_n(g)) = 0`` is
    asserted (compatibility); afterwards the label-n equation is re-checked.
    """
    N = spec.cutoff if N is None else N
    if N < 1:
        raise ValueError("cutoff must be >= 1")
    L = layout_for(spec)
    conn, anchor, bracket = initial_images(spec, L)
    Q: Dict[int, Dict[int, Derivation]] = {0: {1: Derivation(L, 1, conn, "Q0_1")},
                                           1: {1: Derivation(L, 1, anchor, "Q1_1")}}
    if N >= 2:
        Q[1][2] = Derivation(L, 1, bracket, "Q1_2")
    gens = [("e", k) for k in L.y] + [("o", j) for j in L.v]
    checks = []
    for n in range(2, N + 1):
        gauge = gauge_images(spec, L, n)
        for sector in (0, 1):
            ims = dict(Q[sector][n].images) if n in Q[sector] else {}
            for var in gens:
                if sector == 1 and n == 2 and var[0] == "o":
                    continue  # d^mu_2 is initial data
                R = _half_bracket_sum(Q, sector, n, var)
                if R is None:
                    R = L.zero()
                if apply_delta(R):
                    raise ConsistencyError(
                        f"compatibility failed at sector {sector}, label {n}, generator {L.var_name(var)}")
                img = -delta_inv(R)
                g = gauge.get(var) if sector == 0 else None
                if g is not None:
                    img = img + apply_delta(g)
                if img:
                    ims[var] = img
                else:
                    ims.pop(var, None)
            Q[sector][n] = Derivation(L, 1, ims, f"Q{sector}_{n}")
        checks.append(f"label {n}: compatibility holds on all generators")
    return RecursionState(spec=spec, L=L, N=N, Q=Q, gauge=spec.gauge, checks=checks)


# nilpotency ----------------------------------------------------------------------

SECTOR_NAMES = {0: "connection sector", 1: "anchor/torsion sector", 2: "algebroid sector"}


@dataclass
class Residual:
    sector: int
    index: int
    generator: str
    value: Element


def residual(state: RecursionState, sector: int, n: int) -> List[Residual]:
    """[delta, Q^s_n] + 1/2 sum_{k+l=n} [Q_k, Q_l] restricted to ``sector``,
    evaluated on every generator of C*(g) (base variables included)."""
    L = state.L
    dl = delta(L)
    out = []
    gens = [("e", k) for k in L.x] + [("o", j) for j in L.dx] + \
           [("e", k) for k in L.y] + [("o", j) for j in L.v]
    for var in gens:
        val = _half_bracket_sum(state.Q, sector, n, var) or L.zero()
        comp = state.Q.get(sector, {}).get(n)
        if comp is not None and sector < 2:
            val = val + commutator_on(dl, comp, var)
        if val:
            out.append(Residual(sector, n, L.var_name(var), val))
    return out


def asserted_bound(state: RecursionState, sector: int) -> int:
    """Largest residual index whose contributing components are all solved."""
    return state.N + 1 if sector == 2 else state.N


def check_nilpotency(state: RecursionState, sector: int) -> Dict[int, List[Residual]]:
    """Residuals per index for 1 <= n <= asserted bound."""
    return {n: residual(state, sector, n) for n in range(1, asserted_bound(state, sector) + 1)}


ANCHOR_INDEX = 3
BIANCHI_INDEX = 4


def first_nonzero(report: Dict[int, List[Residual]]) -> Optional[int]:
    for n in sorted(report):
        if report[n]:
            return n
    return None


def index_name(n: int) -> str:
    return {ANCHOR_INDEX: "anchor", BIANCHI_INDEX: "Bianchi"}.get(n, f"index {n}")


# gauge postcondition ------------------------------------------------------------

def gauge_defect(state: RecursionState) -> List[str]:
    """Generators where delta_inv of a stored image differs from the prescribed gauge."""
    L = state.L
    bad = []
    for n in range(2, state.N + 1):
        gauge = gauge_images(state.spec, L, n)
        for sector in (0, 1):
            for var in [("e", k) for k in L.y] + [("o", j) for j in L.v]:
                want = gauge.get(var, L.zero()) if sector == 0 else L.zero()
                if delta_inv(state.image(sector, n, var)) != want:
                    bad.append(f"sector {sector} label {n} {L.var_name(var)}")
    return bad


def grading_defects(state: RecursionState) -> List[str]:
    """Images outside the bidegree dictated by their sector and label."""
    L = state.L
    bad = []
    for sector, comps in state.Q.items():
        for n, D in comps.items():
            for var, img in D.images.items():
                if var[0] == "e" and var[1] in L.x:
                    continue
                on_y = var[0] == "e"
                for (m, e) in img.terms:
                    p, q, nv = L.n_dx(m), L.n_y(e), L.n_v(m)
                    if sector == 0 and on_y:
                        ok = (p, q, nv) == (1, n, 0)
                    elif sector == 0:
                        ok = (p, q, nv) == (1, n - 1, 1)
                    elif on_y:
                        ok = (p, q, nv) == (0, n - 1, 1)
                    else:
                        ok = (p, q, nv) == (0, n - 2, 2)
                    if not ok:
                        bad.append(f"sector {sector} label {n} {L.var_name(var)}: bidegree ({p},{q}) with {nv} v")
                        break
    return bad


# dualization -------------------------------------------------------------------

def extract(img: Element, inputs: List) -> Element:
    """Peel generators off the right: the coefficient of g1 g2 .. gn (in that order)."""
    out = img
    for var in reversed(inputs):
        out = out.deriv_right(var)
    return out


def bracket_value(state: RecursionState, sector: int, n: int, out_var, inputs: List) -> Element:
    """Dual bracket component.  Unary brackets (connections and the anchor) are
    the negative transpose of their coefficient, as for a dual connection; all
    higher brackets read the coefficient directly."""
    val = extract(state.image(sector, n, out_var), inputs)
    arity = len(inputs)
    return -val if arity == 1 else val


# one-parameter families ------------------------------------------------------------

@dataclass
class FamilyState:
    spec: GeometrySpec            # interpolated spec, t is the last base variable
    state: RecursionState         # solved Q(t)
    F: Dict[int, Derivation]      # shift s -> F^(s) (raises weight by s)
    N: int

    @property
    def L(self) -> Layout:
        return self.state.L

    def d_t(self) -> Derivation:
        L = self.L
        return Derivation(L, 1, {("e", L.t): L.DT()}, "d_t")

    def F_total(self) -> Derivation:
        D = Derivation(self.L, 1)
        for s in sorted(self.F):
            D = D + self.F[s]
        return D


def solve_family(specA: GeometrySpec, specB: GeometrySpec, N: Optional[int] = None) -> FamilyState:
    """Flat connection d_t + F on the straight-line family between two specs.

    F^(s+1)(g) = -delta_inv(([d_t, Q^0_{s+1}] + sum_{a>=1, a+b=s} [F^(a), Q^0_{b+1}])(g)),
    with F^(0) = 0, so the constant and linear terms are absent.
    """
    spec = interpolate(specA, specB)
    N = spec.cutoff if N is None else N
    st = solve(spec, N)
    L = st.L
    dt = Derivation(L, 1, {("e", L.t): L.DT()}, "d_t")
    gens = [("e", k) for k in L.y] + [("o", j) for j in L.v]
    F: Dict[int, Derivation] = {}
    for s in range(0, N):
        ims = {}
        for var in gens:
            rhs = commutator_on(dt, st.comp(0, s + 1), var)
            for a in range(1, s + 1):
                if a in F:
                    rhs = rhs + commutator_on(F[a], st.comp(0, s - a + 1), var)
            if apply_delta(rhs):
                raise ConsistencyError(f"family compatibility failed at shift {s + 1}, {L.var_name(var)}")
            img = -delta_inv(rhs)
            if img:
                ims[var] = img
        F[s + 1] = Derivation(L, 1, ims, f"F{s + 1}")
    return FamilyState(spec=spec, state=st, F=F, N=N)


def family_residuals(fam: FamilyState) -> Dict[str, Dict[int, List[Residual]]]:
    """Per-shift residuals of the three family equations.

    * ``solve``:    [d_t + F, Q^0] + [F, delta] (shift s, s <= N-1)
    * ``compat``:   [d_t + F, Q^1]               (shift s, s <= N-1)
    * ``flat``:     [d_t, F] + 1/2 [F, F]         (shift s, s <= N-1)
    """
    st, L = fam.state, fam.L
    dt = fam.d_t()
    dl = delta(L)
    gens = [("e", k) for k in L.x] + [("o", j) for j in L.dx] + \
           [("e", k) for k in L.y] + [("o", j) for j in L.v] + [("e", L.t)]
    out: Dict[str, Dict[int, List[Residual]]] = {"solve": {}, "compat": {}, "flat": {}}
    zero = Derivation(L, 1)
    for s in range(0, fam.N):
        for kind in out:
            res = []
            for var in gens:
                val = L.zero()
                if kind in ("solve", "compat"):
                    sector = 0 if kind == "solve" else 1
                    val = val + commutator_on(dt, st.comp(sector, s + 1), var)
                    for a in range(1, s + 1):
                        val = val + commutator_on(fam.F.get(a, zero), st.comp(sector, s - a + 1), var)
                    if kind == "solve":
                        val = val + commutator_on(fam.F.get(s + 1, zero), dl, var)
                    elif s >= 1:
                        # sector-1 labels start at 1 (anchor), so F^(a) pairs with label s-a+1 >= 1
                        pass
                else:
                    val = val + commutator_on(dt, fam.F.get(s, zero), var)
                    for a in range(1, s):
                        val = val + commutator_on(fam.F.get(a, zero), fam.F.get(s - a, zero), var).scale(
                            Fraction(1, 2))
                if val:
                    res.append(Residual(-1, s, L.var_name(var), val))
            out[kind][s] = res
    return out
