"""Atiyah class, Atiyah-Chern classes, transgression and the Weil algebra.

Kähler forms on the formal neighbourhood are taken relative to the base
forms: ``dDR`` sends ``y -> Dy`` and ``v -> Dv`` and treats base coefficients
and ``dx`` as constants.  The solved differential is lifted to forms so that
it anticommutes with ``dDR``.

Two matrix conventions are used.

* :attr:`AtiyahMatrix.entries` is the display convention: entry ``(I, K)`` is
  the coefficient of ``e_K`` in ``At(1 (x) e_I)``.  It is ``(-1)^{|K|}`` times
  the de Rham differential of the left Jacobian ``d Q(e^K) / d e^I``, which
  makes the weight-one part read ``sum_J De^J l_2(e_J, e_I)`` with the
  brackets of :func:`linfgeom.fedosov.bracket_value`.
* :attr:`AtiyahMatrix.endo` is the matrix of At as an even endomorphism of
  the free module of vector fields (coefficients on the left).  Powers and
  super-traces are taken there:  ``c_k = sum_I (-1)^{|I|} (endo^k)_I^I``.
  Both conventions share the diagonal, so ``c_1`` is the plain super-trace of
  the displayed matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import Derivation, Element, Layout, de_rham, delta_inv
from .fedosov import RecursionState


def fiber_generators(L: Layout):
    """Basis of the fiber: y_1..y_d (even in g[1]) then v_1..v_r (odd)."""
    gens = [("e", k) for k in L.y] + [("o", j) for j in L.v]
    parity = [0] * L.d + [1] * L.r
    return gens, parity


def _weight_keep(L: Layout, wmax: int):
    return lambda m, e: L.weight(m, e) <= wmax


# Atiyah class -------------------------------------------------------------------

@dataclass
class AtiyahMatrix:
    L: Layout
    gens: list
    parity: List[int]
    jacobian: List[List[Element]]   # left derivatives d Q(e^K) / d e^I, full Q
    entries: List[List[Element]]    # display convention
    endo: List[List[Element]]       # endomorphism convention
    exact_weight: int               # entries are exact up to this weight

    @property
    def size(self) -> int:
        return len(self.gens)

    def name(self, I: int) -> str:
        return self.L.var_name(self.gens[I]).replace("y", "y_").replace("v", "v_")


def atiyah_class(state: RecursionState) -> AtiyahMatrix:
    L = state.L
    Q = state.total()
    dr = de_rham(L)
    gens, par = fiber_generators(L)
    n = len(gens)
    jac = [[Q.image(gens[K]).deriv_left(gens[I]) for K in range(n)] for I in range(n)]
    at_left = [[dr.apply(jac[I][K]) for K in range(n)] for I in range(n)]
    entries = [[at_left[I][K].scale(-1) if par[K] else at_left[I][K] for K in range(n)] for I in range(n)]
    endo = [[at_left[I][K].scale(-1) if par[I] else at_left[I][K] for K in range(n)] for I in range(n)]
    return AtiyahMatrix(L, gens, par, jac, entries, endo, exact_weight=state.N - 1)


def atiyah_closedness(state: RecursionState, at: AtiyahMatrix) -> Dict[Tuple[int, int], Element]:
    """Failing entries of ``[d^g, At] = 0``, checked through weight ``N - 2``.

    With the left Jacobian ``J`` and ``A = dDR(J)`` the identity reads
    ``Q(A_I^K) = (-1)^{|I|} sum_J (A_I^J J_J^K - (-1)^{|I|+|J|} J_I^J A_J^K)``.
    """
    Qf = state.forms_total()
    w = state.N - 2
    n, par = at.size, at.parity
    J = at.jacobian
    A = [[at.endo[I][K].scale(-1) if par[I] else at.endo[I][K] for K in range(n)] for I in range(n)]
    bad = {}
    for I in range(n):
        s = -1 if par[I] else 1
        for K in range(n):
            val = Qf.apply(A[I][K], wmax=w)
            for M in range(n):
                val.iadd(A[I][M].mul(J[M][K], wmax=w), Fraction(-s))
                sign = s if par[I] == par[M] else -s
                val.iadd(J[I][M].mul(A[M][K], wmax=w), Fraction(sign))
            if val:
                bad[(I, K)] = val
    return bad


def constant_part(at: AtiyahMatrix) -> List[List[Element]]:
    """Weight-one part: one Kähler generator and no y or v factors."""
    L = at.L
    return [[e.filter(lambda m, ex: L.weight(m, ex) == 1) for e in row] for row in at.entries]


# Chern classes ------------------------------------------------------------------

def chern_weight_cap(state: RecursionState, k: int) -> int:
    """c_k computed from a weight-N solution is exact through this weight."""
    return state.N + k - 2


def chern_class(state: RecursionState, k: int, at: Optional[AtiyahMatrix] = None) -> Element:
    """``STr(At^k)`` truncated at :func:`chern_weight_cap`."""
    if k < 1:
        raise ValueError("k must be >= 1")
    at = at or atiyah_class(state)
    L = state.L
    w = chern_weight_cap(state, k)
    n, par = at.size, at.parity
    E = [[e.filter(_weight_keep(L, w)) for e in row] for row in at.endo]
    P = E
    for _ in range(k - 1):
        P = [[_row_col(P, E, i, m, n, w, L) for m in range(n)] for i in range(n)]
    c = L.zero()
    for i in range(n):
        c.iadd(P[i][i], Fraction(-1 if par[i] else 1))
    return c


def _row_col(P, E, i, m, n, w, L):
    acc = L.zero()
    for j in range(n):
        if P[i][j] and E[j][m]:
            acc.iadd(P[i][j].mul(E[j][m], wmax=w))
    return acc


def total_differential(state: RecursionState) -> Derivation:
    """d_par + d_perp on Kähler forms."""
    return state.forms_total() + de_rham(state.L)


def horizontal(state: RecursionState, with_delta=True) -> Derivation:
    """d_par = delta + lifted connection sector (chart differential included)."""
    return state.forms_total(sectors=(0,), with_delta=with_delta)


def vertical(state: RecursionState) -> Derivation:
    """d_perp = lifted anchor/torsion sector + dDR."""
    return state.forms_total(sectors=(1,), with_delta=False) + de_rham(state.L)


def closedness_defect(state: RecursionState, c: Element, wmax: int) -> Element:
    return total_differential(state).apply(c, wmax=wmax)


# transgression ------------------------------------------------------------------

class NotClosedError(ValueError):
    pass


@dataclass
class TransgressionCertificate:
    original: Element
    alpha: Element
    primitives: Dict[int, Element]  # dx-degree p -> b_p
    weight_cap: int                  # all pieces computed through this weight
    verified_weight: int             # certificate identity asserted through this weight
    defect: Element = field(default=None)

    @property
    def ok(self) -> bool:
        return not self.defect


def split_dx(e: Element) -> Dict[int, Element]:
    """Components of ``e`` by the number of dx factors."""
    L = e.L
    parts: Dict[int, dict] = {}
    for (m, ex), c in e.terms.items():
        parts.setdefault(L.n_dx(m), {})[(m, ex)] = c
    return {p: Element._raw(L, t) for p, t in parts.items()}


def horizontal_primitive(state: RecursionState, a: Element, wmax: int) -> Element:
    """b with d_par b = a for a d_par-closed a of positive dx-degree:
    ``b = delta_inv sum_n (-d_{>=1} delta_inv)^n a`` (terms above ``wmax`` dropped)."""
    L = state.L
    keep = _weight_keep(L, wmax)
    d1 = horizontal(state, with_delta=False)
    acc = L.zero()
    x = a.filter(keep)
    while x:
        u = delta_inv(x).filter(keep)
        if not u:
            break
        acc.iadd(u)
        x = d1.apply(u, wmax=wmax).scale(-1)
    return acc


def transgress(state: RecursionState, c: Element, wmax: int) -> TransgressionCertificate:
    """Move a total cocycle to dx-degree zero.

    Working from the top dx-degree down, ``b_{p-1}`` solves
    ``d_par b_{p-1} = a_p - d_perp b_p``; the representative is
    ``alpha = a_0 - d_perp b_0`` and ``c - alpha = d(sum b)``.
    Closedness of each right-hand side is asserted through ``wmax - 1``.
    """
    L = state.L
    check = _weight_keep(L, wmax - 1)
    keep = _weight_keep(L, wmax)
    dpar = horizontal(state)
    dperp = vertical(state)
    parts = split_dx(c.filter(keep))
    top = max(parts, default=0)
    prims: Dict[int, Element] = {}
    prev = None
    for p in range(top, 0, -1):
        rhs = parts.get(p, L.zero())
        if prev is not None:
            rhs = rhs - dperp.apply(prev, wmax=wmax)
        obstruction = dpar.apply(rhs, wmax=wmax - 1)
        if obstruction:
            raise NotClosedError(f"component of dx-degree {p} is not closed: {obstruction}")
        b = horizontal_primitive(state, rhs, wmax)
        prims[p - 1] = b
        prev = b
    alpha = parts.get(0, L.zero())
    if prev is not None:
        alpha = alpha - dperp.apply(prev, wmax=wmax)
    total = L.zero()
    for b in prims.values():
        total.iadd(b)
    defect = (c.filter(check) - alpha.filter(check)) - total_differential(state).apply(total, wmax=wmax - 1)
    return TransgressionCertificate(original=c, alpha=alpha, primitives=prims, weight_cap=wmax,
                                    verified_weight=wmax - 1, defect=defect)


# Weil algebra -------------------------------------------------------------------

def is_weil(e: Element) -> bool:
    L = e.L
    return all(L.n_y(ex) == 0 and L.n_dx(m) == 0 for (m, ex) in e.terms)


def weil_project(e: Element) -> Element:
    """p: keep the terms with no y and no dx."""
    L = e.L
    return e.filter(lambda m, ex: L.n_y(ex) == 0 and L.n_dx(m) == 0)


def flat_lift(state: RecursionState, f: Element, ydeg: int = 1) -> Element:
    """iota(f) = sum_n (-delta_inv d_{>=1})^n f, kept to y-degree <= ydeg.

    d_{>=1} never lowers the y-degree and delta_inv raises it by one, so the
    truncated series is exact in the kept range.
    """
    L = state.L
    keep = lambda m, ex: L.n_y(ex) <= ydeg  # noqa: E731
    d1 = horizontal(state, with_delta=False)
    out = f
    x = f
    for _ in range(ydeg):
        x = delta_inv(d1.apply(x, lambda m, ex: L.n_y(ex) <= ydeg - 1)).scale(-1).filter(keep)
        if not x:
            break
        out = out + x
    return out


def weil_differential(state: RecursionState, w: Element, parts: str = "all") -> Element:
    """D = p o d_perp o iota on a Weil element.

    ``parts`` selects ``"dr"`` (D^DR), ``"rho_mu"`` (D^{mu+rho}) or ``"all"``.
    """
    if not is_weil(w):
        raise ValueError("not a Weil element: y or dx present")
    L = state.L
    if parts == "dr":
        D = de_rham(L)
    elif parts == "rho_mu":
        D = state.forms_total(sectors=(1,), with_delta=False)
    elif parts == "all":
        D = vertical(state)
    else:
        raise ValueError(parts)
    lifted = flat_lift(state, w, 1)
    return weil_project(D.apply(lifted, lambda m, ex: L.n_y(ex) == 0 and L.n_dx(m) == 0))


def weil_generators(L: Layout) -> List[Tuple[str, Element]]:
    gens = []
    for i in range(L.d):
        gens.append((f"Dy{i + 1}", L.DY(i)))
    for a in range(L.r):
        gens.append((f"v{a + 1}", L.V(a)))
    for a in range(L.r):
        gens.append((f"Dv{a + 1}", L.DV(a)))
    return gens


# modular class ------------------------------------------------------------------

def modular_class(state: RecursionState) -> Element:
    """``v^a (tr rho_2(-, v_a) - tr mu(v_a, -))``: the super-trace of minus the
    differences between the basic connections and the pulled-back ones."""
    spec, L = state.spec, state.L
    from .algebroid import rho2
    out = L.zero()
    for a in range(spec.r):
        coef = spec.zero()
        for j in range(spec.d):
            coef = coef + rho2(spec, j, j, a)
        for b in range(spec.r):
            coef = coef - spec.M(b, a, b)
        if coef:
            out = out + L.from_poly(coef) * L.V(a)
    return out


@dataclass
class ModularReport:
    transgressed: Element         # y-free, dx-free part of the (0,2) representative
    modular: Element
    dr_modular: Element           # D^DR(modular class)
    difference: Element
    dy_dy_part: Element           # Dy^Dy terms of the representative
    certificate: TransgressionCertificate

    @property
    def ok(self) -> bool:
        return not self.difference and not self.dy_dy_part and self.certificate.ok


class MetricError(ValueError):
    pass


def check_c1_modular(state: RecursionState) -> ModularReport:
    """Transgress c_1 and compare its Weil projection with D^DR of the modular class.

    Requires a fiber metric preserved by the fiber connection.
    """
    from .spec_io import metric_incompatibility
    spec, L = state.spec, state.L
    if spec.metric is None:
        raise MetricError("the modular comparison needs a [metric] section")
    bad = metric_incompatibility(spec)
    if bad is not None:
        raise MetricError("fiber connection does not preserve the metric at (i,a,b) = "
                          + str(tuple(k + 1 for k in bad)))
    c1 = chern_class(state, 1)
    cert = transgress(state, c1, chern_weight_cap(state, 1))
    alpha_w = weil_project(cert.alpha)
    mod = modular_class(state)
    dmod = weil_differential(state, mod, "dr")
    dydy = alpha_w.filter(lambda m, ex: L.n_Dy(m) == 2)
    return ModularReport(transgressed=alpha_w, modular=mod, dr_modular=dmod,
                         difference=alpha_w - dmod, dy_dy_part=dydy, certificate=cert)


# action algebroids --------------------------------------------------------------

class NotActionError(ValueError):
    pass


def equivariant_matrix(state: RecursionState):
    """Blocks of ``R + moment`` (tangent) and ``ad`` (fiber) as Weil elements.

    Tangent block: ``1/2 R(d_j, d_m)^i_k Dy^j Dy^m + Dv^a ((L - nabla)_{rho(e_a)})^i_k``
    with ``(L_X - nabla_X) d_k = -(d_k X^i + Gamma^i_{kn} X^n) d_i``.
    Fiber block: ``Dv^a C^c_{ab}``.
    """
    from .algebroid import curvature
    spec, L = state.spec, state.L
    half = Fraction(1, 2)
    T = [[L.zero() for _ in range(spec.d)] for _ in range(spec.d)]
    for i in range(spec.d):
        for k in range(spec.d):
            acc = L.zero()
            for j in range(spec.d):
                for m in range(spec.d):
                    c = curvature(spec, i, j, m, k)
                    if c:
                        acc.iadd(L.from_poly(c) * L.DY(j) * L.DY(m), half)
            for a in range(spec.r):
                mom = spec.diff(spec.R(i, a), k)
                for n in range(spec.d):
                    mom = mom + spec.G(i, k, n) * spec.R(n, a)
                if mom:
                    acc.iadd(L.from_poly(mom) * L.DV(a), Fraction(-1))
            T[i][k] = acc
    V = [[L.zero() for _ in range(spec.r)] for _ in range(spec.r)]
    for c in range(spec.r):
        for b in range(spec.r):
            acc = L.zero()
            for a in range(spec.r):
                cc = spec.C(c, a, b)
                if cc:
                    acc.iadd(L.from_poly(cc) * L.DV(a))
            V[c][b] = acc
    return T, V


def _mat_power_trace(M, k, L) -> Element:
    n = len(M)
    P = M
    for _ in range(k - 1):
        P = [[elem for elem in (
            _sum_elems(L, (P[i][j] * M[j][m] for j in range(n))) for m in range(n))] for i in range(n)]
    return _sum_elems(L, (P[i][i] for i in range(n)))


def _sum_elems(L, items) -> Element:
    acc = L.zero()
    for e in items:
        if e:
            acc.iadd(e)
    return acc


@dataclass
class ActionReport:
    k: int
    transgressed: Element   # v-free part of the Weil projection of the (0,k) representative
    equivariant: Element    # (-1)^k STr((R + moment) (+) ad)^k
    vanishing: List[str]    # violated vanishing claims for constant brackets
    certificate: TransgressionCertificate

    @property
    def difference(self) -> Element:
        return self.transgressed - self.equivariant

    @property
    def ok(self) -> bool:
        return not self.difference and not self.vanishing and self.certificate.ok


def vanishing_claims(state: RecursionState) -> List[str]:
    """For an action algebroid the fiber connection tower stops at label 1 and
    the torsion tower stops at label 2."""
    out = []
    for n in range(2, state.N + 1):
        if not state.dnabla_prime(n).is_zero():
            out.append(f"fiber connection component at label {n} is nonzero")
    for n in range(3, state.N + 1):
        if not state.dmu(n).is_zero():
            out.append(f"torsion component at label {n} is nonzero")
    return out


def action_chern(state: RecursionState, k: int) -> ActionReport:
    spec, L = state.spec, state.L
    if not spec.action_algebroid:
        raise NotActionError("spec is not flagged as an action algebroid")
    if spec.gamma_prime:
        raise NotActionError("action comparison needs the trivial flat connection on V")
    ck = chern_class(state, k)
    cert = transgress(state, ck, chern_weight_cap(state, k))
    lhs = weil_project(cert.alpha).filter(lambda m, ex: L.n_v(m) == 0)
    T, V = equivariant_matrix(state)
    rhs = _mat_power_trace(T, k, L) - _mat_power_trace(V, k, L)
    if k % 2:
        rhs = rhs.scale(-1)
    return ActionReport(k=k, transgressed=lhs, equivariant=rhs,
                        vanishing=vanishing_claims(state), certificate=cert)
