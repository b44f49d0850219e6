"""Graded commutative algebra on a coordinate chart.

Elements live in the free graded-commutative algebra over the polynomial ring
in the base coordinates, generated by

* odd:  dt (family charts only), dx^i, Dy^i, v^a
* even: y^i, Dv^a

Internally every term is a pair ``(mask, exps)``: ``mask`` is a bitmask over
the odd generators (bit order is the canonical product order, lowest bit
first) and ``exps`` is a tuple of exponents over the even variables, base
coordinates first.  Every Koszul sign in the package is produced by
:func:`_merge_sign` or by the bit-position rule in the derivative helpers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from .poly import Poly, format_poly

Key = Tuple[int, Tuple[int, ...]]
Keep = Optional[Callable[[int, Tuple[int, ...]], bool]]

_ONE = Fraction(1)


def _merge_sign(a: int, b: int) -> int:
    """Sign of reordering ``(odd generators of a)(odd generators of b)`` canonically."""
    s = 0
    while b:
        low = b & -b
        j = low.bit_length() - 1
        s += (a >> (j + 1)).bit_count()
        b ^= low
    return -1 if s & 1 else 1


class Layout:
    """Variable bookkeeping for a chart of dimension ``d`` and bundle rank ``r``.

    With ``family=True`` a parameter ``t`` (even, base) and its differential
    ``dt`` (odd) are adjoined.
    """

    def __init__(self, d: int, r: int, family: bool = False):
        if d < 1 or r < 0:
            raise ValueError("need dim >= 1 and rank >= 0")
        self.d, self.r, self.family = d, r, family
        # even variables
        self.nbase = d + (1 if family else 0)
        self.x = list(range(d))
        self.t = d if family else None
        self.y = [self.nbase + i for i in range(d)]
        self.Dv = [self.nbase + d + a for a in range(r)]
        self.n_even = self.nbase + d + r
        # odd generators
        off = 1 if family else 0
        self.dt = 0 if family else None
        self.dx = [off + i for i in range(d)]
        self.Dy = [off + d + i for i in range(d)]
        self.v = [off + 2 * d + a for a in range(r)]
        self.n_odd = off + 2 * d + r

        self.dx_mask = sum(1 << b for b in self.dx)
        self.Dy_mask = sum(1 << b for b in self.Dy)
        self.v_mask = sum(1 << b for b in self.v)
        self.dt_mask = (1 << self.dt) if family else 0
        self.wt_mask = self.v_mask | self.Dy_mask
        self.y_slice = slice(self.nbase, self.nbase + d)
        self.Dv_slice = slice(self.nbase + d, self.nbase + d + r)

        names = [f"x{i + 1}" for i in range(d)] + (["t"] if family else [])
        names += [f"y{i + 1}" for i in range(d)] + [f"Dv{a + 1}" for a in range(r)]
        self.even_names = names
        onames = (["dt"] if family else []) + [f"dx{i + 1}" for i in range(d)]
        onames += [f"Dy{i + 1}" for i in range(d)] + [f"v{a + 1}" for a in range(r)]
        self.odd_names = onames
        self.zero_exps = (0,) * self.n_even

    def __eq__(self, other):
        return isinstance(other, Layout) and (self.d, self.r, self.family) == (other.d, other.r, other.family)

    def __hash__(self):
        return hash((self.d, self.r, self.family))

    def __repr__(self):
        return f"Layout(d={self.d}, r={self.r}, family={self.family})"

    # variable handles ---------------------------------------------------
    def E(self, k: int) -> Tuple[str, int]:
        return ("e", k)

    def O(self, j: int) -> Tuple[str, int]:
        return ("o", j)

    def variables(self) -> List[Tuple[str, int]]:
        return [("e", k) for k in range(self.n_even)] + [("o", j) for j in range(self.n_odd)]

    def var_name(self, var) -> str:
        kind, k = var
        return self.even_names[k] if kind == "e" else self.odd_names[k]

    def var_parity(self, var) -> int:
        return 1 if var[0] == "o" else 0

    # degree counters ----------------------------------------------------
    def n_dx(self, mask: int) -> int:
        return (mask & self.dx_mask).bit_count()

    def n_Dy(self, mask: int) -> int:
        return (mask & self.Dy_mask).bit_count()

    def n_v(self, mask: int) -> int:
        return (mask & self.v_mask).bit_count()

    def n_y(self, exps) -> int:
        return sum(exps[self.y_slice])

    def n_Dv(self, exps) -> int:
        return sum(exps[self.Dv_slice])

    def weight(self, mask: int, exps) -> int:
        """#y + #v + #Dy + #Dv: raised by n-1 by every label-n differential component."""
        return (mask & self.wt_mask).bit_count() + sum(exps[self.nbase:])

    def var_weight(self, var) -> int:
        kind, k = var
        if kind == "e":
            return 1 if k >= self.nbase else 0
        return 1 if (self.wt_mask >> k) & 1 else 0

    def weighted_terms(self, e: "Element"):
        """Terms of ``e`` as (weight, mask, exps, coeff), sorted by weight."""
        w = self.weight
        return sorted(((w(m, ex), m, ex, c) for (m, ex), c in e.terms.items()), key=lambda t: t[0])

    def kahler_degree(self, mask: int, exps) -> int:
        return self.n_Dy(mask) + self.n_Dv(exps)

    # element constructors ----------------------------------------------
    def zero(self) -> "Element":
        return Element(self)

    def one(self) -> "Element":
        return self.const(1)

    def const(self, c) -> "Element":
        return Element(self, {(0, self.zero_exps): Fraction(c)})

    def gen(self, var) -> "Element":
        kind, k = var
        if kind == "e":
            e = [0] * self.n_even
            e[k] = 1
            return Element(self, {(0, tuple(e)): _ONE})
        return Element(self, {(1 << k, self.zero_exps): _ONE})

    def X(self, i):
        return self.gen(("e", self.x[i]))

    def Y(self, i):
        return self.gen(("e", self.y[i]))

    def DX(self, i):
        return self.gen(("o", self.dx[i]))

    def DY(self, i):
        return self.gen(("o", self.Dy[i]))

    def V(self, a):
        return self.gen(("o", self.v[a]))

    def DV(self, a):
        return self.gen(("e", self.Dv[a]))

    def T(self):
        return self.gen(("e", self.t))

    def DT(self):
        return self.gen(("o", self.dt))

    def from_poly(self, p: Poly) -> "Element":
        """Embed a base polynomial (in x, or in x and t for family charts)."""
        if p.nvars != self.nbase:
            if p.nvars == self.d and self.family:
                pad = (0,)
            else:
                raise ValueError(f"polynomial has {p.nvars} variables, chart base has {self.nbase}")
        else:
            pad = ()
        fib = (0,) * (self.n_even - self.nbase)
        return Element(self, {(0, tuple(e) + pad + fib): c for e, c in p.terms.items()})


class Element:
    """Sparse exact element; immutable by convention once handed out."""

    __slots__ = ("L", "terms")

    def __init__(self, layout: Layout, terms: Dict[Key, Fraction] | None = None):
        self.L = layout
        self.terms: Dict[Key, Fraction] = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = c if isinstance(c, Fraction) else Fraction(c)

    @classmethod
    def _raw(cls, layout, terms):
        e = cls.__new__(cls)
        e.L = layout
        e.terms = terms
        return e

    # basic protocol ------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Key, Fraction]]:
        return iter(self.terms.items())

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.L == other.L and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.L.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _check(self, other: "Element"):
        if other.L is not self.L and other.L != self.L:
            raise ValueError(f"mismatched chart/bundle dimensions: {self.L} vs {other.L}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Element):
            other = self.L.const(other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v += c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Element._raw(self.L, out)

    __radd__ = __add__

    def iadd(self, other: "Element", scale: Fraction = _ONE) -> "Element":
        """In-place accumulation; only for freshly built private elements."""
        out = self.terms
        for k, c in other.terms.items():
            v = out.get(k, 0) + c * scale
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self

    def __neg__(self):
        return Element._raw(self.L, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Element):
            other = self.L.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Element":
        c = Fraction(c)
        if not c:
            return Element(self.L)
        return Element._raw(self.L, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            if isinstance(other, Poly):
                other = self.L.from_poly(other)
            else:
                return self.scale(other)
        return self.mul(other)

    def mul(self, other: "Element", keep: Keep = None, wmax: Optional[int] = None) -> "Element":
        """Graded product, optionally dropping result terms rejected by ``keep``
        or of weight above ``wmax``."""
        self._check(other)
        if wmax is not None:
            return self._mul_capped(other, keep, wmax)
        out: Dict[Key, Fraction] = {}
        for (m1, e1), c1 in self.terms.items():
            for (m2, e2), c2 in other.terms.items():
                if m1 & m2:
                    continue
                k = (m1 | m2, tuple(a + b for a, b in zip(e1, e2)))
                if keep is not None and not keep(*k):
                    continue
                c = c1 * c2
                if _merge_sign(m1, m2) < 0:
                    c = -c
                v = out.get(k)
                if v is None:
                    out[k] = c
                else:
                    v += c
                    if v:
                        out[k] = v
                    else:
                        del out[k]
        return Element._raw(self.L, out)

    def _mul_capped(self, other: "Element", keep: Keep, wmax: int) -> "Element":
        L = self.L
        right = L.weighted_terms(other)
        out: Dict[Key, Fraction] = {}
        for w1, m1, e1, c1 in L.weighted_terms(self):
            room = wmax - w1
            if room < 0:
                break
            for w2, m2, e2, c2 in right:
                if w2 > room:
                    break
                if m1 & m2:
                    continue
                k = (m1 | m2, tuple(a + b for a, b in zip(e1, e2)))
                if keep is not None and not keep(*k):
                    continue
                c = c1 * c2
                if _merge_sign(m1, m2) < 0:
                    c = -c
                v = out.get(k, 0) + c
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Element._raw(L, out)

    def __rmul__(self, other):
        if isinstance(other, Poly):
            return self.L.from_poly(other) * self
        return self.scale(other)

    def __pow__(self, n: int):
        out = self.L.one()
        for _ in range(n):
            out = out * self
        return out

    # grading --------------------------------------------------------------
    def filter(self, keep: Callable[[int, Tuple[int, ...]], bool]) -> "Element":
        return Element._raw(self.L, {k: c for k, c in self.terms.items() if keep(*k)})

    def parity_parts(self) -> Dict[int, "Element"]:
        out: Dict[int, Dict[Key, Fraction]] = {0: {}, 1: {}}
        for k, c in self.terms.items():
            out[k[0].bit_count() & 1][k] = c
        return {p: Element._raw(self.L, t) for p, t in out.items() if t}

    def parity(self) -> int:
        """Parity of a homogeneous element (0 for zero); raises on mixed parity."""
        ps = {k[0].bit_count() & 1 for k in self.terms}
        if len(ps) > 1:
            raise ValueError("element is not parity-homogeneous")
        return ps.pop() if ps else 0

    def bidegree_part(self, p: int, q: int) -> "Element":
        L = self.L
        return self.filter(lambda m, e: L.n_dx(m) == p and L.n_y(e) == q)

    def bidegrees(self) -> set:
        L = self.L
        return {(L.n_dx(m), L.n_y(e)) for (m, e) in self.terms}

    def max_weight(self) -> int:
        L = self.L
        return max((L.weight(m, e) for (m, e) in self.terms), default=-1)

    def truncate_weight(self, wmax: int) -> "Element":
        L = self.L
        return self.filter(lambda m, e: L.weight(m, e) <= wmax)

    def y_free(self) -> "Element":
        L = self.L
        return self.filter(lambda m, e: L.n_y(e) == 0)

    def coefficient(self, mask: int, fiber_exps: Tuple[int, ...]) -> Poly:
        """Base-polynomial coefficient of a fiber monomial (fiber = non-base even exps)."""
        L = self.L
        out = {}
        for (m, e), c in self.terms.items():
            if m == mask and e[L.nbase:] == fiber_exps:
                out[e[: L.nbase]] = c
        return Poly(L.nbase, out)

    def by_fiber(self) -> Dict[Key, Poly]:
        """Group terms by (odd mask, fiber exponents) with base-polynomial coefficients."""
        L = self.L
        groups: Dict[Key, Dict] = {}
        for (m, e), c in self.terms.items():
            groups.setdefault((m, e[L.nbase:]), {})[e[: L.nbase]] = c
        return {k: Poly(L.nbase, v) for k, v in groups.items()}

    def is_base(self) -> bool:
        L = self.L
        return all(m == 0 and not any(e[L.nbase:]) for (m, e) in self.terms)

    def to_poly(self) -> Poly:
        if not self.is_base():
            raise ValueError("element has fiber generators")
        return Poly(self.L.nbase, {e[: self.L.nbase]: c for (m, e), c in self.terms.items()})

    # derivatives ------------------------------------------------------------
    def deriv_left(self, var) -> "Element":
        kind, k = var
        out: Dict[Key, Fraction] = {}
        if kind == "e":
            for (m, e), c in self.terms.items():
                n = e[k]
                if n:
                    e2 = list(e)
                    e2[k] = n - 1
                    out[(m, tuple(e2))] = c * n
        else:
            bit = 1 << k
            below = bit - 1
            for (m, e), c in self.terms.items():
                if m & bit:
                    out[(m ^ bit, e)] = -c if (m & below).bit_count() & 1 else c
        return Element._raw(self.L, out)

    def deriv_right(self, var) -> "Element":
        kind, k = var
        if kind == "e":
            return self.deriv_left(var)
        bit = 1 << k
        above = ~((bit << 1) - 1)
        out: Dict[Key, Fraction] = {}
        for (m, e), c in self.terms.items():
            if m & bit:
                out[(m ^ bit, e)] = -c if (m & above).bit_count() & 1 else c
        return Element._raw(self.L, out)

    def set_zero(self, var) -> "Element":
        kind, k = var
        if kind == "e":
            return self.filter(lambda m, e: e[k] == 0)
        bit = 1 << k
        return self.filter(lambda m, e: not (m & bit))

    # printing ------------------------------------------------------------
    def fiber_monomial_str(self, mask: int, fib: Tuple[int, ...]) -> str:
        L = self.L
        parts = []
        order = []  # canonical printing order: dt, dx, y, Dy, v, Dv
        if L.family:
            order.append(("o", L.dt))
        order += [("o", b) for b in L.dx] + [("e", k) for k in L.y]
        order += [("o", b) for b in L.Dy] + [("o", b) for b in L.v] + [("e", k) for k in L.Dv]
        for kind, k in order:
            if kind == "o":
                if mask >> k & 1:
                    parts.append(L.odd_names[k])
            else:
                n = fib[k - L.nbase]
                if n == 1:
                    parts.append(L.even_names[k])
                elif n > 1:
                    parts.append(f"{L.even_names[k]}^{n}")
        return "*".join(parts)

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        L = self.L
        groups = self.by_fiber()

        def sort_key(item):
            (m, fib), _ = item
            return (L.weight(m, (0,) * L.nbase + fib), L.n_dx(m), m, fib)

        chunks = []
        for (m, fib), poly in sorted(groups.items(), key=sort_key):
            mono = self.fiber_monomial_str(m, fib)
            ps = format_poly(poly, L.even_names[: L.nbase])
            if not mono:
                chunks.append(f"({ps})" if len(poly.terms) > 1 else ps)
                continue
            if ps == "1":
                chunks.append(mono)
            elif ps == "-1":
                chunks.append("-" + mono)
            elif len(poly.terms) == 1 and " " not in ps:
                chunks.append(f"{ps}*{mono}")
            else:
                chunks.append(f"({ps})*{mono}")
        s = chunks[0]
        for c in chunks[1:]:
            s += " - " + c[1:] if c.startswith("-") else " + " + c
        return s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Element({self.to_str()!r})"


def elem_sum(layout: Layout, items: Iterable[Element]) -> Element:
    out = Element(layout)
    for it in items:
        out.iadd(it)
    return out


class Derivation:
    """Graded derivation given by its images on generators.

    ``images`` maps a variable handle ``("e", k)`` / ``("o", j)`` to an Element;
    absent variables are sent to zero.  The images of the base coordinates
    carry the exterior-derivative action (``x^i -> dx^i``) when present.
    """

    __slots__ = ("L", "parity", "images", "name")

    def __init__(self, layout: Layout, parity: int, images: Dict | None = None, name: str = ""):
        self.L = layout
        self.parity = parity & 1
        self.images = {k: v for k, v in (images or {}).items() if v}
        self.name = name

    def image(self, var) -> Element:
        return self.images.get(var) or Element(self.L)

    def has_base_action(self) -> bool:
        return any(k[0] == "e" and k[1] < self.L.nbase for k in self.images)

    def __call__(self, e: Element, keep: Keep = None, wmax: Optional[int] = None) -> Element:
        return self.apply(e, keep, wmax)

    def apply(self, e: Element, keep: Keep = None, wmax: Optional[int] = None) -> Element:
        """D(m) = sum over generators g of D(g) * (left derivative of m by g).

        ``keep`` filters result terms; ``wmax`` drops results of higher weight
        without forming them.
        """
        L = self.L
        if e.L != L:
            raise ValueError(f"mismatched chart/bundle dimensions: {e.L} vs {L}")
        out: Dict[Key, Fraction] = {}
        ims = self.images
        if wmax is None:
            prep = lambda var: ims[var]  # noqa: E731
        else:
            prep = lambda var: (L.var_weight(var), L.weighted_terms(ims[var]))  # noqa: E731
        even_ims = [(k, prep(("e", k))) for k in range(L.n_even) if ("e", k) in ims]
        odd_ims = [(j, prep(("o", j))) for j in range(L.n_odd) if ("o", j) in ims]
        acc = _accumulate if wmax is None else _accumulate_capped
        for (m, ex), c in e.terms.items():
            room = None if wmax is None else wmax - L.weight(m, ex)
            for k, img in even_ims:
                n = ex[k]
                if not n:
                    continue
                e2 = list(ex)
                e2[k] = n - 1
                acc(out, img, m, tuple(e2), c * n, keep, room)
            for j, img in odd_ims:
                bit = 1 << j
                if not (m & bit):
                    continue
                cc = -c if (m & (bit - 1)).bit_count() & 1 else c
                acc(out, img, m ^ bit, ex, cc, keep, room)
        return Element._raw(L, out)

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.parity != self.parity:
            raise ValueError("cannot add derivations of different parity")
        ims = dict(self.images)
        for k, v in other.images.items():
            ims[k] = ims[k] + v if k in ims else v
        return Derivation(self.L, self.parity, ims)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + other.scale(-1)

    def scale(self, c) -> "Derivation":
        return Derivation(self.L, self.parity, {k: v.scale(c) for k, v in self.images.items()})

    def restrict(self, vars_: Iterable) -> "Derivation":
        keep = set(vars_)
        return Derivation(self.L, self.parity, {k: v for k, v in self.images.items() if k in keep})

    def map_images(self, f: Callable[[Element], Element]) -> "Derivation":
        return Derivation(self.L, self.parity, {k: f(v) for k, v in self.images.items()})

    def is_zero(self) -> bool:
        return not self.images

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.parity == other.parity and self.images == other.images

    def __repr__(self):
        body = ", ".join(f"{self.L.var_name(k)} -> {v}" for k, v in sorted(self.images.items()))
        return f"Derivation(parity={self.parity}, {{{body}}})"


def _accumulate_capped(out, img, m: int, ex, c: Fraction, keep: Keep, room: int):
    """As :func:`_accumulate` for a weight-sorted image; ``room`` is the weight
    budget left by the monomial before the generator was removed."""
    gen_w, terms = img
    room += gen_w
    for w1, m1, e1, c1 in terms:
        if w1 > room:
            break
        if m1 & m:
            continue
        k = (m1 | m, tuple(a + b for a, b in zip(e1, ex)))
        if keep is not None and not keep(*k):
            continue
        v = c1 * c
        if _merge_sign(m1, m) < 0:
            v = -v
        w = out.get(k, 0) + v
        if w:
            out[k] = w
        else:
            out.pop(k, None)


def _accumulate(out, img: Element, m: int, ex, c: Fraction, keep: Keep, room=None):
    """out += c * img * monomial(m, ex), image placed on the left."""
    for (m1, e1), c1 in img.terms.items():
        if m1 & m:
            continue
        k = (m1 | m, tuple(a + b for a, b in zip(e1, ex)))
        if keep is not None and not keep(*k):
            continue
        v = c1 * c
        if _merge_sign(m1, m) < 0:
            v = -v
        w = out.get(k)
        if w is None:
            out[k] = v
        else:
            w += v
            if w:
                out[k] = w
            else:
                del out[k]


def commutator(D1: Derivation, D2: Derivation, keep: Keep = None,
               on: Iterable | None = None) -> Derivation:
    """[D1, D2] = D1 D2 - (-1)^{|D1||D2|} D2 D1, stored through generator images."""
    L = D1.L
    sign = -1 if (D1.parity & D2.parity) else 1
    ims = {}
    for var in (on if on is not None else L.variables()):
        a = D1.apply(D2.image(var), keep)
        b = D2.apply(D1.image(var), keep)
        img = a - b if sign > 0 else a + b
        if img:
            ims[var] = img
    return Derivation(L, D1.parity ^ D2.parity, ims)


def commutator_on(D1: Derivation, D2: Derivation, var, keep: Keep = None) -> Element:
    """[D1, D2](g) for a single generator g."""
    a = D1.apply(D2.image(var), keep)
    b = D2.apply(D1.image(var), keep)
    return a + b if (D1.parity & D2.parity) else a - b


# the Koszul pair -----------------------------------------------------------

def delta(L: Layout) -> Derivation:
    """y^i -> dx^i; no action on the base ring."""
    return Derivation(L, 1, {("e", L.y[i]): L.DX(i) for i in range(L.d)}, name="delta")


def apply_delta(e: Element) -> Element:
    return delta(e.L).apply(e)


def delta_inv(e: Element) -> Element:
    """Contraction homotopy: on a term with p dx-factors and q y-factors,
    (1/(p+q)) * sum_i y^i * (left derivative by dx^i); zero when p + q = 0.

    The y-count ignores v, Dy and Dv factors.
    """
    L = e.L
    out: Dict[Key, Fraction] = {}
    for (m, ex), c in e.terms.items():
        if not (m & L.dx_mask):
            continue
        p = L.n_dx(m)
        q = L.n_y(ex)
        base = c / (p + q)
        for i in range(L.d):
            bit = 1 << L.dx[i]
            if not (m & bit):
                continue
            cc = -base if (m & (bit - 1)).bit_count() & 1 else base
            e2 = list(ex)
            e2[L.y[i]] += 1
            k = (m ^ bit, tuple(e2))
            v = out.get(k, 0) + cc
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return Element._raw(L, out)


def de_rham(L: Layout) -> Derivation:
    """Kähler differential relative to the base forms: y -> Dy, v -> Dv.

    Base coefficients and dx (and t, dt) are constants for this derivation.
    """
    ims = {("e", L.y[i]): L.DY(i) for i in range(L.d)}
    ims.update({("o", L.v[a]): L.DV(a) for a in range(L.r)})
    return Derivation(L, 1, ims, name="dDR")


def exterior_base(L: Layout) -> Derivation:
    """The chart de Rham differential on coefficients: x^i -> dx^i."""
    return Derivation(L, 1, {("e", L.x[i]): L.DX(i) for i in range(L.d)}, name="dM")


def lift_to_forms(D: Derivation) -> Derivation:
    """Extend an odd derivation on C*(g) to Kähler forms so that it anticommutes
    with the de Rham derivation: D(Dg) = -dDR(D(g)) for g among y, v."""
    if D.parity != 1:
        raise ValueError("only odd derivations are lifted")
    L = D.L
    dr = de_rham(L)
    ims = dict(D.images)
    for i in range(L.d):
        img = D.images.get(("e", L.y[i]))
        if img:
            ims[("o", L.Dy[i])] = -dr.apply(img)
    for a in range(L.r):
        img = D.images.get(("o", L.v[a]))
        if img:
            ims[("e", L.Dv[a])] = -dr.apply(img)
    return Derivation(L, 1, ims, name=D.name)
