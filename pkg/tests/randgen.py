"""Seeded random elements for property tests (stdlib RNG only)."""

import random
from fractions import Fraction

from linfgeom.algebra import Element, Layout


def random_coeff(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6) or 1, rng.randint(1, 4))


def random_monomial(rng: random.Random, L: Layout, max_exp: int = 2, p: int = None, q: int = None):
    """A random (mask, exps).  With ``p``/``q`` given the term has exactly p
    dx factors and q y factors."""
    mask = 0
    for j in range(L.n_odd):
        if j in L.dx and p is not None:
            continue
        if rng.random() < 0.3:
            mask |= 1 << j
    if p is not None:
        for j in rng.sample(L.dx, p):
            mask |= 1 << j
    exps = [0] * L.n_even
    for k in range(L.n_even):
        if k in L.y and q is not None:
            continue
        if rng.random() < 0.4:
            exps[k] = rng.randint(1, max_exp)
    if q is not None:
        for _ in range(q):
            exps[rng.choice(L.y)] += 1
    return mask, tuple(exps)


def random_element(rng: random.Random, L: Layout, nterms: int = 4, p: int = None, q: int = None) -> Element:
    terms = {}
    for _ in range(nterms):
        k = random_monomial(rng, L, p=p, q=q)
        terms[k] = terms.get(k, 0) + random_coeff(rng)
    return Element(L, {k: c for k, c in terms.items() if c})


def random_bihomogeneous(rng: random.Random, L: Layout) -> Element:
    while True:
        p, q = rng.randint(0, L.d), rng.randint(0, 3)
        if p + q:
            return random_element(rng, L, nterms=rng.randint(1, 4), p=p, q=q)
