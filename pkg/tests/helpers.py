"""Independent oracles and random generators shared by the test modules.

Nothing here touches the Groebner engine: membership is decided by plain
linear algebra on bounded-degree multiples of the generators (a Macaulay
matrix), and expansion by repeated multiplication of term maps.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import gmpy2

from lndkit import PolyRing, Polynomial


def monomials_up_to(nvars: int, degree: int):
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield tuple(e)


def random_poly(rng: random.Random, ring: PolyRing, degree: int, terms: int = 4, coeff: int = 5, rational: bool = False) -> Polynomial:
    monos = list(monomials_up_to(ring.nvars, degree))
    out = {}
    for _ in range(rng.randint(0, terms)):
        c = Fraction(rng.randint(-coeff, coeff))
        if rational and rng.random() < 0.3:
            c /= rng.randint(1, 4)
        out[rng.choice(monos)] = c
    return Polynomial(ring, out)


def term_map_product(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def term_map_power(a: dict, e: int, nvars: int) -> dict:
    out = {(0,) * nvars: 1}
    for _ in range(e):
        out = term_map_product(out, a)
    return out


class MacaulayOracle:
    """Decides ``p in (gens)`` among combinations ``sum h_i g_i`` with ``deg(h_i g_i) <= bound``.

    Row echelon form of the span of all shifted generators, with exact
    rationals; membership is reduction of ``p`` against the echelon rows.
    """

    def __init__(self, gens, bound: int):
        self.bound = bound
        nvars = gens[0].ring.nvars
        pivots: dict = {}
        self.order = {m: i for i, m in enumerate(sorted(monomials_up_to(nvars, bound), key=lambda m: (sum(m), m)))}
        for g in gens:
            dg = g.total_degree()
            if dg < 0 or dg > bound:
                continue
            for shift in monomials_up_to(nvars, bound - dg):
                row = {
                    self.order[tuple(a + b for a, b in zip(m, shift))]: gmpy2.mpq(c.numerator, c.denominator)
                    for m, c in g.terms.items()
                }
                self._insert(row, pivots)
        self.pivots = pivots

    @staticmethod
    def _reduce(row: dict, pivots: dict) -> dict:
        while row:
            top = max(row)
            piv = pivots.get(top)
            if piv is None:
                return row
            f = row[top]
            for k, v in piv.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def _insert(self, row: dict, pivots: dict):
        row = self._reduce(row, pivots)
        if row:
            top = max(row)
            inv = 1 / row[top]
            pivots[top] = {k: v * inv for k, v in row.items()}

    def contains(self, p: Polynomial) -> bool:
        if p.total_degree() > self.bound:
            raise ValueError("polynomial exceeds the oracle degree bound")
        row = {self.order[m]: gmpy2.mpq(c.numerator, c.denominator) for m, c in p.terms.items()}
        return not self._reduce(row, self.pivots)


def random_ideal_case(rng: random.Random, ring: PolyRing):
    """Random ideal (<= 3 generators, degree <= 3) and test polynomials, half of them members by construction."""
    k = rng.randint(1, 3)
    style = rng.choice(["generic", "origin", "common"])
    gens = []
    common = random_poly(rng, ring, 1, terms=2, coeff=3)
    for _ in range(k):
        deg = rng.randint(1, 3)
        g = random_poly(rng, ring, deg, terms=rng.randint(1, 4), coeff=4)
        if style == "origin":
            g = g - g.constant_coefficient()
        elif style == "common" and not common.is_constant and deg > 1:
            g = random_poly(rng, ring, deg - 1, terms=3, coeff=4) * common
        if not g.is_zero:
            gens.append(g)
    if not gens:
        gens = [ring.var(ring.variables[0])]
    tests = []
    for _ in range(3):
        combo = ring.zero()
        for g in gens:
            combo = combo + random_poly(rng, ring, rng.randint(0, 2), terms=3, coeff=3) * g
        tests.append(combo)
        other = ring.zero()
        while other.is_zero:
            other = random_poly(rng, ring, rng.randint(1, 4), terms=4, coeff=5)
        tests.append(other)
    return gens, tests
