"""Buchberger's algorithm and the ideal computations built on it.

Everything here works over Q with exact arithmetic.  The engine keeps
basis elements monic and reduces S-polynomials fully; pairs are taken by
smallest lcm degree (ties broken by pair index) and pruned with the coprime
and chain criteria, so the reduced basis is a deterministic function of the
generators and the order.

Elimination uses block orders (eliminated block first, grevlex inside each
block), and ring-map kernels, subalgebra membership and localized subalgebra
membership all go through the graph ideal ``tag_i - image_i``.
"""

from __future__ import annotations

import contextlib
import contextvars
import heapq
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from .poly import GREVLEX, Monomial, MonomialOrder, PolyRing, Polynomial, RingMismatchError

DEFAULT_STEP_BUDGET = 10**6

_step_budget: contextvars.ContextVar[int] = contextvars.ContextVar(
    "lnd_step_budget", default=DEFAULT_STEP_BUDGET
)


class BudgetExceededError(RuntimeError):
    """The Groebner computation hit its configured step budget."""


@contextlib.contextmanager
def step_budget(limit: int) -> Iterator[int]:
    """Cap the number of S-polynomial reductions per Groebner computation."""
    if limit <= 0:
        raise ValueError("step budget must be positive")
    token = _step_budget.set(limit)
    try:
        yield limit
    finally:
        _step_budget.reset(token)


def current_step_budget() -> int:
    return _step_budget.get()


def budget_from_env(default: int = DEFAULT_STEP_BUDGET) -> int:
    raw = os.environ.get("LND_STEP_BUDGET")
    if not raw:
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError("LND_STEP_BUDGET must be positive")
    return value


# ---------------------------------------------------------------------------
# engine on raw term dicts


class _Element:
    __slots__ = ("lm", "tail", "deg")

    def __init__(self, lm: Monomial, tail: List[Tuple[Monomial, Fraction]]):
        self.lm = lm
        self.tail = tail
        self.deg = sum(lm)


class _Engine:
    """Reduction machinery for one ring/order; caches negated order keys."""

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self._key = ring.sort_key
        self._neg: Dict[Monomial, tuple] = {}

    def nkey(self, m: Monomial) -> tuple:
        k = self._neg.get(m)
        if k is None:
            k = tuple(-x for x in self._key(m))
            self._neg[m] = k
        return k

    def element(self, terms: Mapping[Monomial, Fraction]) -> _Element:
        """Monic basis element from a nonzero term dict."""
        ordered = sorted(terms.items(), key=lambda kv: self.nkey(kv[0]))
        lm, lc = ordered[0]
        inv = 1 / lc
        tail = [(m, c * inv) for m, c in ordered[1:]]
        return _Element(lm, tail)

    @staticmethod
    def find_reducer(m: Monomial, basis: Sequence[_Element]) -> _Element | None:
        for g in basis:
            for a, b in zip(m, g.lm):
                if a < b:
                    break
            else:
                return g
        return None

    def reduce(
        self, p: Dict[Monomial, Fraction], basis: Sequence[_Element], full: bool = True
    ) -> Dict[Monomial, Fraction]:
        """Normal form of ``p`` (consumed) with respect to ``basis``."""
        nkey = self.nkey
        heap = [(nkey(m), m) for m in p]
        heapq.heapify(heap)
        rem: Dict[Monomial, Fraction] = {}
        find = self.find_reducer
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            g = find(m, basis)
            if g is None:
                rem[m] = c
                if not full:
                    rem.update(p)
                    return rem
                continue
            shift = tuple(a - b for a, b in zip(m, g.lm))
            for gm, gc in g.tail:
                nm = tuple(a + b for a, b in zip(gm, shift))
                v = p.get(nm)
                if v is None:
                    p[nm] = -c * gc
                    heapq.heappush(heap, (nkey(nm), nm))
                else:
                    v -= c * gc
                    if v:
                        p[nm] = v
                    else:
                        del p[nm]
        return rem

    def spoly(self, f: _Element, g: _Element) -> Dict[Monomial, Fraction]:
        lcm = tuple(max(a, b) for a, b in zip(f.lm, g.lm))
        sf = tuple(a - b for a, b in zip(lcm, f.lm))
        sg = tuple(a - b for a, b in zip(lcm, g.lm))
        out: Dict[Monomial, Fraction] = {}
        for m, c in f.tail:
            out[tuple(a + b for a, b in zip(m, sf))] = c
        for m, c in g.tail:
            nm = tuple(a + b for a, b in zip(m, sg))
            v = out.get(nm, 0) - c
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
        return out

    def buchberger(self, gens: Iterable[Dict[Monomial, Fraction]], budget: int) -> List[_Element]:
        basis: List[_Element] = []
        pending: set[tuple[int, int]] = set()
        queue: list[tuple[int, int, int]] = []

        def add(el: _Element):
            k = len(basis)
            basis.append(el)
            for i in range(k):
                lcm_deg = sum(max(a, b) for a, b in zip(basis[i].lm, el.lm))
                pending.add((i, k))
                heapq.heappush(queue, (lcm_deg, i, k))

        seen = set()
        for terms in gens:
            if not terms:
                continue
            el = self.element(terms)
            sig = (el.lm, tuple(el.tail))
            if sig in seen:
                continue
            seen.add(sig)
            if not any(el.lm):
                return [_Element(el.lm, [])]
            add(el)

        steps = 0
        while queue:
            _, i, j = heapq.heappop(queue)
            pending.discard((i, j))
            fi, fj = basis[i], basis[j]
            lcm = tuple(max(a, b) for a, b in zip(fi.lm, fj.lm))
            if all(a == 0 or b == 0 for a, b in zip(fi.lm, fj.lm)):
                continue
            if self._chain(i, j, lcm, basis, pending):
                continue
            steps += 1
            if steps > budget:
                raise BudgetExceededError(
                    f"Groebner step budget of {budget} pair reductions exhausted"
                )
            r = self.reduce(self.spoly(fi, fj), basis)
            if r:
                el = self.element(r)
                if not any(el.lm):
                    return [_Element(el.lm, [])]
                add(el)
        return self.interreduce(basis)

    @staticmethod
    def _chain(i, j, lcm, basis, pending) -> bool:
        for k, g in enumerate(basis):
            if k == i or k == j:
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            if all(a >= b for a, b in zip(lcm, g.lm)):
                return True
        return False

    def interreduce(self, basis: List[_Element]) -> List[_Element]:
        keep: List[_Element] = []
        for idx, g in enumerate(basis):
            redundant = False
            for jdx, h in enumerate(basis):
                if jdx == idx:
                    continue
                if all(a >= b for a, b in zip(g.lm, h.lm)) and (g.lm != h.lm or jdx < idx):
                    redundant = True
                    break
            if not redundant:
                keep.append(g)
        out = []
        for g in keep:
            others = [h for h in keep if h is not g]
            tail = self.reduce(dict(g.tail), others)
            tail_sorted = sorted(tail.items(), key=lambda kv: self.nkey(kv[0]))
            out.append(_Element(g.lm, tail_sorted))
        out.sort(key=lambda g: self.nkey(g.lm))
        return out

    def to_poly(self, el: _Element) -> Polynomial:
        terms = {el.lm: Fraction(1)}
        terms.update(el.tail)
        return Polynomial._raw(self.ring, terms)


# ---------------------------------------------------------------------------
# public types


class Ideal:
    """Ideal of a polynomial ring given by generators; zero generators dropped.

    The zero ideal has an empty generator tuple.
    """

    def __init__(self, ring: PolyRing, generators: Iterable[Polynomial]):
        gens = []
        for g in generators:
            if g.ring.variables != ring.variables:
                raise RingMismatchError(f"generator {g} is not in {ring}")
            g = g.change_ring(ring)
            if not g.is_zero:
                gens.append(g)
        self.ring = ring
        self.generators: Tuple[Polynomial, ...] = tuple(gens)
        self._gb: Dict[MonomialOrder, GroebnerBasis] = {}

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def groebner(self, order: MonomialOrder | None = None) -> GroebnerBasis:
        order = order or self.ring.order
        gb = self._gb.get(order)
        if gb is None:
            gb = buchberger(self, order)
            self._gb[order] = gb
        return gb

    def contains(self, p: Polynomial) -> bool:
        return ideal_membership(p, self)

    def __contains__(self, p: Polynomial) -> bool:
        return self.contains(p)

    def is_unit(self) -> bool:
        return self.groebner().is_unit

    def same_as(self, other: Ideal) -> bool:
        """Equality of ideals via reduced Groebner bases in this ring's order."""
        if other.ring.variables != self.ring.variables:
            return False
        other = Ideal(self.ring, other.generators)
        return self.groebner().basis == other.groebner().basis

    def __add__(self, other: Ideal) -> Ideal:
        return Ideal(self.ring, self.generators + tuple(g.change_ring(self.ring) for g in other.generators))

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.generators)) or '0'})"


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced, monic Groebner basis; ``basis`` is sorted by descending lead."""

    ideal: Ideal
    order: MonomialOrder
    basis: Tuple[Polynomial, ...]
    ring: PolyRing = field(repr=False)
    _elements: tuple = field(repr=False, compare=False)
    _engine: _Engine = field(repr=False, compare=False)

    @property
    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant

    @property
    def is_zero(self) -> bool:
        return not self.basis

    def _local(self, p: Polynomial) -> Polynomial:
        if p.ring.variables != self.ring.variables:
            raise RingMismatchError(f"{p.ring} vs {self.ring}")
        return p.change_ring(self.ring)

    def normal_form(self, p: Polynomial) -> Polynomial:
        p = self._local(p)
        rem = self._engine.reduce(dict(p.terms), self._elements)
        return Polynomial._raw(self.ring, rem)

    def contains(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero

    def leading_monomials(self) -> List[Monomial]:
        return [g.lm for g in self._elements]


def buchberger(ideal: Ideal, order: MonomialOrder | None = None, budget: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of ``ideal`` under ``order`` (default: the ring's).

    Raises :class:`BudgetExceededError` after ``budget`` S-pair reductions
    (default: the active :func:`step_budget`).
    """
    order = order or ideal.ring.order
    ring = ideal.ring.with_order(order)
    engine = _Engine(ring)
    gens = [dict(g.change_ring(ring).terms) for g in ideal.generators]
    elements = engine.buchberger(gens, budget if budget is not None else _step_budget.get())
    basis = tuple(engine.to_poly(el) for el in elements)
    return GroebnerBasis(ideal, order, basis, ring, tuple(elements), engine)


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    return gb.normal_form(p)


def ideal_membership(p: Polynomial, ideal: Ideal) -> bool:
    if p.ring.variables != ideal.ring.variables:
        raise RingMismatchError(f"{p.ring} vs {ideal.ring}")
    if p.is_zero:
        return True
    if ideal.is_zero:
        return False
    return ideal.groebner().contains(p)


# ---------------------------------------------------------------------------
# elimination and ring maps


def _block_ring(first: Sequence[str], second: Sequence[str]) -> PolyRing:
    names = tuple(first) + tuple(second)
    if first and second:
        return PolyRing(names, MonomialOrder("grevlex", blocks=(len(first), len(second))))
    return PolyRing(names, GREVLEX)


def _restricted(polys: Iterable[Polynomial], names: Sequence[str], ring: PolyRing) -> List[Polynomial]:
    idx = [i for i, v in enumerate(ring.variables) if v not in names]
    out = []
    for g in polys:
        if all(not m[i] for m in g.terms for i in idx):
            out.append(g)
    return out


def elimination_ideal(ideal: Ideal, keep: Sequence[str]) -> Ideal:
    """Generators of ``ideal`` intersected with k[keep] (reduced, grevlex)."""
    keep_set = set(keep)
    unknown = keep_set - set(ideal.ring.variables)
    if unknown:
        raise KeyError(f"unknown variables {sorted(unknown)}")
    if not keep_set:
        raise ValueError("keep at least one variable")
    kept = [v for v in ideal.ring.variables if v in keep_set]
    elim = [v for v in ideal.ring.variables if v not in keep_set]
    ering = _block_ring(elim, kept)
    gb = buchberger(Ideal(ering, [g.change_ring(ering) for g in ideal.generators]))
    sub = PolyRing(tuple(kept), GREVLEX)
    gens = [g.change_ring(sub) for g in _restricted(gb.basis, kept, ering)]
    return Ideal(sub, gens)


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    k = 0
    while name in taken:
        k += 1
        name = f"{base}_{k}"
    taken.add(name)
    return name


@dataclass(frozen=True)
class RingMap:
    """k-algebra map ``source -> target`` given by one image per source variable."""

    source: PolyRing
    target: PolyRing
    images: Tuple[Polynomial, ...]

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != self.source.nvars:
            raise ValueError("need exactly one image per source variable")
        conv = []
        for v, img in zip(self.source.variables, images):
            if img.ring.variables != self.target.variables:
                raise RingMismatchError(f"image of {v} is not in the target ring")
            conv.append(img.change_ring(self.target))
        object.__setattr__(self, "images", tuple(conv))

    @classmethod
    def from_dict(cls, source: PolyRing, target: PolyRing, images: Mapping[str, Polynomial]) -> RingMap:
        return cls(source, target, tuple(images[v] for v in source.variables))

    def __call__(self, p: Polynomial) -> Polynomial:
        return p.substitute(dict(zip(self.source.variables, self.images)), self.target)


class _GraphPresentation:
    """The graph ideal of ``tags -> images`` with target variables eliminated first.

    Images that are bare target variables are substituted away instead of
    kept as ``tag - var`` relations; this is the same quotient ring with
    fewer variables.  ``invert`` adjoins ``w`` with ``w * invert - 1``.
    """

    def __init__(
        self,
        target: PolyRing,
        images: Sequence[Polynomial],
        tag_names: Sequence[str],
        invert: Polynomial | None = None,
        extra: Sequence[Polynomial] = (),
    ):
        self.target = target
        taken = set(target.variables)
        self.tag_names = tuple(_fresh(t, taken) for t in tag_names)
        self.inverse_name = _fresh("w", taken) if invert is not None else None
        subst: Dict[str, str] = {}
        free: List[int] = []
        for i, img in enumerate(images):
            v = img.as_variable()
            if v is not None and v not in subst:
                subst[v] = self.tag_names[i]
            else:
                free.append(i)
        self.elim = [v for v in target.variables if v not in subst]
        self.tags = list(self.tag_names) + ([self.inverse_name] if invert is not None else [])
        self.ring = _block_ring(self.elim, self.tags)
        self._assign = {
            v: self.ring.var(subst[v]) if v in subst else self.ring.var(v) for v in target.variables
        }
        rels = [self.ring.var(self.tag_names[i]) - self.lift(images[i]) for i in free]
        if invert is not None:
            rels.append(self.ring.var(self.inverse_name) * self.lift(invert) - 1)
        rels.extend(self.lift(e) for e in extra)
        self.ideal = Ideal(self.ring, rels)
        self._gb: GroebnerBasis | None = None
        self.tag_ring = PolyRing(tuple(self.tags), GREVLEX)
        self._elim_idx = [self.ring.index(v) for v in self.elim]

    def lift(self, p: Polynomial) -> Polynomial:
        return p.substitute(self._assign, self.ring)

    @property
    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = buchberger(self.ideal)
        return self._gb

    def in_tags(self, p: Polynomial) -> bool:
        return all(not m[i] for m in p.terms for i in self._elim_idx)

    def kernel_generators(self) -> List[Polynomial]:
        return [g.change_ring(self.tag_ring) for g in self.gb.basis if self.in_tags(g)]

    def membership(self, p: Polynomial) -> "Membership":
        nf = self.gb.normal_form(self.lift(p))
        if self.in_tags(nf):
            return Membership(True, nf.change_ring(self.tag_ring))
        return Membership(False, None)


@dataclass(frozen=True)
class Membership:
    """Outcome of a subalgebra membership test; truthy iff a member."""

    member: bool
    witness: Polynomial | None = None

    def __bool__(self):
        return self.member


def ringmap_kernel(rmap: RingMap) -> Ideal:
    """Kernel of ``rmap`` as an ideal of the source ring (reduced grevlex basis)."""
    src = rmap.source
    pres = _GraphPresentation(rmap.target, rmap.images, src.variables)
    rename = dict(zip(pres.tag_names, src.variables))
    out_ring = PolyRing(src.variables, GREVLEX)
    gens = [
        g.substitute({t: out_ring.var(rename[t]) for t in pres.tag_ring.variables}, out_ring)
        for g in pres.kernel_generators()
    ]
    kernel = Ideal(out_ring, gens)
    if kernel.is_zero:
        return kernel
    return Ideal(out_ring, kernel.groebner().basis)


def _tag_names(n: int) -> List[str]:
    return [f"T{i + 1}" for i in range(n)]


class SubalgebraPresentation:
    """Decides membership in k[gens] (or k[gens][1/c]) for many polynomials.

    Witnesses are polynomials in tag variables ``T1..Tr`` (and ``w`` for the
    inverse of ``c``) that evaluate to the tested polynomial.
    """

    def __init__(self, gens: Sequence[Polynomial], invert: Polynomial | None = None):
        if not gens:
            raise ValueError("need at least one generator")
        ring = gens[0].ring
        for g in gens:
            if g.ring.variables != ring.variables:
                raise RingMismatchError(f"{g.ring} vs {ring}")
        if invert is not None and invert.is_zero:
            raise ZeroDivisionError("cannot invert the zero polynomial")
        self.ring = ring
        self.gens = tuple(g.change_ring(ring) for g in gens)
        self._pres = _GraphPresentation(
            ring,
            self.gens,
            _tag_names(len(gens)),
            invert=invert.change_ring(ring) if invert is not None else None,
        )

    @property
    def tag_ring(self) -> PolyRing:
        return self._pres.tag_ring

    @property
    def tag_names(self) -> Tuple[str, ...]:
        return self._pres.tag_names

    @property
    def inverse_name(self) -> str | None:
        return self._pres.inverse_name

    def membership(self, p: Polynomial) -> Membership:
        if p.ring.variables != self.ring.variables:
            raise RingMismatchError(f"{p.ring} vs {self.ring}")
        return self._pres.membership(p.change_ring(self.ring))


def subalgebra_membership(p: Polynomial, gens: Sequence[Polynomial]) -> Membership:
    """Is ``p`` in k[gens]?  The witness is a polynomial in tags ``T1..Tr``."""
    return SubalgebraPresentation(gens).membership(p)


def localized_subalgebra_membership(
    p: Polynomial, gens: Sequence[Polynomial], c: Polynomial
) -> Membership:
    """Is ``p`` in k[gens][1/c]?  ``c`` should itself lie in k[gens]."""
    return SubalgebraPresentation(gens, invert=c).membership(p)


__all__ = [
    "BudgetExceededError",
    "GroebnerBasis",
    "Ideal",
    "Membership",
    "RingMap",
    "SubalgebraPresentation",
    "buchberger",
    "current_step_budget",
    "elimination_ideal",
    "ideal_membership",
    "localized_subalgebra_membership",
    "normal_form",
    "ringmap_kernel",
    "step_budget",
    "subalgebra_membership",
]
