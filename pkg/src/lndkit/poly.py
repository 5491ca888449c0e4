"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Polynomial` is a finite map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients, tied to a :class:`PolyRing` that
fixes the variable names and the monomial order.  Values are immutable; every
operation returns a new polynomial in canonical form.

    >>> R = PolyRing(("Z", "T"))
    >>> Z, T = R.gens()
    >>> print((Z - T) * (Z + T))
    Z^2 - T^2
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational as _RationalABC
from typing import Callable, Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Rational = Fraction
Coefficient = Union[int, Fraction]

ORDER_KINDS = ("lex", "grlex", "grevlex")


class RingMismatchError(ValueError):
    """Operands live in different polynomial rings."""


class NotDivisibleError(ArithmeticError):
    """Exact division was requested but the divisor does not divide."""


def _lex_key(e: Monomial) -> tuple:
    return e


def _grlex_key(e: Monomial) -> tuple:
    return (sum(e),) + e


def _grevlex_key(e: Monomial) -> tuple:
    return (sum(e),) + tuple(-x for x in reversed(e))


_BASE_KEYS = {"lex": _lex_key, "grlex": _grlex_key, "grevlex": _grevlex_key}


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order: larger key means larger monomial.

    ``perm`` lists variable indices from most to least significant (identity
    when omitted).  ``blocks`` splits the permuted variables into consecutive
    blocks compared one after another, each with ``kind``; this is how the
    elimination orders are built.
    """

    kind: str = "grevlex"
    perm: Tuple[int, ...] | None = None
    blocks: Tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.perm is not None and sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm must be a permutation of 0..n-1")
        if self.blocks is not None and any(b <= 0 for b in self.blocks):
            raise ValueError("block sizes must be positive")

    def key_function(self, nvars: int) -> Callable[[Monomial], tuple]:
        if self.perm is not None and len(self.perm) != nvars:
            raise ValueError("perm length does not match ring arity")
        if self.blocks is not None and sum(self.blocks) != nvars:
            raise ValueError("block sizes do not add up to ring arity")
        base = _BASE_KEYS[self.kind]
        perm = self.perm
        if self.blocks is None or len(self.blocks) == 1:
            if perm is None:
                return base
            return lambda e: base(tuple(e[i] for i in perm))
        cuts = []
        start = 0
        for size in self.blocks:
            cuts.append((start, start + size))
            start += size
        order = perm if perm is not None else tuple(range(nvars))

        # flat keys: each block key has fixed length, so concatenation
        # compares exactly like the nested tuple would
        def key(e: Monomial) -> tuple:
            p = tuple(e[i] for i in order)
            out: tuple = ()
            for a, b in cuts:
                out += base(p[a:b])
            return out

        return key


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


@dataclass(frozen=True)
class PolyRing:
    """Polynomial ring over Q in named variables with a monomial order."""

    variables: Tuple[str, ...]
    order: MonomialOrder = GREVLEX

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        for name in self.variables:
            if not name.isidentifier():
                raise ValueError(f"invalid variable name {name!r}")
        # validates perm/blocks against the arity
        self.order.key_function(len(self.variables))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def sort_key(self) -> Callable[[Monomial], tuple]:
        # cached on the instance; frozen dataclasses need object.__setattr__
        try:
            return self.__dict__["_sort_key"]
        except KeyError:
            fn = self.order.key_function(self.nvars)
            object.__setattr__(self, "_sort_key", fn)
            return fn

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in ring {self.variables}") from None

    def with_order(self, order: MonomialOrder) -> PolyRing:
        return PolyRing(self.variables, order)

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c: Coefficient) -> Polynomial:
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> Polynomial:
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> Tuple[Polynomial, ...]:
        return tuple(self.var(v) for v in self.variables)

    def __call__(self, text: str) -> Polynomial:
        from .parser import parse

        return parse(text, self)

    def __repr__(self):
        return f"PolyRing({', '.join(self.variables)}; {self.order.kind})"


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, _RationalABC)):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not an exact rational")


def _integral(terms: Mapping[Monomial, Fraction]):
    """``(pairs, d)`` with integer ``pairs`` such that ``terms = pairs / d``."""
    d = 1
    for c in terms.values():
        q = c.denominator
        if q != 1:
            d = d * q // gcd(d, q)
    if d == 1:
        return [(m, c.numerator) for m, c in terms.items()], 1
    return [(m, c.numerator * (d // c.denominator)) for m, c in terms.items()], d


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to Fractions."""

    __slots__ = ("ring", "_terms", "_sorted", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Monomial, Coefficient] | None = None):
        self.ring = ring
        clean: Dict[Monomial, Fraction] = {}
        n = ring.nvars
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != n:
                raise ValueError(f"monomial {mono} has wrong arity for {ring}")
            if any(x < 0 for x in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _as_fraction(c)
            if c:
                clean[mono] = clean.get(mono, 0) + c
                if not clean[mono]:
                    del clean[mono]
        self._terms = clean
        self._sorted = None
        self._hash = None

    @classmethod
    def _raw(cls, ring: PolyRing, terms: Dict[Monomial, Fraction]) -> Polynomial:
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.ring = ring
        p._terms = terms
        p._sorted = None
        p._hash = None
        return p

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def items(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical (descending) order."""
        if self._sorted is None:
            key = self.ring.sort_key
            self._sorted = sorted(self._terms.items(), key=lambda kv: key(kv[0]), reverse=True)
        return self._sorted

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return self.items()[0][0]

    def leading_coefficient(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        return self.items()[0][1]

    def constant_coefficient(self) -> Fraction:
        return self._terms.get((0,) * self.ring.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def degree(self, var: str) -> int:
        i = self.ring.index(var)
        return max((m[i] for m in self._terms), default=-1)

    def support(self) -> Tuple[str, ...]:
        """Names of the variables that actually occur."""
        used = [False] * self.ring.nvars
        for m in self._terms:
            for i, x in enumerate(m):
                if x:
                    used[i] = True
        return tuple(v for v, u in zip(self.ring.variables, used) if u)

    def as_variable(self) -> str | None:
        """Name of the variable if this polynomial is exactly one variable."""
        if len(self._terms) != 1:
            return None
        (m, c), = self._terms.items()
        if c != 1 or sum(m) != 1:
            return None
        return self.ring.variables[m.index(1)]

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self._terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        # clear denominators and multiply in plain ints; Fraction arithmetic
        # in the inner loop dominates otherwise
        ia, da = _integral(self._terms)
        ib, db = _integral(other._terms)
        acc: Dict[Monomial, int] = {}
        get = acc.get
        for m1, c1 in ia:
            for m2, c2 in ib:
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = get(m, 0) + c1 * c2
        den = da * db
        if den == 1:
            out = {m: Fraction(v) for m, v in acc.items() if v}
        else:
            out = {m: Fraction(v, den) for m, v in acc.items() if v}
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def scale(self, c: Coefficient) -> Polynomial:
        c = _as_fraction(c)
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {m: v * c for m, v in self._terms.items()})

    def shift(self, mono: Monomial) -> Polynomial:
        """Multiply by the monomial with exponent vector ``mono``."""
        return Polynomial._raw(
            self.ring, {tuple(a + b for a, b in zip(m, mono)): c for m, c in self._terms.items()}
        )

    def __pow__(self, e: int):
        if not isinstance(e, int) or isinstance(e, bool):
            return NotImplemented
        if e < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self.scale(1 / _as_fraction(other))
        if isinstance(other, Polynomial):
            return self.exact_divide(other)
        return NotImplemented

    def monic(self) -> Polynomial:
        if not self._terms:
            return self
        return self.scale(1 / self.leading_coefficient())

    def primitive(self) -> Polynomial:
        """Integer coefficients with gcd 1; sign left unchanged."""
        if not self._terms:
            return self
        return self.scale(1 / self.content())

    # -- calculus and maps --------------------------------------------------

    def derivative(self, var: str) -> Polynomial:
        i = self.ring.index(var)
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return Polynomial._raw(self.ring, out)

    def substitute(
        self, assignment: Mapping[str, Polynomial], target: PolyRing | None = None
    ) -> Polynomial:
        """Ring-homomorphic image under ``var -> assignment[var]``.

        Every variable of this ring must be assigned.  All images must live in
        ``target`` (inferred from the images when not given).
        """
        missing = [v for v in self.ring.variables if v not in assignment]
        if missing:
            raise KeyError(f"no image assigned for {missing}")
        images = [assignment[v] for v in self.ring.variables]
        if target is None:
            target = images[0].ring if images else self.ring
        for v, img in zip(self.ring.variables, images):
            if not isinstance(img, Polynomial):
                img = target.constant(img)
            elif img.ring != target:
                raise RingMismatchError(f"image of {v} lives in {img.ring}, expected {target}")
        images = [img if isinstance(img, Polynomial) else target.constant(img) for img in images]

        powers: list[list[Polynomial]] = [[target.one()] for _ in images]

        def power(i: int, e: int) -> Polynomial:
            cache = powers[i]
            while len(cache) <= e:
                cache.append(cache[-1] * images[i])
            return cache[e]

        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            term = target.constant(c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            for tm, tc in term._terms.items():
                v = out.get(tm, 0) + tc
                if v:
                    out[tm] = v
                else:
                    out.pop(tm, None)
        return Polynomial._raw(target, out)

    def change_ring(self, target: PolyRing) -> Polynomial:
        """Reinterpret in ``target`` by variable name (reorder, embed, re-order)."""
        if target == self.ring:
            return self
        idx = []
        for v in self.ring.variables:
            if v in target.variables:
                idx.append(target.variables.index(v))
            else:
                idx.append(None)
        out = {}
        n = target.nvars
        for m, c in self._terms.items():
            e = [0] * n
            for i, x in enumerate(m):
                if x:
                    if idx[i] is None:
                        raise KeyError(
                            f"variable {self.ring.variables[i]!r} does not exist in {target}"
                        )
                    e[idx[i]] = x
            out[tuple(e)] = c
        return Polynomial._raw(target, out)

    def evaluate(self, values: Mapping[str, Coefficient]) -> Fraction:
        total = Fraction(0)
        vals = [_as_fraction(values[v]) for v in self.ring.variables]
        for m, c in self._terms.items():
            t = c
            for x, e in zip(vals, m):
                if e:
                    t *= x**e
            total += t
        return total

    def exact_divide(self, q: Polynomial) -> Polynomial:
        """Return r with self == q * r; raise NotDivisibleError otherwise."""
        q = self._coerce(q)
        if q.is_zero:
            raise ZeroDivisionError("exact division by the zero polynomial")
        key = self.ring.sort_key
        qlm, qlc = q.items()[0]
        qrest = q.items()[1:]
        rem: Dict[Monomial, Fraction] = dict(self._terms)
        quo: Dict[Monomial, Fraction] = {}
        while rem:
            m = max(rem, key=key)
            c = rem.pop(m)
            shift = tuple(a - b for a, b in zip(m, qlm))
            if any(x < 0 for x in shift):
                raise NotDivisibleError(f"{q} does not divide {self}")
            f = c / qlc
            quo[shift] = f
            for qm, qc in qrest:
                nm = tuple(a + b for a, b in zip(qm, shift))
                v = rem.get(nm, 0) - f * qc
                if v:
                    rem[nm] = v
                else:
                    rem.pop(nm, None)
        return Polynomial._raw(self.ring, quo)

    def divides(self, p: Polynomial) -> bool:
        try:
            p.exact_divide(self)
        except NotDivisibleError:
            return False
        return True

    # -- comparison and display ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == self.ring.constant(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Polynomial({render(self)!r}, ring={self.ring.variables})"


def _format_coefficient(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def render(p: Polynomial) -> str:
    """Deterministic text form in the parser's grammar, descending term order."""
    if p.is_zero:
        return "0"
    names = p.ring.variables
    chunks = []
    for k, (m, c) in enumerate(p.items()):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        factors = [
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, m) if e
        ]
        if not factors:
            body = _format_coefficient(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coefficient(a)] + factors)
        if k == 0:
            chunks.append(body if sign == "+" else f"-{body}")
        else:
            chunks.append(f"{sign} {body}")
    return " ".join(chunks)


def univariate_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd of two polynomials in (at most) one common variable.

    gcd(0, 0) is 0 by convention.
    """
    if p.ring != q.ring:
        raise RingMismatchError(f"{p.ring} vs {q.ring}")
    used = set(p.support()) | set(q.support())
    if len(used) > 1:
        raise ValueError(f"univariate_gcd needs univariate input, got variables {sorted(used)}")
    a, b = p, q
    while not b.is_zero:
        a, b = b, _univariate_remainder(a, b)
    return a.monic()


def _univariate_remainder(a: Polynomial, b: Polynomial) -> Polynomial:
    # for univariate input, all monomial orders agree with the degree order
    blm, blc = b.items()[0]
    rem = a
    while not rem.is_zero:
        m, c = rem.items()[0]
        shift = tuple(x - y for x, y in zip(m, blm))
        if any(x < 0 for x in shift):
            break
        rem = rem - b.shift(shift).scale(c / blc)
    return rem


def polys_in(ring: PolyRing, texts: Iterable[str]) -> list[Polynomial]:
    return [ring(t) for t in texts]


__all__ = [
    "Monomial",
    "MonomialOrder",
    "NotDivisibleError",
    "PolyRing",
    "Polynomial",
    "Rational",
    "RingMismatchError",
    "GREVLEX",
    "LEX",
    "render",
    "univariate_gcd",
]
