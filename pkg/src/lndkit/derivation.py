"""Derivations of polynomial rings and kernel certification.

A :class:`Derivation` is fixed by the images of the variables and extended to
the whole ring by linearity and the Leibniz rule.  Local nilpotency is only
ever certified structurally (a triangular variable order); for anything else
the per-element :func:`nilpotency_index` is available with a cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .groebner import (
    Ideal,
    RingMap,
    SubalgebraPresentation,
    _fresh,
    _GraphPresentation,
    ideal_membership,
)
from .poly import GREVLEX, NotDivisibleError, PolyRing, Polynomial, RingMismatchError


class NotInKernelError(ValueError):
    """An element that must be annihilated by the derivation is not."""


class InvalidCertificateError(ValueError):
    """A nilpotency certificate does not hold for the derivation it was used with."""


@dataclass(frozen=True)
class Derivation:
    ring: PolyRing
    images: Tuple[Polynomial, ...]

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        fixed = []
        for v, img in zip(self.ring.variables, images):
            if isinstance(img, (int, Fraction)):
                img = self.ring.constant(img)
            if img.ring.variables != self.ring.variables:
                raise RingMismatchError(f"image of {v} is not in {self.ring}")
            fixed.append(img.change_ring(self.ring))
        object.__setattr__(self, "images", tuple(fixed))

    @classmethod
    def from_dict(cls, ring: PolyRing, images: Mapping[str, Polynomial | int]) -> Derivation:
        """Variables missing from ``images`` are sent to 0."""
        unknown = set(images) - set(ring.variables)
        if unknown:
            raise KeyError(f"unknown variables {sorted(unknown)}")
        return cls(ring, tuple(images.get(v, ring.zero()) for v in ring.variables))

    def image(self, var: str) -> Polynomial:
        return self.images[self.ring.index(var)]

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply(self, p)

    def __str__(self):
        parts = [f"({img})*d/d{v}" for v, img in zip(self.ring.variables, self.images) if img]
        return " + ".join(parts) or "0"


def apply(D: Derivation, p: Polynomial) -> Polynomial:
    if p.ring.variables != D.ring.variables:
        raise RingMismatchError(f"{p.ring} vs {D.ring}")
    p = p.change_ring(D.ring)
    out = D.ring.zero()
    for v, img in zip(D.ring.variables, D.images):
        if img:
            dp = p.derivative(v)
            if dp:
                out = out + dp * img
    return out


def iterates(D: Derivation, p: Polynomial, limit: int) -> List[Polynomial]:
    """``[p, Dp, D^2 p, ...]`` up to the first zero (excluded) or ``limit`` items."""
    out = []
    q = p
    while q and len(out) < limit:
        out.append(q)
        q = apply(D, q)
    return out


def nilpotency_index(D: Derivation, p: Polynomial, cap: int = 1000) -> int | None:
    """Least ``s`` with ``D^s(p) = 0``; ``None`` when that takes more than ``cap`` steps."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    seq = iterates(D, p, cap + 1)
    if len(seq) > cap:
        return None
    return len(seq)


def kernel_membership(D: Derivation, p: Polynomial) -> bool:
    return apply(D, p).is_zero


def fixed_point_free(D: Derivation) -> bool:
    """True iff the images of the variables generate the unit ideal."""
    ideal = Ideal(D.ring, D.images)
    return ideal_membership(D.ring.one(), ideal)


@dataclass(frozen=True)
class NilpotencyCertificate:
    """Triangular order plus per-variable nilpotency indices.

    For a monomial with exponents ``e`` the index is at most
    ``sum(e_i * (index_i - 1)) + 1``; :meth:`bound` takes the max over terms.
    """

    order: Tuple[str, ...]
    indices: Mapping[str, int]
    kind: str = "triangular"

    def bound(self, p: Polynomial) -> int:
        if p.is_zero:
            return 0
        weights = [self.indices[v] - 1 for v in p.ring.variables]
        return max(sum(e * w for e, w in zip(m, weights)) for m in p.terms) + 1

    @property
    def max_index(self) -> int:
        return max(self.indices.values(), default=0)


def certify_triangular(D: Derivation) -> NilpotencyCertificate | None:
    """Find a variable order in which each image only uses earlier variables.

    Ties are broken by the ring's own variable order, so the answer is
    deterministic.  Returns ``None`` if the dependency graph has a cycle.
    """
    names = D.ring.variables
    deps = {v: set(img.support()) for v, img in zip(names, D.images)}
    if any(v in deps[v] for v in names):
        return None
    placed: List[str] = []
    done: set[str] = set()
    while len(placed) < len(names):
        for v in names:
            if v not in done and deps[v] <= done:
                placed.append(v)
                done.add(v)
                break
        else:
            return None
    indices = {}
    for v in placed:
        # triangular => finite; the bound is only a safety net
        s = nilpotency_index(D, D.ring.var(v), cap=10**6)
        indices[v] = s
    return NilpotencyCertificate(tuple(placed), indices)


def exp_map(D: Derivation, cert: NilpotencyCertificate, param: str, p: Polynomial) -> Polynomial:
    """``exp(param * D)(p)`` in the ring extended by the variable ``param``."""
    if param in D.ring.variables:
        raise ValueError(f"parameter {param!r} clashes with a ring variable")
    bound = cert.bound(p)
    seq = iterates(D, p.change_ring(D.ring), bound + 1)
    if len(seq) > bound:
        raise InvalidCertificateError(f"D^{bound}(p) != 0 although the certificate says it should vanish")
    ext = PolyRing(D.ring.variables + (param,), GREVLEX)
    s = ext.var(param)
    out = ext.zero()
    for i, q in enumerate(seq):
        out = out + q.change_ring(ext) * s**i * Fraction(1, math.factorial(i))
    return out


@dataclass(frozen=True)
class LocalizedPoly:
    """``numerator / c**c_power`` with ``c`` not dividing the numerator when the power is positive."""

    numerator: Polynomial
    c_power: int
    c: Polynomial

    @classmethod
    def normalized(cls, numerator: Polynomial, power: int, c: Polynomial) -> LocalizedPoly:
        if numerator.is_zero:
            return cls(numerator, 0, c)
        while power > 0:
            try:
                numerator = numerator.exact_divide(c)
            except NotDivisibleError:
                break
            power -= 1
        return cls(numerator, power, c)

    def cleared(self) -> Polynomial:
        return self.numerator

    def same_value(self, other: LocalizedPoly) -> bool:
        k = max(self.c_power, other.c_power)
        return (self.numerator * self.c ** (k - self.c_power)) == (
            other.numerator * other.c ** (k - other.c_power)
        )

    def __str__(self):
        if self.c_power == 0:
            return str(self.numerator)
        return f"({self.numerator})/({self.c})^{self.c_power}"


def dixmier_map(
    D: Derivation, cert: NilpotencyCertificate, slice_: Polynomial | str, p: Polynomial
) -> LocalizedPoly:
    """Project ``p`` onto ker D[1/c] along the local slice ``s``, where ``c = D(s)``.

    Computes ``sum_i (-s)^i D^i(p) / (i! c^i)`` and returns it over the
    smallest power of ``c``.
    """
    s = D.ring.var(slice_) if isinstance(slice_, str) else slice_.change_ring(D.ring)
    c = apply(D, s)
    if c.is_zero:
        raise ZeroDivisionError("slice is annihilated by D, so c = D(s) = 0")
    if not kernel_membership(D, c):
        raise NotInKernelError(f"D(s) = {c} is not in the kernel of D")
    p = p.change_ring(D.ring)
    bound = cert.bound(p)
    seq = iterates(D, p, bound + 1)
    if len(seq) > bound:
        raise InvalidCertificateError("certificate bound exceeded while iterating D")
    if not seq:
        return LocalizedPoly(D.ring.zero(), 0, c)
    top = len(seq) - 1
    num = D.ring.zero()
    neg_s = -s
    for i, q in enumerate(seq):
        num = num + q * neg_s**i * c ** (top - i) * Fraction(1, math.factorial(i))
    return LocalizedPoly.normalized(num, top, c)


def find_local_slice(D: Derivation, cert: NilpotencyCertificate) -> str | None:
    """First variable (in certified order) with ``D(v) != 0``; its image lies in ker D."""
    for v in cert.order:
        if D.image(v):
            return v
    return None


@dataclass
class VerificationReport:
    """Ordered pass/fail/skipped checks; ``overall`` ignores skipped ones."""

    checks: List[Tuple[str, str, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool | None, detail: str = "") -> bool | None:
        status = "skipped" if ok is None else ("pass" if ok else "fail")
        self.checks.append((name, status, detail))
        return ok

    def skip(self, name: str, detail: str = ""):
        self.add(name, None, detail)

    @property
    def overall(self) -> bool:
        return all(status == "pass" for _, status, _ in self.checks if status != "skipped")

    def status(self, name: str) -> str | None:
        for n, status, _ in self.checks:
            if n == name:
                return status
        return None

    def first_failure(self) -> str | None:
        for n, status, _ in self.checks:
            if status == "fail":
                return n
        return None

    def extend(self, other: VerificationReport):
        self.checks.extend(other.checks)

    def to_json(self) -> list[dict]:
        return [{"name": n, "status": s, "detail": d} for n, s, d in self.checks]

    def __str__(self):
        lines = [f"[{status:>7}] {name}: {detail}" for name, status, detail in self.checks]
        lines.append(f"overall: {'pass' if self.overall else 'fail'}")
        return "\n".join(lines)


CHECK_TRIANGULAR = "triangular"
CHECK_IN_KERNEL = "candidates_in_kernel"
CHECK_LOCALIZED = "localized_equality"
CHECK_MOD_C = "mod_c_injectivity"


def verify_kernel_presentation(
    D: Derivation, candidates: Sequence[Polynomial], c: Polynomial
) -> VerificationReport:
    """Certify ``ker D = k[candidates]`` with the localization lemma at ``c``.

    Checks, in order: D is triangular; every candidate is killed by D;
    every Dixmier image ``pi(X_i)`` lies in ``k[candidates][1/c]``; and the map
    ``k[candidates]/(c) -> B/(c)`` is injective, compared as presentation
    ideals ``J + (tag_c)`` and ``J_c``.
    """
    ring = D.ring
    cands = [g.change_ring(ring) for g in candidates]
    c = c.change_ring(ring)
    if c not in cands:
        raise ValueError("c must be one of the candidates")
    if not kernel_membership(D, c):
        raise NotInKernelError(f"c = {c} is not in ker D")
    if c.is_zero:
        raise ZeroDivisionError("c must be nonzero")
    report = VerificationReport()

    cert = certify_triangular(D)
    report.add(
        CHECK_TRIANGULAR,
        cert is not None,
        f"order {', '.join(cert.order)}" if cert else "no triangular variable order",
    )
    if cert is None:
        for name in (CHECK_IN_KERNEL, CHECK_LOCALIZED, CHECK_MOD_C):
            report.skip(name, "needs a triangular derivation")
        return report

    outside = [str(g) for g in cands if not kernel_membership(D, g)]
    report.add(
        CHECK_IN_KERNEL,
        not outside,
        "D kills all candidates" if not outside else f"D(g) != 0 for g = {outside[0]}",
    )

    report.add(CHECK_LOCALIZED, *_localized_equality(D, cert, cands, c))
    report.add(CHECK_MOD_C, *_mod_c_injective(ring, cands, c))
    return report


def _localized_equality(
    D: Derivation, cert: NilpotencyCertificate, cands: List[Polynomial], c: Polynomial
) -> tuple[bool, str]:
    slice_var = find_local_slice(D, cert)
    if slice_var is None:
        # D = 0: kernel is the whole ring
        pres = SubalgebraPresentation(cands, invert=c)
        missing = [v for v in D.ring.variables if not pres.membership(D.ring.var(v))]
        ok = not missing
        return ok, "D = 0" if ok else f"{missing[0]} not in k[candidates][1/c]"
    dslice = D.image(slice_var)
    pres = SubalgebraPresentation(cands, invert=c)
    # 1/D(s) must exist in k[candidates][1/c]: D(s) divides a power of c with
    # a cofactor in the localized candidate algebra
    cofactor = None
    for k in range(dslice.total_degree() + 1):
        try:
            cofactor = (c**k).exact_divide(dslice)
        except NotDivisibleError:
            continue
        break
    if cofactor is None or not pres.membership(cofactor):
        return False, f"slice {slice_var}: D({slice_var}) = {dslice} is not a unit after inverting c"
    for v in D.ring.variables:
        img = dixmier_map(D, cert, slice_var, D.ring.var(v))
        if not pres.membership(img.numerator):
            return False, f"pi({v}) = {img} is not in k[candidates][1/c]"
    return True, f"slice {slice_var}; pi(X) in k[candidates][1/c] for every variable"


def _mod_c_injective(ring: PolyRing, cands: List[Polynomial], c: Polynomial) -> tuple[bool, str]:
    tags = [f"T{i + 1}" for i in range(len(cands))]
    full = _GraphPresentation(ring, cands, tags)
    modc = _GraphPresentation(ring, cands, tags, extra=[c])
    tag_ring = full.tag_ring
    # the graph presentations rename tags consistently; both use tag_ring names
    J = Ideal(tag_ring, full.kernel_generators())
    Jc = Ideal(tag_ring, [g.change_ring(tag_ring) for g in modc.kernel_generators()])
    c_tag = tag_ring.var(full.tag_names[cands.index(c)])
    lhs = J + Ideal(tag_ring, [c_tag])
    forward = all(ideal_membership(g, Jc) for g in lhs.generators)
    backward = all(ideal_membership(g, lhs) for g in Jc.generators)
    if forward and backward:
        return True, "ker(k[T] -> B/cB) = J + (tag of c)"
    bad = next(g for g in Jc.generators if not ideal_membership(g, lhs)) if not backward else None
    detail = f"{bad} lies in ker(k[T] -> B/cB) but not in J + (tag of c)" if bad is not None else "J + (tag of c) not contained in ker(k[T] -> B/cB)"
    return False, detail


__all__ = [
    "Derivation",
    "InvalidCertificateError",
    "LocalizedPoly",
    "NilpotencyCertificate",
    "NotInKernelError",
    "VerificationReport",
    "apply",
    "certify_triangular",
    "dixmier_map",
    "exp_map",
    "find_local_slice",
    "fixed_point_free",
    "kernel_membership",
    "nilpotency_index",
    "verify_kernel_presentation",
]
