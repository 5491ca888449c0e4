"""Explicit constructions: plane curves from parametrizations, the
``X1^m Y - F(Z, T)`` family as kernels of triangular derivations, Winkelmann's
derivation, and the single step of a tower of affine modifications.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .derivation import (
    Derivation,
    VerificationReport,
    apply,
    fixed_point_free,
    kernel_membership,
    verify_kernel_presentation,
)
from .groebner import (
    Ideal,
    RingMap,
    SubalgebraPresentation,
    _fresh,
    ideal_membership,
    ringmap_kernel,
)
from .poly import GREVLEX, NotDivisibleError, PolyRing, Polynomial, univariate_gcd

log = logging.getLogger(__name__)

CURVE_RING = PolyRing(("Z", "T"))
AMBIENT_RING = PolyRing(("X1", "X2", "X3", "X4"))


class ConstructionError(AssertionError):
    """A step that holds by theory failed; the inputs or the engine are inconsistent."""


@dataclass(frozen=True)
class CurveParam:
    """Polynomial parametrization ``Z = alpha(W), T = beta(W)`` of a plane curve."""

    alpha: Polynomial
    beta: Polynomial

    def __post_init__(self):
        if self.alpha.ring != self.beta.ring:
            raise ValueError("alpha and beta must live in the same ring")
        if self.alpha.ring.nvars != 1:
            raise ValueError("the parameter ring must have exactly one variable")
        if self.alpha.is_constant and self.beta.is_constant:
            raise ValueError("alpha and beta are both constant")

    @classmethod
    def from_text(cls, alpha: str, beta: str, var: str = "W") -> CurveParam:
        ring = PolyRing((var,))
        return cls(ring(alpha), ring(beta))

    @property
    def var(self) -> str:
        return self.alpha.ring.variables[0]

    @property
    def ring(self) -> PolyRing:
        return self.alpha.ring


def _normalize_sign(F: Polynomial) -> Polynomial:
    F = F.primitive()
    if F.change_ring(F.ring.with_order(GREVLEX)).leading_coefficient() < 0:
        F = -F
    return F


def implicitize(param: CurveParam) -> Polynomial:
    """Generator of the kernel of ``k[Z, T] -> k[W]``, primitive, positive lead."""
    kernel = ringmap_kernel(RingMap(CURVE_RING, param.ring, (param.alpha, param.beta)))
    if len(kernel.generators) != 1:
        raise ConstructionError(f"implicitization kernel is not principal: {kernel}")
    return _normalize_sign(kernel.generators[0])


def map_degree(param: CurveParam, F: Polynomial | None = None) -> int:
    """Degree of ``W -> (alpha, beta)`` onto its image; 1 means birational."""
    if param.alpha.is_constant:
        raise ValueError("map_degree needs a nonconstant alpha")
    F = implicitize(param) if F is None else F
    d_alpha = param.alpha.degree(param.var)
    d_T = F.degree("T")
    if d_T <= 0 or d_alpha % d_T:
        raise ConstructionError(f"deg alpha = {d_alpha} is not a multiple of deg_T F = {d_T}")
    return d_alpha // d_T


def is_smooth_curve(F: Polynomial) -> bool:
    """Affine Jacobian criterion: 1 in (F, dF/dZ, dF/dT)."""
    if F.is_constant:
        raise ValueError("F must be nonconstant")
    gens = [F] + [F.derivative(v) for v in F.ring.variables]
    return ideal_membership(F.ring.one(), Ideal(F.ring, gens))


@dataclass
class CounterexampleBundle:
    m: int
    param: CurveParam
    F: Polynomial
    D: Derivation
    x1: Polynomial
    z: Polynomial
    t: Polynomial
    y: Polynomial
    fpf: bool
    fpf_gcd: bool
    fpf_ideal: bool
    curve_singular: bool
    kernel_certified: bool
    degree: int
    report: VerificationReport
    warnings: List[str] = field(default_factory=list)

    @property
    def generators(self) -> Dict[str, Polynomial]:
        return {"x1": self.x1, "z": self.z, "t": self.t, "y": self.y}

    @property
    def flags(self) -> Dict[str, bool]:
        return {
            "fpf": self.fpf,
            "curve_singular": self.curve_singular,
            "kernel_certified": self.kernel_certified,
        }

    def to_json(self) -> dict:
        return {
            "variables": list(self.D.ring.variables),
            "parameter": self.param.var,
            "m": self.m,
            "alpha": str(self.param.alpha),
            "beta": str(self.param.beta),
            "F": str(self.F),
            "derivation": {v: str(img) for v, img in zip(self.D.ring.variables, self.D.images)},
            "generators": {k: str(v) for k, v in self.generators.items()},
            "flags": self.flags,
            "map_degree": self.degree,
            "warnings": list(self.warnings),
            "checks": self.report.to_json(),
        }


def build_counterexample(m: int, param: CurveParam) -> CounterexampleBundle:
    """``A = k[X1, Y, Z, T]/(X1^m Y - F)`` realized as the kernel of a triangular D on k[X1..X4]."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    B = AMBIENT_RING
    F = implicitize(param)
    degree = map_degree(param, F) if not param.alpha.is_constant else 1
    warnings = []
    if degree > 1:
        warnings.append(f"parametrization has degree {degree} onto its image (not injective)")
        log.warning(warnings[-1])

    X1, X2, X3, X4 = B.gens()
    at_x2 = {param.var: X2}
    alpha = param.alpha.substitute(at_x2, B)
    beta = param.beta.substitute(at_x2, B)
    x1m = X1**m
    z = alpha - x1m * X3
    t = beta - x1m * X4
    FZT = F.change_ring(CURVE_RING).substitute({"Z": z, "T": t}, B)
    try:
        y = FZT.exact_divide(x1m)
    except NotDivisibleError:
        raise ConstructionError(f"F(z, t) is not divisible by X1^{m}") from None

    dalpha = param.alpha.derivative(param.var)
    dbeta = param.beta.derivative(param.var)
    D = Derivation(B, (B.zero(), x1m, dalpha.substitute(at_x2, B), dbeta.substitute(at_x2, B)))

    fpf_gcd = univariate_gcd(dalpha, dbeta) == param.ring.one()
    fpf_ideal = fixed_point_free(D)
    if fpf_gcd != fpf_ideal:
        msg = f"fixed-point-free tests disagree: gcd test {fpf_gcd}, ideal test {fpf_ideal}"
        if degree == 1:
            raise ConstructionError(msg)
        warnings.append(msg)

    report = VerificationReport()
    report.add(
        "relation",
        (x1m * y - FZT).is_zero,
        f"{x1m}*y = F(z, t)",
    )
    report.extend(verify_kernel_presentation(D, [X1, z, t, y], X1))

    return CounterexampleBundle(
        m=m,
        param=param,
        F=F,
        D=D,
        x1=X1,
        z=z,
        t=t,
        y=y,
        fpf=fpf_ideal,
        fpf_gcd=fpf_gcd,
        fpf_ideal=fpf_ideal,
        curve_singular=not is_smooth_curve(F),
        kernel_certified=report.overall,
        degree=degree,
        report=report,
        warnings=warnings,
    )


def example_5_5_param(n: int) -> CurveParam:
    return CurveParam.from_text(f"W^{n}", f"W*(W^{n} + 1)")


def example_5_5(n: int) -> CounterexampleBundle:
    """The ``alpha = W^n, beta = W(W^n + 1)`` member of the family, with m = 1."""
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")
    bundle = build_counterexample(1, example_5_5_param(n))
    B = bundle.D.ring
    expected = Derivation(B, (B.zero(), B("X1"), B(f"{n}*X2^{n - 1}"), B(f"{n + 1}*X2^{n} + 1")))
    if bundle.D != expected:
        raise ConstructionError(f"derivation {bundle.D} differs from the closed form {expected}")
    closed_F = _normalize_sign(CURVE_RING(f"Z*(Z + 1)^{n} - T^{n}"))
    if bundle.F != closed_F:
        raise ConstructionError(f"implicit equation {bundle.F} differs from {closed_F}")
    return bundle


WINKELMANN_RING = PolyRing(("X", "Y", "U", "V", "Z"))


def winkelmann_derivation() -> Derivation:
    R = WINKELMANN_RING
    return Derivation.from_dict(R, {"U": R("Y"), "V": R("X"), "Z": R("1 + X*U - Y*V")})


def winkelmann_invariants() -> Dict[str, Polynomial]:
    R = WINKELMANN_RING
    f = R("X*U - Y*V")
    g = R("Y*Z") - (1 + f) * R("U")
    h = R("X*Z") - (1 + f) * R("V")
    return {"f": f, "g": g, "h": h}


def winkelmann_check() -> VerificationReport:
    R = WINKELMANN_RING
    D = winkelmann_derivation()
    inv = winkelmann_invariants()
    report = VerificationReport()
    for name, p in inv.items():
        report.add(f"D({name}) = 0", kernel_membership(D, p), f"{name} = {p}")
    f, g, h = inv["f"], inv["g"], inv["h"]
    residual = R("Y") * h - R("X") * g - (1 + f) * f
    report.add("relation Y*h - X*g - (1+f)*f", residual.is_zero, f"residual {residual}")
    report.add("fixed point free", fixed_point_free(D), "1 in (X, Y, 1 + X*U - Y*V)")
    return report


@dataclass(frozen=True)
class TowerStep:
    """Presentation data for ``A[V]/(t V - h)`` over a presented base algebra.

    ``ring`` holds the base tags plus ``V``; ``ideal`` is the base presentation
    ideal together with ``relation``.
    """

    ring: PolyRing
    base_ideal: Ideal
    relation: Polynomial
    ideal: Ideal
    new_generator: Polynomial | None
    t_witness: Polynomial
    h_witness: Polynomial


class DegenerateStepError(ValueError):
    """``h`` lies in ``t * k[base]``, so adjoining ``h/t`` adds nothing."""


def tower_step(base_gens: Sequence[Polynomial], t: Polynomial, h: Polynomial, new_name: str = "V") -> TowerStep:
    """Adjoin ``h/t`` to ``k[base_gens]``; reject when ``h`` is in ``t * k[base_gens]``."""
    ring = base_gens[0].ring
    pres = SubalgebraPresentation(base_gens)
    t_in = pres.membership(t)
    h_in = pres.membership(h)
    if not t_in:
        raise ValueError(f"t = {t} is not in k[base]")
    if not h_in:
        raise ValueError(f"h = {h} is not in k[base]")
    try:
        quotient = h.change_ring(ring).exact_divide(t.change_ring(ring))
    except NotDivisibleError:
        quotient = None
    if quotient is not None and pres.membership(quotient):
        raise DegenerateStepError(f"h = {h} lies in (t) k[base]")

    taken: set[str] = set()
    names = []
    for i, g in enumerate(base_gens):
        v = g.as_variable()
        names.append(_fresh(v if v is not None else f"G{i + 1}", taken))
    vname = _fresh(new_name, taken)
    out_ring = PolyRing(tuple(names) + (vname,))
    to_out = {tag: out_ring.var(name) for tag, name in zip(pres.tag_names, names)}

    def rename(w: Polynomial) -> Polynomial:
        return w.substitute(to_out, out_ring)

    base_ideal = ringmap_kernel(RingMap(PolyRing(tuple(names)), ring, tuple(g.change_ring(ring) for g in base_gens)))
    base_ideal = Ideal(out_ring, [g.change_ring(out_ring) for g in base_ideal.generators])
    tw, hw = rename(t_in.witness), rename(h_in.witness)
    relation = out_ring.var(vname) * tw - hw
    return TowerStep(
        ring=out_ring,
        base_ideal=base_ideal,
        relation=relation,
        ideal=base_ideal + Ideal(out_ring, [relation]),
        new_generator=quotient,
        t_witness=tw,
        h_witness=hw,
    )


__all__ = [
    "AMBIENT_RING",
    "CURVE_RING",
    "ConstructionError",
    "CounterexampleBundle",
    "CurveParam",
    "DegenerateStepError",
    "TowerStep",
    "build_counterexample",
    "example_5_5",
    "example_5_5_param",
    "implicitize",
    "is_smooth_curve",
    "map_degree",
    "tower_step",
    "winkelmann_check",
    "winkelmann_derivation",
    "winkelmann_invariants",
]
