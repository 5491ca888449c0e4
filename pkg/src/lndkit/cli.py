"""Command-line entry point: ``lnd <command> [options]``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input,
3 Groebner step budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .construction import (
    CURVE_RING,
    CurveParam,
    build_counterexample,
    example_5_5,
    implicitize,
    is_smooth_curve,
    map_degree,
    winkelmann_check,
    winkelmann_invariants,
)
from .derivation import (
    Derivation,
    VerificationReport,
    apply,
    certify_triangular,
    exp_map,
    fixed_point_free,
    nilpotency_index,
)
from .groebner import BudgetExceededError, budget_from_env, step_budget
from .parser import ParseError
from .poly import PolyRing

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("lndkit")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    fmt: str = "text"
    budget: int = 10**6
    cap: int = 1000
    jobs: int = 1

    def __post_init__(self):
        if self.budget <= 0 or self.cap <= 0 or self.jobs <= 0:
            raise InputError("budgets, caps and job counts must be positive")


def _emit(doc: dict, text: str, cfg: RunConfig, out=None):
    if cfg.fmt == "json":
        print(json.dumps(doc, indent=2), file=out or sys.stdout)
    else:
        print(text, file=out or sys.stdout)


def _param(args) -> CurveParam:
    try:
        return CurveParam.from_text(args.alpha, args.beta, args.var)
    except ParseError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _bundle_text(doc: dict) -> str:
    lines = [
        f"alpha = {doc['alpha']}, beta = {doc['beta']}, m = {doc['m']}",
        f"F = {doc['F']}",
        "D = " + " + ".join(f"({img})*d/d{v}" for v, img in doc["derivation"].items() if img != "0"),
    ]
    lines += [f"{k} = {v}" for k, v in doc["generators"].items()]
    lines += [f"{k}: {str(v).lower()}" for k, v in doc["flags"].items()]
    lines += [f"warning: {w}" for w in doc["warnings"]]
    lines += [f"[{c['status']:>7}] {c['name']}: {c['detail']}" for c in doc["checks"]]
    return "\n".join(lines)


def cmd_construct(args, cfg: RunConfig) -> int:
    if args.m < 1:
        raise InputError("--m must be a positive integer")
    bundle = build_counterexample(args.m, _param(args))
    doc = bundle.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    _emit(doc, _bundle_text(doc), cfg)
    return EXIT_OK if bundle.kernel_certified else EXIT_FAIL


def _example_worker(n: int, budget: int) -> dict:
    with step_budget(budget):
        return example_5_5(n).to_json()


def cmd_example55(args, cfg: RunConfig) -> int:
    ns = args.n
    if any(n < 2 for n in ns):
        raise InputError("--n must be at least 2")
    if cfg.jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            docs = list(pool.map(_example_worker, ns, [cfg.budget] * len(ns)))
    else:
        docs = [_example_worker(n, cfg.budget) for n in ns]
    ok = all(d["flags"]["kernel_certified"] for d in docs)
    if cfg.fmt == "json":
        _emit(docs[0] if len(docs) == 1 else {"bundles": docs}, "", cfg)
    else:
        print("\n\n".join(f"n = {n}\n{_bundle_text(d)}" for n, d in zip(ns, docs)))
    return EXIT_OK if ok else EXIT_FAIL


def _report_doc(command: str, report: VerificationReport, **extra) -> dict:
    doc = {"command": command}
    doc.update(extra)
    doc["checks"] = report.to_json()
    doc["overall"] = report.overall
    return doc


def cmd_winkelmann(args, cfg: RunConfig) -> int:
    report = winkelmann_check()
    inv = winkelmann_invariants()
    R = inv["f"].ring
    residual = R("Y") * inv["h"] - R("X") * inv["g"] - (1 + inv["f"]) * inv["f"]
    doc = _report_doc(
        "winkelmann",
        report,
        invariants={k: str(v) for k, v in inv.items()},
        residual=str(residual),
    )
    _emit(doc, f"residual: {residual}\n{report}", cfg)
    return EXIT_OK if report.overall else EXIT_FAIL


def cmd_implicitize(args, cfg: RunConfig) -> int:
    param = _param(args)
    F = implicitize(param)
    report = VerificationReport()
    back = F.substitute({"Z": param.alpha, "T": param.beta}, param.ring)
    report.add("F(alpha, beta) = 0", back.is_zero, f"F = {F}")
    degree = map_degree(param, F) if not param.alpha.is_constant else None
    doc = _report_doc("implicitize", report, alpha=str(param.alpha), beta=str(param.beta), F=str(F), map_degree=degree)
    text = f"F = {F}" + (f"\nmap degree: {degree}" if degree is not None else "")
    _emit(doc, text, cfg)
    return EXIT_OK if report.overall else EXIT_FAIL


def cmd_smooth(args, cfg: RunConfig) -> int:
    ring = PolyRing(tuple(args.vars.split(","))) if args.vars else CURVE_RING
    F = ring(args.f)
    if F.is_constant:
        raise InputError("F must be nonconstant")
    smooth = is_smooth_curve(F)
    verdict = "smooth" if smooth else "singular"
    report = VerificationReport()
    report.add("jacobian criterion", True, f"1 {'in' if smooth else 'not in'} (F, F_Z, F_T): {verdict}")
    doc = _report_doc("smooth", report, F=str(F), smooth=smooth, verdict=verdict)
    _emit(doc, f"F = {F}: {verdict}", cfg)
    return EXIT_OK


def _derivation(args) -> Derivation:
    pairs = []
    for item in args.image:
        if "=" not in item:
            raise InputError(f"--image expects VAR=EXPR, got {item!r}")
        name, expr = item.split("=", 1)
        pairs.append((name.strip(), expr))
    names = tuple(args.vars.split(",")) if args.vars else tuple(n for n, _ in pairs)
    try:
        ring = PolyRing(names)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    images = {}
    for name, expr in pairs:
        if name not in names:
            raise InputError(f"--image names unknown variable {name!r}")
        images[name] = ring(expr)
    return Derivation.from_dict(ring, images)


def cmd_derive(args, cfg: RunConfig) -> int:
    D = _derivation(args)
    ring = D.ring
    cert = certify_triangular(D)
    report = VerificationReport()
    report.add("triangular", cert is not None, f"order {', '.join(cert.order)}" if cert else "no triangular order")
    doc = {
        "command": "derive",
        "derivation": {v: str(img) for v, img in zip(ring.variables, D.images)},
        "triangular_order": list(cert.order) if cert else None,
        "indices": dict(cert.indices) if cert else None,
        "fixed_point_free": fixed_point_free(D),
    }
    lines = [f"D = {D}", f"triangular: {' < '.join(cert.order) if cert else 'no'}",
             f"fixed point free: {str(doc['fixed_point_free']).lower()}"]
    if args.apply is not None:
        result = apply(D, ring(args.apply))
        doc["apply"] = str(result)
        lines.append(f"D({args.apply}) = {result}")
    if args.exp is not None:
        if cert is None:
            report.add("exp", False, "exp(sD) needs a triangular certificate")
        else:
            result = exp_map(D, cert, args.param, ring(args.exp))
            doc["exp"] = str(result)
            lines.append(f"exp({args.param}*D)({args.exp}) = {result}")
    if args.nilpotency is not None:
        idx = nilpotency_index(D, ring(args.nilpotency), cfg.cap)
        doc["nilpotency"] = idx
        report.add("nilpotency", idx is not None, f"index {idx}" if idx is not None else f"exceeds cap {cfg.cap}")
        lines.append(f"nilpotency index of {args.nilpotency}: {idx if idx is not None else f'> {cfg.cap}'}")
    doc["checks"] = report.to_json()
    doc["overall"] = report.overall
    _emit(doc, "\n".join(lines), cfg)
    return EXIT_OK if report.overall else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=int, default=None, help="Groebner pair-reduction budget")
    common.add_argument("--cap", type=int, default=1000, help="nilpotency iteration cap")
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="lnd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def curve_args(p):
        p.add_argument("--alpha", required=True)
        p.add_argument("--beta", required=True)
        p.add_argument("--var", default="W", help="parameter variable name")

    p = sub.add_parser("construct", parents=[common], help="build and certify a counterexample bundle")
    p.add_argument("--m", type=int, default=1)
    curve_args(p)
    p.add_argument("--out", help="write the bundle JSON here")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("example55", parents=[common], help="alpha = W^n, beta = W(W^n + 1)")
    p.add_argument("--n", type=int, nargs="+", default=[2])
    p.set_defaults(func=cmd_example55)

    p = sub.add_parser("winkelmann", parents=[common], help="check Winkelmann's kernel presentation")
    p.set_defaults(func=cmd_winkelmann)

    p = sub.add_parser("implicitize", parents=[common], help="implicit equation of (alpha, beta)")
    curve_args(p)
    p.set_defaults(func=cmd_implicitize)

    p = sub.add_parser("smooth", parents=[common], help="Jacobian smoothness test of F(Z, T)")
    p.add_argument("--f", required=True)
    p.add_argument("--vars", help="comma-separated variables (default Z,T)")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("derive", parents=[common], help="apply, exponentiate or iterate a derivation")
    p.add_argument("--image", action="append", required=True, metavar="VAR=EXPR")
    p.add_argument("--vars", help="comma-separated ring variables (default: --image order)")
    p.add_argument("--apply", metavar="EXPR")
    p.add_argument("--exp", metavar="EXPR")
    p.add_argument("--param", default="s")
    p.add_argument("--nilpotency", metavar="EXPR")
    p.set_defaults(func=cmd_derive)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        budget = args.budget if args.budget is not None else budget_from_env()
        cfg = RunConfig(args.command, args.format, budget, args.cap, args.jobs)
        with step_budget(cfg.budget):
            return args.func(args, cfg)
    except (ParseError, InputError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
