"""Command-line front end: JSON in, JSON (or text) report out.

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .poly import Poly
from .scalar import EXACT, float_mode
from .serialize import scalar_to_json
from .sl2 import POLY, VF, JordanType, build_triple, decompose
from .vfield import VectorField

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFICATION = 4


class ParseError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    args: argparse.Namespace
    mode: object
    fmt: str

    @property
    def pass_label(self) -> str:
        return "exact-zero" if self.mode.exact else "within-tolerance"


# ---------------------------------------------------------------------------
# input helpers


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        raise ParseError(f"empty input: {path}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc


def _load(path: str, cls, cfg: RunConfig):
    try:
        obj = cls.from_json(_read_json(path))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return obj if cfg.mode.exact else obj.to_float()


def _jordan(text: str) -> JordanType:
    try:
        return JordanType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _triple(cfg: RunConfig):
    return build_triple(cfg.args.jordan, cfg.mode)


def _field_input(cfg: RunConfig, triple, path: str) -> VectorField:
    V = _load(path, VectorField, cfg)
    if V.n != triple.n:
        raise ValueError(f"field has dimension {V.n}, Jordan type has {triple.n}")
    return triple.from_standard(V) if getattr(cfg.args, "standard", False) else V


def _poly_zero(cfg: RunConfig, p: Poly) -> bool:
    return all(cfg.mode.is_zero(c) for c in p.terms.values())


def _field_zero(cfg: RunConfig, V: VectorField) -> bool:
    return all(_poly_zero(cfg, p) for p in V.components)


def _verification(cfg: RunConfig, checks: dict) -> dict:
    return {k: (cfg.pass_label if v else "FAILED") for k, v in checks.items()}


def _bound_verification(checks: dict) -> dict:
    """Inequality checks are float comparisons in every mode."""
    return {k: ("bound-holds" if v else "FAILED") for k, v in checks.items()}


# ---------------------------------------------------------------------------
# subcommands


def cmd_normalize(cfg: RunConfig) -> dict:
    from .normalform import normalize_degreewise, normalize_newton

    t = _triple(cfg)
    V = _field_input(cfg, t, cfg.args.input)
    run = normalize_newton if cfg.args.driver == "newton" else normalize_degreewise
    res = run(t, V, cfg.args.order)
    out = res.to_json()
    out["verification"] = _verification(cfg, res.verification)
    return out


def cmd_newton_step(cfg: RunConfig) -> dict:
    from .normalform import newton_step

    t = _triple(cfg)
    NF = _field_input(cfg, t, cfg.args.nf)
    R = _field_input(cfg, t, cfg.args.remainder)
    m = cfg.args.m
    st = newton_step(t, NF, R, m, remainder_order=cfg.args.remainder_order or 4 * m)
    return {
        "m": m,
        "window": list(st.window),
        "path": st.path,
        "alpha": st.alpha,
        "U": st.U.to_json(),
        "normal_form": st.NF.to_json(),
        "B_tilde": st.B_tilde.to_json(),
        "remainder": st.remainder.to_json() if st.remainder is not None else None,
        "condition": st.condition.to_json() if st.condition is not None else None,
        "verification": _verification(cfg, st.verification),
    }


def cmd_sl2_decompose(cfg: RunConfig) -> dict:
    from .sl2 import chain_norm_formula

    t = _triple(cfg)
    space = POLY if cfg.args.space == "poly" else VF
    dec = decompose(t, space, cfg.args.degree)
    out = dec.to_json()
    rel = t.relation_residuals()
    norms_ok = all(
        ch.norms_sq[m] == chain_norm_formula(ch.weight, m) * ch.norms_sq[0]
        for ch in dec.chains
        for m in range(ch.weight + 1)
    ) if cfg.mode.exact else True
    out["verification"] = _verification(
        cfg,
        {
            "triple_relations": all(_field_zero(cfg, r) for r in rel.values()),
            "dimension_count": sum(ch.weight + 1 for ch in dec.chains) == dec.dim,
            "chain_norms": norms_ok,
        },
    )
    return out


def cmd_cohom_solve(cfg: RunConfig) -> dict:
    from .cohom import is_joint_invariant, iterated_solve, perturbed_solve, project

    t = _triple(cfg)
    m = cfg.args.m
    f = _load(cfg.args.fm, Poly, cfg)
    Z = _load(cfg.args.z, VectorField, cfg)
    if f.n != t.n or Z.n != t.n:
        raise ValueError("dimension mismatch between inputs and Jordan type")
    split = project(t, Z)
    Zim = split.im_part
    if is_joint_invariant(t, f):
        sol = iterated_solve(t, f, Zim, m)
    else:
        sol = perturbed_solve(t, t.N + t.Nstar.times_poly(f), Zim, m + 1, 2 * m)
    return {
        "m": m,
        "path": sol.path,
        "alpha": sol.alpha,
        "U": sol.U.to_json(),
        "dropped_kernel_part": split.ker_part.to_json(),
        "verification": _verification(cfg, {"window_residual": sol.verified}),
    }


def cmd_first_integrals(cfg: RunConfig) -> dict:
    from .normalform import first_integrals, first_integrals_of_field

    a = cfg.args
    if a.field:
        V = _load(a.field, VectorField, cfg)
        fb = first_integrals_of_field(V, a.cap, a.extension, cfg.mode)
        checks = {"lie_derivative_to_cap": all(_poly_zero(cfg, V.apply(p, a.cap)) for p in fb.basis)}
    else:
        if a.jordan is None:
            raise ParseError("first-integrals needs --jordan or --field")
        t = _triple(cfg)
        fb = first_integrals(t, a.cap)
        checks = {
            "annihilated_by_N": all(_poly_zero(cfg, t.N.apply(p)) for p in fb.basis),
            "annihilated_by_Nstar": all(_poly_zero(cfg, t.Nstar.apply(p)) for p in fb.basis),
        }
    out = fb.to_json()
    out["verification"] = _verification(cfg, checks)
    return out


def cmd_check_condition(cfg: RunConfig) -> dict:
    from .normalform import check_condition

    t = _triple(cfg)
    NF = _field_input(cfg, t, cfg.args.input)
    res = check_condition(t, NF, cfg.args.cap)
    out = res.to_json()
    checks = {}
    if res.holds:
        D = (NF - t.N).truncate(cfg.args.cap or NF.degree())
        checks["witness_reproduces_NF"] = _field_zero(cfg, (D - t.Nstar.times_poly(res.f)).truncate(D.degree()))
    out["verification"] = _verification(cfg, checks)
    return out


def cmd_radii(cfg: RunConfig) -> dict:
    from .cohom import solver_constant_d
    from .normalform import radii_sequence

    a = cfg.args
    d = a.d
    if d is None:
        if a.jordan is None:
            raise ParseError("radii needs --d or --jordan")
        d = solver_constant_d(_triple(cfg))
    rep = radii_sequence(a.r, a.kmax, d)
    out = rep.to_json()
    out["d"] = d
    out["verification"] = _bound_verification(
        {
            "positive": all(x > 0 for x in rep.radii) and rep.limit_estimate > 0,
            "m1_detected": rep.m1 is not None,
            "above_half_R_m1": rep.above_half,
        }
    )
    return out


def cmd_bounds(cfg: RunConfig) -> dict:
    from .cohom import operator_bounds, q1_factor_scan, solver_constant_d

    a = cfg.args
    out: dict = {}
    factor, where = q1_factor_scan(a.max_lambda)
    out["q1_scalar_factor_max"] = factor
    out["q1_scalar_factor_argmax"] = {"lambda": where[0], "n": where[1]}
    checks = {"q1_scalar_factor_le_6": factor <= 6}
    if a.jordan is not None:
        t = _triple(cfg)
        out["d"] = solver_constant_d(t)
        if a.fm:
            f = _load(a.fm, Poly, cfg)
            rep = operator_bounds(t, f, a.r, a.m)
            out["operators"] = rep.to_json()
            checks["q1_norm_le_bound"] = rep.q1_norm <= rep.q1_bound + 1e-9
    out["verification"] = _bound_verification(checks)
    return out


COMMANDS = {
    "normalize": cmd_normalize,
    "newton-step": cmd_newton_step,
    "sl2-decompose": cmd_sl2_decompose,
    "cohom-solve": cmd_cohom_solve,
    "first-integrals": cmd_first_integrals,
    "check-condition": cmd_check_condition,
    "radii": cmd_radii,
    "bounds": cmd_bounds,
}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def common(parser, default):
        parser.add_argument("--mode", choices=["exact", "float"], default=default or "exact")
        parser.add_argument("--tol", type=float, default=default or 1e-9, help="tolerance in float mode")
        parser.add_argument("--format", choices=["json", "text"], default=default or "json")
        parser.add_argument("--output", "-o", default=default or "-", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="nilnf", description="Normal forms of vector fields with nilpotent linear part.")
    common(p, None)
    shared = argparse.ArgumentParser(add_help=False)
    common(shared, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[shared], **kw)

    sub.add_parser = add_parser

    def jordan(sp, required=True):
        sp.add_argument("--jordan", type=_jordan, required=required, help="block sizes, e.g. 3 or 2,2")

    sp = sub.add_parser("normalize", help="normal form up to a given order")
    jordan(sp)
    sp.add_argument("--input", required=True, help="vector field JSON ('-' for stdin)")
    sp.add_argument("--order", type=_positive_int, required=True)
    sp.add_argument("--driver", choices=["degreewise", "newton"], default="degreewise")
    sp.add_argument("--standard", action="store_true", help="input given in standard Jordan coordinates")

    sp = sub.add_parser("newton-step", help="one doubling step m -> 2m")
    jordan(sp)
    sp.add_argument("--nf", required=True, help="NF_m as vector field JSON")
    sp.add_argument("--remainder", required=True, help="remainder of order >= m+1")
    sp.add_argument("--m", type=_positive_int, required=True)
    sp.add_argument("--remainder-order", type=_positive_int, default=None)
    sp.add_argument("--standard", action="store_true")

    sp = sub.add_parser("sl2-decompose", help="chain decomposition of P_k or V_k")
    jordan(sp)
    sp.add_argument("--space", choices=["poly", "vf"], required=True)
    sp.add_argument("--degree", type=int, required=True)

    sp = sub.add_parser("cohom-solve", help="solve the windowed cohomological equation")
    jordan(sp)
    sp.add_argument("--m", type=_positive_int, required=True)
    sp.add_argument("--fm", required=True, help="f_m as polynomial JSON")
    sp.add_argument("--z", required=True, help="right-hand side as vector field JSON")

    sp = sub.add_parser("first-integrals", help="joint invariants of N, N* or first integrals of a field")
    jordan(sp, required=False)
    sp.add_argument("--field", default=None, help="vector field JSON")
    sp.add_argument("--cap", type=_positive_int, required=True)
    sp.add_argument("--extension", type=int, default=None, help="extra degrees checked above the cap (default: cap)")

    sp = sub.add_parser("check-condition", help="is NF = N + f N* with f a joint invariant?")
    jordan(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--cap", type=_positive_int, default=None)
    sp.add_argument("--standard", action="store_true")

    sp = sub.add_parser("radii", help="radii sequence of the Newton scheme")
    jordan(sp, required=False)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--d", type=float, default=None, help="solver constant (default: measured from --jordan)")
    sp.add_argument("--kmax", type=_positive_int, default=20)

    sp = sub.add_parser("bounds", help="Q1/Q2 bounds and the solver constant")
    jordan(sp, required=False)
    sp.add_argument("--fm", default=None, help="f_m as polynomial JSON")
    sp.add_argument("--m", type=_positive_int, default=2)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--max-lambda", type=_positive_int, default=200)
    return p


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _default(o):
    try:
        return scalar_to_json(o)
    except AttributeError:
        if isinstance(o, tuple):
            return list(o)
        raise TypeError(f"not serialisable: {type(o).__name__}")


def run(cfg: RunConfig) -> tuple[int, dict]:
    report = COMMANDS[cfg.command](cfg)
    failed = [k for k, v in report.get("verification", {}).items() if v == "FAILED"]
    if failed:
        report["error"] = f"verification failed: {', '.join(failed)}"
        return EXIT_VERIFICATION, report
    return 0, report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_PARSE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    if args.mode == "float" and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_PARSE
    mode = EXACT if args.mode == "exact" else float_mode(args.tol)
    cfg = RunConfig(args.command, args, mode, args.format)
    try:
        code, report = run(cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ArithmeticError as exc:
        print(f"internal verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except ValueError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if cfg.fmt == "json":
        text = json.dumps(report, indent=2, default=_default)
    else:
        text = "\n".join(_text(json.loads(json.dumps(report, default=_default))))
    if args.output == "-":
        print(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if code:
        print(report.get("error", "verification failed"), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
