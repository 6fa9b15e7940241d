"""Command-line interface: JSON in, JSON out.

Exit codes: 0 all checks pass, 1 a check failed, 2 malformed input,
3 precondition violated.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import k3model, samples, scatter, sheaf, spectra
from .qalg import POLYDISC, FreeElement, TwistForm, TwistedElement, free_gauss_norm, gauss_norm
from .scalars import Scalar, format_lognorm

EXIT_OK, EXIT_CHECK, EXIT_MALFORMED, EXIT_PRECONDITION = 0, 1, 2, 3


class MalformedInput(Exception):
    pass


def _read(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def _parse(reader, data, what: str):
    try:
        return reader(data)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedInput(f"bad {what}: {exc!r}") from exc


def _vector(text: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise MalformedInput(f"bad vector {text!r}") from exc


def _q(text: str) -> Scalar:
    """``1``, ``1+t`` or a scalar JSON object."""
    t = text.replace(" ", "")
    if t == "1":
        return Scalar.const(1)
    if t == "1+t":
        return Scalar({0: 1, 1: 1})
    try:
        return Scalar.from_json(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad q {text!r}") from exc


def _emit(obj, args) -> None:
    text = json.dumps(obj, sort_keys=True)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# ----------------------------------------------------------------------
# norm


def cmd_norm_gauss(args):
    f = _parse(TwistedElement.from_json, _read(args.element), "element")
    rho = _vector(args.rho)
    if len(rho) != f.dim:
        raise ValueError("rho has the wrong dimension")
    return {"lognorm": format_lognorm(gauss_norm(f, rho))}, True


def cmd_norm_free(args):
    f = _parse(FreeElement.from_json, _read(args.element), "free element")
    return {"lognorm": format_lognorm(free_gauss_norm(f, _vector(args.radii)))}, True


def cmd_norm_check(args):
    rng = random.Random(args.seed)
    q = Scalar({0: 1, 1: 1})
    failures = []
    for i in range(args.pairs):
        d = rng.randint(1, 3)
        if args.free:
            f, g = samples.free_element(rng, d), samples.free_element(rng, d)
            r = samples.log_radii(rng, d)
            lhs, rhs = free_gauss_norm(f * g, r), free_gauss_norm(f, r) + free_gauss_norm(g, r)
        else:
            B = samples.skew_twist(rng, d)
            f, g = samples.element(rng, B, q), samples.element(rng, B, q)
            r = samples.log_radii(rng, d)
            lhs, rhs = gauss_norm(f * g, r), gauss_norm(f, r) + gauss_norm(g, r)
        if lhs != rhs:
            failures.append({"index": i, "lhs": format_lognorm(lhs), "rhs": format_lognorm(rhs)})
    return {"checked": args.pairs, "failures": failures, "ok": not failures}, not failures


# ----------------------------------------------------------------------
# seminorm


def cmd_seminorm_eval(args):
    f = _parse(TwistedElement.from_json, _read(args.element), "element")
    p = _parse(spectra.point_from_json, _read(args.point), "point")
    if isinstance(p, spectra.ShiftedTorusPoint):
        v = spectra.shifted_eval_torus(f, p, strict=False)
        return v.to_json(), v.certified
    return {"lognorm": format_lognorm(spectra.evaluate(p, f))}, True


def cmd_seminorm_check(args):
    rng = random.Random(args.seed)
    q = Scalar({0: 1, 1: 1})
    failures = []
    for i in range(args.pairs):
        d = rng.randint(1, 2)
        B = samples.skew_twist(rng, d)
        rho = tuple(Fraction(rng.randint(-4, 4), 2) for _ in range(d))
        if args.kind == "polydisc":
            a = [samples.small_scalar(rng, r, strict=False) for r in rho]
            p = spectra.ShiftedPolydiscPoint(a, rho)
            f = samples.element(rng, B, q, degree=3, domain=POLYDISC)
            g = samples.element(rng, B, q, degree=3, domain=POLYDISC)
        else:
            a = [samples.small_scalar(rng, r, strict=True) for r in rho]
            p = spectra.ShiftedTorusPoint(a, rho, tail_order=args.tail_order)
            f = samples.element(rng, B, q, degree=2)
            g = samples.element(rng, B, q, degree=2)
        try:
            lhs = spectra.evaluate(p, f * g)
            rhs = spectra.evaluate(p, f) + spectra.evaluate(p, g)
        except spectra.CertificationError as exc:
            failures.append({"index": i, "error": str(exc)})
            continue
        if lhs != rhs:
            failures.append({"index": i, "lhs": format_lognorm(lhs), "rhs": format_lognorm(rhs)})
    return {"checked": args.pairs, "failures": failures, "ok": not failures}, not failures


# ----------------------------------------------------------------------
# sheaf


def cmd_sheaf_transform(args):
    f = _parse(TwistedElement.from_json, _read(args.element), "element")
    g = _parse(sheaf.TransitionData.from_json, _read(args.transition), "transition")
    return sheaf.transform_section(g, f).to_json(), True


def cmd_sheaf_point(args):
    g = _parse(sheaf.TransitionData.from_json, _read(args.transition), "transition")
    x = sheaf.transform_point(g, _vector(args.x), args.convention)
    return {"point": [str(v) for v in x]}, True


def cmd_sheaf_check(args):
    rng = random.Random(args.seed)
    q = Scalar({0: 1, 1: 1})
    failures = []
    for i in range(args.trials):
        B = samples.skew_twist(rng, 2)
        g = samples.transition(rng)
        f = samples.element(rng, B, q, degree=3)
        x = samples.log_radii(rng, 2)
        if not sheaf.equivariance_holds(g, f, x, args.convention):
            failures.append(i)
    return {"checked": args.trials, "convention": args.convention,
            "failures": failures, "ok": not failures}, not failures


# ----------------------------------------------------------------------
# scatter


def _standard_walls(q: Scalar, order: int):
    B = TwistForm.ordered([[0, 1], [-1, 0]])
    g0 = scatter.wall_aut((1, 0), {1: 1}, B, q, order=order)
    ginf = scatter.wall_aut((0, 1), {1: 1}, B, q, order=order)
    return g0, ginf


def _residual_text(phi: scatter.WallAutomorphism) -> str:
    if phi.is_identity():
        return "0"
    u, v = phi.corrections()
    one = u.mono((0, 0))
    return f"xi: {u - one}; eta: {v - one}"


def cmd_scatter_factorize(args):
    q = _q(args.q)
    std0, stdinf = _standard_walls(q, args.order)
    g0 = _parse(scatter.aut_from_json, _read(args.g0), "g0") if args.g0 else std0
    ginf = _parse(scatter.aut_from_json, _read(args.ginf), "ginf") if args.ginf else stdinf
    F = scatter.factorize(g0, ginf, args.order)
    residual = _residual_text(F.residual())
    out = F.to_json()
    out["residual"] = residual
    return out, residual == "0"


def cmd_scatter_wall(args):
    q = _q(args.q)
    B = TwistForm.ordered([[0, 1], [-1, 0]])
    alpha = tuple(int(x) for x in _vector(args.alpha))
    coeffs = {j + 1: Scalar.const(c) for j, c in enumerate(_vector(args.coeffs))}
    phi = scatter.wall_aut(alpha, coeffs, B, q, order=args.order, sign=args.sign)
    return scatter.aut_to_json(phi), True


def cmd_scatter_diagram(args):
    d = _parse(scatter.ScatteringDiagram.from_json, _read(args.input), "diagram")
    out = scatter.scatter_chart(d, args.order)
    js = out.to_json()
    js["consistent"] = out.consistent()
    return js, out.consistent()


# ----------------------------------------------------------------------
# k3


def cmd_k3_verify(args):
    q = _q(args.q)
    pres = k3model.KThreePresentation(q)
    res = k3model.verify_chart_homomorphism(k3model.chart(args.chart, q), pres)
    strs = [str(r) for r in res]
    return {"residuals": strs}, all(s == "0" for s in strs)


def cmd_k3_sweep(args):
    q = _q(args.q)
    ch = k3model.chart(args.chart, q)
    rep = k3model.compatibility_sweep(ch, k3model.grid(ch, args.grid))
    return rep.to_json(), rep.ok


def cmd_k3_glue(args):
    q = _q(args.q)
    rep = k3model.glue_automorphism_check(args.overlap, q, args.order)
    rep.identification_roundtrip = k3model.identification_roundtrip(q)
    return rep.to_json(), rep.ok


def cmd_k3_conventions(args):
    q = _q(args.q)
    found = k3model.select_conventions(q)
    return {"conventions": [c.describe() for c in found],
            "unique": len(found) == 1}, len(found) == 1


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtate", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    p.add_argument("--precision", type=int, help="t-adic precision (overrides QTATE_PRECISION)")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    top = p.add_subparsers(dest="group", required=True)

    norm = top.add_parser("norm").add_subparsers(dest="cmd", required=True)
    s = norm.add_parser("gauss", help="Gauss norm of a twisted element")
    s.add_argument("--element", required=True)
    s.add_argument("--rho", required=True, help="comma-separated log-radii")
    s.set_defaults(func=cmd_norm_gauss)
    s = norm.add_parser("free", help="Gauss norm of a free-algebra element")
    s.add_argument("--element", required=True)
    s.add_argument("--radii", required=True)
    s.set_defaults(func=cmd_norm_free)
    s = norm.add_parser("check", help="random multiplicativity suite")
    s.add_argument("--pairs", type=int, default=500)
    s.add_argument("--free", action="store_true")
    s.set_defaults(func=cmd_norm_check)

    semi = top.add_parser("seminorm").add_subparsers(dest="cmd", required=True)
    s = semi.add_parser("eval", help="evaluate a seminorm point")
    s.add_argument("--element", required=True)
    s.add_argument("--point", required=True)
    s.set_defaults(func=cmd_seminorm_eval)
    s = semi.add_parser("check", help="random multiplicativity suite for shifted points")
    s.add_argument("--kind", choices=("polydisc", "torus"), default="polydisc")
    s.add_argument("--pairs", type=int, default=200)
    s.add_argument("--tail-order", type=int, default=12)
    s.set_defaults(func=cmd_seminorm_check)

    sh = top.add_parser("sheaf").add_subparsers(dest="cmd", required=True)
    s = sh.add_parser("transform", help="apply transition data to a section")
    s.add_argument("--element", required=True)
    s.add_argument("--transition", required=True)
    s.set_defaults(func=cmd_sheaf_transform)
    s = sh.add_parser("point", help="move a base point")
    s.add_argument("--transition", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--convention", choices=(sheaf.PULLBACK, sheaf.PUSHFORWARD),
                   default=sheaf.PULLBACK)
    s.set_defaults(func=cmd_sheaf_point)
    s = sh.add_parser("check", help="random equivariance suite")
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--convention", choices=(sheaf.PULLBACK, sheaf.PUSHFORWARD),
                   default=sheaf.PUSHFORWARD)
    s.set_defaults(func=cmd_sheaf_check)

    sc = top.add_parser("scatter").add_subparsers(dest="cmd", required=True)
    s = sc.add_parser("factorize", help="ordered factorization of g_inf * g_0")
    s.add_argument("--g0", nargs="?", const=None, help="wall JSON (default: standard wall)")
    s.add_argument("--ginf", nargs="?", const=None, help="wall JSON (default: standard wall)")
    s.add_argument("--order", type=int, default=scatter.DEFAULT_ORDER)
    s.add_argument("--q", default="1")
    s.set_defaults(func=cmd_scatter_factorize)
    s = sc.add_parser("wall", help="emit a wall automorphism as JSON")
    s.add_argument("--alpha", required=True)
    s.add_argument("--coeffs", required=True, help="c_1,c_2,... of f = 1 + c_1 z + ...")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)
    s.add_argument("--order", type=int, default=scatter.DEFAULT_ORDER)
    s.add_argument("--q", default="1")
    s.set_defaults(func=cmd_scatter_wall)
    s = sc.add_parser("diagram", help="scatter the lines of a diagram")
    s.add_argument("--input", required=True)
    s.add_argument("--order", type=int, default=scatter.DEFAULT_ORDER)
    s.set_defaults(func=cmd_scatter_diagram)

    k3 = top.add_parser("k3").add_subparsers(dest="cmd", required=True)
    s = k3.add_parser("verify", help="relation residuals of a chart")
    s.add_argument("--chart", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--order", type=int, default=8, help="unused: the check is exact")
    s.add_argument("--q", default="1+t")
    s.set_defaults(func=cmd_k3_verify)
    s = k3.add_parser("sweep", help="compatibility of j, pi_i, f and g_i on a grid")
    s.add_argument("--chart", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--grid", type=int, default=20)
    s.add_argument("--q", default="1+t")
    s.set_defaults(func=cmd_k3_sweep)
    s = k3.add_parser("glue", help="checks for the gluing automorphism")
    s.add_argument("--overlap", choices=("12", "13"), required=True)
    s.add_argument("--order", type=int, default=6)
    s.add_argument("--q", default="1+t")
    s.set_defaults(func=cmd_k3_glue)
    s = k3.add_parser("conventions", help="run the orientation oracle")
    s.add_argument("--q", default="1+t")
    s.set_defaults(func=cmd_k3_conventions)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get("QTATE_PRECISION")
    if args.precision is not None:
        os.environ["QTATE_PRECISION"] = str(args.precision)
    try:
        report, ok = args.func(args)
    except MalformedInput as exc:
        sys.stderr.write(json.dumps({"error": "malformed input", "detail": str(exc)}) + "\n")
        return EXIT_MALFORMED
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(json.dumps({"error": "precondition", "detail": str(exc)}) + "\n")
        return EXIT_PRECONDITION
    finally:
        if saved is None:
            os.environ.pop("QTATE_PRECISION", None)
        else:
            os.environ["QTATE_PRECISION"] = saved
    _emit(report, args)
    return EXIT_OK if ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
