"""Command-line entry point.  Every command prints one JSON document.

Exit codes: 0 success, 1 selftest failure, 2 usage error, 3 validation error,
4 internal consistency error.
"""

import argparse
import json
import sys

from .config import Config
from .errors import CMLLError, InternalConsistencyError, PrecisionError, ValidationError
from .quadfield import format_element, make_field, parse_element

SCHEMA = "1"

EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_INTERNAL = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# -- argument helpers ----------------------------------------------------------


def parse_ideal(ctx, text):
    """'3', '2+1*w' or 'g1;g2' -> the O_K-span of the generators."""
    from .ideals import ideal_from_gens

    gens = [g for g in text.split(";") if g.strip()]
    if not gens:
        raise ValidationError(f"empty ideal {text!r}")
    return ideal_from_gens(ctx, [parse_element(ctx, g) for g in gens])


def _integral(ctx, text):
    x = parse_element(ctx, text)
    if not x.is_integral():
        raise ValidationError(f"{text!r} is not an algebraic integer")
    return x.to_quadint()


def _prime(args):
    """(ctx, pi): ctx None means O = Z."""
    if args.d is None:
        try:
            return None, int(args.p)
        except ValueError:
            raise ValidationError(f"without -d the prime must be a rational integer, got {args.p!r}") from None
    ctx = make_field(args.d)
    return ctx, _integral(ctx, args.p)


def _config(args):
    return Config.from_env(bits=args.bits, prec=args.prec, deg=args.deg, cap_norm=args.cap_norm)


# -- commands ------------------------------------------------------------------------


def cmd_field_info(args, cfg):
    from .rayclass import class_group

    K = make_field(args.d)
    return {
        "field": K.to_json(),
        "disc": K.disc,
        "omega": "sqrt(-d)" if K.t == 0 else "(1+sqrt(-d))/2",
        "omega_min_poly": [K.n, -K.t, 1],
        "units": K.w,
        "class_number": class_group(K, cfg.cap_norm).h,
    }


def cmd_ideal_info(args, cfg):
    from .rayclass import class_group

    K = make_field(args.d)
    a = parse_ideal(K, args.a)
    gen = a.generator()
    return {
        "ideal": a.to_json(),
        "norm": str(a.norm()),
        "integral": a.is_integral(),
        "prime": a.is_prime() if a.is_integral() else False,
        "factorization": [{"prime": p.to_json(), "exponent": e} for p, e in a.factor()],
        "principal": gen is not None,
        "generator": None if gen is None else format_element(gen),
        "class": class_group(K, cfg.cap_norm).class_index(a),
    }


def cmd_ideal_mul(args, cfg):
    K = make_field(args.d)
    a, b = parse_ideal(K, args.a), parse_ideal(K, args.b)
    c = a * b
    return {"product": c.to_json(), "norm": str(c.norm())}


def _ray_group(args, cfg):
    from .rayclass import ray_class_group

    K = make_field(args.d)
    f = parse_ideal(K, args.f)
    return K, ray_class_group(K, f, cfg.cap_norm, cfg.cap_order)


def cmd_rayclass_order(args, cfg):
    _, G = _ray_group(args, cfg)
    return G.to_json()


def cmd_rayclass_dlog(args, cfg):
    K, G = _ray_group(args, cfg)
    out = G.to_json()
    out["class"] = G.dlog(parse_ideal(K, args.a))
    return out


def _witt_params(args):
    from .wittlambda import witt_params

    ctx, pi = _prime(args)
    return witt_params(pi, ctx, args.q)


def cmd_witt_poly(args, cfg):
    from .wittlambda import witt_polynomials

    return witt_polynomials(_witt_params(args), args.n).to_json()


def _witt_csv(params, text, n):
    items = [s for s in text.split(",") if s.strip()]
    if len(items) != n:
        raise ValidationError(f"expected {n} coordinates, got {len(items)}")
    if params.ctx is None:
        try:
            return [int(s) for s in items]
        except ValueError:
            raise ValidationError(f"coordinates must be integers: {text!r}") from None
    return [_integral(params.ctx, s) for s in items]


def cmd_witt_binary(args, cfg):
    from .wittlambda import ghost_map, witt_add, witt_mul, witt_vector

    P = _witt_params(args)
    x = witt_vector(P, _witt_csv(P, args.x, args.n))
    y = witt_vector(P, _witt_csv(P, args.y, args.n))
    if args.op == "add":
        z, expected = witt_add(x, y), ghost_map(x) + ghost_map(y)
    else:
        z, expected = witt_mul(x, y), ghost_map(x) * ghost_map(y)
    gz = ghost_map(z)
    if gz != expected:
        raise InternalConsistencyError("ghost map is not a homomorphism on this input")
    return {"op": args.op, "result": z.to_json(), "ghost": gz.to_json()}


def cmd_lambda_verify(args, cfg):
    import random

    from .ideals import primes_up_to
    from .wittlambda import OKCarrier, OKTCarrier, verify_lambda

    K = make_field(args.d)
    primes = primes_up_to(K, args.bound)
    rng = random.Random(args.seed)
    if args.carrier == "okx":
        C = OKCarrier(K)
        lifts = {p: (lambda x: x) for p in primes}
    else:
        C = OKTCarrier(K)
        lifts = {p: C.monomial_lift(p.norm_int()) for p in primes}
    samples = [C.random(rng) for _ in range(args.samples)]
    report = verify_lambda(C, lifts, primes, samples)
    report["carrier"] = C.name
    report["primes"] = [p.to_json() for p in primes]
    return report


def _lt_module(args, cfg):
    from .lubintate import PadicCoeffRing, canonical_f, lt_construct, multiplicative_f

    ctx, pi = _prime(args)
    ring = PadicCoeffRing(ctx, pi, cfg.prec)
    f = multiplicative_f(ring, cfg.deg) if args.f == "mult" else canonical_f(ring, cfg.deg)
    return lt_construct(ring, f, cfg.deg)


def cmd_lt_law(args, cfg):
    M = _lt_module(args, cfg)
    out = M.to_json()
    out["law"] = M.law.to_json()
    return out


def cmd_lt_endo(args, cfg):
    M = _lt_module(args, cfg)
    a = M.ring.parse(args.a)
    return {"module": M.to_json(), "a": args.a, "series": M.endo(a).to_json()}


def cmd_lt_torsion(args, cfg):
    from .lubintate import torsion_polynomial, torsion_quotient

    M = _lt_module(args, cfg)
    tq = torsion_quotient(M, args.n)
    tq["quotient"] = tq["quotient"].to_json()
    return {"module": M.to_json(), "n": args.n, "torsion_polynomial": torsion_polynomial(M, args.n).to_json(), **tq}


def cmd_cm_torsor(args, cfg):
    from .cmlattice import moduli_set

    K = make_field(args.d)
    return moduli_set(K, parse_ideal(K, args.f), cfg.cap_norm).to_json()


def cmd_cm_hilbert(args, cfg):
    from .cmlattice import hilbert_class_polynomial

    H = hilbert_class_polynomial(make_field(args.d), cfg.bits)
    return {
        "poly": [str(c) for c in H.coeffs],
        "degree": len(H.coeffs) - 1,
        "polynomial": str(H),
        "residual": f"{H.residual:.3e}",
        "bits": H.bits,
    }


def cmd_cm_ghost(args, cfg):
    from .cmlattice import cm_curve, ghost_composition_report, ghost_rigidity_check
    from .quadfield import unit_group

    K = make_field(args.d)
    E = cm_curve(K)
    comp = ghost_composition_report(E, args.bound)
    rigid = {format_element(u): ghost_rigidity_check(E, u, args.bound)["pass"] for u in unit_group(K)}
    return {"bound": args.bound, "composition": comp, "rigidity": rigid, "pass": comp["pass"] and all(rigid.values())}


def cmd_cm_torsion(args, cfg):
    from .cmlattice import cm_curve, torsion_module

    K = make_field(args.d)
    E = cm_curve(K, parse_ideal(K, args.lattice))
    return {"lattice": E.lattice.to_json(), **torsion_module(E, parse_ideal(K, args.f), cfg.cap_norm).to_json()}


def cmd_tannaka_verify(args, cfg):
    from .tannaka import choose_generators, cocycle_report, relation_checks

    K, G = _ray_group(args, cfg)
    g = parse_ideal(K, args.g) if args.g else None
    data = choose_generators(G, g)
    coc = cocycle_report(data, args.bound)
    rel = relation_checks(data, args.bound)
    return {"setup": data.to_json(), "cocycle": coc, "relations": rel, "pass": coc["pass"] and rel["pass"]}


def cmd_selftest(args, cfg):
    from .acceptance import selftest_report

    return selftest_report()


# -- parser --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--out", metavar="FILE", help="also write the JSON to FILE")
    common.add_argument("--bits", type=int, help="complex working precision in bits")
    common.add_argument("--prec", type=int, help="pi-adic precision N")
    common.add_argument("--deg", type=int, help="series degree cutoff D")
    common.add_argument("--cap-norm", dest="cap_norm", type=int, help="ideal norm enumeration cap")

    parser = _Parser(prog="cmll", description="Exact arithmetic for imaginary quadratic fields and CM.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def group(name, help):
        p = sub.add_parser(name, help=help)
        return p.add_subparsers(dest="action", required=True, parser_class=_Parser)

    def leaf(subs, name, func, help=None, field=True):
        p = subs.add_parser(name, parents=[common], help=help)
        if field:
            p.add_argument("-d", type=int, required=True, help="K = Q(sqrt(-d))")
        p.set_defaults(func=func)
        return p

    g = group("field", "field data")
    leaf(g, "info", cmd_field_info)

    g = group("ideal", "fractional ideals")
    leaf(g, "info", cmd_ideal_info).add_argument("-a", required=True)
    p = leaf(g, "mul", cmd_ideal_mul)
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)

    g = group("rayclass", "ray class groups")
    leaf(g, "order", cmd_rayclass_order).add_argument("-f", required=True)
    p = leaf(g, "dlog", cmd_rayclass_dlog)
    p.add_argument("-f", required=True)
    p.add_argument("-a", required=True)

    g = group("witt", "Witt vectors")
    p = leaf(g, "poly", cmd_witt_poly, field=False)
    p.add_argument("-d", type=int, help="work over O_K instead of Z")
    p.add_argument("-p", required=True, help="prime element")
    p.add_argument("-q", type=int, help="residue field size (checked)")
    p.add_argument("-n", type=int, required=True, help="number of coordinates")
    for op in ("add", "mul"):
        p = leaf(g, op, cmd_witt_binary, field=False)
        p.set_defaults(op=op, q=None)
        p.add_argument("-d", type=int)
        p.add_argument("-p", required=True)
        p.add_argument("-n", type=int, required=True)
        p.add_argument("--x", required=True, help="comma separated coordinates")
        p.add_argument("--y", required=True)

    g = group("lambda", "Frobenius lifts")
    p = leaf(g, "verify", cmd_lambda_verify)
    p.add_argument("--carrier", choices=["okx", "okt"], required=True, help="okx: O_K with identity lifts; okt: O_K[T] with T -> T^Np")
    p.add_argument("--bound", type=int, default=20, help="primes of norm <= bound")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    g = group("lt", "Lubin-Tate modules")
    lt_parsers = [leaf(g, "law", cmd_lt_law, field=False), leaf(g, "endo", cmd_lt_endo, field=False), leaf(g, "torsion", cmd_lt_torsion, field=False)]
    for p in lt_parsers:
        p.add_argument("-d", type=int, help="work over O_K instead of Z")
        p.add_argument("-p", default="2", help="prime element (default 2)")
        p.add_argument("--f", choices=["canonical", "mult"], default="canonical")
    lt_parsers[1].add_argument("-a", required=True, help="element of O")
    lt_parsers[2].add_argument("-n", type=int, required=True)

    g = group("cm", "CM lattices")
    leaf(g, "torsor", cmd_cm_torsor).add_argument("-f", default="1")
    leaf(g, "hilbert", cmd_cm_hilbert)
    leaf(g, "ghost", cmd_cm_ghost).add_argument("--bound", type=int, default=20)
    p = leaf(g, "torsion", cmd_cm_torsion)
    p.add_argument("--lattice", default="1")
    p.add_argument("-f", required=True)

    g = group("tannaka", "cocycle verification")
    p = leaf(g, "verify", cmd_tannaka_verify)
    p.add_argument("-f", default="1")
    p.add_argument("-g", help="auxiliary modulus (default: f)")
    p.add_argument("--bound", type=int, default=30)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.set_defaults(func=cmd_selftest)
    return parser


def render(payload, pretty=False):
    doc = {"schema": SCHEMA, **payload}
    return json.dumps(doc, indent=2 if pretty else None, ensure_ascii=False, default=str)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = _config(args)
        payload = args.func(args, cfg)
    except InternalConsistencyError as exc:
        sys.stderr.write(f"cmll: internal consistency error [{exc.code}]: {exc}\n")
        return EXIT_INTERNAL
    except PrecisionError as exc:
        hint = f" (try --bits {exc.advisory_bits})" if exc.advisory_bits else ""
        sys.stderr.write(f"cmll: precision error [{exc.code}]: {exc}{hint}\n")
        return EXIT_VALIDATION
    except (CMLLError, ValueError) as exc:
        code = getattr(exc, "code", "validation")
        sys.stderr.write(f"cmll: validation error [{code}]: {exc}\n")
        return EXIT_VALIDATION
    text = render(payload, args.pretty)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    sys.stdout.write(text + "\n")
    if args.command == "selftest" and not payload.get("pass"):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
