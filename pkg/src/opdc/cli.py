"""Command-line front end: ``opdc <subcommand> ...``.

Exit codes: 0 on success, 1 when a verification finds a violation, 2 on a
usage error or a parameter pole.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import families as fam
from . import suites
from .cmv import build_pencil_matrix, pencil_recurrence
from .core import format_rational, parse_rational, parse_rational_list
from .dressing import chain_report, verify_identities
from .errors import IdentityViolation, OPDCError
from .opuc import ReflectionSequence, classify, sequence_from_json, szego_polynomials
from .transforms import ThreeTermRecurrence, chihara_split, christoffel, rescale, sdg_step

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


def fracs(values) -> list[str]:
    return [format_rational(v) for v in values]


def indexed(prefix: str, values) -> dict:
    return {f"{prefix}{k}": format_rational(v) for k, v in enumerate(values)}


def emit_json(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(float(v)) if isinstance(v, (float, Fraction, np.floating)) else v for v in row])


def rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def rational_list_arg(text: str) -> list[Fraction]:
    try:
        return parse_rational_list(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# -- argument sources ----------------------------------------------------------


def bi_params(args) -> fam.BIParameters:
    if args.params_json:
        with open(args.params_json) as fh:
            obj = json.load(fh)
        return fam.parse_bi(obj["params"])
    missing = [f for f in ("rho1", "rho2", "r1", "r2") if getattr(args, f) is None]
    if missing:
        raise UsageError("missing parameter(s): " + ", ".join("--" + m for m in missing))
    return fam.BIParameters(args.rho1, args.rho2, args.r1, args.r2)


def reflection_sequence(args) -> ReflectionSequence:
    if args.a is not None:
        a = tuple(args.a)
        return ReflectionSequence.from_generator(lambda k: a[k] if k < len(a) else Fraction(0), label="prefix")
    if args.seq_json:
        with open(args.seq_json) as fh:
            return sequence_from_json(json.load(fh))
    if all(getattr(args, f, None) is not None for f in ("rho1", "rho2", "r1", "r2")):
        return fam.bi_sequence(fam.BIParameters(args.rho1, args.rho2, args.r1, args.r2))
    raise UsageError("a reflection sequence is required (--a, --seq-json or --rho1/--rho2/--r1/--r2)")


class UsageError(Exception):
    pass


def resolve_seed(args) -> int:
    env = os.environ.get("OPDC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"OPDC_SEED must be an integer, got {env!r}") from None
    return args.seed


# -- subcommands ---------------------------------------------------------------------


def cmd_families(args, out) -> int:
    n = args.n
    if args.family == "rw":
        if all(getattr(args, f"beta{i}") is not None for i in range(1, 5)):
            beta = fam.RWParameters(args.beta1, args.beta2, args.beta3, args.beta4)
        else:
            beta = fam.beta_map(bi_params(args))
        A, C = fam.rw_coeffs(beta, n)
        a = fam.rw_reflection(beta, n)
        if args.output == "csv":
            emit_csv(["n", "A", "C", "a"], ((k, A[k], C[k], a[k]) for k in range(n)), out)
            return EXIT_OK
        emit_json({"family": "racah-wilson", "params": beta.to_json(), "sigma": format_rational(beta.sigma),
                   "n": n, "coefficients": {**indexed("A", A), **indexed("C", C)},
                   "A": fracs(A), "C": fracs(C), "reflection": fracs(a)}, out)
        return EXIT_OK

    p = bi_params(args)
    if args.family == "bi":
        bi = fam.bi_coeffs(p, n)
        a = fam.bi_reflection(p, n)
        seed = fam.bi_seed(p)
        if args.output == "csv":
            emit_csv(["n", "A", "C", "b", "u", "a"],
                     ((k, bi.A[k], bi.C[k], bi.rec.b[k], bi.rec.u[k], a[k]) for k in range(n)), out)
            return EXIT_OK
        emit_json({"family": "bannai-ito", "params": p.to_json(), "n": n,
                   "coefficients": {**indexed("A", bi.A), **indexed("C", bi.C)},
                   "A": fracs(bi.A), "C": fracs(bi.C), "b": fracs(bi.rec.b), "u": fracs(bi.rec.u),
                   "reflection": fracs(a),
                   "seed": {"a0": format_rational(seed.a0), "lambda0": format_rational(seed.lambda0),
                            "lambda_bi": format_rational(seed.lambda_bi),
                            "sqrt_lambda_bi": format_rational(seed.sqrt_lambda_bi)}}, out)
        return EXIT_OK

    cbi = fam.cbi_coeffs(p, n)
    if args.output == "csv":
        emit_csv(["n", "b", "v"], ((k, cbi.rec.b[k], cbi.v[k]) for k in range(n)), out)
        return EXIT_OK
    emit_json({"family": "complementary-bannai-ito", "params": p.to_json(), "n": n,
               "coefficients": indexed("v", cbi.v), "b": fracs(cbi.rec.b), "v": fracs(cbi.v)}, out)
    return EXIT_OK


def cmd_szego(args, out) -> int:
    seq = reflection_sequence(args)
    pair = szego_polynomials(seq, args.n)
    cls = classify(seq, args.n)
    if args.output == "csv":
        emit_csv(["power", "phi", "phi_star"],
                 ((k, pair.phi.coeffs[k] if k < len(pair.phi.coeffs) else Fraction(0),
                   pair.phi_star.coeffs[k] if k < len(pair.phi_star.coeffs) else Fraction(0))
                  for k in range(args.n + 1)), out)
        return EXIT_OK
    emit_json({"n": args.n, "a": fracs(seq.prefix(args.n)),
               "phi": fracs(pair.phi.coeffs), "phi_star": fracs(pair.phi_star.coeffs),
               "epsilon": list(cls.epsilon), "classical": cls.classical}, out)
    return EXIT_OK


def cmd_pencil(args, out) -> int:
    seq = reflection_sequence(args)
    x = args.x if args.x is not None else Fraction(0)
    rec = pencil_recurrence(seq, args.lam, args.n)
    mat = build_pencil_matrix(seq, float(args.lam), float(x), args.n)
    if mat.is_symmetric:
        eig = np.sort(mat.eigvalsh())
    else:
        eig = np.linalg.eigvals(mat.dense())
        eig = eig[np.lexsort((eig.imag, eig.real))]
    if args.output == "csv":
        if np.all(np.abs(np.imag(eig)) < 1e-12):
            emit_csv(["eigenvalue"], ([float(np.real(e))] for e in eig), out)
        else:
            emit_csv(["re", "im"], ([float(e.real), float(e.imag)] for e in eig), out)
        return EXIT_OK
    emit_json({"lambda": format_rational(args.lam), "x": format_rational(x), "n": args.n,
               "b": fracs(b - x for b in rec.b), "u": fracs(rec.u), "matrix": mat.to_json()}, out)
    return EXIT_OK


def cmd_transform(args, out) -> int:
    if args.kind == "christoffel":
        if args.b is None or args.u is None or args.theta is None:
            raise UsageError("christoffel needs --b, --u and --theta")
        rec = ThreeTermRecurrence.from_lists(args.b, args.u)
        res = christoffel(rec, args.theta)
        emit_json({"theta": format_rational(res.theta), "A": fracs(res.A), "C": fracs(res.C),
                   "b": fracs(res.transformed.b), "u": fracs(res.transformed.u)}, out)
        return EXIT_OK
    if args.kind == "chihara":
        if args.A is None or args.C is None or args.chi is None:
            raise UsageError("chihara needs --A, --C and --chi")
        rec = chihara_split(args.A, args.C, args.chi, args.n)
        emit_json({"chi": format_rational(args.chi), "b": fracs(rec.b), "u": fracs(rec.u)}, out)
        return EXIT_OK

    seq = reflection_sequence(args)
    if args.lam is None:
        raise UsageError(f"{args.kind} needs --lambda")
    if args.kind == "sdg":
        res = sdg_step(seq, args.lam, args.n)
        emit_json({"lambda": format_rational(res.lam), "ustar": fracs(res.ustar),
                   "A": fracs(res.christoffel.A), "C": fracs(res.christoffel.C),
                   "b": fracs(res.recurrence.b), "u": fracs(res.recurrence.u)}, out)
        return EXIT_OK
    if args.sqrt_lambda is None:
        raise UsageError("rescale needs --sqrt-lambda")
    lam0 = args.lambda0 if args.lambda0 is not None else Fraction(1)
    sdg = sdg_step(seq, args.lam * lam0, args.n)
    res = rescale(sdg, args.lam, args.sqrt_lambda, lam0)
    emit_json({"lambda": format_rational(res.lam), "sqrt_lambda": format_rational(res.sqrt_lam),
               "lambda0": format_rational(res.lam0), "chi": format_rational(res.chi),
               "b": fracs(res.recurrence.b), "u": fracs(res.recurrence.u)}, out)
    return EXIT_OK


def suite_exit(result: suites.SuiteResult, out) -> int:
    emit_json(result.to_json(), out)
    if not result.passed:
        print("counterexample: " + json.dumps(result.counterexample), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.suite == "identities":
        seq = reflection_sequence(args)
        lam = float(args.lam) if args.lam is not None else 0.5
        lam0 = float(args.lambda0) if args.lambda0 is not None else 1.0
        rep = verify_identities(seq, lam, lam0, n=args.n)
        emit_json(rep.to_json(), out)
        if not rep.passed:
            bad = next(c for c in rep.checks if not c.passed and not c.informational)
            print("counterexample: " + json.dumps({"a": fracs(seq.prefix(min(args.n, 8))), "lambda": lam,
                                                   "lambda0": lam0, **bad.to_json()}), file=sys.stderr)
            return EXIT_VIOLATION
        return EXIT_OK

    seed = resolve_seed(args)
    trials = args.trials
    if args.suite == "bi-chain":
        res = suites.bi_chain_suite(seed, trials or 100, args.n, args.bound)
    elif args.suite == "rw-bridge":
        res = suites.rw_bridge_suite(seed, trials or 100, args.n, args.bound)
    elif args.suite == "sdg":
        res = suites.sdg_suite(seed, trials or 100, args.n, args.bound)
    elif args.suite == "roundtrip":
        res = suites.roundtrip_suite(seed, trials or 100, args.n, args.bound)
    elif args.suite == "darboux":
        res = suites.darboux_suite(seed, trials or 20, args.n)
    else:
        res = suites.quad_algebra_suite(seed, trials or 10, args.n, args.bound)
    return suite_exit(res, out)


def cmd_chain(args, out) -> int:
    if args.a is not None or args.seq_json:
        seq = reflection_sequence(args)
    else:
        seq = ReflectionSequence.from_generator(lambda k: Fraction((-1) ** k * (k + 2), 3 * k + 7))
    rep = chain_report(seq, args.lam, args.x, args.lambda_t, n=args.n)
    emit_json(rep, out)
    triv = [s for s in rep["solutions"] if s["trivial_flag"]]
    return EXIT_OK if triv and all(s["residual"] < 1e-10 for s in triv) else EXIT_VIOLATION


# -- parser ---------------------------------------------------------------------------------


def _seq_flags(p):
    p.add_argument("--a", type=rational_list_arg, help="comma-separated reflection parameters, e.g. --a=-1/2,1/3")
    p.add_argument("--seq-json", metavar="FILE", help='JSON {"a": [...], "generator": null | {...}}')


def _bi_flags(p):
    for name in ("rho1", "rho2", "r1", "r2"):
        p.add_argument(f"--{name}", type=rational_arg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opdc", description=__doc__.splitlines()[0])
    parser.add_argument("--output", choices=["json", "csv"], default="json")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "csv"], default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("families", parents=[common], help="coefficient tables of BI, complementary BI and RW")
    p.add_argument("family", choices=["bi", "cbi", "rw"])
    _bi_flags(p)
    for i in range(1, 5):
        p.add_argument(f"--beta{i}", type=rational_arg)
    p.add_argument("--params-json", metavar="FILE", help='JSON {"family": ..., "params": {...}, "n": N}')
    p.add_argument("-n", type=int, default=10)
    p.set_defaults(func=cmd_families)

    p = sub.add_parser("szego", parents=[common], help="Szego polynomials Phi_n and Phi_n^*")
    _seq_flags(p)
    _bi_flags(p)
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_szego)

    p = sub.add_parser("pencil", parents=[common], help="pencil recurrence, matrix and spectrum")
    _seq_flags(p)
    _bi_flags(p)
    p.add_argument("--lambda", dest="lam", type=rational_arg, required=True)
    p.add_argument("--x", type=rational_arg)
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_pencil)

    p = sub.add_parser("transform", parents=[common], help="christoffel, sdg, rescale or chihara step")
    p.add_argument("kind", choices=["christoffel", "sdg", "rescale", "chihara"])
    _seq_flags(p)
    _bi_flags(p)
    p.add_argument("--b", type=rational_list_arg)
    p.add_argument("--u", type=rational_list_arg)
    p.add_argument("--A", type=rational_list_arg)
    p.add_argument("--C", type=rational_list_arg)
    p.add_argument("--theta", type=rational_arg)
    p.add_argument("--chi", type=rational_arg)
    p.add_argument("--lambda", dest="lam", type=rational_arg)
    p.add_argument("--sqrt-lambda", type=rational_arg)
    p.add_argument("--lambda0", type=rational_arg)
    p.add_argument("-n", type=int, default=10)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", parents=[common], help="identity checks and randomized suites")
    p.add_argument("suite", choices=["identities", "bi-chain", "rw-bridge", "darboux", "quad-algebra",
                                     "sdg", "roundtrip"])
    _seq_flags(p)
    _bi_flags(p)
    p.add_argument("--lambda", dest="lam", type=rational_arg)
    p.add_argument("--lambda0", type=rational_arg)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int)
    p.add_argument("--bound", type=int, default=20)
    p.add_argument("-n", type=int, default=50)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chain", parents=[common], help="one-step dressing chain solutions")
    _seq_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--lambda-t", type=float, required=True)
    p.add_argument("-n", type=int, default=24)
    p.set_defaults(func=cmd_chain)
    return parser


NEGATIVE_VALUE = re.compile(r"^-\d[\d/,.\-]*$")


def attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--flag -1/2`` as ``--flag=-1/2`` so argparse does not read the value as an option."""
    out = []
    for tok in argv:
        if out and NEGATIVE_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    argv = attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except IdentityViolation as exc:
        print(f"opdc: violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except UsageError as exc:
        print(f"opdc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OPDCError, ZeroDivisionError, RuntimeError, ValueError) as exc:
        print(f"opdc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    buf = io.StringIO()
    code = run(argv, buf)
    sys.stdout.write(buf.getvalue())
    sys.exit(code)


if __name__ == "__main__":
    main()
