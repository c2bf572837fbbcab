"""Command line interface.

Exit codes: 0 success, 1 a check failed or an identity broke, 2 usage error,
3 resource exhaustion (square tests left undecided by the bit budget).
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .arith import is_prime, jacobi, quartic_residue_2
from .harness.render import FORMATS, report_render
from .harness.scans import LEMMAS, run_scan
from .iwasawa import kida_for_pair, kida_input_for_pair, splitting
from .kuroda import KurodaInconsistency, KurodaInput, kuroda_h2, kuroda_v, kuroda_value
from .quadratic import class_data, fundamental_unit
from .tower import pi_candidates, predict
from .unit_lattice import (
    CASES,
    MultiQuadField,
    IdentityFailure,
    cm_unit_index,
    decompose_unit,
    hasse_index,
    orient,
    unit_index,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _pair(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected two integers q1,q2")
    return vals[0], vals[1]


def _field(gens: list[int]) -> MultiQuadField:
    field = MultiQuadField(gens)
    if field.k < 1:
        raise UsageError(f"generators {gens} give the rational field")
    return field


# --------------------------------------------------------------------------
# subcommand handlers; each returns (object to render, exit code)


def cmd_pell(a):
    u = fundamental_unit(a.d)
    return {"d": a.d, "unit": str(u), "x_num": u.x_num, "y_num": u.y_num,
            "denom": u.denom, "norm": u.norm}, EXIT_OK


def cmd_classdata(a):
    return class_data(a.d), EXIT_OK


def cmd_jacobi(a):
    return {"a": a.a, "n": a.n, "jacobi": jacobi(a.a, a.n)}, EXIT_OK


def cmd_quartic2(a):
    return {"p": a.p, "quartic_residue_2": quartic_residue_2(a.p)}, EXIT_OK


def cmd_decompose(a):
    dec = decompose_unit(a.case, a.q1, a.q2)
    out = {"case": dec.case, "q1": dec.q1, "q2": dec.q2, "d": dec.d, "unit": str(dec.unit),
           "witnesses": dec.witnesses, "verified": dec.verified()}
    return out, EXIT_OK if out["verified"] else EXIT_FAIL


def _fsu(units) -> list[str]:
    return [str(u) for u in units]


def cmd_qindex(a):
    field = _field(a.gens)
    if field.is_real:
        res = unit_index(field)
        if res.q_index is None:
            return {"field": field, "q_index": None, "unknown_tests": res.unknown_tests}, EXIT_RESOURCE
        return {"field": field, "q_index": res.q_index, "fsu": _fsu(res.fsu)}, EXIT_OK
    q, hs, ui = cm_unit_index(field)
    return {"field": field, "q_index": q, "hasse_Q": hs.Q, "q_plus": ui.q_index,
            "fsu_plus": _fsu(ui.fsu), "fsu": hs.fsu}, EXIT_OK


def cmd_kuroda(a):
    field = _field(a.gens)
    inp = KurodaInput.build(field, a.q)
    out = {"field": field, "q_index": a.q, "v": kuroda_v(field.k, field.is_real),
           "value": kuroda_value(inp)}
    try:
        out["h2"] = kuroda_h2(inp)
    except KurodaInconsistency as exc:
        out["h2"] = None
        out["inconsistency"] = str(exc)
        return out, EXIT_FAIL
    return out, EXIT_OK


def cmd_hasse(a):
    field = _field(a.gens)
    hs = hasse_index(field, n0=a.n0)
    out = {"field": field, "Q": hs.Q, "n0": hs.n0, "factor": hs.factor,
           "witness": None if hs.witness is None else str(hs.witness),
           "new_unit": hs.new_unit, "fsu": hs.fsu, "notes": hs.notes}
    return out, EXIT_OK


def cmd_splitting(a):
    if not is_prime(a.q):
        raise UsageError(f"{a.q} is not prime")
    return splitting(a.q, a.n), EXIT_OK


def cmd_kida(a):
    q1, q2 = orient(*a.pair)
    lam = kida_for_pair(q1, q2)
    return {"pair": [q1, q2], "input": kida_input_for_pair(q1, q2), "lambda_minus": lam}, EXIT_OK


def cmd_predict(a):
    return predict(a.d, a.n), EXIT_OK


def cmd_pi(a):
    return pi_candidates(a.p), EXIT_OK


def cmd_scan(a):
    rep = run_scan(a.lemma, a.bound, a.jobs, a.cache)
    if rep.failures:
        return rep, EXIT_FAIL
    if rep.unknown > a.max_unknown:
        return rep, EXIT_RESOURCE
    return rep, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS,
                     help="output format (default table)")
    p = argparse.ArgumentParser(
        prog="twoclass",
        description="Class numbers, unit indices and 2-class tower predictions.",
        epilog="Negative generators need the '=' form, e.g. --gens=-3,11,2.",
    )
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        sp = sub.add_parser(name, parents=[fmt], help=help_text)
        sp.set_defaults(handler=handler)
        return sp

    sp = add("pell", cmd_pell, "fundamental unit of Q(sqrt d)")
    sp.add_argument("d", type=int)
    sp = add("classdata", cmd_classdata, "class numbers of Q(sqrt d)")
    sp.add_argument("d", type=int)
    sp = add("jacobi", cmd_jacobi, "Jacobi symbol (a/n)")
    sp.add_argument("a", type=int)
    sp.add_argument("n", type=int)
    sp = add("quartic2", cmd_quartic2, "quartic symbol (2/p)_4 for p = 1 mod 8")
    sp.add_argument("p", type=int)
    sp = add("decompose", cmd_decompose, "explicit unit decomposition with witnesses")
    sp.add_argument("--case", choices=CASES, required=True)
    sp.add_argument("--q1", type=int, required=True)
    sp.add_argument("--q2", type=int)
    sp = add("qindex", cmd_qindex, "unit index of a multiquadratic field")
    sp.add_argument("--gens", type=_int_list, required=True)
    sp = add("kuroda", cmd_kuroda, "Kuroda's formula on 2-parts")
    sp.add_argument("--gens", type=_int_list, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp = add("hasse", cmd_hasse, "Hasse unit index of a CM multiquadratic field")
    sp.add_argument("--gens", type=_int_list, required=True)
    sp.add_argument("--n0", type=int, choices=(1, 2, 3))
    sp = add("splitting", cmd_splitting, "primes above q in the n-th cyclotomic layer")
    sp.add_argument("q", type=int)
    sp.add_argument("n", type=int)
    sp = add("kida", cmd_kida, "lambda-minus of the genus field via Kida's formula")
    sp.add_argument("--pair", type=_pair, required=True)
    sp = add("predict", cmd_predict, "2-class group and tower prediction for K_{n,d}")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp = add("pi", cmd_pi, "prime elements pi', pi'' above p")
    sp.add_argument("p", type=int)
    sp = add("scan", cmd_scan, "run a verification scan")
    sp.add_argument("--lemma", choices=LEMMAS, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--cache", help="JSONL class-number cache file")
    sp.add_argument("--max-unknown", type=int, default=0,
                    help="undecided square tests tolerated before exiting with 3")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        obj, code = args.handler(args)
    except IdentityFailure as exc:
        print(f"identity failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except KurodaInconsistency as exc:
        print(f"inconsistent: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    print(report_render(obj, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
