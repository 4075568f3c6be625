"""``tensorlab`` command line: JSON files in, canonical JSON on stdout.

Exit status: 0 success, 2 invalid input, 3 field-size or budget limits,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import serialize as ser
from .asymptotic import (
    asymp_rank_interval,
    asymp_subrank_floor,
    axiom_check,
    brute_rank_functional,
    constant_functional,
    decomposition_report,
    flattening_functional,
    regularize_upper,
)
from .catalog import catalog
from .certify import (
    flush,
    subrank_ij_brute,
    subrank_ij_lower,
    subrank_product_certify,
    verify_cert,
    verify_flush,
)
from .errors import ParseError, ResourceError
from .field import FieldSpec
from .rank import flattening_rank, is_concise, make_concise, single_leg_ranks
from .tensor import kron_power

EXIT_OK, EXIT_INVALID, EXIT_LIMIT, EXIT_IO = 0, 2, 3, 4


def parse_field(text: str) -> FieldSpec:
    t = text.strip().lower()
    if t in ("rational", "q", "qq"):
        return FieldSpec.rational()
    for prefix in ("prime:", "f_", "f"):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            t = t[len(prefix):]
            break
    try:
        return FieldSpec.prime(int(t))
    except ValueError as exc:
        raise ParseError(f"bad field {text!r}: {exc}") from exc


def parse_legs(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", ",").split(",") if x]
    except ValueError as exc:
        raise ParseError(f"bad leg list {text!r}") from exc


def _read(path: str):
    return ser.loads(Path(path).read_text())


def _tensor(args):
    spec = parse_field(args.field) if args.field else None
    return ser.tensor_from_json(_read(args.input), spec)


def _functional(name: str, dims):
    if name.startswith("flattening"):
        _, _, legs = name.partition(":")
        return flattening_functional(parse_legs(legs or "1"), dims)
    if name == "brute":
        return brute_rank_functional()
    if name == "decomposition":
        return None
    if name.startswith("constant:"):
        return constant_functional(Fraction(name.partition(":")[2]))
    raise ParseError(f"unknown functional {name!r}")


# -- subcommands ------------------------------------------------------------------


def cmd_info(args):
    t = _tensor(args)
    ranks = single_leg_ranks(t)
    return {
        "dims": list(t.dims),
        "flattening_ranks": {str(i): r for i, r in enumerate(ranks, start=1)},
        "concise": is_concise(t),
    }


def cmd_flatten_rank(args):
    t = _tensor(args)
    legs = parse_legs(args.legs)
    return {"legs": sorted(legs), "rank": flattening_rank(t, legs)}


def cmd_concise(args):
    return ser.concise_to_json(make_concise(_tensor(args)))


def cmd_kron_power(args):
    return ser.tensor_to_json(kron_power(_tensor(args), args.n))


def cmd_flush(args):
    obj = _read(args.input)
    try:
        spec = parse_field(args.field) if args.field else FieldSpec.from_json(obj["field"])
        blocks = [ser.legmap_from_json(b, spec) for b in obj["blocks"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed flush input: {exc}") from exc
    result = flush(blocks, random.Random(args.seed))
    out = ser.flush_to_json(result)
    out.update(seed=args.seed, verified=verify_flush(blocks, result))
    return out


def cmd_certify(args):
    t = _tensor(args)
    bundle = subrank_product_certify(t, parse_legs(args.legs), seed=args.seed, strict=args.strict)
    return ser.bundle_to_json(bundle)


def cmd_verify(args):
    t = _tensor(args)
    obj = _read(args.cert)
    if "certs" in obj:
        bundle = ser.bundle_from_json(obj, t.spec)
        results = {f"{i},{j}": verify_cert(t, c) for (i, j), c in bundle.certs.items()}
    else:
        c = ser.cert_from_json(obj, t.spec)
        results = {f"{c.i},{c.j}": verify_cert(t, c)}
    return {"valid": all(results.values()), "certs": results}


def cmd_subrank(args):
    t = _tensor(args)
    cert = subrank_ij_lower(t, args.i, args.j, seed=args.seed, strict=not args.best_effort)
    out = ser.cert_to_json(cert)
    out["seed"] = args.seed
    if args.brute:
        out["brute"] = subrank_ij_brute(t, args.i, args.j)
    return out


def cmd_fekete(args):
    t = _tensor(args)
    if args.functional == "decomposition":
        rep = decomposition_report(t, args.level, tensor_id=args.input)
    else:
        fd = _functional(args.functional, t.dims)
        rep = regularize_upper(t, fd, args.level, tensor_id=args.input)
    return ser.fekete_to_json(rep)


def cmd_interval(args):
    return ser.interval_to_json(asymp_rank_interval(_tensor(args), args.level))


def cmd_floor(args):
    return ser.radical_to_json(asymp_subrank_floor(_tensor(args)))


def cmd_catalog(args):
    spec = parse_field(args.field or "rational")
    params = {k: getattr(args, k) for k in ("r", "k", "i", "j", "a", "b", "c", "q") if getattr(args, k) is not None}
    return ser.tensor_to_json(catalog(args.name, spec, **params))


def cmd_axiom_check(args):
    spec = parse_field(args.field or "rational")
    dims = parse_legs(args.dims)
    fd = _functional(args.functional, dims)
    if fd is None:
        raise ParseError("axiom-check needs a flattening, brute or constant functional")
    report = axiom_check(fd, spec, dims, args.trials, random.Random(args.seed))
    out = ser.axiom_report_to_json(report)
    return {"functional": fd.name, "field": spec.to_json(), "dims": dims,
            "trials": args.trials, "seed": args.seed, "axioms": out}


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tensorlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, func, needs_input=True, seeded=False):
        sp = sub.add_parser(name)
        if needs_input:
            sp.add_argument("--input", required=True)
        sp.add_argument("--field", help="override field: rational or a prime p")
        sp.add_argument("--out", "-o", help="also write the JSON result to this path")
        sp.add_argument("--pretty", action="store_true")
        sp.add_argument("--budget-entries", type=int)
        sp.add_argument("--budget-search", type=int)
        if seeded:
            sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=func)
        return sp

    verb("info", cmd_info)
    verb("flatten-rank", cmd_flatten_rank).add_argument("--legs", required=True)
    verb("concise", cmd_concise)
    verb("kron-power", cmd_kron_power).add_argument("--n", "-N", type=int, required=True)
    verb("flush", cmd_flush, seeded=True)
    sp = verb("certify", cmd_certify, seeded=True)
    sp.add_argument("--legs", required=True)
    sp.add_argument("--strict", action="store_true", help="fail when |F| <= R_I")
    verb("verify", cmd_verify).add_argument("--cert", required=True)
    sp = verb("subrank", cmd_subrank, seeded=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--brute", action="store_true")
    sp.add_argument("--best-effort", action="store_true")
    sp = verb("fekete", cmd_fekete)
    sp.add_argument("--functional", default="flattening:1")
    sp.add_argument("--level", "-N", type=int, default=1)
    verb("interval", cmd_interval).add_argument("--level", "-N", type=int, default=1)
    verb("floor", cmd_floor)
    sp = verb("catalog", cmd_catalog, needs_input=False)
    sp.add_argument("--name", required=True, choices=["unit", "unit_ij", "matmul", "w", "cw"])
    for key in ("r", "k", "i", "j", "a", "b", "c", "q"):
        sp.add_argument(f"--{key}", type=int)
    sp = verb("axiom-check", cmd_axiom_check, needs_input=False, seeded=True)
    sp.add_argument("--functional", default="flattening:1")
    sp.add_argument("--dims", required=True)
    sp.add_argument("--trials", type=int, default=100)
    return p


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(ser.dumps({"error": type(exc).__name__, "message": str(exc)}))
    return code


_BUDGET_VARS = {"budget_entries": "TENSORLAB_BUDGET_ENTRIES", "budget_search": "TENSORLAB_BUDGET_SEARCH"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    saved = {var: os.environ.get(var) for var in _BUDGET_VARS.values()}
    for attr, var in _BUDGET_VARS.items():
        if getattr(args, attr) is not None:
            os.environ[var] = str(getattr(args, attr))
    try:
        text = ser.dumps(args.func(args), pretty=args.pretty)
        if args.out:
            Path(args.out).write_text(text)
    except (ValueError, ZeroDivisionError) as exc:
        return _fail(EXIT_INVALID, exc)
    except ResourceError as exc:
        return _fail(EXIT_LIMIT, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    finally:
        for var, value in saved.items():
            if value is None:
                os.environ.pop(var, None)
            else:
                os.environ[var] = value
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
