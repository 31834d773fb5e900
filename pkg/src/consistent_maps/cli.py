"""``cmap`` command line.

Exit codes: 0 success or passing check, 1 failing check, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import Optional

from . import arith_ext
from .consistent import (
    ConsistentMap,
    LocalValue,
    check_consistency_suite,
    lambda_map,
    zero_map,
)
from .errors import CMapError, ParseError
from .functional import (
    FunctionalSpec,
    build_map_from_functional,
    krational_check,
    sqrt2_example,
    sqrt2_example_map,
    sunit_basis,
    sunit_decompose,
)
from .numerics import DEFAULT_MAX_DEN, DEFAULT_TOL, factor_rational, primes_up_to
from .phi import phi_breakdown, phi_eval, product_formula_check, zero_phi_classify
from .places import ideal_generator_search, places_over_prime, splitting_type
from .quadfield import QQ, format_element, fundamental_unit, make_field, parse_element, torsion_order

SUITES = ("product-formula", "consistency", "kernel", "extensions", "local-global")
NAMED_MAPS = ("zero", "lambda", "omega", "psi", "log", "sqrt2_example")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="numeric tolerance (env CMAP_TOL)")
    common.add_argument("--max-den", type=int, default=None, help="denominator bound (env CMAP_MAX_DEN)")
    common.add_argument("--format", choices=("json", "markdown", "plain"), default=None)

    ap = _Parser(prog="cmap", description="Consistent maps on places of Q and quadratic fields.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("field-info", parents=[common], help="basic invariants of Q(sqrt d)")
    p.add_argument("d", type=int)

    p = sub.add_parser("split", parents=[common], help="how p decomposes in Q(sqrt d)")
    p.add_argument("d", type=int)
    p.add_argument("p", type=int)

    p = sub.add_parser("unit", parents=[common], help="fundamental unit of a real quadratic field")
    p.add_argument("d", type=int)

    p = sub.add_parser("generator", parents=[common], help="prime ideal generators over p")
    p.add_argument("d", type=int)
    p.add_argument("p", type=int)

    p = sub.add_parser("eval-phi", parents=[common], help="evaluate Phi_c(alpha**pow)")
    p.add_argument("--map", required=True, help="map JSON file, '-' for stdin, inline JSON or a name")
    p.add_argument("--alpha", required=True)
    p.add_argument("--pow", default="1")

    p = sub.add_parser("extend", parents=[common], help="print the map extending ln, Omega or Psi")
    p.add_argument("--kind", required=True, choices=("omega", "psi", "log"))

    p = sub.add_parser("extend-eval", parents=[common], help="Phi of an extension at alpha")
    p.add_argument("--kind", required=True, choices=("omega", "psi", "log"))
    p.add_argument("--alpha", required=True)
    p.add_argument("--pow", default="1")

    p = sub.add_parser("check", parents=[common], help="run a verification suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--map", default=None)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sqrt2-table", parents=[common], help="the Q(sqrt 2) example table")
    p.add_argument("--bound", type=int, default=71)

    p = sub.add_parser("build-functional", parents=[common], help="realize a functional spec as a map")
    p.add_argument("--spec", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--bound", type=int, default=100)

    p = sub.add_parser("decompose", parents=[common], help="S-unit exponents of alpha")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--primes", required=True, help="comma separated primes defining S")

    p = sub.add_parser("krational", parents=[common], help="rationality test for y values")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--y", required=True, help="JSON file (or '-') mapping place labels to values")
    p.add_argument("--bound", type=int, default=100)
    return ap


# ----------------------------------------------------------------------------
# Input helpers
# ----------------------------------------------------------------------------


def _read_json(src: str):
    if src == "-":
        text = sys.stdin.read()
    elif src.lstrip().startswith(("{", "[")):
        text = src
    else:
        with open(src) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def load_map(src: str) -> ConsistentMap:
    if src in NAMED_MAPS:
        if src == "zero":
            return zero_map()
        if src == "lambda":
            return lambda_map()
        if src == "sqrt2_example":
            return sqrt2_example_map()
        return arith_ext.build_extension(src)
    obj = _read_json(src)
    if not isinstance(obj, dict):
        raise ParseError("map JSON must be an object")
    return ConsistentMap.from_json(obj)


def _parse_alpha(text: str, field=None):
    return parse_element(text, field)


# ----------------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------------


def _default(o):
    return str(o)


def emit(obj, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(obj, indent=2, default=_default) + "\n")
    elif isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                v = json.dumps(v, default=_default)
            out.write(f"{k}={v}\n")
    else:
        out.write(f"{obj}\n")


def _fmt(args, default: str) -> str:
    return args.format or default


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def cmd_field_info(args, cfg) -> int:
    K = make_field(args.d)
    info = {
        "d": K.d,
        "discriminant": K.discriminant,
        "real": K.is_real,
        "signature": [2, 0] if K.is_real else [0, 1],
        "integral_basis": ["1", format_element(K.omega)],
        "torsion_order": torsion_order(K),
    }
    if K.is_real:
        eps = fundamental_unit(K)
        info["fundamental_unit"] = format_element(eps)
        info["regulator"] = eps.log_abs_embedding(1)
        info["unit_norm"] = str(eps.norm())
    emit(info, _fmt(args, "json"))
    return 0


def cmd_split(args, cfg) -> int:
    K = make_field(args.d)
    ws = places_over_prime(K, args.p)
    emit(
        {
            "p": args.p,
            "type": splitting_type(K, args.p),
            "places": [w.label() for w in ws],
            "local_degrees": [w.local_degree for w in ws],
        },
        _fmt(args, "json"),
    )
    return 0


def cmd_unit(args, cfg) -> int:
    eps = fundamental_unit(make_field(args.d))
    fmt = _fmt(args, "plain")
    emit(format_element(eps) if fmt == "plain" else {"d": args.d, "unit": format_element(eps)}, fmt)
    return 0


def cmd_generator(args, cfg) -> int:
    K = make_field(args.d)
    gens = {w.label(): format_element(ideal_generator_search(K, w)) for w in places_over_prime(K, args.p)}
    emit(gens, _fmt(args, "plain"))
    return 0


def _phi_output(c: ConsistentMap, alpha: str, pow_: str, fmt: str) -> int:
    field = c.base if c.base is not QQ and "sqrt" not in alpha else None
    x = _parse_alpha(alpha, field)
    res = phi_breakdown(c, x, Fraction(pow_))
    if fmt == "plain":
        emit(str(res.value), fmt)
    else:
        emit(res.to_json(), "json")
    return 0


def cmd_eval_phi(args, cfg) -> int:
    return _phi_output(load_map(args.map), args.alpha, args.pow, _fmt(args, "json"))


def cmd_extend(args, cfg) -> int:
    emit(arith_ext.build_extension(args.kind).to_json(), "json")
    return 0


def cmd_extend_eval(args, cfg) -> int:
    return _phi_output(arith_ext.build_extension(args.kind), args.alpha, args.pow, _fmt(args, "plain"))


def _random_elements(K, n: int, rng: random.Random, bound: int = 50):
    out = []
    while len(out) < n:
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if a or b:
            out.append(K(a, b))
    return out


def _suite_result(name: str, passed: bool, detail: dict, first_violation) -> dict:
    out = {"suite": name, "passed": passed}
    if not passed:
        out["first_violation"] = first_violation
    out.update(detail)
    return out


def cmd_check(args, cfg) -> int:
    K = make_field(args.d)
    rng = random.Random(args.seed)
    suite = args.suite
    if suite == "product-formula":
        rep = product_formula_check(K, _random_elements(K, args.samples, rng), cfg["tol"])
        res = _suite_result(
            suite, rep.passed, {"n": len(rep.entries), "max_abs": max(abs(e["sum"]) for e in rep.entries)},
            rep.failures[0] if rep.failures else None,
        )
    elif suite == "consistency":
        if args.map:
            maps = {args.map: load_map(args.map)}
        else:
            maps = {k: load_map(k) for k in ("lambda", "omega", "psi", "log")}
        checked, first = 0, None
        for name, c in maps.items():
            rep = check_consistency_suite(c, K, args.bound, 1e-12)
            checked += rep.checked
            if rep.violations and first is None:
                first = dict(rep.violations[0], map=name)
        res = _suite_result(suite, first is None, {"maps": list(maps), "checked": checked}, first)
    elif suite == "kernel":
        c = load_map(args.map) if args.map else lambda_map()
        rep = zero_phi_classify(c, K, args.bound, cfg["tol"])
        res = _suite_result(
            suite, rep.passed, {"notes": rep.notes, "n": len(rep.entries)},
            rep.failures[0] if rep.failures else None,
        )
    elif suite == "extensions":
        first = None
        om, ps, lg = (arith_ext.build_extension(k) for k in ("omega", "psi", "log"))
        for n in range(2, args.bound + 1):
            checks = (
                ("omega", phi_eval(om, n), arith_ext.omega(n)),
                ("psi", phi_eval(ps, n), arith_ext.psi(n)),
            )
            for name, got, want in checks:
                if not (got.is_rational and got.rational_part == want):
                    first = first or {"n": n, "kind": name, "got": str(got), "want": str(want)}
            lv = phi_eval(lg, n)
            if lv.logs != {p: Fraction(e) for p, e in factor_rational(n).items()}:
                first = first or {"n": n, "kind": "log", "got": str(lv)}
        res = _suite_result(suite, first is None, {"range": [2, args.bound]}, first)
    else:
        first = None
        for p in primes_up_to(args.bound):
            total = sum(w.local_degree for w in places_over_prime(K, p))
            if total != 2 and first is None:
                first = {"p": p, "sum_local_degrees": total}
        res = _suite_result(suite, first is None, {"bound": args.bound}, first)
    emit(res, _fmt(args, "json"))
    return 0 if res["passed"] else 1


def _table_markdown(table) -> str:
    lines = ["| p | factorization of p | c(K,v) |", "|---|---|---|"]
    for row in table.rows:
        if row["p"] == "inf":
            lines.append(f"| inf | NA | ±{abs(row['c']):.6f} |")
        else:
            lines.append(f"| {row['p']} | ({row['beta']})({row['beta_conj']}) | ±{abs(row['c']):.6f} |")
    lines.extend(f"\n{n}" for n in table.notes)
    return "\n".join(lines)


def cmd_sqrt2_table(args, cfg) -> int:
    _, table = sqrt2_example(args.bound)
    fmt = _fmt(args, "json")
    if fmt == "markdown":
        sys.stdout.write(_table_markdown(table) + "\n")
    elif fmt == "plain":
        for row in table.rows:
            sys.stdout.write(f"p={row['p']} beta={row['beta']} c={row['c']!r} c_conj={row['c_conj']!r}\n")
        for n in table.notes:
            sys.stdout.write(f"note={n}\n")
    else:
        emit(table.to_json(), "json")
    return 0 if table.antisymmetric and table.vanishes_on_Q else 1


def cmd_build_functional(args, cfg) -> int:
    obj = _read_json(args.spec)
    d = args.d if args.d is not None else obj.get("d", 2)
    K = make_field(d)
    spec = FunctionalSpec.from_json(obj, K)
    c = build_map_from_functional(K, spec, args.bound)
    emit(c.to_json(), "json")
    return 0


def cmd_decompose(args, cfg) -> int:
    K = make_field(args.d)
    try:
        primes = [int(t) for t in args.primes.split(",") if t.strip()]
    except ValueError as exc:
        raise ParseError(f"bad prime list {args.primes!r}") from exc
    x = _parse_alpha(args.alpha, K)
    basis = sunit_basis(K, primes)
    dec = sunit_decompose(x, basis)
    out = dec.to_json()
    out["units"] = [format_element(u) for u in basis.units]
    out["generators"] = {w.label(): format_element(b) for w, b in basis.generators.items()}
    emit(out, _fmt(args, "json"))
    return 0


def cmd_krational(args, cfg) -> int:
    K = make_field(args.d)
    raw = _read_json(args.y)
    if not isinstance(raw, dict):
        raise ParseError("y must be a JSON object of place label -> value")
    y = {k: LocalValue.from_json(v) for k, v in raw.items()}
    rep = krational_check(K, y, args.bound, cfg["max_den"], cfg["tol"])
    emit(rep.to_json(), _fmt(args, "json"))
    return 0 if rep.passed else 1


COMMANDS = {
    "field-info": cmd_field_info,
    "split": cmd_split,
    "unit": cmd_unit,
    "generator": cmd_generator,
    "eval-phi": cmd_eval_phi,
    "extend": cmd_extend,
    "extend-eval": cmd_extend_eval,
    "check": cmd_check,
    "sqrt2-table": cmd_sqrt2_table,
    "build-functional": cmd_build_functional,
    "decompose": cmd_decompose,
    "krational": cmd_krational,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = {
            "tol": args.tol if args.tol is not None else _env_float("CMAP_TOL", DEFAULT_TOL),
            "max_den": args.max_den if args.max_den is not None else _env_int("CMAP_MAX_DEN", DEFAULT_MAX_DEN),
        }
    except ValueError as exc:
        print(f"cmap: error: bad environment setting: {exc}", file=sys.stderr)
        return 2
    if cfg["tol"] <= 0 or cfg["max_den"] < 1:
        print("cmap: error: need tol > 0 and max-den >= 1", file=sys.stderr)
        return 2
    for name in ("bound",):
        if getattr(args, name, 2) < 2:
            print("cmap: error: bounds must be at least 2", file=sys.stderr)
            return 2
    try:
        return COMMANDS[args.cmd](args, cfg)
    except (CMapError, OSError) as exc:
        print(f"cmap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
