"""Command-line front end.

Every common flag can also be set through an environment variable with the
``GRSTAR_`` prefix (``GRSTAR_LETTERS``, ``GRSTAR_DELTA``, ``GRSTAR_MAX_DEGREE``,
``GRSTAR_TRUNCATION``, ``GRSTAR_T``, ``GRSTAR_SEED``, ``GRSTAR_FORMAT``,
``GRSTAR_SUITE``); explicit flags win over the environment.

Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _env(name: str, default=None):
    return os.environ.get(f"GRSTAR_{name}", default)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(x) for x in str(text).split(",") if x.strip()]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--letters", type=int, default=argparse.SUPPRESS, help="number of letters l (default 2)")
    g.add_argument("--delta", type=_fraction, default=argparse.SUPPRESS, help="loop value; tangle eval only")
    g.add_argument("--max-degree", type=int, default=argparse.SUPPRESS)
    g.add_argument("--truncation", type=int, default=argparse.SUPPRESS, help="Jacobi truncation size N")
    g.add_argument("--t", type=str, default=argparse.SUPPRESS, help="comma-separated t values")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="grstar", description="Exact computations in Gr(P) and its cup subalgebra.", parents=[common]
    )
    parser.add_argument("--version", action="version", version=f"grstar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    p.add_argument("expr")
    p = sub.add_parser("trace", parents=[common], help="trace of an expression")
    p.add_argument("expr")
    p = sub.add_parser("inner", parents=[common], help="inner product of two expressions")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p = sub.add_parser("moments", parents=[common], help="star moments of one letter against Catalan numbers")
    p.add_argument("--letter", type=int, default=1)
    p.add_argument("--upto", type=int, default=8)
    p = sub.add_parser("gram", parents=[common], help="exact Gram matrix and identity check")
    p.add_argument("--basis", choices=["eb", "words"], default="eb")
    p.add_argument("--degree-cap", type=int, default=None)
    p.add_argument("--letter", type=int, default=1, help="b = X_letter for the eb basis")
    p = sub.add_parser("spectral", parents=[common], help="spectral diagnostics of c_t truncations")
    p.add_argument("--n", type=int, action="append", default=None, help="truncation size (repeatable)")
    p = sub.add_parser("tangle", parents=[common], help="tangle operations")
    tsub = p.add_subparsers(dest="tangle_command", required=True)
    te = tsub.add_parser("eval", parents=[common], help="evaluate a tangle JSON file")
    te.add_argument("file")
    te.add_argument("--input", action="append", default=None, help="input expression per inner disk (repeatable)")
    p = sub.add_parser("tower", parents=[common], help="tower products")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", default=None, help="left factor (expression)")
    p.add_argument("--b", default=None, help="right factor (expression)")
    p.add_argument("--mirror", action="store_true", help="use the reflected strand convention")
    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=["all", "ncpoly", "cupalg", "spectral", "tangle"], default=argparse.SUPPRESS)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cases", type=int, default=None)
    return parser


def _resolve(ns: argparse.Namespace) -> argparse.Namespace:
    """Fill unset common options from GRSTAR_* variables, then defaults."""

    def get(attr, env, conv, default):
        if hasattr(ns, attr):
            return getattr(ns, attr)
        raw = _env(env)
        if raw is None:
            return default
        try:
            return conv(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad value for GRSTAR_{env}: {raw!r} ({exc})")

    ns.letters = get("letters", "LETTERS", int, 2)
    ns.delta = get("delta", "DELTA", _fraction, None)
    ns.max_degree = get("max_degree", "MAX_DEGREE", int, 6)
    ns.truncation = get("truncation", "TRUNCATION", int, None)
    ns.t = get("t", "T", str, None)
    ns.seed = get("seed", "SEED", int, 0)
    ns.format = get("format", "FORMAT", str, None)
    if ns.format not in (None, "json", "csv"):
        raise UsageError(f"format must be json or csv, got {ns.format!r}")
    if ns.command == "verify":
        ns.suite = get("suite", "SUITE", str, "all")
    if ns.letters < 1:
        raise UsageError("--letters must be at least 1")
    if ns.delta is not None and not (ns.command == "tangle"):
        if ns.delta != ns.letters:
            raise UsageError("--delta can only differ from --letters for tangle evaluation")
    return ns


# -- output ----------------------------------------------------------------------


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _emit_csv(rows: Sequence[dict], columns: Sequence[str]) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    sys.stdout.write(buf.getvalue())


def _element_rows(el) -> list[dict]:
    return [{"word": " ".join(map(str, w)), "coeff": str(c)} for w, c in el.items()]


def _emit_element(el, fmt) -> None:
    if fmt == "csv":
        _emit_csv(_element_rows(el), ["word", "coeff"])
    else:
        _emit_json(el.to_json())


def _scalar_json(x) -> dict:
    return {"value": x.to_json(), "text": str(x), "float": float(x)}


# -- commands --------------------------------------------------------------------


def _parse_expr(text: str, letters: int):
    from .expr import ParseError, evaluate, parse

    try:
        return evaluate(parse(text, letters), letters)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}")


def cmd_eval(ns) -> int:
    _emit_element(_parse_expr(ns.expr, ns.letters), ns.format)
    return EXIT_OK


def cmd_trace(ns) -> int:
    from .ncpoly import trace

    x = trace(_parse_expr(ns.expr, ns.letters))
    if ns.format == "csv":
        _emit_csv([{"trace": str(x), "float": float(x)}], ["trace", "float"])
    else:
        _emit_json(_scalar_json(x))
    return EXIT_OK


def cmd_inner(ns) -> int:
    from .ncpoly import inner

    x = inner(_parse_expr(ns.lhs, ns.letters), _parse_expr(ns.rhs, ns.letters))
    if ns.format == "csv":
        _emit_csv([{"inner": str(x), "float": float(x)}], ["inner", "float"])
    else:
        _emit_json(_scalar_json(x))
    return EXIT_OK


def cmd_moments(ns) -> int:
    from .ncpoly import GrElement, star, trace
    from .spectral import semicircle_moments

    if not 1 <= ns.letter <= ns.letters:
        raise UsageError(f"--letter must lie in 1..{ns.letters}")
    if ns.upto < 0:
        raise UsageError("--upto must be non-negative")
    x = GrElement.letter(ns.letter, ns.letters)
    p = GrElement.one(ns.letters)
    rows = []
    for n in range(ns.upto + 1):
        got, want = trace(p), semicircle_moments(n)
        rows.append({"n": n, "trace": str(got), "catalan": str(want), "match": got == want})
        p = star(p, x)
    ok = all(r["match"] for r in rows)
    if ns.format == "csv":
        _emit_csv(rows, ["n", "trace", "catalan", "match"])
    else:
        _emit_json({"letter": ns.letter, "moments": rows, "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gram(ns) -> int:
    from . import cupalg
    from .ncpoly import GrElement, words

    cap = ns.degree_cap if ns.degree_cap is not None else ns.max_degree
    if cap < 0:
        raise UsageError("--degree-cap must be non-negative")
    if ns.basis == "eb":
        if ns.letters < 2:
            raise UsageError("the eb basis needs at least two letters (delta > 1)")
        if not 1 <= ns.letter <= ns.letters:
            raise UsageError(f"--letter must lie in 1..{ns.letters}")
        vecs = cupalg.eb_basis(GrElement.letter(ns.letter, ns.letters), cap)
        labels = [v.label for v in vecs]
        g = cupalg.gram([v.normalized() for v in vecs])
        raw = cupalg.gram([v.element for v in vecs])
    else:
        els = [GrElement.word(w, ns.letters) for n in range(cap + 1) for w in words(ns.letters, n)]
        labels = ["".join(f"X{x}" for x in e.items()[0][0]) or "1" for e in els]
        g = raw = cupalg.gram(els)
    ok, witness = cupalg.is_identity(g)
    if ns.format == "csv":
        _emit_csv(
            [{"row": labels[i], "col": labels[j], "value": str(g[i][j])} for i in range(len(g)) for j in range(len(g))],
            ["row", "col", "value"],
        )
    else:
        _emit_json(
            {
                "basis": ns.basis,
                "labels": labels,
                "norm_sq": [str(raw[i][i]) for i in range(len(raw))],
                "gram": [[str(x) for x in row] for row in g],
                "identity": ok,
                "witness": None if ok else {"entry": witness["entry"], "value": str(witness["value"])},
            }
        )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spectral(ns) -> int:
    from . import spectral

    ts = _fraction_list(ns.t) if ns.t else [Fraction(1)]
    deltas = [ns.delta] if ns.delta is not None else [Fraction(ns.letters)]
    Ns = ns.n or ([ns.truncation] if ns.truncation else [2000])
    for t in ts:
        if not -2 <= t <= 2:
            raise UsageError(f"t must lie in [-2, 2], got {t}")
    for d in deltas:
        if d <= 1:
            raise UsageError("delta must exceed 1 (use at least two letters)")
    for n in Ns:
        if n < 2:
            raise UsageError("truncation must be at least 2")
    rows = spectral.sweep(ts, deltas, Ns)
    if ns.format == "json":
        _emit_json({"rows": rows})
    else:
        sys.stdout.write(spectral.rows_to_csv(rows))
    return EXIT_OK


def cmd_tangle(ns) -> int:
    from . import tangle
    from .ncpoly import GrElement

    try:
        with open(ns.file) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read tangle file: {exc}")
    spec = doc.get("tangle", doc)
    try:
        t = tangle.Tangle.from_json(spec)
    except tangle.TangleError as exc:
        raise UsageError(str(exc))
    check = tangle.validate(t)
    if not check:
        raise UsageError(f"invalid tangle: {check.reason}")
    letters = int(doc.get("l", ns.letters))
    raw_inputs = ns.input if ns.input is not None else doc.get("inputs", [])
    inputs = []
    for item in raw_inputs:
        if isinstance(item, dict):
            inputs.append(GrElement.from_json(item))
        else:
            inputs.append(_parse_expr(str(item), letters))
    try:
        value = tangle.evaluate(t, inputs, letters, delta=ns.delta)
    except (tangle.TangleError, ValueError) as exc:
        raise UsageError(str(exc))
    _emit_element(value, ns.format)
    return EXIT_OK


def cmd_tower(ns) -> int:
    from . import cupalg
    from .ncpoly import DegreeError

    if ns.k < 0:
        raise UsageError("--k must be non-negative")
    unit = cupalg.tower_unit(ns.k, ns.letters, mirror=ns.mirror)
    try:
        a = cupalg.TowerElement(ns.k, _parse_expr(ns.a, ns.letters), ns.mirror) if ns.a else unit
        b = cupalg.TowerElement(ns.k, _parse_expr(ns.b, ns.letters), ns.mirror) if ns.b else unit
    except DegreeError as exc:
        raise UsageError(str(exc))
    W = cupalg.wedge_k
    ab, ba = W(a, b), W(b, a)
    up = cupalg.include_up
    checks = {
        "unit": W(unit, a).element == a.element and W(a, unit).element == a.element,
        "tracial": cupalg.tower_trace(ab) == cupalg.tower_trace(ba),
        "include_up_multiplicative": up(ab).element == W(up(a), up(b)).element,
        "include_up_trace": cupalg.tower_trace(up(a)) == cupalg.tower_trace(a),
    }
    ok = all(checks.values())
    if ns.format == "csv":
        _emit_csv([{"check": k, "pass": v} for k, v in checks.items()], ["check", "pass"])
    else:
        _emit_json(
            {
                "k": ns.k,
                "mirror": ns.mirror,
                "product": ab.element.to_json(),
                "product_text": str(ab),
                "trace_normalisation": f"delta^-{ns.k}",
                "trace": str(cupalg.tower_trace(ab)),
                "checks": checks,
                "pass": ok,
            }
        )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(ns) -> int:
    from .verify import VerifyConfig, config_dict, run_suite

    kwargs = {"letters": ns.letters, "seed": ns.seed, "max_degree": ns.max_degree}
    if ns.letters < 2:
        raise UsageError("verification needs at least two letters (delta > 1)")
    if ns.truncation:
        if ns.truncation < 16:
            raise UsageError("--truncation must be at least 16 for verification")
        kwargs["truncation"] = ns.truncation
    if ns.t:
        kwargs["ts"] = tuple(_fraction_list(ns.t))
    if ns.cases is not None:
        kwargs["cases"] = ns.cases
    cfg = VerifyConfig(**kwargs)
    reports = run_suite(ns.suite, cfg, jobs=max(ns.jobs, 1))
    ok = all(r.passed for r in reports)
    if ns.format == "csv":
        _emit_csv(
            [{"check": r.check, "pass": r.passed, "seconds": round(r.seconds, 4)} for r in reports],
            ["check", "pass", "seconds"],
        )
    else:
        _emit_json({"suite": ns.suite, "config": config_dict(cfg), "pass": ok, "checks": [r.to_json() for r in reports]})
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "eval": cmd_eval,
    "trace": cmd_trace,
    "inner": cmd_inner,
    "moments": cmd_moments,
    "gram": cmd_gram,
    "spectral": cmd_spectral,
    "tangle": cmd_tangle,
    "tower": cmd_tower,
    "verify": cmd_verify,
}


def _join_negative_values(argv: list[str]) -> list[str]:
    """argparse reads "--t -2,0,2" as two options; glue such values to their flag."""
    out: list[str] = []
    it = iter(argv)
    for arg in it:
        if arg in ("--t", "--delta"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].isdigit():
                out.append(f"{arg}={nxt}")
                continue
            out.append(arg)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(arg)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        ns = _resolve(ns)
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"grstar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"grstar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
