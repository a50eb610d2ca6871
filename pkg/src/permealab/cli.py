"""``permealab`` command line.

Exit status: 0 success, 1 usage error, 2 verification failure, 3 budget
exceeded. Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import bv, chains, crossings, dimension, funcs, metric, permeation
from .errors import EnumerationLimitExceeded, MalformedCSV, PermealabError

DEFAULT_BUDGET = crossings.DEFAULT_BUDGET
COMMANDS = ("eval", "plot", "cross", "dim", "permeate", "metric", "validate", "bv")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _q(v) -> str:
    return str(Fraction(v))


def _dec(v) -> float:
    return float(v)


# --- inputs -------------------------------------------------------------------

def load_function(source: str) -> bv.PiecewiseFn:
    """``zero``, ``const:<c>`` or a JSON file holding a piecewise function."""
    if source == "zero":
        return bv.PiecewiseFn.constant(0)
    if source.startswith("const:"):
        return bv.PiecewiseFn.constant(Fraction(source[6:]))
    obj = bv.load(source)
    if not isinstance(obj, bv.PiecewiseFn):
        raise UsageError(f"{source} holds a polyline, expected a function")
    return obj


def load_scheme(args) -> chains.Scheme:
    if getattr(args, "descriptor", None):
        with open(args.descriptor) as fh:
            return chains.scheme_from_descriptor(json.load(fh))
    return chains.get_scheme(args.scheme or "gH")


def read_pairs(path: str) -> list[tuple[Fraction, Fraction]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return [(Fraction(r["t1"]), Fraction(r["t2"])) for r in rows]
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedCSV(f"{path}: expected columns t1,t2 ({exc})") from None


# --- outputs ------------------------------------------------------------------

def _write_csv(path: str, header: Sequence[str], rows: list[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: str, data) -> None:
    with open(path, "w") as fh:
        fh.write(_dumps(data) + "\n")


def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


def emit_plot(rows: Sequence[Sequence], width: int = 800, height: int = 400) -> str:
    """Render ``(t, lo, hi)`` rows as an SVG band. Output is byte-stable."""
    try:
        pts = [(float(Fraction(t)), float(Fraction(lo)), float(Fraction(hi)))
               for t, lo, hi in rows]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise MalformedCSV(f"bad plot row: {exc}") from None
    if len(pts) < 2:
        raise MalformedCSV("need at least two rows to plot")
    t0, t1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[2] for p in pts)
    tx = (t1 - t0) or 1.0
    ty = (y1 - y0) or 1.0

    def sx(t):
        return f"{(t - t0) / tx * width:.3f}"

    def sy(y):
        return f"{height - (y - y0) / ty * height:.3f}"

    upper = " ".join(f"{sx(t)},{sy(hi)}" for t, _, hi in pts)
    lower = " ".join(f"{sx(t)},{sy(lo)}" for t, lo, _ in reversed(pts))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<polygon points="{upper} {lower}" fill="#4a78b5" fill-opacity="0.35" '
        f'stroke="#1f3f6b" stroke-width="0.5"/>\n</svg>\n'
    )


def read_plot_csv(path: str) -> list[tuple[str, str, str]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return [(r["t"], r["lo"], r["hi"]) for r in rows]
    except KeyError as exc:
        raise MalformedCSV(f"{path}: missing column {exc}") from None


# --- commands -----------------------------------------------------------------

def cmd_eval(args, out):
    s = load_scheme(args)
    t = args.t
    if args.level is not None:
        level = args.level
    else:
        level = 0
        while s.heights(level) > 2 * args.tol:
            level += 1
    enc = funcs.eval_enclosure(s, t, level)
    out.update({"scheme": s.name, "t": _q(t), "level": level,
                "lo": _q(enc.lo), "hi": _q(enc.hi), "value": _q(enc.mid),
                "lo_decimal": _dec(enc.lo), "hi_decimal": _dec(enc.hi),
                "value_decimal": _dec(enc.mid)})
    return 0


def plot_rows(s: chains.Scheme, level: int, budget: int,
              window: tuple[Fraction, Fraction] | None = None) -> list[tuple[str, str, str]]:
    """Enclosure at every level boundary (inside ``window`` if given)."""
    lo_t, hi_t = window or (Fraction(0), Fraction(1))
    width = s.width(level)
    expected = (hi_t - lo_t) / width + 1
    if expected > budget:
        raise EnumerationLimitExceeded(
            f"{int(expected)} level-{level} boundaries exceed the budget of {budget}")
    rows = []
    stack = [s.root]
    while stack:
        r = stack.pop()
        if r.right < lo_t or r.x > hi_t:
            continue
        if r.level == level:
            if lo_t <= r.x <= hi_t:
                rows.append((_q(r.x), _q(r.y), _q(r.top)))
            continue
        stack.extend(reversed(list(chains.children(s, r))))
    if hi_t == 1:
        last = chains.rect_at(s, 1, level)
        rows.append(("1", _q(last.y), _q(last.top)))
    return rows


def cmd_plot(args, out):
    s = load_scheme(args)
    window = None
    if args.window:
        try:
            a, b = (Fraction(v) for v in args.window.split(":"))
        except ValueError:
            raise UsageError("--window expects a:b") from None
        window = (a, b)
    rows = plot_rows(s, args.level, args.budget, window)
    if args.out:
        _write_csv(args.out, ("t", "lo", "hi"), rows)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(emit_plot(rows))
    out.update({"scheme": s.name, "level": args.level, "rows": len(rows),
                "out": args.out, "svg": args.svg})
    return 0


def _hypothesis(f: bv.PiecewiseFn) -> bool:
    return f.a == 0 and f(0) == 0 and bv.variation(f) < 1


def cmd_cross(args, out):
    s = load_scheme(args)
    f = load_function(args.f)
    tree = crossings.good_tree(f, s, args.depth, args.budget)
    failures = crossings.branching_failures(tree)
    data = tree.to_json()
    applies = _hypothesis(f)
    data["branching"] = {"hypothesis": applies, "ok": not failures,
                         "failures": [[list(p), xi, need] for p, xi, need in failures]}
    if args.out:
        _write_json(args.out, data)
    out.update({"scheme": s.name, "depth": args.depth, "nodes": tree.nodes,
                "root_xi": tree.root.xi, "hypothesis": applies,
                "branching_ok": not failures, "edge_jumps": len(tree.edge_jumps),
                "out": args.out})
    return 2 if applies and failures else 0


def cmd_dim(args, out):
    s = load_scheme(args)
    f = load_function(args.f)
    counts = dimension.box_counts(f, s, args.levels, args.budget)
    slopes = dimension.running_slopes(counts)
    rows = [(c.level, _q(c.width), c.count, "" if sl is None else f"{sl:.12f}")
            for c, sl in zip(counts, slopes)]
    if args.out:
        _write_csv(args.out, ("level", "width", "count", "slope"), rows)
    v = bv.variation(f)
    bound_ok = True
    if s.name == "gH" and v <= 1:
        bound_ok = all(c.count <= crossings.covering_bound(c.level, v) for c in counts)
    out.update({"scheme": s.name, "levels": args.levels,
                "counts": [c.count for c in counts], "slope": slopes[-1],
                "covering_bound_ok": bound_ok, "out": args.out})
    return 0 if bound_ok else 2


def cmd_permeate(args, out):
    g = load_function(args.g)
    if (args.rho is None) == (args.delta is None):
        raise UsageError("give exactly one of --rho (tube avoider) or --delta (two-jump)")
    if args.rho is not None:
        w = permeation.permeate_typical(g, args.y, args.rho)
        bound = permeation.tube_bound(g, args.rho)
        checks = {"tube": permeation.check_tube(w.f, g, args.rho),
                  "variation_bound": w.variation <= bound}
        out.update({"mode": "typical", "rho": _q(args.rho), "bound": _q(bound)})
    else:
        w = permeation.permeate_bv(g, args.y, args.delta)
        n = permeation.indicatrix(g, w.level)
        cnt = w.intersections.count
        checks = {"variation_below_delta": w.variation < args.delta,
                  "intersections_within": cnt <= n + 2}
        out.update({"mode": "bv", "delta": _q(args.delta), "y0": _q(w.level),
                    "indicatrix": n})
    if args.out:
        _write_json(args.out, w.f.to_json())
    out.update({"variation": _q(w.variation),
                "intersections": [_q(p) for p in w.intersections.points],
                "out": args.out})
    if args.verify:
        out["checks"] = checks
        return 0 if all(checks.values()) else 2
    return 0


def cmd_metric(args, out):
    pairs = read_pairs(args.pairs)
    report = metric.staircase_lipschitz_report(pairs, args.K)
    rows = [(_q(r.t1), _q(r.t2), "" if r.k is None else r.k, _q(r.lower), _q(r.upper),
             _q(r.staircase_diff), "true" if r.ok else "false") for r in report.rows]
    if args.out:
        _write_csv(args.out, ("t1", "t2", "k", "lower", "upper", "staircase_diff", "ok"), rows)
    out.update({"pairs": len(rows), "ok": report.ok, "c": _q(metric.c_certificate()),
                "out": args.out})
    return 0 if report.ok else 2


def cmd_validate(args, out):
    s = load_scheme(args)
    rep = chains.validate(s, args.level, args.budget)
    out.update({"scheme": s.name, "level": args.level, "ok": rep.ok,
                "violation": rep.violation, "violation_level": rep.level,
                "detail": rep.detail, "children_checked": rep.children_checked})
    return 0 if rep.ok else 2


def cmd_bv(args, out):
    obj = bv.load(args.input)
    if isinstance(obj, bv.Polyline):
        rep = bv.length_variation_report(obj)
        rect = bv.rectify_monotone(obj)
        out.update({"kind": "polyline", **rep.to_json(),
                    "rectified": rect.to_json(), "rectified_length": rect.length().to_json()})
        return 0 if rep.ok else 2
    ineq = bv.function_inequalities(obj)
    left = bv.left_limit_version(obj)
    out.update({"kind": "function", "variation": _q(ineq.variation),
                "length": ineq.length.to_json(), "unfrayed": obj.is_unfrayed(),
                "continuous": obj.is_continuous(),
                "left_limit_variation": _q(bv.variation(left)),
                "inequalities_ok": ineq.ok})
    if args.report:
        out["breakpoints"] = [
            {"x": _q(x), "triple": [None if v is None else _q(v) for v in obj.triple(i)]}
            for i, x in enumerate(obj.breakpoints)]
    return 0 if ineq.ok else 2


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the report as JSON")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help=f"node budget (default {DEFAULT_BUDGET})")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    p = _Parser(prog="permealab", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", default=False)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="file of key=value defaults for the subcommand")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    def scheme_opts(sp):
        sp.add_argument("--scheme", choices=sorted(chains.BUILTIN), default="gH")
        sp.add_argument("--descriptor", help="JSON scheme descriptor (overrides --scheme)")

    sp = add("eval", cmd_eval, "enclose the limit function at t")
    scheme_opts(sp)
    sp.add_argument("--t", type=rational, required=True)
    sp.add_argument("--tol", type=rational, default=Fraction(1, 10 ** 4))
    sp.add_argument("--level", type=int)

    sp = add("plot", cmd_plot, "enclosures at every boundary of one level")
    scheme_opts(sp)
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--out")
    sp.add_argument("--svg")
    sp.add_argument("--window", help="restrict to a:b")

    sp = add("cross", cmd_cross, "good-crossing tree of f")
    scheme_opts(sp)
    sp.add_argument("--f", required=True, help="zero, const:<c> or a function JSON file")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--out")

    sp = add("dim", cmd_dim, "box counts of the graph of f")
    scheme_opts(sp)
    sp.add_argument("--f", default="zero")
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--out")

    sp = add("permeate", cmd_permeate, "build a permeating function for g")
    sp.add_argument("--g", required=True)
    sp.add_argument("--y", type=rational, required=True)
    sp.add_argument("--rho", type=rational)
    sp.add_argument("--delta", type=rational)
    sp.add_argument("--out")
    sp.add_argument("--verify", action="store_true")

    sp = add("metric", cmd_metric, "path-metric brackets and staircase checks")
    sp.add_argument("--pairs", required=True)
    sp.add_argument("--K", type=int, default=4)
    sp.add_argument("--out")

    sp = add("validate", cmd_validate, "check a scheme's chain conditions")
    scheme_opts(sp)
    sp.add_argument("--level", type=int, required=True)

    sp = add("bv", cmd_bv, "variation and length report")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--report", action="store_true")
    return p


def _apply_config(argv: list[str]) -> list[str]:
    """Splice ``--config`` defaults in right after the subcommand."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        raise UsageError("--config needs a file") from None
    argv = argv[:i] + argv[i + 2:]
    extra = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {raw.strip()!r} is not key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            flag = "--" + key.replace("_", "-") if key != "in" else "--in"
            if value.lower() in ("true", "yes", "on"):
                extra.append(flag)
            elif value.lower() in ("false", "no", "off"):
                continue
            else:
                extra += [flag, value]
    pos = next((j for j, a in enumerate(argv) if a in COMMANDS), None)
    if pos is None:
        raise UsageError("no subcommand given")
    return argv[:pos + 1] + extra + argv[pos + 1:]


def _print(out: dict, as_json: bool, stream) -> None:
    if as_json:
        stream.write(_dumps(out) + "\n")
        return
    for k in sorted(out):
        v = out[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        stream.write(f"{k}: {v}\n")


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit": code},
                                sort_keys=True) + "\n")
    return code


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError(f"choose a subcommand: {', '.join(COMMANDS)}")
        if args.budget <= 0:
            raise UsageError("--budget must be positive")
        out: dict = {"command": args.command}
        code = args.func(args, out)
    except UsageError as exc:
        return _fail("UsageError", str(exc), 1)
    except PermealabError as exc:
        return _fail(type(exc).__name__, str(exc), exc.code)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    out["exit"] = code
    _print(out, args.json, stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
