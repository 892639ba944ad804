"""Command line front end.

Job files are INI text::

    [group]
    kind = dihedral        # cyclic | dihedral | trivial | product | custom
    l = 3

    [map]
    vars = X1, X2
    order = 8
    f1 = X1^2/2 + X2^2/2
    f2 = X1^3/3 - X1*X2^2

    [options]
    mode = exact           # exact | float
    canonical = no

A trailing ``+ ...`` or ``+ O(k)`` on a component marks it as truncated;
otherwise components are exact polynomials and ``order`` is the output order.
"""

from __future__ import annotations

import argparse
import configparser
import re
import sys
from dataclasses import dataclass

from gmpy2 import mpq

from .groups import InvariantSystem, make_custom, make_cyclic, make_dihedral, make_product, make_trivial, parse_group_spec
from .harness import roundtrip
from .jets import compare_dihedral, first_order_tensor, jet_table
from .lifting import (
    LIFTED, NOT_LIFTABLE, NOT_QUASIREGULAR, UNDETERMINED, FormalMorphism, LiftReport, check_liftable,
    detect_quasiregular, lift, lift_global_polynomial,
)
from .series import NotDivisible, OrderExhausted, ParseError, Series, _strip_tail, approx_field, parse_poly

EXIT_CODES = {LIFTED: 0, NOT_LIFTABLE: 1, UNDETERMINED: 2, NOT_QUASIREGULAR: 3}
EXIT_SPEC_ERROR = 64


class SpecError(Exception):
    """Invalid job file; carries a location when one is known."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        super().__init__(msg)


@dataclass
class JobSpec:
    system: InvariantSystem
    names: list
    order: int
    components: list          # source strings
    truncated: bool
    mode: str = "exact"
    epsilon: float | None = None
    q_cap: int | None = None
    canonical: bool = False
    path: str = "auto"

    def morphism(self, mode: str | None = None) -> FormalMorphism:
        mode = mode or self.mode
        fld = approx_field(self.epsilon) if mode == "float" else None
        polys = []
        for j, (src, line) in enumerate(self.components, start=1):
            try:
                P = parse_poly(src, self.names, line=line)
            except ParseError as exc:
                raise SpecError(f"f{j}: {exc.msg}", exc.line, exc.col) from None
            polys.append(P.to_field(fld) if fld is not None else P)
        if self.truncated:
            return FormalMorphism.from_series(self.system, [Series.from_poly(P, self.order) for P in polys])
        return FormalMorphism.from_polys(self.system, polys, self.order)


def _line_of(text: str, key: str) -> int:
    for i, raw in enumerate(text.splitlines(), start=1):
        if re.match(rf"\s*{re.escape(key)}\s*[=:]", raw):
            return i
    return 1


def _parse_matrix(src: str, line: int) -> tuple:
    rows = []
    for row in src.split(";"):
        entries = [e for e in re.split(r"[\s,]+", row.strip()) if e]
        vals = []
        for e in entries:
            try:
                vals.append(parse_poly(e, [], line=line).constant())
            except ParseError as exc:
                raise SpecError(f"matrix entry {e!r}: {exc.msg}", line) from None
        rows.append(tuple(vals))
    if any(len(r) != len(rows) for r in rows):
        raise SpecError("group matrices must be square", line)
    return tuple(rows)


def parse_group_section(sec, text: str = "") -> InvariantSystem:
    kind = sec.get("kind", "").strip().lower()
    try:
        if "spec" in sec and not kind:
            return parse_group_spec(sec["spec"])
        if kind == "cyclic":
            return make_cyclic(int(sec["n"]))
        if kind == "dihedral":
            return make_dihedral(int(sec["l"]))
        if kind == "trivial":
            return make_trivial()
        if kind == "product":
            return make_product([parse_group_spec(s) for s in re.split(r"[,\s]+", sec["parts"].strip()) if s])
        if kind == "custom":
            return _parse_custom(sec, text)
    except KeyError as exc:
        raise SpecError(f"[group] is missing key {exc.args[0]!r}", _line_of(text, "kind")) from None
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"[group]: {exc}", _line_of(text, "kind")) from None
    raise SpecError(f"unknown group kind {kind!r}", _line_of(text, "kind"))


def _numbered(sec, prefix: str) -> list:
    keys = sorted((k for k in sec if re.fullmatch(rf"{prefix}\d+", k)), key=lambda k: int(k[len(prefix):]))
    return keys


def _close_group(gens: list, limit: int = 2000) -> list:
    """All products of the generator matrices (the group they generate)."""
    n = len(gens[0])
    ident = tuple(tuple(mpq(int(i == k)) for k in range(n)) for i in range(n))
    seen = {ident: None}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = tuple(tuple(sum((a[i][k] * g[k][j] for k in range(n)), mpq(0)) for j in range(n))
                          for i in range(n))
                if b not in seen:
                    if len(seen) >= limit:
                        raise SpecError(f"the generated group has more than {limit} elements")
                    seen[b] = None
                    nxt.append(b)
        frontier = nxt
    return list(seen)


def _parse_custom(sec, text: str) -> InvariantSystem:
    gens = [_parse_matrix(sec[k], _line_of(text, k)) for k in _numbered(sec, "g")]
    if not gens:
        raise SpecError("custom groups need generator matrices g1, g2, …", _line_of(text, "kind"))
    mats = _close_group(gens)
    n = len(mats[0])
    unames = [f"u{i + 1}" for i in range(n)]
    sig_keys = _numbered(sec, "sigma")
    try:
        sigma = [parse_poly(sec[k], unames, line=_line_of(text, k)) for k in sig_keys]
        wnames = [f"W{j + 1}" for j in range(len(sigma))]
        delta = parse_poly(sec["delta"], wnames, line=_line_of(text, "delta"))
        rels = [parse_poly(sec[k], wnames, line=_line_of(text, k)) for k in _numbered(sec, "relation")]
    except ParseError as exc:
        raise SpecError(exc.msg, exc.line, exc.col) from None
    return make_custom(mats, sigma, delta, rels)


def load_job(path: str) -> JobSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",))
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise SpecError(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None
    for name in ("group", "map"):
        if name not in cp:
            raise SpecError(f"missing [{name}] section")
    system = parse_group_section(cp["group"], text)
    mp = cp["map"]
    names = [v for v in re.split(r"[,\s]+", mp.get("vars", "X1").strip()) if v]
    try:
        order = int(mp.get("order", "8"))
    except ValueError:
        raise SpecError("order must be an integer", _line_of(text, "order")) from None
    comps = []
    for j in range(1, system.m + 1):
        key = f"f{j}"
        if key not in mp:
            raise SpecError(f"the group has {system.m} generators; {key} is missing", _line_of(text, "vars"))
        comps.append((mp[key], _line_of(text, key)))
    extra = [k for k in _numbered(mp, "f") if int(k[1:]) > system.m]
    if extra:
        raise SpecError(f"the group has {system.m} generators but {extra[0]} was given", _line_of(text, extra[0]))
    truncated = any(_strip_tail(src) != src.rstrip() for src, _ in comps)
    opts = cp["options"] if "options" in cp else {}
    mode = opts.get("mode", "exact").strip()
    if mode not in ("exact", "float"):
        raise SpecError(f"mode must be exact or float, not {mode!r}", _line_of(text, "mode"))
    eps = opts.get("epsilon")
    q_cap = opts.get("q_cap")
    canonical = str(opts.get("canonical", "no")).strip().lower() in ("1", "yes", "true", "on")
    job = JobSpec(system, names, order, comps, truncated, mode, float(eps) if eps else None,
                  int(q_cap) if q_cap else None, canonical, opts.get("path", "auto").strip())
    job.morphism()  # surface parse errors early
    return job


# --------------------------------------------------------------------------
# output

def _emit(rep: LiftReport, names: list, fmt: str) -> None:
    lines = rep.kv_lines(names) if fmt == "kv" else rep.text_lines(names)
    print("\n".join(lines))


def _report_exit(rep: LiftReport) -> int:
    return EXIT_CODES[rep.verdict]


# --------------------------------------------------------------------------
# commands

def cmd_check(args) -> int:
    job = load_job(args.file)
    rep = check_liftable(job.morphism(), path=args.path or job.path)
    _emit(rep, job.names, args.format)
    return _report_exit(rep)


def cmd_compute(args) -> int:
    job = load_job(args.file)
    fm = job.morphism(args.mode)
    if args.global_polynomial:
        rep = lift_global_polynomial(fm, job.q_cap)
        if args.canonical or job.canonical:
            from .groups import canonical_representative
            if rep.lift is not None:
                rep.lift = canonical_representative(job.system, rep.lift)
    else:
        rep = lift(fm, path=args.path or job.path, canonical=args.canonical or job.canonical)
    _emit(rep, job.names, args.format)
    return _report_exit(rep)


def cmd_first_order(args) -> int:
    job = load_job(args.file)
    fm = job.morphism()
    det = detect_quasiregular(fm)
    if det["status"] != "quasiregular":
        print(f"verdict: {det['status']}" if args.format != "kv" else f"verdict={det['status']}")
        return EXIT_CODES[det["status"]]
    sysc, q = det["system"], det["q"]
    fs = fm.at_order(fm.order + q * (1 + max(sysc.degrees))) if fm.exact else fm.series()
    worst = 0
    for j in range(1, sysc.m + 1):
        for s in range(1, sysc.degrees[j - 1] + 1):
            try:
                first_order_tensor(sysc, fs, j, s)
                status = "pass"
            except NotDivisible:
                status = "fail"
                worst = max(worst, 1)
            except OrderExhausted:
                status = "undetermined"
                worst = max(worst, 2) if worst != 1 else worst
            print(f"j={j} s={s} {status}" if args.format == "kv" else f"j={j}  s={s}  {status}")
    return worst


def cmd_roundtrip(args) -> int:
    system = parse_group_spec(args.group)
    ps = tuple(int(x) for x in args.p.split(","))
    res = roundtrip(system, args.trials, args.seed, args.order, ps=ps)
    print(f"passed {res.passed}/{res.trials}")
    if res.failure:
        print("first failure: " + ", ".join(f"{k}={v}" for k, v in res.failure.items()))
    return 0 if res.ok else 1


def cmd_jet_table(args) -> int:
    system = parse_group_spec(args.group)
    for line in jet_table(system).dump(args.max_order):
        print(line)
    if not args.compare_dihedral:
        return 0
    if system.kind != "dihedral":
        print("comparison needs a dihedral group", file=sys.stderr)
        return EXIT_SPEC_ERROR
    l = system.tag[1]
    printed = compare_dihedral(l, printed=True)
    halved = compare_dihedral(l, printed=False)
    bad = 0
    for (j, s, t, ok_p), (_, _, _, ok_h) in zip(printed, halved):
        if ok_p:
            status = "match"
        elif ok_h:
            status = "match after halving (printed display is twice the value)"
        else:
            status = "MISMATCH"
            bad += 1
        print(f"compare j={j} s={s} t={t}: {status}")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invlift", description="Lift formal maps through orbit spaces of finite groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_format(p):
        p.add_argument("--format", choices=("text", "kv"), default="text")
        return p

    p = with_format(sub.add_parser("check", help="decide liftability"))
    p.add_argument("file")
    p.add_argument("--path", choices=("auto", "general", "closed-form"))
    p.set_defaults(func=cmd_check)

    p = with_format(sub.add_parser("compute", help="construct a lift"))
    p.add_argument("file")
    p.add_argument("--mode", choices=("exact", "float"))
    p.add_argument("--path", choices=("auto", "general", "closed-form"))
    p.add_argument("--canonical", action="store_true")
    p.add_argument("--global-polynomial", action="store_true", help="search for a polynomial lift")
    p.set_defaults(func=cmd_compute)

    p = with_format(sub.add_parser("first-order", help="first-order necessary conditions"))
    p.add_argument("file")
    p.set_defaults(func=cmd_first_order)

    p = sub.add_parser("roundtrip", help="seeded round-trip property")
    p.add_argument("--group", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--order", type=int, default=12)
    p.add_argument("--p", default="1,2", help="comma separated source dimensions to cycle through")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("jet-table", help="dump the table of descended entries")
    p.add_argument("--group", required=True)
    p.add_argument("--max-order", type=int, default=1)
    p.add_argument("--compare-dihedral", action="store_true")
    p.set_defaults(func=cmd_jet_table)
    return ap


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        loc = ""
        if exc.line is not None:
            loc = f"line {exc.line}" + (f", column {exc.col}" if exc.col else "") + ": "
        print(f"error: {loc}{exc}", file=sys.stderr)
        return EXIT_SPEC_ERROR
    except (ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC_ERROR


if __name__ == "__main__":
    sys.exit(main())
