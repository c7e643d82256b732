"""Command line front end: ``dehnfill <command> ...``.

Exit codes: 0 isomorphic / trivial / success, 1 not isomorphic / nontrivial
(or an invalid certificate for ``verify``), 2 unknown, 3 usage error,
4 parse error, 5 bad budget configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .budget import BudgetConfig, parse_config
from .core import characteristic_core
from .errors import BudgetExceeded, DehnFillError, ParseError, UndeclaredGenerator
from .filling import UNVERIFIED, characteristic_filling
from .groupfile import load_group, serialize_group
from .invariants import fingerprint
from .iso import ISOMORPHIC, NOT_ISOMORPHIC, compare, verdict_record, verify_record
from .presentation import parse_word
from .wordproblem import NONTRIVIAL, TRIVIAL, decide_word

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_PARSE, EXIT_BUDGET = range(6)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class BudgetError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a machine-readable record")
    common.add_argument("--config", metavar="FILE", help="budget file of 'key = value' lines")
    for f in dataclasses.fields(BudgetConfig):
        common.add_argument("--" + f.name.replace("_", "-"), dest=f.name, metavar="N", default=None,
                            help=f"budget (default {f.default})")

    p = _Parser(prog="dehnfill", description="Marked-group isomorphism via Dehn fillings.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("core", parents=[common], help="characteristic core of a peripheral")
    c.add_argument("file")
    c.add_argument("--peripheral", required=True, metavar="NAME")
    c.add_argument("-i", "--level", type=int, required=True)

    f = sub.add_parser("fill", parents=[common], help="characteristic Dehn filling")
    f.add_argument("file")
    f.add_argument("-i", "--level", type=int, required=True)
    f.add_argument("-o", "--output", metavar="OUT")

    fp = sub.add_parser("fingerprint", parents=[common], help="abelianization and hom counts")
    fp.add_argument("file")

    w = sub.add_parser("wp", parents=[common], help="bounded word problem")
    w.add_argument("file")
    w.add_argument("word")

    cmp_ = sub.add_parser("compare", parents=[common], help="race the prover against the disprover")
    cmp_.add_argument("file1")
    cmp_.add_argument("file2")
    cmp_.add_argument("-o", "--output", metavar="CERT", help="write the verdict record here")

    v = sub.add_parser("verify", parents=[common], help="re-check a stored verdict record")
    v.add_argument("certfile")
    return p


def _budget(args) -> BudgetConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config(fh.read()))
        except OSError as e:
            raise BudgetError(f"cannot read config: {e}") from None
        except ValueError as e:
            raise BudgetError(str(e)) from None
    for f in dataclasses.fields(BudgetConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    try:
        return BudgetConfig.from_mapping(values).validate()
    except ValueError as e:
        raise BudgetError(str(e)) from None


def _level(i):
    if i < 1:
        raise UsageError("level must be at least 1")
    return i


def cmd_core(args, budget, out):
    g = load_group(args.file)
    try:
        per = g.peripheral(args.peripheral)
    except KeyError:
        raise UsageError(f"no peripheral named {args.peripheral!r}") from None
    res = characteristic_core(per.own, _level(args.level), budget)
    words = [per.own.format(w) for w in res.generators]
    if args.json:
        out.write(_dump({"peripheral": per.name, "level": res.level, "quotient_order": res.quotient_order,
                         "generators": words}) + "\n")
    else:
        out.write(f"C_{res.level}({per.name}): index {res.quotient_order}, {len(words)} generators\n")
        for w in words:
            out.write(f"  {w}\n")
    return EXIT_OK


def cmd_fill(args, budget, out):
    g = load_group(args.file)
    res = characteristic_filling(g, _level(args.level), budget)
    text = serialize_group(res.as_marked_group())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        out.write(_dump({"level": res.level, "peripheral_orders": list(res.peripheral_orders),
                         "flags": [UNVERIFIED], "group": text}) + "\n")
    elif not args.output:
        out.write(f"# peripheral orders {list(res.peripheral_orders)}; {UNVERIFIED}\n")
        out.write(text)
    return EXIT_OK


def cmd_fingerprint(args, budget, out):
    g = load_group(args.file)
    fp = fingerprint(g.ambient, budget)
    if args.json:
        out.write(_dump(fp.as_dict()) + "\n")
    else:
        out.write(f"free rank {fp.free_rank}, torsion {list(fp.torsion)}\n")
        for name, n in fp.hom_counts:
            out.write(f"  Hom(G, {name}) = {n}\n")
    return EXIT_OK


def cmd_wp(args, budget, out):
    g = load_group(args.file)
    p = g.ambient
    w = parse_word(args.word, p.gens)
    v = decide_word(p, w, budget)
    if args.json:
        rec = {"status": v.status, "word": p.format(w)}
        if v.derivation is not None:
            rec["derivation"] = [[i, p.format(c), s] for i, c, s in v.derivation]
        if v.witness is not None:
            rec["witness"] = v.witness
        if v.report:
            rec["report"] = v.report
        out.write(_dump(rec) + "\n")
    else:
        out.write(v.status + "\n")
        if v.derivation is not None:
            for i, c, s in v.derivation:
                out.write(f"  ({p.format(c)}) r{i}^{s} ({p.format(c)})^-1\n")
        if v.witness is not None:
            out.write(f"  survives in {v.witness['group']}: {', '.join(v.witness['images'])}\n")
    return {TRIVIAL: EXIT_OK, NONTRIVIAL: EXIT_NO}.get(v.status, EXIT_UNKNOWN)


def cmd_compare(args, budget, out):
    g, h = load_group(args.file1), load_group(args.file2)
    v = compare(g, h, budget)
    rec = verdict_record(g, h, v, budget)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(_dump(rec) + "\n")
    if args.json:
        out.write(_dump(rec) + "\n")
    else:
        out.write(v.status + "\n")
        if v.certificate is not None:
            c = v.certificate
            out.write(f"  level {c.level}: {c.field} {c.values[0]} vs {c.values[1]}\n")
        if v.witness is not None:
            for k, val in rec["witness"]["forward"].items():
                out.write(f"  {k} -> {val}\n")
    return {ISOMORPHIC: EXIT_OK, NOT_ISOMORPHIC: EXIT_NO}.get(v.status, EXIT_UNKNOWN)


def cmd_verify(args, budget, out):
    try:
        with open(args.certfile, encoding="utf-8") as fh:
            rec = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"not a verdict record: {e.msg}", e.lineno, e.colno) from None
    try:
        ok, msg = verify_record(rec)
    except (KeyError, TypeError, IndexError) as e:
        ok, msg = False, f"malformed record: {e}"
    if args.json:
        out.write(_dump({"valid": ok, "message": msg}) + "\n")
    else:
        out.write(("VALID" if ok else "INVALID") + f": {msg}\n")
    return EXIT_OK if ok else EXIT_NO


COMMANDS = {
    "core": cmd_core,
    "fill": cmd_fill,
    "fingerprint": cmd_fingerprint,
    "wp": cmd_wp,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        budget = _budget(args)
        return COMMANDS[args.command](args, budget, out)
    except UsageError as e:
        err.write(f"dehnfill: usage error: {e}\n")
        return EXIT_USAGE
    except BudgetError as e:
        err.write(f"dehnfill: budget error: {e}\n")
        return EXIT_BUDGET
    except (ParseError, UndeclaredGenerator) as e:
        err.write(f"dehnfill: parse error: {e}\n")
        return EXIT_PARSE
    except OSError as e:
        err.write(f"dehnfill: {e}\n")
        return EXIT_USAGE
    except BudgetExceeded as e:
        err.write(f"dehnfill: {e}\n")
        return EXIT_UNKNOWN
    except DehnFillError as e:
        err.write(f"dehnfill: parse error: {e}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
