"""Reading and writing the marked-group text format.

::

    group F2
      gens: a, b
      rels:
      peripheral A
        gens: x
        rels:
        embed: x -> a
      end
    end

Words are space-separated tokens ``g``, ``g^k`` (``k`` a nonzero integer) or
``1`` for the empty word.  ``#`` starts a comment.  ``embed:`` takes either
``x -> word`` items or bare words matched to the peripheral generators by
position.  Without an ``embed:`` line every peripheral generator must also be
an ambient generator and maps to itself.
"""

from __future__ import annotations

from .errors import ArityMismatch, ParseError, UndeclaredGenerator
from .presentation import NAME_RE, MarkedGroup, PeripheralRecord, Presentation, parse_word


def _split_list(text):
    text = text.strip()
    if not text:
        return []
    return [t.strip() for t in text.split(",")]


class _Block:
    def __init__(self, kind, name, line):
        self.kind = kind
        self.name = name
        self.line = line
        self.gens = None
        self.rels = None
        self.embed = None
        self.children = []


def _words(items, gens, lineno, line):
    out = []
    for item in items:
        if not item:
            raise ParseError("empty word in list", lineno, line.find(",") + 1)
        try:
            out.append(parse_word(item, gens))
        except ParseError as e:
            raise ParseError(str(e), lineno, line.find(item) + (e.column or 1)) from None
        except UndeclaredGenerator as e:
            raise UndeclaredGenerator(f"line {lineno}: {e}") from None
    return out


def parse_group_file(text: str) -> MarkedGroup:
    stack: list[_Block] = []
    top = None
    raw_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        raw_lines[lineno] = raw
        stripped = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        head, _, rest = stripped.partition(" ")
        if stripped == "end":
            if not stack:
                raise ParseError("unmatched 'end'", lineno, col)
            done = stack.pop()
            if stack:
                stack[-1].children.append(done)
            else:
                top = done
            continue
        if head in ("group", "peripheral"):
            name = rest.strip()
            if not NAME_RE.match(name):
                raise ParseError(f"bad {head} name {name!r}", lineno, col + len(head) + 1)
            if head == "group" and (stack or top is not None):
                raise ParseError("only one top-level group per file", lineno, col)
            if head == "peripheral" and (len(stack) != 1):
                raise ParseError("'peripheral' must appear directly inside 'group'", lineno, col)
            stack.append(_Block(head, name, lineno))
            continue
        key, sep, value = stripped.partition(":")
        if not sep or key not in ("gens", "rels", "embed"):
            raise ParseError(f"unexpected line {stripped!r}", lineno, col)
        if not stack:
            raise ParseError(f"'{key}:' outside a block", lineno, col)
        blk = stack[-1]
        if getattr(blk, key) is not None:
            raise ParseError(f"duplicate '{key}:'", lineno, col)
        if key == "embed" and blk.kind != "peripheral":
            raise ParseError("'embed:' only allowed in a peripheral", lineno, col)
        setattr(blk, key, (value, lineno, raw))
    if stack:
        raise ParseError(f"unterminated '{stack[-1].kind}' block", stack[-1].line)
    if top is None:
        raise ParseError("no group block found")
    return _build(top)


def _gens(blk):
    if blk.gens is None:
        raise ParseError(f"{blk.kind} {blk.name} has no 'gens:' line", blk.line)
    value, lineno, raw = blk.gens
    gens = _split_list(value)
    for g in gens:
        if not NAME_RE.match(g):
            raise ParseError(f"bad generator name {g!r}", lineno, raw.find(g) + 1)
    if len(set(gens)) != len(gens):
        raise ParseError("duplicate generator names", lineno)
    return tuple(gens)


def _rels(blk, gens):
    if blk.rels is None:
        return ()
    value, lineno, raw = blk.rels
    return tuple(_words(_split_list(value), gens, lineno, raw))


def _build(top) -> MarkedGroup:
    gens = _gens(top)
    ambient = Presentation(gens, _rels(top, gens))
    peripherals = []
    for blk in top.children:
        own_gens = _gens(blk)
        own = Presentation(own_gens, _rels(blk, own_gens))
        if blk.embed is None:
            missing = [g for g in own_gens if g not in gens]
            if missing:
                raise UndeclaredGenerator(
                    f"line {blk.line}: peripheral {blk.name} has no embed and {missing} are not ambient generators"
                )
            words = [(gens.index(g) + 1,) for g in own_gens]
        else:
            value, lineno, raw = blk.embed
            items = _split_list(value)
            arrows = ["->" in item for item in items]
            if any(arrows) and not all(arrows):
                raise ParseError("embed mixes 'x -> word' and positional words", lineno)
            if not any(arrows):
                words = _words(items, gens, lineno, raw)
                if len(words) != len(own_gens):
                    raise ArityMismatch(
                        f"line {lineno}: peripheral {blk.name} embeds {len(words)} words "
                        f"for {len(own_gens)} generators"
                    )
            else:
                mapping = {}
                for item in items:
                    src, _, dst = item.partition("->")
                    src = src.strip()
                    if src in mapping:
                        raise ParseError(f"{src} embedded twice", lineno, raw.find(item) + 1)
                    mapping[src] = _words([dst.strip()], gens, lineno, raw)[0]
                unknown = [s for s in mapping if s not in own_gens]
                if unknown:
                    raise UndeclaredGenerator(f"line {lineno}: embed names unknown generators {unknown}")
                if len(mapping) != len(own_gens):
                    raise ArityMismatch(
                        f"line {lineno}: peripheral {blk.name} embeds {len(mapping)} words "
                        f"for {len(own_gens)} generators"
                    )
                words = [mapping[g] for g in own_gens]
        peripherals.append(PeripheralRecord(blk.name, tuple(words), own))
    return MarkedGroup(ambient, tuple(peripherals), top.name)


def serialize_group(g: MarkedGroup, notes=None) -> str:
    """Canonical text form; ``parse_group_file`` inverts it exactly."""
    amb = g.ambient
    lines = [f"group {g.name}"]
    lines.append(("  gens: " + ", ".join(amb.gens)).rstrip())
    lines.append(("  rels: " + ", ".join(amb.format(r) for r in amb.relators)).rstrip())
    for p in g.peripherals:
        lines.append(f"  peripheral {p.name}")
        if notes and p.name in notes:
            lines.append(f"    # {notes[p.name]}")
        lines.append(("    gens: " + ", ".join(p.own.gens)).rstrip())
        lines.append(("    rels: " + ", ".join(p.own.format(r) for r in p.own.relators)).rstrip())
        embed = ", ".join(f"{x} -> {amb.format(w)}" for x, w in zip(p.own.gens, p.ambient_words))
        lines.append(("    embed: " + embed).rstrip())
        lines.append("  end")
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_group(path) -> MarkedGroup:
    with open(path, encoding="utf-8") as fh:
        return parse_group_file(fh.read())
