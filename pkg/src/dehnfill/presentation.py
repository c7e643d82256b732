"""Presentations, marked groups, Tietze moves and canonical digests."""

from __future__ import annotations

import hashlib
import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import ArityMismatch, InvalidMove, ParseError, UndeclaredGenerator
from .words import (
    Word,
    cyclic_reduce,
    free_reduce,
    inverse,
    least_rotation,
    mul,
    rotations,
    substitute,
    word_key,
)

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
TOKEN_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_word(text: str, gens: Sequence[str]) -> Word:
    """Parse ``"a^2 b^-1 a"`` over the alphabet ``gens``; ``1`` is the empty word."""
    index = {g: i + 1 for i, g in enumerate(gens)}
    out: list[int] = []
    col = 1
    for tok in text.split():
        col = text.find(tok, col - 1) + 1
        if tok == "1":
            continue
        m = TOKEN_RE.match(tok)
        if not m:
            raise ParseError(f"bad token {tok!r}", column=col)
        name, exp = m.group(1), m.group(2)
        if name not in index:
            raise UndeclaredGenerator(f"generator {name!r} not declared")
        k = int(exp) if exp is not None else 1
        if k == 0:
            raise ParseError(f"zero exponent in {tok!r}", column=col)
        letter = index[name] if k > 0 else -index[name]
        out.extend([letter] * abs(k))
    return free_reduce(out)


def format_word(w: Sequence[int], gens: Sequence[str]) -> str:
    if not w:
        return "1"
    parts = []
    for letter, run in itertools.groupby(w):
        k = len(list(run))
        name = gens[abs(letter) - 1]
        e = k if letter > 0 else -k
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)


@dataclass(frozen=True)
class Presentation:
    """Finite presentation <gens | relators>.

    Relators are stored freely and cyclically reduced; relators that reduce
    to the empty word are dropped.  Duplicates are kept.
    """

    gens: tuple
    relators: tuple = ()

    def __post_init__(self):
        gens = tuple(self.gens)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generator names in {gens}")
        for g in gens:
            if not NAME_RE.match(g):
                raise ValueError(f"invalid generator name {g!r}")
        rels = []
        for r in self.relators:
            r = cyclic_reduce(r)
            for x in r:
                if x == 0 or abs(x) > len(gens):
                    raise UndeclaredGenerator(f"letter {x} outside alphabet of size {len(gens)}")
            if r:
                rels.append(r)
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "relators", tuple(rels))

    @classmethod
    def from_strings(cls, gens, relators=()):
        gens = tuple(g.strip() for g in (gens.split(",") if isinstance(gens, str) else gens))
        return cls(gens, tuple(parse_word(r, gens) for r in relators))

    @property
    def ngens(self) -> int:
        return len(self.gens)

    def word(self, text: str) -> Word:
        return parse_word(text, self.gens)

    def format(self, w: Sequence[int]) -> str:
        return format_word(w, self.gens)

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def __str__(self):
        rels = ", ".join(self.format(r) for r in self.relators)
        return f"<{', '.join(self.gens)} | {rels}>"


@dataclass(frozen=True)
class PeripheralRecord:
    name: str
    ambient_words: tuple
    own: Presentation

    def __post_init__(self):
        object.__setattr__(self, "ambient_words", tuple(free_reduce(w) for w in self.ambient_words))
        if len(self.ambient_words) != self.own.ngens:
            raise ArityMismatch(
                f"peripheral {self.name}: {len(self.ambient_words)} ambient words "
                f"for {self.own.ngens} generators"
            )


@dataclass(frozen=True)
class MarkedGroup:
    ambient: Presentation
    peripherals: tuple = ()
    name: str = "G"

    def __post_init__(self):
        object.__setattr__(self, "peripherals", tuple(self.peripherals))
        names = [p.name for p in self.peripherals]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate peripheral names {names}")
        n = self.ambient.ngens
        for p in self.peripherals:
            for w in p.ambient_words:
                if any(abs(x) > n for x in w):
                    raise UndeclaredGenerator(f"peripheral {p.name} uses an undeclared generator")

    @property
    def k(self) -> int:
        return len(self.peripherals)

    def peripheral(self, name: str) -> PeripheralRecord:
        for p in self.peripherals:
            if p.name == name:
                return p
        raise KeyError(name)


# -- Tietze moves -----------------------------------------------------------

Factor = tuple  # (relator index, conjugator word, sign)


def expand_expression(relators: Sequence[Word], expression: Sequence[Factor]) -> Word:
    """Freely reduced product of conjugates ``c r^s c^-1``."""
    out: list[Word] = []
    for idx, conj, sign in expression:
        if not 0 <= idx < len(relators) or sign not in (1, -1):
            raise InvalidMove(f"bad factor {(idx, conj, sign)}")
        r = relators[idx] if sign == 1 else inverse(relators[idx])
        out.append(tuple(conj))
        out.append(r)
        out.append(inverse(conj))
    return mul(*out)


@dataclass(frozen=True)
class AddGenerator:
    name: str
    word: Word


@dataclass(frozen=True)
class RemoveGenerator:
    name: str
    relator: Optional[int] = None


@dataclass(frozen=True)
class AddRelator:
    word: Word
    expression: tuple


@dataclass(frozen=True)
class RemoveRelator:
    index: int
    expression: tuple


TietzeMove = Union[AddGenerator, RemoveGenerator, AddRelator, RemoveRelator]


def tietze_maps(p: Presentation, m: TietzeMove):
    """Apply ``m`` to ``p``.

    Returns ``(q, forward, backward)``: ``forward[i]`` is the image in ``q`` of
    the i-th generator of ``p``, ``backward[j]`` the image in ``p`` of the j-th
    generator of ``q``.
    """
    ident_p = [(i + 1,) for i in range(p.ngens)]
    if isinstance(m, AddGenerator):
        if m.name in p.gens or not NAME_RE.match(m.name):
            raise InvalidMove(f"cannot add generator {m.name!r}")
        w = free_reduce(m.word)
        if any(abs(x) > p.ngens for x in w):
            raise InvalidMove("defining word uses undeclared generators")
        new = p.ngens + 1
        q = Presentation(p.gens + (m.name,), p.relators + (mul((new,), inverse(w)),))
        return q, ident_p, ident_p + [w]

    if isinstance(m, RemoveGenerator):
        if m.name not in p.gens:
            raise InvalidMove(f"no generator {m.name!r}")
        g = p.gens.index(m.name) + 1
        candidates = range(len(p.relators)) if m.relator is None else [m.relator]
        chosen = None
        for ri in candidates:
            if not 0 <= ri < len(p.relators):
                raise InvalidMove(f"no relator {ri}")
            r = p.relators[ri]
            if sum(1 for x in r if abs(x) == g) == 1:
                chosen = ri
                break
        if chosen is None:
            raise InvalidMove(f"{m.name} does not occur exactly once in a relator")
        r = p.relators[chosen]
        pos = next(i for i, x in enumerate(r) if abs(x) == g)
        rot = r[pos:] + r[:pos]
        # rot = g^s u  =>  g = u^-1 if s = +1, else g = u
        u = rot[1:]
        value = inverse(u) if rot[0] > 0 else u
        renum = {}
        for i in range(1, p.ngens + 1):
            if i != g:
                renum[i] = i if i < g else i - 1
        images = []
        for i in range(1, p.ngens + 1):
            src = value if i == g else (i,)
            images.append(tuple(renum[abs(x)] * (1 if x > 0 else -1) for x in src))
        gens = tuple(n for n in p.gens if n != m.name)
        rels = tuple(substitute(s, images) for j, s in enumerate(p.relators) if j != chosen)
        q = Presentation(gens, rels)
        backward = [(i,) for i in range(1, p.ngens + 1) if i != g]
        return q, images, backward

    if isinstance(m, AddRelator):
        w = free_reduce(m.word)
        if any(abs(x) > p.ngens for x in w):
            raise InvalidMove("relator uses undeclared generators")
        prod = expand_expression(p.relators, m.expression)
        if prod != w:
            raise InvalidMove("expression does not reduce to the claimed relator")
        if not cyclic_reduce(w):
            raise InvalidMove("relator is freely trivial")
        return Presentation(p.gens, p.relators + (w,)), ident_p, ident_p

    if isinstance(m, RemoveRelator):
        if not 0 <= m.index < len(p.relators):
            raise InvalidMove(f"no relator {m.index}")
        if any(f[0] == m.index for f in m.expression):
            raise InvalidMove("expression uses the relator being removed")
        prod = cyclic_reduce(expand_expression(p.relators, m.expression))
        target = p.relators[m.index]
        if prod not in set(rotations(target)):
            raise InvalidMove("expression does not derive the relator")
        rels = p.relators[: m.index] + p.relators[m.index + 1 :]
        return Presentation(p.gens, rels), ident_p, ident_p

    raise InvalidMove(f"unknown move {m!r}")


def apply_tietze(p: Presentation, m: TietzeMove) -> Presentation:
    return tietze_maps(p, m)[0]


@dataclass
class TietzeChain:
    """A sequence of Tietze moves with the composed generator maps."""

    start: Presentation
    current: Presentation = None
    forward: list = None
    backward: list = None
    moves: list = field(default_factory=list)

    def __post_init__(self):
        if self.current is None:
            self.current = self.start
            self.forward = [(i + 1,) for i in range(self.start.ngens)]
            self.backward = [(i + 1,) for i in range(self.start.ngens)]

    def apply(self, m: TietzeMove) -> "TietzeChain":
        q, fwd, bwd = tietze_maps(self.current, m)
        self.forward = [substitute(w, fwd) for w in self.forward]
        self.backward = [substitute(w, self.backward) for w in bwd]
        self.current = q
        self.moves.append(m)
        return self

    def copy(self) -> "TietzeChain":
        return TietzeChain(self.start, self.current, list(self.forward), list(self.backward), list(self.moves))


# -- canonical digest -------------------------------------------------------

_TIE_LIMIT = 720


def _gen_signature(p: Presentation, g: int):
    sig = []
    for r in p.relators:
        pos = sum(1 for x in r if x == g)
        neg = sum(1 for x in r if x == -g)
        if pos or neg:
            sig.append((len(r), min(pos, neg), max(pos, neg)))
    return tuple(sorted(sig))


def canonical_orders(p: Presentation):
    """Return ``(form, orders)`` with every generator order attaining ``form``.

    ``form`` is ``(ngens, sorted relators)`` after relabelling generator
    ``order[j]`` (0-based) to ``j + 1``; relators are replaced by their least
    rotation, inverses included.  Generators are first ordered by an
    occurrence signature; ties are broken exhaustively up to ``_TIE_LIMIT``
    orderings, beyond which input order decides.
    """
    n = p.ngens
    sigs = {g: _gen_signature(p, g) for g in range(1, n + 1)}
    classes = [list(grp) for _, grp in itertools.groupby(sorted(range(1, n + 1), key=lambda g: (sigs[g], g)), key=lambda g: sigs[g])]
    total = math.prod(math.factorial(len(c)) for c in classes)
    if total <= _TIE_LIMIT:
        choices = itertools.product(*(itertools.permutations(c) for c in classes))
    else:
        choices = [tuple(tuple(c) for c in classes)]
    best_key, best_rels, orders = None, None, []
    for choice in choices:
        order = [g for part in choice for g in part]
        relabel = {g: j + 1 for j, g in enumerate(order)}
        rels = [least_rotation(tuple(relabel[abs(x)] * (1 if x > 0 else -1) for x in r)) for r in p.relators]
        rels.sort(key=lambda r: (len(r), word_key(r)))
        key = tuple((len(r), word_key(r)) for r in rels)
        perm = tuple(g - 1 for g in order)
        if best_key is None or key < best_key:
            best_key, best_rels, orders = key, tuple(rels), [perm]
        elif key == best_key:
            orders.append(perm)
    return (n, best_rels), orders


def canonical_form(p: Presentation):
    """Return ``(form, order)``; see :func:`canonical_orders`."""
    form, orders = canonical_orders(p)
    return form, orders[0]


def canonical_digest(p: Presentation) -> str:
    (n, rels), _ = canonical_form(p)
    text = f"{n}|" + ";".join(",".join(str(x) for x in r) for r in rels)
    return hashlib.sha256(text.encode()).hexdigest()


def rename_generators(p: Presentation, names: Sequence[str]) -> Presentation:
    return Presentation(tuple(names), p.relators)


def permute_generators(p: Presentation, order: Sequence[int]) -> tuple[Presentation, list]:
    """Reorder generators so that new generator ``j`` is old ``order[j]``.

    Returns the new presentation and the images of old generators.
    """
    pos = {old: j + 1 for j, old in enumerate(order)}
    images = [(pos[i],) for i in range(p.ngens)]
    gens = tuple(p.gens[i] for i in order)
    return Presentation(gens, tuple(substitute(r, images) for r in p.relators)), images
