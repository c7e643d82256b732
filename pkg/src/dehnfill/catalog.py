"""Finite groups given by multiplication tables, and hom counting into them.

The shipped catalog lives in ``data/catalog.txt``; every table is checked
against the group axioms when loaded.  ``catalog_text`` regenerates that file
from permutation generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .errors import ParseError
from .perms import DEFAULT_NODE_BUDGET, compose, cycle_string, identity_perm, search_homs
from .presentation import Presentation


@dataclass(frozen=True)
class FiniteGroupTable:
    name: str
    labels: tuple
    table: tuple
    identity: int
    inverses: tuple

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def evaluate(self, w, images) -> int:
        acc = self.identity
        t, inv = self.table, self.inverses
        for x in w:
            acc = t[acc][images[x - 1] if x > 0 else inv[images[-x - 1]]]
        return acc

    def index(self, label: str) -> int:
        return self.labels.index(label)


def table_from_matrix(name: str, labels: Sequence[str], rows: Sequence[Sequence[int]]) -> FiniteGroupTable:
    """Validate a multiplication table and wrap it."""
    n = len(labels)
    if n == 0 or len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{name}: table is not {n}x{n}")
    if any(not 0 <= x < n for r in rows for x in r):
        raise ValueError(f"{name}: entry out of range")
    ident = [e for e in range(n) if all(rows[e][x] == x and rows[x][e] == x for x in range(n))]
    if len(ident) != 1:
        raise ValueError(f"{name}: no unique identity")
    e = ident[0]
    invs = []
    for x in range(n):
        cands = [y for y in range(n) if rows[x][y] == e and rows[y][x] == e]
        if len(cands) != 1:
            raise ValueError(f"{name}: element {labels[x]} has no unique inverse")
        invs.append(cands[0])
    for x in range(n):
        rx = rows[x]
        for y in range(n):
            rxy = rows[rx[y]]
            ry = rows[y]
            for z in range(n):
                if rxy[z] != rx[ry[z]]:
                    raise ValueError(f"{name}: not associative at {labels[x]},{labels[y]},{labels[z]}")
    return FiniteGroupTable(name, tuple(labels), tuple(tuple(r) for r in rows), e, tuple(invs))


def table_from_permutations(name: str, gens: Sequence[tuple]) -> FiniteGroupTable:
    degree = len(gens[0])
    elements = {identity_perm(degree)}
    frontier = list(elements)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = compose(x, s)
                if y not in elements:
                    elements.add(y)
                    nxt.append(y)
        frontier = nxt
    elts = sorted(elements)
    index = {x: i for i, x in enumerate(elts)}
    rows = [[index[compose(x, y)] for y in elts] for x in elts]
    return table_from_matrix(name, [cycle_string(x) for x in elts], rows)


def _cycle(n: int, *cyc: int) -> tuple:
    p = list(range(n))
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        p[a] = b
    return tuple(p)


def _quaternion_regular() -> list[tuple]:
    # elements (sign, unit) with units 1,i,j,k encoded 0..3
    units = {(0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
             (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
             (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
             (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0)}
    elts = [(s, u) for s in (1, -1) for u in range(4)]
    index = {x: i for i, x in enumerate(elts)}

    def right_mult(g):
        img = []
        for s, u in elts:
            sign, v = units[(u, g[1])]
            img.append(index[(s * g[0] * sign, v)])
        return tuple(img)

    return [right_mult((1, 1)), right_mult((1, 2))]


CATALOG_SPEC = [
    ("C2", [_cycle(2, 0, 1)]),
    ("C3", [_cycle(3, 0, 1, 2)]),
    ("C4", [_cycle(4, 0, 1, 2, 3)]),
    ("C5", [_cycle(5, 0, 1, 2, 3, 4)]),
    ("C6", [_cycle(6, 0, 1, 2, 3, 4, 5)]),
    ("Sym3", [_cycle(3, 0, 1), _cycle(3, 0, 1, 2)]),
    ("Sym4", [_cycle(4, 0, 1), _cycle(4, 0, 1, 2, 3)]),
    ("D4", [_cycle(4, 0, 1, 2, 3), _cycle(4, 1, 3)]),
    ("Q8", _quaternion_regular()),
    ("A4", [_cycle(4, 0, 1, 2), _cycle(4, 1, 2, 3)]),
]


def catalog_text() -> str:
    chunks = []
    for name, gens in CATALOG_SPEC:
        t = table_from_permutations(name, gens)
        lines = [f"group {name}", f"order {t.order}", "labels: " + " ".join(t.labels)]
        lines += [" ".join(map(str, row)) for row in t.table]
        lines.append("end")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


def parse_catalog(text: str) -> list[FiniteGroupTable]:
    groups = []
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    k = 0
    while k < len(lines):
        i, ln = lines[k]
        if not ln.startswith("group "):
            raise ParseError(f"expected 'group', got {ln!r}", i)
        name = ln.split(None, 1)[1]
        i2, ln2 = lines[k + 1]
        if not ln2.startswith("order "):
            raise ParseError("expected 'order'", i2)
        n = int(ln2.split()[1])
        i3, ln3 = lines[k + 2]
        if not ln3.startswith("labels:"):
            raise ParseError("expected 'labels:'", i3)
        labels = ln3[len("labels:"):].split()
        rows = [list(map(int, lines[k + 3 + r][1].split())) for r in range(n)]
        iend, end = lines[k + 3 + n]
        if end != "end":
            raise ParseError("expected 'end'", iend)
        try:
            groups.append(table_from_matrix(name, labels, rows))
        except ValueError as e:
            raise ParseError(str(e), i) from None
        k += 4 + n
    return groups


@lru_cache(maxsize=1)
def load_catalog() -> tuple:
    text = resources.files("dehnfill").joinpath("data/catalog.txt").read_text(encoding="utf-8")
    return tuple(parse_catalog(text))


def catalog_group(name: str) -> FiniteGroupTable:
    for t in load_catalog():
        if t.name == name:
            return t
    raise KeyError(name)


def iter_homs(p: Presentation, target: FiniteGroupTable, node_budget: int | None = DEFAULT_NODE_BUDGET,
              stats: dict | None = None):
    t = target.table
    inv = target.inverses
    return search_homs(p, range(target.order), lambda x, y: t[x][y], inv.__getitem__, target.identity,
                       node_budget, stats)


def count_homs(p: Presentation, target: FiniteGroupTable, node_budget: int | None = DEFAULT_NODE_BUDGET) -> int:
    """Exact ``|Hom(p, target)|``; raises ``BudgetExceeded`` past ``node_budget``."""
    return sum(1 for _ in iter_homs(p, target, node_budget))


def symmetric_table(n: int) -> FiniteGroupTable:
    gens = [_cycle(n, 0, 1), _cycle(n, *range(n))] if n > 1 else [identity_perm(1)]
    return table_from_permutations(f"Sym{n}", gens)

