"""Bounded, certificate-producing word problem.

Triviality is shown by a product of conjugates of relators; non-triviality
by a homomorphism into a catalog group under which the word survives.  Both
searches are bounded, so the third answer ``UNKNOWN`` is honest.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .budget import BudgetConfig
from .catalog import FiniteGroupTable, catalog_group, iter_homs, load_catalog
from .errors import BudgetExceeded, InvalidMove
from .presentation import Presentation, expand_expression
from .words import free_reduce, inverse

TRIVIAL = "TRIVIAL"
NONTRIVIAL = "NONTRIVIAL"
UNKNOWN = "UNKNOWN"

_CHUNK = 256


@dataclass(frozen=True)
class WPVerdict:
    status: str
    derivation: Optional[tuple] = None  # ((relator index, conjugator, sign), ...)
    witness: Optional[dict] = None  # {"group": name, "images": [labels]}
    report: dict = field(default_factory=dict)

    def __bool__(self):
        raise TypeError("WPVerdict has three values; compare .status")


def verify_derivation(p: Presentation, w: Sequence[int], derivation) -> bool:
    try:
        return expand_expression(p.relators, derivation) == free_reduce(w)
    except InvalidMove:
        return False


def verify_witness(p: Presentation, w: Sequence[int], witness: dict) -> bool:
    try:
        t = catalog_group(witness["group"])
        images = [t.index(lbl) for lbl in witness["images"]]
    except (KeyError, ValueError):
        return False
    if len(images) != p.ngens:
        return False
    if any(t.evaluate(r, images) != t.identity for r in p.relators):
        return False
    return t.evaluate(w, images) != t.identity


def _rotation_moves(p: Presentation):
    """``(sigma, relator index, sign, tail)`` for every cyclic rotation.

    Inserting ``sigma`` after prefix ``u`` of the residual peels off the
    factor ``c r^sign c^-1`` with ``c = u tail``.
    """
    moves = []
    seen = set()
    for ri, r in enumerate(p.relators):
        for s in (1, -1):
            u = r if s == 1 else inverse(r)
            for o in range(len(u)):
                rho = u[o:] + u[:o]
                sigma = inverse(rho)
                if sigma in seen:
                    continue
                seen.add(sigma)
                moves.append((sigma, ri, s, inverse(u[:o])))
    return moves


def derivation_search(p: Presentation, w: Sequence[int], budget: BudgetConfig) -> Iterator:
    """Best-first search over residual words, smallest residual first.

    Each step inserts a cyclic rotation of a relator (or its inverse) into
    the residual; the residual may grow by at most ``wp_conjugator_length``
    letters per step and at most ``wp_factor_count`` steps are taken.
    Yields ``None`` while working, then a derivation tuple or ``False``.
    """
    w = free_reduce(w)
    if not w:
        yield ()
        return
    if budget.wp_factor_count <= 0 or budget.wp_node_budget <= 0 or not p.relators:
        yield False
        return
    moves = _rotation_moves(p)
    growth = budget.wp_conjugator_length
    max_depth = budget.wp_factor_count
    counter = itertools.count()
    heap = [(len(w), 0, next(counter), w, ())]
    visited = {w}
    nodes = 0
    while heap:
        _, depth, _, x, path = heapq.heappop(heap)
        if depth >= max_depth:
            continue
        n = len(x)
        for k in range(n + 1):
            pre, post = x[:k], x[k:]
            for sigma, ri, s, tail in moves:
                m = len(sigma)
                cl = 0
                while cl < k and cl < m and pre[k - 1 - cl] == -sigma[cl]:
                    cl += 1
                cr = 0
                while cr < n - k and cr < m - cl and post[cr] == -sigma[m - 1 - cr]:
                    cr += 1
                if n + m - 2 * (cl + cr) > n + growth:
                    continue
                y = free_reduce(pre + sigma + post)
                if len(y) > n + growth or y in visited:
                    continue
                visited.add(y)
                step = path + ((ri, free_reduce(pre + tail), s),)
                if not y:
                    yield step
                    return
                nodes += 1
                if nodes >= budget.wp_node_budget:
                    yield False
                    return
                if nodes % _CHUNK == 0:
                    yield None
                heapq.heappush(heap, (len(y), depth + 1, next(counter), y, step))
    yield False


def _ordered_catalog() -> list[FiniteGroupTable]:
    cat = list(load_catalog())
    return sorted(cat, key=lambda t: (t.order, cat.index(t)))


def witness_search(p: Presentation, w: Sequence[int], budget: BudgetConfig) -> Iterator:
    """Look for a catalog quotient in which ``w`` survives.

    Yields ``None`` while working, then a witness dict or ``False``.
    """
    w = free_reduce(w)
    remaining = budget.hom_node_budget
    if not w or remaining <= 0:
        yield False
        return
    for t in _ordered_catalog():
        stats = {"nodes": 0}
        gen = iter_homs(p, t, node_budget=remaining, stats=stats)
        seen = 0
        try:
            for images in gen:
                seen += 1
                if t.evaluate(w, images) != t.identity:
                    yield {"group": t.name, "images": [t.labels[x] for x in images]}
                    return
                if seen % _CHUNK == 0:
                    yield None
        except BudgetExceeded:
            yield False
            return
        remaining -= stats["nodes"]
        if remaining <= 0:
            break
        yield None
    yield False


def prove_trivial(p: Presentation, w: Sequence[int], budget: BudgetConfig | None = None) -> Optional[tuple]:
    budget = budget or BudgetConfig()
    for out in derivation_search(p, w, budget):
        if out is not None:
            return out if out is not False else None
    return None


def decide_word(p: Presentation, w: Sequence[int], budget: BudgetConfig | None = None) -> WPVerdict:
    """Interleave the two searches; the first definite answer wins."""
    budget = budget or BudgetConfig()
    if any(abs(x) > p.ngens or x == 0 for x in w):
        raise ValueError("word uses undeclared generators")
    searches = {"derivation": derivation_search(p, w, budget), "witness": witness_search(p, w, budget)}
    exhausted = {}
    while searches:
        for name in list(searches):
            out = next(searches[name], False)
            if out is None:
                continue
            del searches[name]
            if out is False:
                exhausted[name] = True
                continue
            if name == "derivation":
                assert verify_derivation(p, w, out)
                return WPVerdict(TRIVIAL, derivation=out)
            assert verify_witness(p, w, out)
            return WPVerdict(NONTRIVIAL, witness=out)
    return WPVerdict(UNKNOWN, report={"exhausted": sorted(exhausted), "budget": budget.as_dict()})
