"""Homomorphisms into symmetric groups, their images and kernels.

Permutations are tuples of images and act on the right: ``x`` goes to
``p[x]``, and the product ``p * q`` applies ``p`` first.  A word
``g1 g2 ... gm`` is therefore evaluated left to right.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .errors import BudgetExceeded
from .presentation import Presentation
from .words import Word, free_reduce, inverse

DEFAULT_NODE_BUDGET = 10**6
DEFAULT_ORDER_CAP = 10**6


def compose(p: tuple, q: tuple) -> tuple:
    return tuple(q[x] for x in p)


def perm_inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def cycle_string(p: tuple) -> str:
    seen = set()
    cycles = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        c = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            c.append(j)
            seen.add(j)
            j = p[j]
        cycles.append("(" + ",".join(map(str, c)) + ")")
    return "".join(cycles) or "()"


def evaluate(w: Sequence[int], images: Sequence, mul: Callable, inv: Callable, identity):
    acc = identity
    for x in w:
        acc = mul(acc, images[x - 1] if x > 0 else inv(images[-x - 1]))
    return acc


@dataclass(frozen=True)
class PermHom:
    source: Presentation
    degree: int
    images: tuple

    def __post_init__(self):
        if len(self.images) != self.source.ngens:
            raise ValueError("one image per source generator required")

    def __call__(self, w: Sequence[int]) -> tuple:
        return evaluate(w, self.images, compose, perm_inverse, identity_perm(self.degree))


def search_homs(
    p: Presentation,
    elements: Sequence,
    mul: Callable,
    inv: Callable,
    identity,
    node_budget: int | None = DEFAULT_NODE_BUDGET,
    stats: dict | None = None,
) -> Iterator[tuple]:
    """Backtrack over generator images in order, yielding image tuples.

    Each relator is checked as soon as its last generator (in index order)
    is assigned.  ``node_budget`` bounds the number of partial assignments;
    the count used so far is kept in ``stats["nodes"]`` when given.
    """
    n = p.ngens
    due: list[list[Word]] = [[] for _ in range(n)]
    for r in p.relators:
        due[max(abs(x) for x in r) - 1].append(r)
    assign = [None] * n
    inv_assign = [None] * n
    nodes = 0

    def holds(r):
        acc = identity
        for x in r:
            acc = mul(acc, assign[x - 1] if x > 0 else inv_assign[-x - 1])
        return acc == identity

    def rec(j):
        nonlocal nodes
        if j == n:
            yield tuple(assign)
            return
        for e in elements:
            nodes += 1
            if stats is not None:
                stats["nodes"] = nodes
            if node_budget is not None and nodes > node_budget:
                raise BudgetExceeded("hom search nodes", node_budget)
            assign[j] = e
            inv_assign[j] = inv(e)
            if all(holds(r) for r in due[j]):
                yield from rec(j + 1)
        assign[j] = inv_assign[j] = None

    yield from rec(0)


@lru_cache(maxsize=16)
def symmetric_elements(n: int) -> tuple:
    return tuple(itertools.permutations(range(n)))


def enumerate_homs(p: Presentation, n: int, limit: int | None = None,
                   node_budget: int | None = DEFAULT_NODE_BUDGET) -> list[PermHom]:
    """All homomorphisms ``p -> Sym_n``, trivial and intransitive ones included."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    out = []
    for imgs in search_homs(p, symmetric_elements(n), compose, perm_inverse, identity_perm(n), node_budget):
        if limit is not None and len(out) >= limit:
            raise BudgetExceeded("hom count", limit)
        out.append(PermHom(p, n, imgs))
    return out


def product_generators(homs: Sequence[PermHom]) -> tuple[list[tuple], int]:
    """Generator images of the product hom acting on the disjoint union of points."""
    if not homs:
        return [], 0
    src = homs[0].source
    if any(h.source != src for h in homs):
        raise ValueError("homs must share a source")
    gens = []
    for i in range(src.ngens):
        img: list[int] = []
        offset = 0
        for h in homs:
            img.extend(offset + x for x in h.images[i])
            offset += h.degree
        gens.append(tuple(img))
    return gens, sum(h.degree for h in homs)


def _cayley_bfs(gens: Sequence[tuple], degree: int, order_cap: int):
    """Breadth-first Schreier tree of the group generated by ``gens``.

    Returns ``(elements, parent)`` where ``parent[e] = (prev, gen index)``.
    """
    e0 = identity_perm(degree)
    parent = {e0: None}
    queue = deque([e0])
    elements = [e0]
    while queue:
        x = queue.popleft()
        for i, s in enumerate(gens):
            y = compose(x, s)
            if y not in parent:
                if len(parent) >= order_cap:
                    raise BudgetExceeded("image order", order_cap)
                parent[y] = (x, i)
                elements.append(y)
                queue.append(y)
    return elements, parent


def permutation_image(homs: Sequence[PermHom], order_cap: int = DEFAULT_ORDER_CAP):
    """Return ``(generator images, image order)`` of the product of ``homs``."""
    gens, degree = product_generators(homs)
    elements, _ = _cayley_bfs(gens, degree, order_cap)
    return gens, len(elements)


def kernel_generators(p: Presentation, homs: Sequence[PermHom],
                      order_cap: int = DEFAULT_ORDER_CAP) -> list[Word]:
    """Schreier generators for the kernel of the product of ``homs``.

    With transversal words ``u(x)`` read off a breadth-first tree of the
    image, the words ``u(x) s u(x s)^-1`` generate the kernel as a subgroup.
    """
    if not homs:
        return [(i + 1,) for i in range(p.ngens)]
    gens, degree = product_generators(homs)
    elements, parent = _cayley_bfs(gens, degree, order_cap)
    rep: dict[tuple, Word] = {}
    for x in elements:
        if parent[x] is None:
            rep[x] = ()
        else:
            prev, i = parent[x]
            rep[x] = rep[prev] + (i + 1,)
    out: list[Word] = []
    seen: set[Word] = set()
    for x in elements:
        for i, s in enumerate(gens):
            w = free_reduce(rep[x] + (i + 1,) + inverse(rep[compose(x, s)]))
            if w and w not in seen and inverse(w) not in seen:
                seen.add(w)
                out.append(w)
    return out


def _canonical_action(images: Sequence[tuple], points: Sequence[int]):
    """Relabel a transitive action on ``points``, minimizing over base points."""
    best = None
    for base in points:
        label = {base: 0}
        order = [base]
        k = 0
        while k < len(order):
            x = order[k]
            k += 1
            for s in images:
                y = s[x]
                if y not in label:
                    label[y] = len(order)
                    order.append(y)
        relabelled = tuple(tuple(label[s[x]] for x in order) for s in images)
        if best is None or relabelled < best:
            best = relabelled
    return best


def transitive_constituents(homs: Sequence[PermHom]) -> list[PermHom]:
    """Distinct transitive constituents of ``homs`` up to equivalence of actions.

    The product of the returned homs has the same kernel as the product of
    ``homs``: each hom's kernel is the intersection of the kernels of its
    orbit actions, and equivalent actions share a kernel.
    """
    if not homs:
        return []
    src = homs[0].source
    found = set()
    for h in homs:
        n = h.degree
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            orbit = [start]
            seen[start] = True
            k = 0
            while k < len(orbit):
                x = orbit[k]
                k += 1
                for s in h.images:
                    if not seen[s[x]]:
                        seen[s[x]] = True
                        orbit.append(s[x])
            found.add((len(orbit), _canonical_action(h.images, orbit)))
    return [PermHom(src, d, imgs) for d, imgs in sorted(found)]
