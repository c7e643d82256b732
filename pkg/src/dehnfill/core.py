"""Characteristic cores: the intersection of all subgroups of index <= i."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .budget import BudgetConfig
from .perms import enumerate_homs, kernel_generators, permutation_image, transitive_constituents
from .presentation import Presentation


@dataclass(frozen=True)
class CoreResult:
    level: int
    generators: tuple
    quotient_order: int


def characteristic_core(p: Presentation, i: int, budget: BudgetConfig | None = None) -> CoreResult:
    """Generating set of ``C_i(p)`` and the order of ``p / C_i(p)``.

    ``C_i`` is the kernel of the product of all homomorphisms ``p -> Sym_i``;
    a subgroup of index ``m <= i`` is a point stabilizer of the action on its
    cosets, so its core contains that kernel.  Generators are Schreier
    generators of the kernel, computed on the distinct transitive
    constituents of those homomorphisms (same kernel, much smaller degree).
    """
    if i < 1:
        raise ValueError("level must be at least 1")
    budget = budget or BudgetConfig()
    return _core(p, i, budget.hom_node_budget, budget.closure_order_cap)


@lru_cache(maxsize=512)
def _core(p: Presentation, i: int, node_budget: int, order_cap: int) -> CoreResult:
    homs = transitive_constituents(enumerate_homs(p, i, node_budget=node_budget))
    _, order = permutation_image(homs, order_cap)
    gens = kernel_generators(p, homs, order_cap)
    return CoreResult(i, tuple(gens), order)
