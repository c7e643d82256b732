"""Dehn fillings of marked groups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .budget import BudgetConfig
from .core import characteristic_core
from .errors import UndeclaredGenerator
from .presentation import MarkedGroup, PeripheralRecord, Presentation
from .words import free_reduce, substitute

UNVERIFIED = "unverified-properness"


@dataclass(frozen=True)
class FillingResult:
    quotient: Presentation
    image_peripherals: tuple
    peripheral_orders: Optional[tuple] = None
    level: Optional[int] = None
    name: str = "G"

    def as_marked_group(self) -> MarkedGroup:
        suffix = f"_fill{self.level}" if self.level is not None else "_fill"
        return MarkedGroup(self.quotient, self.image_peripherals, self.name + suffix)


def dehn_filling(g: MarkedGroup, kernels: Sequence[Sequence[tuple]]) -> FillingResult:
    """Quotient of ``g`` by the normal closure of ``kernels[j]`` pushed into the ambient group.

    The image peripherals get the killed words as extra relators; that is a
    presentation of ``P_j / N_j`` only when the filling is proper, which is
    not checked here.
    """
    if len(kernels) != g.k:
        raise ValueError(f"expected {g.k} kernel lists, got {len(kernels)}")
    added = []
    images = []
    for per, words in zip(g.peripherals, kernels):
        own_n = per.own.ngens
        words = [free_reduce(w) for w in words]
        for w in words:
            if any(abs(x) > own_n for x in w):
                raise UndeclaredGenerator(f"kernel word for {per.name} uses undeclared generators")
            added.append(substitute(w, per.ambient_words))
        own = Presentation(per.own.gens, per.own.relators + tuple(words))
        images.append(PeripheralRecord(per.name, per.ambient_words, own))
    quotient = Presentation(g.ambient.gens, g.ambient.relators + tuple(added))
    return FillingResult(quotient, tuple(images), name=g.name)


def characteristic_filling(g: MarkedGroup, i: int, budget: BudgetConfig | None = None) -> FillingResult:
    cores = [characteristic_core(p.own, i, budget) for p in g.peripherals]
    f = dehn_filling(g, [c.generators for c in cores])
    orders = tuple(sorted(c.quotient_order for c in cores))
    return FillingResult(f.quotient, f.image_peripherals, orders, i, g.name)
