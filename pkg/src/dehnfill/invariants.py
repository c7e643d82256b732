"""Isomorphism invariants: abelianization and hom-count fingerprints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .budget import BudgetConfig
from .catalog import count_homs, load_catalog
from .errors import BudgetExceeded, MissingPeripheralOrders
from .filling import FillingResult
from .presentation import Presentation
from .words import exponent_sums

BUDGET_EXCEEDED = "BUDGET_EXCEEDED"


def smith_normal_form(m: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors ``d1 | d2 | ...`` of an integer matrix.

    Returns ``min(rows, cols)`` nonnegative entries, zeros last.
    """
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(r) != cols for r in a):
        raise ValueError("ragged matrix")
    diag = []
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    v = a[i][j]
                    if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                diag.extend([0] * (min(rows, cols) - t))
                return diag
            i, j = best
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
            piv = a[t][t]
            done = True
            for i in range(t + 1, rows):
                q = a[i][t] // piv
                if q:
                    ri, rt = a[i], a[t]
                    for j in range(t, cols):
                        ri[j] -= q * rt[j]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // piv
                if q:
                    for i in range(t, rows):
                        a[i][j] -= q * a[i][t]
                if a[t][j]:
                    done = False
            if not done:
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % piv), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
    return diag


def abelianization(p: Presentation) -> tuple[int, tuple]:
    """``(free rank, torsion factors)`` of ``p`` made abelian."""
    if not p.relators or p.ngens == 0:
        return p.ngens, ()
    m = [exponent_sums(r, p.ngens) for r in p.relators]
    d = smith_normal_form(m)
    rank = sum(1 for x in d if x)
    return p.ngens - rank, tuple(x for x in d if x > 1)


@dataclass(frozen=True)
class Fingerprint:
    free_rank: int
    torsion: tuple
    hom_counts: tuple  # ((catalog name, count or BUDGET_EXCEEDED), ...)

    def as_dict(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "hom_counts": {k: v for k, v in self.hom_counts},
        }

    @classmethod
    def from_dict(cls, d) -> "Fingerprint":
        return cls(d["free_rank"], tuple(d["torsion"]), tuple(d["hom_counts"].items()))


def fingerprint(p: Presentation, budget: BudgetConfig | None = None) -> Fingerprint:
    budget = budget or BudgetConfig()
    rank, torsion = abelianization(p)
    counts = []
    for t in load_catalog():
        try:
            counts.append((t.name, count_homs(p, t, budget.hom_node_budget)))
        except BudgetExceeded:
            counts.append((t.name, BUDGET_EXCEEDED))
    return Fingerprint(rank, torsion, tuple(counts))


def fingerprint_differences(f1: Fingerprint, f2: Fingerprint) -> list[tuple]:
    """``(field, value1, value2)`` for every completed entry that differs."""
    diffs = []
    if f1.free_rank != f2.free_rank:
        diffs.append(("free_rank", f1.free_rank, f2.free_rank))
    if f1.torsion != f2.torsion:
        diffs.append(("torsion", list(f1.torsion), list(f2.torsion)))
    c2 = dict(f2.hom_counts)
    for name, v1 in f1.hom_counts:
        v2 = c2.get(name)
        if v2 is None or BUDGET_EXCEEDED in (v1, v2):
            continue
        if v1 != v2:
            diffs.append((f"hom_counts.{name}", v1, v2))
    return diffs


@dataclass(frozen=True)
class MarkedFingerprint:
    base: Fingerprint
    peripheral_orders: tuple
    peripheral_count: int

    def as_dict(self) -> dict:
        return {
            "base": self.base.as_dict(),
            "peripheral_orders": list(self.peripheral_orders),
            "peripheral_count": self.peripheral_count,
        }


def marked_fingerprint(f: FillingResult, budget: BudgetConfig | None = None) -> MarkedFingerprint:
    if f.peripheral_orders is None:
        raise MissingPeripheralOrders("marked fingerprints need a characteristic filling")
    return MarkedFingerprint(fingerprint(f.quotient, budget), tuple(sorted(f.peripheral_orders)), len(f.image_peripherals))


def marked_differences(m1: MarkedFingerprint, m2: MarkedFingerprint) -> list[tuple]:
    diffs = []
    if m1.peripheral_count != m2.peripheral_count:
        diffs.append(("peripheral_count", m1.peripheral_count, m2.peripheral_count))
    if m1.peripheral_orders != m2.peripheral_orders:
        diffs.append(("peripheral_orders", list(m1.peripheral_orders), list(m2.peripheral_orders)))
    diffs.extend(fingerprint_differences(m1.base, m2.base))
    return diffs
