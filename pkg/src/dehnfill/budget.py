from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class BudgetConfig:
    """Search limits shared by every bounded procedure.

    ``wp_conjugator_length`` also bounds the length of generator images tried
    by the direct isomorphism search.  ``wp_node_budget`` caps the number of
    states the derivation search may generate per word.
    """

    hom_node_budget: int = 10**6
    closure_order_cap: int = 10**6
    wp_conjugator_length: int = 4
    wp_factor_count: int = 4
    tietze_node_cap: int = 10**5
    tietze_size_cap: int = 64
    max_level: int = 4
    wall_clock_seconds: int = 60
    wp_node_budget: int = 20000

    @classmethod
    def zero(cls) -> "BudgetConfig":
        return cls(**{f.name: 0 for f in dataclasses.fields(cls)})

    def replace(self, **changes) -> "BudgetConfig":
        return dataclasses.replace(self, **changes)

    def validate(self) -> "BudgetConfig":
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise ValueError(f"budget {f.name} must be a positive integer, got {v!r}")
        return self

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, values: dict, base: "BudgetConfig | None" = None) -> "BudgetConfig":
        base = base or cls()
        names = {f.name for f in dataclasses.fields(cls)}
        changes = {}
        for key, raw in values.items():
            if key not in names:
                raise ValueError(f"unknown budget key {key!r}")
            try:
                changes[key] = int(raw)
            except (TypeError, ValueError):
                raise ValueError(f"budget {key} must be an integer, got {raw!r}") from None
        return dataclasses.replace(base, **changes)


def parse_config(text: str) -> dict:
    """``key = value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {n}: expected 'key = value'")
        out[key.strip()] = value.strip()
    return out
