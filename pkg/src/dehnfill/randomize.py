"""Random Tietze walks on marked groups, for testing invariants and the prover."""

from __future__ import annotations

import random

from .presentation import (
    AddGenerator,
    AddRelator,
    MarkedGroup,
    PeripheralRecord,
    RemoveGenerator,
    RemoveRelator,
    TietzeChain,
    permute_generators,
    rename_generators,
)
from .words import conjugate, cyclic_reduce, free_reduce, inverse, mul, substitute


def _random_word(rng: random.Random, ngens: int, lo: int, hi: int):
    while True:
        n = rng.randint(lo, hi)
        w = free_reduce(tuple(rng.choice((1, -1)) * rng.randint(1, ngens) for _ in range(n)))
        if len(w) >= lo:
            return w


def random_move(chain: TietzeChain, rng: random.Random, fresh: str, room: int = 2):
    """Apply one random Tietze move (two for a relator replacement) to ``chain``.

    Returns the number of primitive moves applied, 0 if nothing applied.
    """
    p = chain.current
    kinds = ["add_gen", "add_rel"]
    if p.relators and room >= 2:
        kinds.append("replace")
    removable = [
        (name, ri)
        for gi, name in enumerate(p.gens)
        for ri, r in enumerate(p.relators)
        if sum(1 for x in r if abs(x) == gi + 1) == 1
    ]
    if removable:
        kinds.append("remove_gen")
    kind = rng.choice(kinds)
    if kind == "add_gen" and p.ngens:
        chain.apply(AddGenerator(fresh, _random_word(rng, p.ngens, 1, 3)))
        return 1
    if kind == "add_rel" and p.relators:
        i = rng.randrange(len(p.relators))
        c = _random_word(rng, p.ngens, 0, 2)
        expr = ((i, c, rng.choice((1, -1))),)
        if rng.random() < 0.5:
            expr += ((rng.randrange(len(p.relators)), _random_word(rng, p.ngens, 0, 1), rng.choice((1, -1))),)
        w = mul(*(conjugate(p.relators[j] if s == 1 else inverse(p.relators[j]), cc) for j, cc, s in expr))
        if not cyclic_reduce(w):
            return 0
        chain.apply(AddRelator(w, expr))
        return 1
    if kind == "replace":
        # r_i  ->  r_i c r_j^s c^-1  (or a conjugate of r_i when there is one relator)
        i = rng.randrange(len(p.relators))
        c = _random_word(rng, p.ngens, 0, 2)
        n = len(p.relators)
        if n > 1:
            j = rng.choice([x for x in range(n) if x != i])
            s = rng.choice((1, -1))
            expr = ((i, (), 1), (j, c, s))
        else:
            expr = ((i, c, 1),)
        w = mul(*(conjugate(p.relators[j] if s == 1 else inverse(p.relators[j]), cc) for j, cc, s in expr))
        if not cyclic_reduce(w):
            return 0
        chain.apply(AddRelator(w, expr))
        # the stored relator is w cyclically reduced: w = d w' d^-1
        d = w[: (len(w) - len(cyclic_reduce(w))) // 2]
        back = ((n, d, 1),) + (((j, c, -s),) if n > 1 else ())
        chain.apply(RemoveRelator(i, back))
        return 2
    if kind == "remove_gen" and p.ngens > 1:
        name, ri = rng.choice(removable)
        chain.apply(RemoveGenerator(name, ri))
        return 1
    return 0


def random_tietze(g: MarkedGroup, rng: random.Random, moves: int = 3, relabel: bool = True):
    """Walk ``moves`` primitive Tietze moves from ``g``.

    Peripheral words are carried along the walk.  With ``relabel`` the
    generators are shuffled and renamed and the peripherals reordered.
    Returns ``(new marked group, chain)``.
    """
    chain = TietzeChain(g.ambient)
    done = 0
    tries = 0
    while done < moves and tries < 20 * moves + 20:
        tries += 1
        done += random_move(chain, rng, f"t{tries}", moves - done)
    q = chain.current
    pers = [PeripheralRecord(p.name, tuple(substitute(w, chain.forward) for w in p.ambient_words), p.own) for p in g.peripherals]
    if relabel:
        order = list(range(q.ngens))
        rng.shuffle(order)
        q, images = permute_generators(q, order)
        q = rename_generators(q, [f"g{i}" for i in range(q.ngens)])
        pers = [PeripheralRecord(p.name, tuple(substitute(w, images) for w in p.ambient_words), p.own) for p in pers]
        rng.shuffle(pers)
    return MarkedGroup(q, tuple(pers), g.name + "_t"), chain
