"""Isomorphism semi-decision for marked groups.

Two searches run interleaved.  The prover looks for explicit generator maps,
either by Tietze moves from both presentations towards a common one, or by
trying short generator images directly; every candidate is checked with
word-problem derivations before it is returned.  The disprover compares
fingerprints of characteristic Dehn fillings level by level.  An
isomorphism of marked groups carries each characteristic Dehn kernel onto
the other, so any difference in a completed invariant certifies
non-isomorphism.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .budget import BudgetConfig
from .catalog import catalog_group, count_homs, iter_homs, load_catalog
from .derivations import rotation_factor, chain_proof, telescope, transport
from .errors import BudgetExceeded, InvalidMove
from .filling import FillingResult, characteristic_filling
from .groupfile import parse_group_file, serialize_group
from .invariants import BUDGET_EXCEEDED, abelianization
from .presentation import (
    AddGenerator,
    MarkedGroup,
    Presentation,
    RemoveGenerator,
    RemoveRelator,
    TietzeChain,
    canonical_form,
    canonical_orders,
    expand_expression,
    parse_word,
)
from .words import all_words, free_reduce, inverse, least_rotation, mul, substitute
from .wordproblem import prove_trivial

ISOMORPHIC = "ISOMORPHIC"
NOT_ISOMORPHIC = "NOT_ISOMORPHIC"
UNKNOWN = "UNKNOWN"

PROBE_GROUPS = ("C2", "C3", "C4", "C5", "C6", "Sym3", "D4", "Q8", "A4", "Sym4")
PROBE_LIMIT = 200
CONJUGATOR_LENGTH = 2
ROUTES_PER_FORM = 3
SHORT_KEY = 16
MEMBER_TRIES = 4


# -- records ----------------------------------------------------------------


@dataclass
class IsoWitness:
    """Generator maps both ways, with the peripheral matching and every check.

    ``matching`` holds one entry per peripheral of the first group:
    ``(j, j', conjugator, forward members, backward members)``.  The checks
    map ``(kind, index)`` to a derivation; :func:`verify_witness` rebuilds
    each checked word from the maps alone.
    """

    forward: tuple
    backward: tuple
    matching: tuple
    checks: dict = field(default_factory=dict)
    strategy: str = ""


@dataclass
class NonIsoCertificate:
    level: int
    fillings: tuple  # (FillingResult or None, FillingResult or None)
    field: str
    values: tuple


@dataclass
class Verdict:
    status: str
    witness: Optional[IsoWitness] = None
    certificate: Optional[NonIsoCertificate] = None
    report: dict = field(default_factory=dict)


# -- finite probes ----------------------------------------------------------


class Probes:
    """Homomorphisms of a presentation into small catalog groups.

    ``complete`` lists the groups whose full hom set was enumerated.
    """

    def __init__(self, p: Presentation, node_budget: int, limit: int = PROBE_LIMIT):
        self.p = p
        self.tables = {}
        self.sig_cache = {}
        self.homs = []
        self.complete = {}
        for name in PROBE_GROUPS:
            t = catalog_group(name)
            found = []
            try:
                for imgs in iter_homs(p, t, node_budget=node_budget):
                    if len(self.homs) + len(found) >= limit:
                        break
                    found.append(imgs)
                else:
                    self.complete[name] = (len(self.homs), len(self.homs) + len(found))
            except BudgetExceeded:
                pass
            self.homs.extend((t, imgs) for imgs in found)
            if len(self.homs) >= limit:
                break

    def signature(self, w: Sequence[int]) -> tuple:
        return tuple(t.evaluate(w, imgs) for t, imgs in self.homs)

    def cached_signature(self, w) -> tuple:
        w = tuple(w)
        if w not in self.sig_cache:
            self.sig_cache[w] = self.signature(w)
        return self.sig_cache[w]

    def gen_signatures(self) -> list[tuple]:
        return [self.signature((i + 1,)) for i in range(self.p.ngens)]


def _combine(sig_images: Sequence[tuple], w: Sequence[int], probes: Probes, limit=None) -> tuple:
    """Signature of the image of ``w`` when generator ``i`` has signature ``sig_images[i]``.

    With ``limit`` only the first ``limit`` probes are used.
    """
    out = []
    for k, (t, _) in enumerate(probes.homs[:limit]):
        acc = t.identity
        tab, inv = t.table, t.inverses
        for x in w:
            acc = tab[acc][sig_images[x - 1][k] if x > 0 else inv[sig_images[-x - 1][k]]]
        out.append(acc)
    return tuple(out)


def _kills(sig_images, w, probes: Probes) -> bool:
    for k, (t, _) in enumerate(probes.homs):
        acc = t.identity
        tab, inv = t.table, t.inverses
        for x in w:
            acc = tab[acc][sig_images[x - 1][k] if x > 0 else inv[sig_images[-x - 1][k]]]
        if acc != t.identity:
            return False
    return True


def _pulls_back_injectively(sig_images, target_probes: Probes, source_probes: Probes) -> bool:
    """For fully enumerated probe groups, ``h -> h o phi`` must be injective.

    That holds whenever ``phi`` is onto; and when the hom counts are equal it
    is also a bijection.
    """
    for name, (lo, hi) in target_probes.complete.items():
        pulled = set()
        for k in range(lo, hi):
            pulled.add(tuple(s[k] for s in sig_images))
        if len(pulled) != hi - lo:
            return False
        if name in source_probes.complete:
            slo, shi = source_probes.complete[name]
            if shi - slo != hi - lo:
                return False
    return True


# -- the checks an isomorphism witness has to pass --------------------------


def _required_checks(g: MarkedGroup, h: MarkedGroup, fwd, bwd, matching):
    """Yield ``(key, presentation, word)`` for every word that must be trivial."""
    G, H = g.ambient, h.ambient
    for i, r in enumerate(G.relators):
        yield ("rel_fwd", i), H, substitute(r, fwd)
    for i, r in enumerate(H.relators):
        yield ("rel_bwd", i), G, substitute(r, bwd)
    for i in range(G.ngens):
        yield ("round_G", i), G, mul(substitute(fwd[i], bwd), ((-(i + 1)),))
    for i in range(H.ngens):
        yield ("round_H", i), H, mul(substitute(bwd[i], fwd), ((-(i + 1)),))
    for j, j2, conj, fmem, bmem in matching:
        P, Q = g.peripherals[j], h.peripherals[j2]
        for a, (u, v) in enumerate(zip(P.ambient_words, fmem)):
            target = mul(conj, substitute(v, Q.ambient_words), inverse(conj))
            yield ("per_fwd", j, a), H, mul(inverse(substitute(u, fwd)), target)
        for a, (y, v) in enumerate(zip(Q.ambient_words, bmem)):
            pulled = substitute(mul(conj, y, inverse(conj)), bwd)
            yield ("per_bwd", j, a), G, mul(inverse(pulled), substitute(v, P.ambient_words))


def verify_witness(g: MarkedGroup, h: MarkedGroup, wit: IsoWitness) -> bool:
    """Re-check a witness using only its stored derivations (no search)."""
    G, H = g.ambient, h.ambient
    if len(wit.forward) != G.ngens or len(wit.backward) != H.ngens:
        return False
    if any(abs(x) > H.ngens for w in wit.forward for x in w):
        return False
    if any(abs(x) > G.ngens for w in wit.backward for x in w):
        return False
    if g.k != h.k or len(wit.matching) != g.k:
        return False
    if sorted(m[0] for m in wit.matching) != list(range(g.k)):
        return False
    if sorted(m[1] for m in wit.matching) != list(range(h.k)):
        return False
    for j, j2, conj, fmem, bmem in wit.matching:
        if len(fmem) != g.peripherals[j].own.ngens or len(bmem) != h.peripherals[j2].own.ngens:
            return False
        if any(abs(x) > h.peripherals[j2].own.ngens for v in fmem for x in v):
            return False
        if any(abs(x) > g.peripherals[j].own.ngens for v in bmem for x in v):
            return False
    for key, pres, word in _required_checks(g, h, wit.forward, wit.backward, wit.matching):
        d = wit.checks.get(key)
        if d is None:
            return False
        try:
            if expand_expression(pres.relators, d) != free_reduce(word):
                return False
        except InvalidMove:
            return False
    return True


def _prove_all(items, budget: BudgetConfig, known=None) -> Optional[dict]:
    checks = {}
    for key, pres, word in items:
        if known and key in known:
            checks[key] = known[key]
            continue
        d = prove_trivial(pres, word, budget)
        if d is None:
            return None
        checks[key] = d
    return checks


# -- peripheral matching ----------------------------------------------------


def _member_words(P, budget: BudgetConfig):
    return list(all_words(P.own.ngens, budget.wp_conjugator_length))


def _member_tables(probes: Probes, embed, words):
    """``(free, by signature)`` lookups for the words ``v(embed)``."""
    key = (tuple(embed), len(words))
    if key not in probes.tables:
        free, by_sig = {}, {}
        emb_sigs = [probes.signature(e) for e in embed]
        for v in words:
            free.setdefault(substitute(v, embed), v)
            sig = _combine(emb_sigs, v, probes)
            by_sig.setdefault(sig[:SHORT_KEY], []).append((v, sig))
        probes.tables[key] = (free, by_sig)
    return probes.tables[key]


def _find_members(targets, sigs, words, embed, pres, conj, probes, budget):
    """For each target find ``v`` with ``target = conj v(embed) conj^-1`` in ``pres``.

    ``sigs`` are the probe signatures of the targets.  Returns the tuple of
    words or ``None``.
    """
    free, by_sig = _member_tables(probes, embed, words)
    cinv = inverse(conj)
    if conj:
        c_sig, ci_sig = probes.cached_signature(conj), probes.cached_signature(cinv)
    quick = budget.replace(wp_node_budget=max(1, budget.wp_node_budget // 10))
    members = []
    for t, st in zip(targets, sigs):
        inner = mul(cinv, t, conj)
        found = free.get(inner)
        if found is None:
            short = _combine([ci_sig, st, c_sig], (1, 2, 3), probes, SHORT_KEY) if conj else st[:SHORT_KEY]
            bucket = by_sig.get(short, ())
            if bucket and conj:
                st = _combine([ci_sig, st, c_sig], (1, 2, 3), probes)
            tries = 0
            for v, sig in bucket:
                if sig != st:
                    continue
                tries += 1
                if tries > MEMBER_TRIES:
                    break
                cand = mul(conj, substitute(v, embed), cinv)
                if prove_trivial(pres, mul(inverse(t), cand), quick) is not None:
                    found = v
                    break
        if found is None:
            return None
        members.append(found)
    return tuple(members)


def _match_peripherals(g: MarkedGroup, h: MarkedGroup, fwd, bwd, budget, probes_g, probes_h):
    if g.k != h.k:
        return None
    if g.k == 0:
        return ()
    conjs = list(all_words(h.ambient.ngens, CONJUGATOR_LENGTH))
    bwd_sigs = [probes_g.signature(w) for w in bwd]
    pair_cache = {}

    def match_pair(j, j2):
        if (j, j2) in pair_cache:
            return pair_cache[(j, j2)]
        P, Q = g.peripherals[j], h.peripherals[j2]
        out = None
        wq, wp = _member_words(Q, budget), _member_words(P, budget)
        images = [substitute(u, fwd) for u in P.ambient_words]
        image_sigs = [probes_h.signature(t) for t in images]
        for c in conjs:
            fmem = _find_members(images, image_sigs, wq, Q.ambient_words, h.ambient, c, probes_h, budget)
            if fmem is None:
                continue
            cy = [mul(c, y, inverse(c)) for y in Q.ambient_words]
            pulled = [substitute(w, bwd) for w in cy]
            pulled_sigs = [_combine(bwd_sigs, w, probes_g) for w in cy]
            bmem = _find_members(pulled, pulled_sigs, wp, P.ambient_words, g.ambient, (), probes_g, budget)
            if bmem is None:
                continue
            out = (j, j2, c, fmem, bmem)
            break
        pair_cache[(j, j2)] = out
        return out

    for perm in itertools.permutations(range(h.k)):
        entries = []
        for j, j2 in enumerate(perm):
            e = match_pair(j, j2)
            if e is None:
                break
            entries.append(e)
        else:
            return tuple(entries)
    return None


def _finish(g, h, fwd, bwd, budget, probes_g, probes_h, strategy, known=None) -> Optional[IsoWitness]:
    """Match peripherals, prove every remaining check, and verify.

    ``known`` holds derivations already in hand, keyed like the checks.
    """
    fwd = tuple(free_reduce(w) for w in fwd)
    bwd = tuple(free_reduce(w) for w in bwd)
    matching = _match_peripherals(g, h, fwd, bwd, budget, probes_g, probes_h)
    if matching is None:
        return None
    checks = _prove_all(_required_checks(g, h, fwd, bwd, matching), budget, known)
    if checks is None:
        return None
    wit = IsoWitness(fwd, bwd, matching, checks, strategy)
    if not verify_witness(g, h, wit):
        return None
    return wit


# -- strategy: direct generator maps ----------------------------------------


def _word_pool(p: Presentation, max_len: int, probes: Probes):
    words = list(all_words(p.ngens, max_len))
    # single letters first, then the empty word, then longer words
    words.sort(key=lambda w: (max(len(w), 1), len(w) == 0))
    return [(w, probes.signature(w)) for w in words]


def _map_search(source: Presentation, pool, src_probes: Probes, tgt_probes: Probes,
                extra_check=None, node_cap: int = 10**5) -> Iterator:
    """Yield maps ``source gens -> words`` that kill every relator under the probes.

    Enumerates by increasing total cost; ``None`` is yielded periodically so
    callers can interleave.  ``extra_check(images, sigs)`` filters complete maps.
    """
    n = source.ngens
    due = [[] for _ in range(n)]
    for r in source.relators:
        due[max(abs(x) for x in r) - 1].append(r)
    max_cost = max((max(len(w), 1) for w, _ in pool), default=1)
    nodes = 0
    words = [None] * n
    sigs = [None] * n
    for total in range(n, n * max_cost + 1):

        def rec(j, left):
            nonlocal nodes
            if j == n:
                if left == 0:
                    if _pulls_back_injectively(sigs, tgt_probes, src_probes) and (
                        extra_check is None or extra_check(words, sigs)
                    ):
                        yield tuple(words)
                return
            rest = n - j - 1
            for w, s in pool:
                c = max(len(w), 1)
                if c > left - rest:
                    break
                if rest == 0 and c != left:
                    continue
                nodes += 1
                if nodes > node_cap:
                    return
                if nodes % 512 == 0:
                    yield None
                words[j], sigs[j] = w, s
                if all(_kills(sigs, r, tgt_probes) for r in due[j]):
                    yield from rec(j + 1, left - c)
            words[j] = sigs[j] = None

        if n == 0:
            if extra_check is None or extra_check([], []):
                yield ()
            return
        yield from rec(0, total)
        if nodes > node_cap:
            return


def direct_map_search(g: MarkedGroup, h: MarkedGroup, budget: BudgetConfig, probes_g, probes_h) -> Iterator:
    G, H = g.ambient, h.ambient
    L = budget.wp_conjugator_length
    pool_h = _word_pool(H, L, probes_h)
    pool_g = _word_pool(G, L, probes_g)
    gen_sig_g = probes_g.gen_signatures()
    gen_sig_h = probes_h.gen_signatures()
    cap = budget.tietze_node_cap
    for fwd in _map_search(G, pool_h, probes_g, probes_h, node_cap=cap):
        if fwd is None:
            yield None
            continue
        fwd_sigs_h = [probes_h.signature(w) for w in fwd]

        def round_trip(bwd_words, bwd_sigs):
            # psi(phi(g)) = g under probes of G, phi(psi(h)) = h under probes of H
            for i, w in enumerate(fwd):
                if _combine(bwd_sigs, w, probes_g) != gen_sig_g[i]:
                    return False
            for j, w in enumerate(bwd_words):
                if _combine(fwd_sigs_h, w, probes_h) != gen_sig_h[j]:
                    return False
            return True

        for bwd in _map_search(H, pool_g, probes_h, probes_g, extra_check=round_trip, node_cap=max(cap // 20, 1)):
            if bwd is None:
                yield None
                continue
            wit = _finish(g, h, fwd, bwd, budget, probes_g, probes_h, "direct")
            if wit is not None:
                yield wit
                return
            yield None


# -- strategy: Tietze moves from both ends ----------------------------------


def _reducing_moves(p: Presentation, budget: BudgetConfig):
    moves = []
    for name in p.gens:
        g = p.gens.index(name) + 1
        for ri, r in enumerate(p.relators):
            if sum(1 for x in r if abs(x) == g) == 1:
                moves.append(RemoveGenerator(name, ri))
                break
    seen = {}
    small = budget.replace(wp_factor_count=min(2, budget.wp_factor_count), wp_node_budget=min(200, budget.wp_node_budget))
    for ri, r in enumerate(p.relators):
        key = least_rotation(r)
        if key in seen:
            moves.append(RemoveRelator(ri, ((seen[key], (), 1),)))
            continue
        seen[key] = ri
        others = Presentation(p.gens, p.relators[:ri] + p.relators[ri + 1 :])
        d = prove_trivial(others, r, small) if others.relators else None
        if d is not None:
            remap = tuple((i if i < ri else i + 1, c, s) for i, c, s in d)
            moves.append(RemoveRelator(ri, remap))
    return moves


def _growing_moves(p: Presentation, fresh, peripheral_words=()):
    """New generators for every word of length 2 and every longer peripheral word."""
    words = list(all_words(p.ngens, 2, min_len=2))
    words += [w for w in peripheral_words if len(w) > 2 and w not in words]
    return [AddGenerator(fresh, w) for w in words]


def _sigma_relators(src: Presentation, dst: Presentation, images) -> list:
    """Derivations in ``dst`` of the images of the relators of ``src``.

    The relabelling ``images`` must carry each relator of ``src`` to a
    rotation of a relator of ``dst`` or of its inverse.
    """
    index = {}
    for j, r in enumerate(dst.relators):
        index.setdefault(least_rotation(r), j)
    out = []
    for r in src.relators:
        w = substitute(r, images)
        j = index[least_rotation(w)]
        try:
            out.append(rotation_factor(w, j, dst.relators[j], 1))
        except ValueError:
            out.append(rotation_factor(w, j, dst.relators[j], -1))
    return out


def _glue(g, h, pg, ph, og, oh):
    """Maps and exact derivations through a common canonical form.

    Generator ``og[j]`` of ``pg.current`` is identified with ``oh[j]`` of
    ``ph.current``.
    """
    n = len(og)
    to_h, to_g = [None] * n, [None] * n
    for j in range(n):
        to_h[og[j]] = (oh[j] + 1,)
        to_g[oh[j]] = (og[j] + 1,)
    Q1, Q2 = pg.current, ph.current
    s_fwd = _sigma_relators(Q1, Q2, to_h)
    s_bwd = _sigma_relators(Q2, Q1, to_g)
    fwd = [substitute(substitute(w, to_h), ph.backward) for w in pg.forward]
    bwd = [substitute(substitute(w, to_g), pg.backward) for w in ph.forward]
    known = {}
    for i, d in enumerate(pg.rel_fwd):
        known[("rel_fwd", i)] = transport(transport(d, to_h, s_fwd), ph.backward, ph.rel_bwd)
    for j, d in enumerate(ph.rel_fwd):
        known[("rel_bwd", j)] = transport(transport(d, to_g, s_bwd), pg.backward, pg.rel_bwd)
    fb_h = [substitute(w, ph.forward) for w in ph.backward]
    for i, w in enumerate(pg.forward):
        a = telescope(substitute(w, to_h), fb_h, ph.round_cur)
        known[("round_G", i)] = transport(transport(a, to_g, s_bwd), pg.backward, pg.rel_bwd) + pg.round_start[i]
    fb_g = [substitute(w, pg.forward) for w in pg.backward]
    for j, w in enumerate(ph.forward):
        a = telescope(substitute(w, to_g), fb_g, pg.round_cur)
        known[("round_H", j)] = transport(transport(a, to_h, s_fwd), ph.backward, ph.rel_bwd) + ph.round_start[j]
    return fwd, bwd, known


def tietze_search(g: MarkedGroup, h: MarkedGroup, budget: BudgetConfig, probes_g, probes_h) -> Iterator:
    """Best-first Tietze moves from both presentations, matching canonical forms.

    Smaller presentations are expanded first, so reductions are tried before
    any generator is added.  A form reached from both sides yields candidate
    maps, one per symmetry of the form.
    """
    cap = budget.tietze_node_cap
    size_cap = budget.tietze_size_cap
    seen = [{}, {}]
    heaps = [[], []]
    counter = itertools.count()

    def cost(p):
        return p.total_length() + 2 * p.ngens

    def attempt(form):
        for cg, ch in itertools.product(seen[0][form], seen[1][form]):
            wit = attempt_pair(cg, ch)
            if wit is not None:
                return wit
        return None

    marked = (g, h)
    proofs = {}
    tried = set()

    def proof(s, chain):
        key = (s, id(chain))
        if key not in proofs:
            proofs[key] = (chain, chain_proof(marked[s].ambient, chain.moves))
        return proofs[key][1]

    def attempt_pair(cg, ch):
        _, og = canonical_form(cg.current)
        _, ohs = canonical_orders(ch.current)
        pg, ph = proof(0, cg), proof(1, ch)
        for oh in ohs:
            fwd, bwd, known = _glue(g, h, pg, ph, og, oh)
            key = (tuple(fwd), tuple(bwd))
            if key in tried:
                continue
            tried.add(key)
            wit = _finish(g, h, fwd, bwd, budget, probes_g, probes_h, "tietze", known)
            if wit is not None:
                return wit
        return None

    def peripheral_words(s, chain):
        return {free_reduce(substitute(u, chain.forward)) for P in marked[s].peripherals for u in P.ambient_words}

    for s, start in enumerate((g.ambient, h.ambient)):
        chain = TietzeChain(start)
        form, _ = canonical_form(start)
        seen[s][form] = [chain]
        heapq.heappush(heaps[s], (cost(start), 0, next(counter), chain))
    nodes = 2
    if set(seen[0]) & set(seen[1]):
        wit = attempt(next(iter(seen[0])))
        if wit is not None:
            yield wit
            return
    while (heaps[0] or heaps[1]) and nodes < cap:
        for s in (0, 1):
            if not heaps[s]:
                continue
            _, depth, _, chain = heapq.heappop(heaps[s])
            q = chain.current
            moves = _reducing_moves(q, budget)
            if cost(q) + 4 <= size_cap:
                moves += _growing_moves(q, f"t{depth}", sorted(peripheral_words(s, chain)))
            for m in moves:
                try:
                    c2 = chain.copy().apply(m)
                except InvalidMove:
                    continue
                if c2.current.total_length() > size_cap:
                    continue
                form, _ = canonical_form(c2.current)
                if form in seen[s]:
                    # keep a few routes to each form; the generator maps differ
                    if len(seen[s][form]) < ROUTES_PER_FORM:
                        seen[s][form].append(c2)
                        for other in seen[1 - s].get(form, ()):
                            wit = attempt_pair(c2, other) if s == 0 else attempt_pair(other, c2)
                            if wit is not None:
                                yield wit
                                return
                    continue
                seen[s][form] = [c2]
                heapq.heappush(heaps[s], (cost(c2.current), depth + 1, next(counter), c2))
                nodes += 1
                if form in seen[1 - s]:
                    wit = attempt(form)
                    if wit is not None:
                        yield wit
                        return
                if nodes % 64 == 0:
                    yield None
                if nodes >= cap:
                    return
            yield None


def search_isomorphism(g: MarkedGroup, h: MarkedGroup, budget: BudgetConfig | None = None) -> Optional[IsoWitness]:
    budget = budget or BudgetConfig()
    for out in prover(g, h, budget):
        if out is not None:
            return out
    return None


def prover(g: MarkedGroup, h: MarkedGroup, budget: BudgetConfig) -> Iterator:
    """Interleave the two proof strategies; yields ``None`` or a verified witness."""
    if budget.tietze_node_cap <= 0 or budget.wp_node_budget <= 0 or g.k != h.k:
        return
    probes_g = Probes(g.ambient, budget.hom_node_budget)
    probes_h = Probes(h.ambient, budget.hom_node_budget)
    yield None
    strategies = [tietze_search(g, h, budget, probes_g, probes_h), direct_map_search(g, h, budget, probes_g, probes_h)]
    while strategies:
        for s in list(strategies):
            out = next(s, False)
            if out is False:
                strategies.remove(s)
            elif out is not None:
                yield out
                return
            else:
                yield None


# -- disprover --------------------------------------------------------------


@lru_cache(maxsize=4096)
def _count(p: Presentation, name: str, node_budget: int):
    try:
        return count_homs(p, catalog_group(name), node_budget)
    except BudgetExceeded:
        return BUDGET_EXCEEDED


def _filling(g: MarkedGroup, i: int, budget: BudgetConfig):
    try:
        return characteristic_filling(g, i, budget)
    except BudgetExceeded:
        return None


def _level_comparisons(g, h, i, budget):
    """Yield ``None`` between steps, then a certificate or ``False``."""
    fg = _filling(g, i, budget)
    yield None
    fh = _filling(h, i, budget)
    if g.k != h.k:
        yield NonIsoCertificate(i, (fg, fh), "peripheral_count", (g.k, h.k))
        return
    if fg is None or fh is None:
        yield False
        return
    if fg.peripheral_orders != fh.peripheral_orders:
        yield NonIsoCertificate(i, (fg, fh), "peripheral_orders", (list(fg.peripheral_orders), list(fh.peripheral_orders)))
        return
    ag, ah = abelianization(fg.quotient), abelianization(fh.quotient)
    if ag[0] != ah[0]:
        yield NonIsoCertificate(i, (fg, fh), "free_rank", (ag[0], ah[0]))
        return
    if ag[1] != ah[1]:
        yield NonIsoCertificate(i, (fg, fh), "torsion", (list(ag[1]), list(ah[1])))
        return
    for t in load_catalog():
        yield None
        cg = _count(fg.quotient, t.name, budget.hom_node_budget)
        cg_h = _count(fh.quotient, t.name, budget.hom_node_budget)
        if BUDGET_EXCEEDED in (cg, cg_h):
            continue
        if cg != cg_h:
            yield NonIsoCertificate(i, (fg, fh), f"hom_counts.{t.name}", (cg, cg_h))
            return
    yield False


def disprove_step(g: MarkedGroup, h: MarkedGroup, i: int, budget: BudgetConfig | None = None) -> Optional[NonIsoCertificate]:
    if i < 1:
        raise ValueError("level must be at least 1")
    budget = budget or BudgetConfig()
    for out in _level_comparisons(g, h, i, budget):
        if out is not None:
            return out or None
    return None


def level_order(max_level: int) -> list[int]:
    """Levels examined by the disprover: 2, 3, ..., then 1.

    Level 1 kills every peripheral outright and is the coarsest filling, so
    it is looked at last.
    """
    return list(range(2, max_level + 1)) + [1] if max_level >= 1 else []


def disprover(g: MarkedGroup, h: MarkedGroup, budget: BudgetConfig, examined=None) -> Iterator:
    """Yield ``None`` while working and a certificate if one is found.

    Levels finished without a certificate are appended to ``examined``.
    """
    for i in level_order(budget.max_level):
        for out in _level_comparisons(g, h, i, budget):
            if out is None:
                yield None
            elif out is False:
                if examined is not None:
                    examined.append(i)
                break
            else:
                yield out
                return
        yield None


def certificate_invariant(cert: NonIsoCertificate, budget: BudgetConfig):
    """Recompute the invariant named by ``cert.field`` from its fillings."""
    fg, fh = cert.fillings
    if cert.field == "peripheral_count":
        return None
    if fg is None or fh is None:
        raise ValueError("certificate lacks fillings")
    if cert.field == "peripheral_orders":
        return (list(fg.peripheral_orders), list(fh.peripheral_orders))
    if cert.field == "free_rank":
        return (abelianization(fg.quotient)[0], abelianization(fh.quotient)[0])
    if cert.field == "torsion":
        return (list(abelianization(fg.quotient)[1]), list(abelianization(fh.quotient)[1]))
    if cert.field.startswith("hom_counts."):
        name = cert.field.split(".", 1)[1]
        return (_count(fg.quotient, name, budget.hom_node_budget), _count(fh.quotient, name, budget.hom_node_budget))
    raise ValueError(f"unknown invariant {cert.field}")


def verify_certificate(g: MarkedGroup, h: MarkedGroup, cert: NonIsoCertificate, budget: BudgetConfig | None = None) -> bool:
    budget = budget or BudgetConfig()
    if cert.field == "peripheral_count":
        return g.k != h.k and tuple(cert.values) == (g.k, h.k)
    fg, fh = _filling(g, cert.level, budget), _filling(h, cert.level, budget)
    if fg is None or fh is None:
        return False
    if cert.fillings[0] is not None and cert.fillings[0].quotient != fg.quotient:
        return False
    if cert.fillings[1] is not None and cert.fillings[1].quotient != fh.quotient:
        return False
    fresh = NonIsoCertificate(cert.level, (fg, fh), cert.field, cert.values)
    values = certificate_invariant(fresh, budget)
    if BUDGET_EXCEEDED in values:
        return False
    return tuple(values) == tuple(cert.values) and values[0] != values[1]


# -- the race ---------------------------------------------------------------


def compare(g: MarkedGroup, h: MarkedGroup, budget: BudgetConfig | None = None) -> Verdict:
    """Run prover and disprover alternately until one answers or both run out."""
    budget = budget or BudgetConfig()
    deadline = time.monotonic() + budget.wall_clock_seconds
    examined = []
    tasks = {"prover": prover(g, h, budget), "disprover": disprover(g, h, budget, examined)}
    done = []
    timed_out = False
    while tasks:
        if time.monotonic() > deadline:
            timed_out = True
            break
        for name in list(tasks):
            out = next(tasks[name], False)
            if out is None:
                continue
            if out is False:
                del tasks[name]
                done.append(name)
                continue
            if isinstance(out, IsoWitness):
                return Verdict(ISOMORPHIC, witness=out)
            return Verdict(NOT_ISOMORPHIC, certificate=out)
    report = {"exhausted": sorted(done), "levels_examined": examined, "budget": budget.as_dict()}
    if timed_out:
        report["stopped"] = "wall_clock"
    return Verdict(UNKNOWN, report=report)


# -- records ----------------------------------------------------------------


def _word_str(w, gens):
    return " ".join(gens[abs(x) - 1] + ("" if x > 0 else "^-1") for x in w) or "1"


def _derivation_record(d, gens):
    return [[i, _word_str(c, gens), s] for i, c, s in d]


def _check_key(key):
    return ":".join(map(str, key))


def verdict_record(g: MarkedGroup, h: MarkedGroup, v: Verdict, budget: BudgetConfig) -> dict:
    """Machine-readable verdict; everything needed for offline re-checking."""
    rec = {
        "verdict": v.status,
        "groups": [serialize_group(g), serialize_group(h)],
        "budget": budget.as_dict(),
    }
    G, H = g.ambient, h.ambient
    if v.witness is not None:
        w = v.witness
        checks = {}
        for key, pres, _ in _required_checks(g, h, w.forward, w.backward, w.matching):
            checks[_check_key(key)] = _derivation_record(w.checks[key], pres.gens)
        rec["witness"] = {
            "strategy": w.strategy,
            "forward": {G.gens[i]: _word_str(x, H.gens) for i, x in enumerate(w.forward)},
            "backward": {H.gens[i]: _word_str(x, G.gens) for i, x in enumerate(w.backward)},
            "matching": [
                {
                    "peripheral": g.peripherals[j].name,
                    "target": h.peripherals[j2].name,
                    "conjugator": _word_str(c, H.gens),
                    "forward_members": [_word_str(x, h.peripherals[j2].own.gens) for x in fm],
                    "backward_members": [_word_str(x, g.peripherals[j].own.gens) for x in bm],
                }
                for j, j2, c, fm, bm in w.matching
            ],
            "checks": checks,
        }
    if v.certificate is not None:
        c = v.certificate
        rec["certificate"] = {
            "level": c.level,
            "field": c.field,
            "values": list(c.values),
            "fillings": [serialize_group(f.as_marked_group()) if f is not None else None for f in c.fillings],
            "peripheral_orders": [list(f.peripheral_orders) if f is not None else None for f in c.fillings],
        }
    if v.report:
        rec["report"] = v.report
    return rec


def _parse_derivation(items, gens):
    return tuple((int(i), parse_word(c, gens), int(s)) for i, c, s in items)


def verify_record(rec: dict) -> tuple[bool, str]:
    """Re-check a stored verdict record.  Returns ``(ok, message)``."""
    g = parse_group_file(rec["groups"][0])
    h = parse_group_file(rec["groups"][1])
    budget = BudgetConfig.from_mapping(rec.get("budget", {}))
    status = rec.get("verdict")
    G, H = g.ambient, h.ambient
    if status == ISOMORPHIC:
        w = rec["witness"]
        try:
            fwd = tuple(parse_word(w["forward"][x], H.gens) for x in G.gens)
            bwd = tuple(parse_word(w["backward"][x], G.gens) for x in H.gens)
            pname = [p.name for p in g.peripherals]
            hname = [p.name for p in h.peripherals]
            matching = []
            for m in w["matching"]:
                j, j2 = pname.index(m["peripheral"]), hname.index(m["target"])
                matching.append((
                    j, j2, parse_word(m["conjugator"], H.gens),
                    tuple(parse_word(x, h.peripherals[j2].own.gens) for x in m["forward_members"]),
                    tuple(parse_word(x, g.peripherals[j].own.gens) for x in m["backward_members"]),
                ))
            matching = tuple(matching)
            checks = {}
            for key, pres, _ in _required_checks(g, h, fwd, bwd, matching):
                checks[key] = _parse_derivation(w["checks"][_check_key(key)], pres.gens)
        except (KeyError, ValueError) as e:
            return False, f"malformed witness: {e}"
        ok = verify_witness(g, h, IsoWitness(fwd, bwd, matching, checks))
        return ok, "witness verified" if ok else "witness check failed"
    if status == NOT_ISOMORPHIC:
        c = rec["certificate"]
        fill = []
        for text, orders in zip(c["fillings"], c["peripheral_orders"]):
            if text is None:
                fill.append(None)
                continue
            fg = parse_group_file(text)
            fill.append(FillingResult(fg.ambient, fg.peripherals, tuple(orders), c["level"]))
        cert = NonIsoCertificate(c["level"], tuple(fill), c["field"], tuple(c["values"]))
        ok = verify_certificate(g, h, cert, budget)
        return ok, "certificate verified" if ok else "certificate check failed"
    return False, f"nothing to verify for verdict {status!r}"
