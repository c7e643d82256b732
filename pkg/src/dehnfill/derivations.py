"""Exact derivations carried along Tietze moves.

A derivation is a tuple of factors ``(relator index, conjugator, sign)``
whose product of conjugates ``c r^s c^-1`` freely equals some word.  For a
chain of moves from ``p`` to ``q`` with maps ``f: p -> q`` and ``b: q -> p``
we record, exactly and without search:

* ``rel_fwd[i]``: ``f(r_i)`` as a derivation over the relators of ``q``;
* ``rel_bwd[j]``: ``b(s_j)`` over the relators of ``p``;
* ``round_start[i]``: ``b(f(x_i)) x_i^-1`` over ``p``;
* ``round_cur[j]``: ``f(b(y_j)) y_j^-1`` over ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .presentation import (
    AddGenerator,
    AddRelator,
    Presentation,
    RemoveGenerator,
    RemoveRelator,
    expand_expression,
    tietze_maps,
)
from .words import cyclic_reduce, free_reduce, inverse, mul, substitute


def conj(d, c) -> tuple:
    """``c D c^-1`` for a derivation ``D``."""
    return tuple((i, free_reduce(tuple(c) + tuple(x)), s) for i, x, s in d)


def invert(d) -> tuple:
    return tuple((i, x, -s) for i, x, s in reversed(d))


def transport(d, images: Sequence, rel_ders: Sequence) -> tuple:
    """Push a derivation through a homomorphism.

    ``images`` maps source generators to target words and ``rel_ders[i]``
    derives the image of source relator ``i`` in the target.
    """
    out = []
    for i, c, s in d:
        e = rel_ders[i] if s == 1 else invert(rel_ders[i])
        out.extend(conj(e, substitute(c, images)))
    return tuple(out)


def telescope(w: Sequence[int], images: Sequence, gen_ders: Sequence) -> tuple:
    """Derivation of ``g(w) w^-1`` from derivations of ``g(y) y^-1`` for generators ``y``.

    ``g(y1 ... yn) (y1 ... yn)^-1`` is the product, last letter first, of
    ``g(y1 ... y(k-1)) (g(yk) yk^-1) g(y1 ... y(k-1))^-1``.
    """
    parts = []
    prefix = ()
    for x in w:
        y = abs(x) - 1
        if x > 0:
            step = gen_ders[y]
        else:
            # g(y)^-1 y = g(y)^-1 (g(y) y^-1)^-1 g(y)
            step = conj(invert(gen_ders[y]), inverse(images[y]))
        parts.append(conj(step, prefix))
        prefix = mul(prefix, images[y] if x > 0 else inverse(images[y]))
    return tuple(f for part in reversed(parts) for f in part)


def _as_conjugate(word, index: int, stored) -> tuple:
    """``word`` (freely reduced) is ``d stored d^-1``; return that factor."""
    k = (len(word) - len(stored)) // 2
    assert word[k : k + len(stored)] == tuple(stored) and len(word) - 2 * k == len(stored)
    return ((index, word[:k], 1),)


def rotation_factor(word, index: int, target, sign: int = 1) -> tuple:
    """``word`` is a rotation of ``target^sign``; express it as a conjugate."""
    t = tuple(target) if sign == 1 else inverse(target)
    for o in range(len(t)):
        if t[o:] + t[:o] == tuple(word):
            # t = P Q and word = Q P = P^-1 t P
            return ((index, inverse(t[:o]), sign),)
    raise ValueError("not a rotation")


def move_derivations(p: Presentation, m):
    """Apply one move; return ``(q, f, b, rel_fwd, rel_bwd, round_p, round_q)``."""
    q, f, b = tietze_maps(p, m)
    n = len(p.relators)
    if isinstance(m, AddGenerator):
        rel_fwd = [((i, (), 1),) for i in range(n)]
        rel_bwd = rel_fwd + [()]
        round_p = [()] * p.ngens
        round_q = [()] * p.ngens + [((n, (), -1),)]
    elif isinstance(m, AddRelator):
        w = free_reduce(m.word)
        d = w[: (len(w) - len(cyclic_reduce(w))) // 2]
        rel_fwd = [((i, (), 1),) for i in range(n)]
        rel_bwd = rel_fwd + [conj(tuple(m.expression), inverse(d))]
        round_p = round_q = [()] * p.ngens
    elif isinstance(m, RemoveRelator):
        k = m.index
        shift = [i if i < k else i - 1 for i in range(n)]
        expr = tuple((shift[i], c, s) for i, c, s in m.expression)
        e = expand_expression(q.relators, expr)
        ce = cyclic_reduce(e)
        dd = e[: (len(e) - len(ce)) // 2]
        r = p.relators[k]
        o = next(o for o in range(len(r)) if r[o:] + r[:o] == ce)
        # r = a (b a) a^-1 with a = r[:o], and b a = dd^-1 e dd
        rel_fwd = [((shift[i], (), 1),) for i in range(n)]
        rel_fwd[k] = conj(conj(expr, inverse(dd)), r[:o])
        rel_bwd = [((i if i < k else i + 1, (), 1),) for i in range(n - 1)]
        round_p = round_q = [()] * p.ngens
    elif isinstance(m, RemoveGenerator):
        g = p.gens.index(m.name) + 1
        c = next(ri for ri in ([m.relator] if m.relator is not None else range(n))
                 if sum(1 for x in p.relators[ri] if abs(x) == g) == 1)
        rc = p.relators[c]
        pos = next(i for i, x in enumerate(rc) if abs(x) == g)
        pre = rc[:pos]
        # g^s u = pre^-1 rc pre and b(f(g)) g^-1 = (g^s u)^-1 or g (g^-1 u) g^-1
        round_p = [()] * p.ngens
        if rc[pos] > 0:
            round_p[g - 1] = ((c, inverse(pre), -1),)
        else:
            round_p[g - 1] = ((c, free_reduce((g,) + inverse(pre)), 1),)
        bf = [substitute(f[i], b) for i in range(p.ngens)]
        rel_fwd = [()] * n
        rel_bwd = []
        j = 0
        for i, r in enumerate(p.relators):
            if i == c:
                continue
            fr = free_reduce(substitute(r, f))
            if not fr:
                continue
            stored = q.relators[j]
            rel_fwd[i] = _as_conjugate(fr, j, stored)
            d = fr[: (len(fr) - len(stored)) // 2]
            # stored = d^-1 f(r) d, and b(f(r)) = A(r) r
            rel_bwd.append(conj(telescope(r, bf, round_p) + ((i, (), 1),), inverse(substitute(d, b))))
            j += 1
        assert j == len(q.relators)
        assert not free_reduce(substitute(rc, f))
        round_q = [()] * q.ngens
    else:
        raise TypeError(m)
    return q, f, b, tuple(rel_fwd), tuple(rel_bwd), tuple(round_p), tuple(round_q)


@dataclass
class ChainProof:
    start: Presentation
    current: Presentation
    forward: list
    backward: list
    rel_fwd: list
    rel_bwd: list
    round_start: list
    round_cur: list


def chain_proof(start: Presentation, moves) -> ChainProof:
    """Replay ``moves`` from ``start`` keeping every derivation exact."""
    n = start.ngens
    ident = [(i + 1,) for i in range(n)]
    cp = ChainProof(
        start, start, list(ident), list(ident),
        [((i, (), 1),) for i in range(len(start.relators))],
        [((i, (), 1),) for i in range(len(start.relators))],
        [()] * n, [()] * n,
    )
    for m in moves:
        p = cp.current
        q, f, b, mf, mb, rp, rq = move_derivations(p, m)
        old_bwd, old_rel_bwd = cp.backward, cp.rel_bwd
        rel_fwd = [transport(d, f, mf) for d in cp.rel_fwd]
        rel_bwd = [transport(d, old_bwd, old_rel_bwd) for d in mb]
        round_start = [
            transport(telescope(w, [substitute(f[i], b) for i in range(p.ngens)], rp), old_bwd, old_rel_bwd) + r0
            for w, r0 in zip(cp.forward, cp.round_start)
        ]
        fb_old = [substitute(w, cp.forward) for w in old_bwd]
        round_cur = [
            transport(telescope(b[j], fb_old, cp.round_cur), f, mf) + rq[j]
            for j in range(q.ngens)
        ]
        cp = ChainProof(
            start, q,
            [substitute(w, f) for w in cp.forward],
            [substitute(w, old_bwd) for w in b],
            rel_fwd, rel_bwd, round_start, round_cur,
        )
    return cp


def check(p: Presentation, word, d) -> bool:
    return expand_expression(p.relators, d) == free_reduce(word)
