"""Words in a free group.

A word is a tuple of nonzero ints: ``k`` stands for the generator with index
``k - 1`` and ``-k`` for its inverse.  Words carry no alphabet; a
:class:`~dehnfill.presentation.Presentation` supplies the names.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

Word = tuple


def free_reduce(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*words: Sequence[int]) -> Word:
    return free_reduce(itertools.chain.from_iterable(words))


def power(w: Sequence[int], k: int) -> Word:
    if k < 0:
        w, k = inverse(w), -k
    return free_reduce(tuple(w) * k)


def conjugate(w: Sequence[int], c: Sequence[int]) -> Word:
    """c w c^-1."""
    return mul(c, w, inverse(c))


def commutator(u: Sequence[int], v: Sequence[int]) -> Word:
    return mul(u, v, inverse(u), inverse(v))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def rotations(w: Sequence[int]) -> Iterator[Word]:
    w = tuple(w)
    for i in range(len(w)):
        yield w[i:] + w[:i]


def letter_key(x: int) -> tuple[int, int]:
    # a < a^-1 < b < b^-1 < ...
    return (abs(x), 0 if x > 0 else 1)


def word_key(w: Sequence[int]) -> tuple:
    return tuple(letter_key(x) for x in w)


def least_rotation(w: Sequence[int], with_inverse: bool = True) -> Word:
    """Lexicographically least cyclic rotation of ``w`` (or of its inverse)."""
    w = tuple(w)
    if not w:
        return w
    cands = list(rotations(w))
    if with_inverse:
        cands.extend(rotations(inverse(w)))
    return min(cands, key=word_key)


def substitute(w: Sequence[int], images: Sequence[Sequence[int]]) -> Word:
    """Image of ``w`` under the map sending generator ``i`` to ``images[i]``."""
    out: list[int] = []
    for x in w:
        img = images[x - 1] if x > 0 else inverse(images[-x - 1])
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def generators_in(w: Iterable[int]) -> set[int]:
    return {abs(x) - 1 for x in w}


def all_words(ngens: int, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """Freely reduced words of length ``min_len..max_len``, shortest first."""
    letters = sorted([k for i in range(1, ngens + 1) for k in (i, -i)], key=letter_key)

    def extend(prefix, n):
        if n == 0:
            yield prefix
            return
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            yield from extend(prefix + (x,), n - 1)

    for n in range(min_len, max_len + 1):
        yield from extend((), n)


def exponent_sums(w: Iterable[int], ngens: int) -> list[int]:
    row = [0] * ngens
    for x in w:
        row[abs(x) - 1] += 1 if x > 0 else -1
    return row
