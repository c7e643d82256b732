from hypothesis import given, strategies as st

from dehnfill.words import (
    all_words, commutator, conjugate, cyclic_reduce, exponent_sums, free_reduce,
    inverse, least_rotation, mul, power, rotations, substitute,
)

import oracles

letters = st.integers(1, 3).flatmap(lambda g: st.sampled_from([g, -g]))
words = st.lists(letters, max_size=14).map(tuple)


def test_free_reduce_examples():
    a, b = 1, 2
    assert free_reduce((a, -a)) == ()
    assert free_reduce((a, b, -b, -a)) == ()
    assert free_reduce((a, b, -a, -b)) == (a, b, -a, -b)


@given(words)
def test_free_reduce_idempotent_and_shrinking(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert len(r) <= len(w)
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))
    assert r == oracles.free_reduce(w)


@given(words)
def test_word_times_inverse_is_empty(w):
    assert free_reduce(w + inverse(w)) == ()
    assert mul(w, inverse(w)) == ()


@given(words, words)
def test_substitute_is_a_homomorphism(u, v):
    images = [(1, 2), (-3,), (2, 2, -1)]
    assert substitute(u + v, images) == free_reduce(substitute(u, images) + substitute(v, images))


@given(words)
def test_cyclic_reduce_is_a_conjugate(w):
    c = cyclic_reduce(w)
    r = free_reduce(w)
    k = (len(r) - len(c)) // 2
    assert conjugate(c, r[:k]) == r
    if len(c) > 1:
        assert c[0] != -c[-1]


@given(words, st.integers(0, 20))
def test_least_rotation_ignores_rotation_and_inversion(w, k):
    c = cyclic_reduce(w)
    if not c:
        return
    rots = list(rotations(c))
    other = rots[k % len(rots)]
    assert least_rotation(other) == least_rotation(c) == least_rotation(inverse(c))


def test_power_and_commutator():
    assert power((1,), 3) == (1, 1, 1)
    assert power((1, 2), -1) == (-2, -1)
    assert commutator((1,), (2,)) == (1, 2, -1, -2)


def test_all_words_counts_reduced_words():
    # 1 + 4 + 12 + 36 reduced words of length <= 3 on two letters
    ws = list(all_words(2, 3))
    assert len(ws) == 1 + 4 + 12 + 36
    assert len(set(ws)) == len(ws)
    assert all(free_reduce(w) == w for w in ws)


def test_exponent_sums():
    assert exponent_sums((1, 2, -1, 2, 2), 2) == [0, 3]
