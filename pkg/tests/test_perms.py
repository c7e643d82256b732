import pytest
from hypothesis import given, settings, strategies as st

from dehnfill.errors import BudgetExceeded
from dehnfill.perms import (
    PermHom, enumerate_homs, kernel_generators, permutation_image, transitive_constituents,
)
from dehnfill.presentation import Presentation

import oracles


def P(gens, *rels):
    return Presentation.from_strings(gens, rels)


def test_enumerate_examples():
    homs = enumerate_homs(P("a"), 2)
    assert sorted(h.images for h in homs) == [((0, 1),), ((1, 0),)]
    assert len(enumerate_homs(P("a", "a^2"), 3)) == 4
    assert len(enumerate_homs(P("a, b", "a b a^-1 b^-1"), 3)) == 18


def test_enumerate_is_deterministic_and_limited():
    p = P("a, b", "a^2")
    assert [h.images for h in enumerate_homs(p, 3)] == [h.images for h in enumerate_homs(p, 3)]
    with pytest.raises(BudgetExceeded):
        enumerate_homs(p, 3, limit=5)
    with pytest.raises(ValueError):
        enumerate_homs(p, 0)


letters = st.integers(1, 2).flatmap(lambda g: st.sampled_from([g, -g]))
relator = st.lists(letters, min_size=1, max_size=6).map(tuple)


@settings(max_examples=40, deadline=None)
@given(st.lists(relator, max_size=2), st.integers(1, 3))
def test_enumerate_matches_brute_force(rels, n):
    p = Presentation(("a", "b"), tuple(rels))
    homs = enumerate_homs(p, n)
    brute = oracles.brute_perm_homs(2, p.relators, n)
    assert sorted(h.images for h in homs) == sorted(brute)
    e = tuple(range(n))
    for h in homs:
        assert all(oracles.perm_eval(r, h.images, n) == e for r in p.relators)


def test_image_examples():
    src = P("a")
    homs = [PermHom(src, 2, ((0, 1),)), PermHom(src, 2, ((1, 0),))]
    gens, order = permutation_image(homs)
    assert len(gens[0]) == 4 and order == 2
    assert permutation_image([PermHom(src, 2, ((0, 1),))])[1] == 1
    assert permutation_image(enumerate_homs(P("a", "a^2"), 3))[1] == 2


def test_image_cap():
    with pytest.raises(BudgetExceeded):
        permutation_image(enumerate_homs(P("a, b"), 3), order_cap=3)


def test_kernel_examples():
    src = P("a")
    assert kernel_generators(src, [PermHom(src, 2, ((1, 0),))]) == [(1, 1)]
    assert kernel_generators(src, [PermHom(src, 2, ((0, 1),))]) == [(1,)]
    p = P("a", "a^6")
    ker = kernel_generators(p, [PermHom(p, 2, ((1, 0),))])
    assert oracles.stallings_index(ker, 1) == 2


def _check_kernel(p, n):
    homs = enumerate_homs(p, n)
    ker = kernel_generators(p, homs)
    _, order = permutation_image(homs)
    for w in ker:
        assert oracles.free_reduce(w) == w and w
        for h in homs:
            assert oracles.perm_eval(w, h.images, n) == tuple(range(n))
    # Schreier generators give the kernel in the free group, of index |image|
    assert oracles.stallings_index(ker, p.ngens) == order


@pytest.mark.parametrize("p, n", [
    (P("a"), 3), (P("a, b"), 2), (P("a, b", "a^2", "b^2"), 3), (P("a, b", "a b a^-1 b^-1"), 3),
    (P("a, b", "a^2 b^-3"), 3), (P("a, b"), 3),
])
def test_kernel_generators_oracle(p, n):
    _check_kernel(p, n)


@settings(max_examples=25, deadline=None)
@given(st.lists(relator, max_size=2), st.integers(2, 3))
def test_kernel_generators_random(rels, n):
    _check_kernel(Presentation(("a", "b"), tuple(rels)), n)


def test_transitive_constituents_keep_kernel():
    p = P("a, b", "a^2")
    homs = enumerate_homs(p, 3)
    small = transitive_constituents(homs)
    assert oracles.stallings_index(kernel_generators(p, small), 2) == permutation_image(homs)[1]
