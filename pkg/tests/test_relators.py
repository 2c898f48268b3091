import itertools
from collections import deque

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from diffrakt.abelian import make_group, subgroup_generated
from diffrakt.exceptions import ResourceCapError, ValidationError
from diffrakt.lattice import hnf, integer_kernel_mod, lattice_index, same_lattice, smith_invariants
from diffrakt.relators import (
    FSVector,
    canonical_basis,
    covering_number,
    generated_equals,
    n_zero,
    phase_group_structure,
    reduced_length,
    relators_up_to,
    sum_map,
    tuple_to_vector,
    vector_to_tuple,
)

from conftest import random_moduli


def all_elements(mods):
    return [tuple(x) for x in itertools.product(*(range(m) for m in mods))]


def random_support(g, rng, size):
    """Symmetric support made of ``size`` random elements and their negatives."""
    picks = {g.coords(int(i)) for i in rng.integers(0, g.order, size=size)}
    return sorted(picks | {g.neg(k) for k in picks})


# ---- lattice normal forms ------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_hnf_invariant_under_unimodular_change(n, seed):
    r = np.random.default_rng(seed)
    rows = r.integers(-6, 7, size=(n, n)).tolist()
    U = sympy.eye(n)
    for _ in range(5):
        i, j = r.choice(n, 2, replace=False) if n > 1 else (0, 0)
        if i != j:
            U[i, :] = U[i, :] + int(r.integers(-3, 4)) * U[j, :]
    mixed = (U * sympy.Matrix(rows)).tolist()
    assert hnf(rows, n) == hnf(mixed, n)
    det = abs(sympy.Matrix(rows).det())
    if det:
        assert lattice_index(hnf(rows, n), n) == det
    else:
        assert lattice_index(hnf(rows, n), n) is None


def test_hnf_shape():
    assert hnf([(4, 6), (2, 3)], 2) == ((2, 3),)
    assert hnf([(2, 0), (1, 3)], 2) == ((1, 3), (0, 6))
    assert same_lattice([(1, 0), (0, 1)], [(1, 1), (1, 2)], 2)


def test_smith_invariants_against_sympy():
    M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    from sympy.matrices.normalforms import smith_normal_form

    snf = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
    assert smith_invariants(M) == tuple(abs(int(snf[i, i])) for i in range(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kernel_mod_contains_exactly_the_kernel(seed):
    r = np.random.default_rng(seed)
    moduli = [int(m) for m in r.integers(2, 7, size=int(r.integers(1, 3)))]
    n = int(r.integers(1, 4))
    cols = [[int(r.integers(0, m)) for m in moduli] for _ in range(n)]
    basis = integer_kernel_mod(cols, moduli)
    box = range(-4, 5)
    for v in itertools.product(box, repeat=n):
        in_kernel = all(sum(v[i] * cols[i][j] for i in range(n)) % m == 0 for j, m in enumerate(moduli))
        assert in_kernel == same_lattice(basis, list(basis) + [v], n)


# ---- F(S) and Z ----------------------------------------------------------

def test_basis_split_free_and_torsion():
    g = make_group((4,))
    b = canonical_basis(all_elements((4,)), g)
    assert b.free == ((1,),) and b.torsion == ((2,),) and b.has_zero
    assert b.role((3,)) == ("free", 0, -1)
    v = tuple_to_vector(b, [(1,), (1,), (3,), (2,), (2,), (0,)])
    assert v == FSVector((1,), (0,))
    assert sum_map(b, tuple_to_vector(b, [(1,), (2,)])) == (3,)
    assert reduced_length(FSVector((-2, 1), (1,))) == 4
    assert vector_to_tuple(b, FSVector((-2,), (1,))) == ((3,), (3,), (2,))


def test_basis_rejects_asymmetric_support():
    with pytest.raises(ValidationError):
        canonical_basis([(1,)], make_group((5,)))


@pytest.mark.parametrize(
    "mods, support, hnf_rows, structure, n0, cover",
    [
        ((1,), [(0,)], (), "trivial", 0, (1, 3)),
        ((2,), [(0,), (1,)], ((2,),), "trivial", 0, (1, 3)),
        ((3,), [(0,), (1,), (2,)], ((3,),), "U(1)", 3, (1, 3)),
        ((4,), [(0,), (1,), (2,), (3,)], ((2, 1), (0, 2)), "U(1)", 3, (1, 3)),
        ((5,), [(0,), (1,), (2,), (3,), (4,)], ((1, 2), (0, 5)), "U(1)^2", 3, (1, 3)),
        ((6,), [(0,), (1,), (5,)], ((6,),), "U(1)", 6, (3, 7)),
        ((2, 2), all_elements((2, 2)), ((1, 1, 1), (0, 2, 0), (0, 0, 2)), "Z/2", 3, (1, 3)),
    ],
)
def test_known_relator_structures(mods, support, hnf_rows, structure, n0, cover):
    g = make_group(mods)
    b = canonical_basis(support, g)
    lat = b.lattice
    assert lat.lattice_hnf == hnf_rows
    assert str(phase_group_structure(lat)) == structure
    assert n_zero(lat) == n0
    assert covering_number(b) == cover
    assert n0 <= cover[1]


def test_z6_generation_by_length():
    g = make_group((6,))
    lat = canonical_basis([(0,), (1,), (5,)], g).lattice
    assert generated_equals(lat, 6)
    assert not generated_equals(lat, 5)
    assert relators_up_to(lat, 5) == [FSVector((0,))]


def tuple_oracle(b, n):
    """Exponent vectors of all zero-sum tuples of length <= n, by brute force."""
    g = b.group
    S = list(b.support)
    found = set()
    for m in range(n + 1):
        for combo in itertools.combinations_with_replacement(S, m):
            s = g.zero
            for k in combo:
                s = g.add(s, k)
            if s == g.zero:
                found.add(tuple_to_vector(b, combo))
    return found


def bfs_lengths(b, radius):
    """Word metric on F(S) = Z^p + (Z/2)^q by breadth-first search."""
    start = (0,) * b.p + (0,) * b.q
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        steps = []
        for i in range(b.p):
            for s in (1, -1):
                steps.append(v[:i] + (v[i] + s,) + v[i + 1:])
        for i in range(b.q):
            j = b.p + i
            steps.append(v[:j] + ((v[j] + 1) % 2,) + v[j + 1:])
        for w in steps:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def test_relator_enumeration_matches_tuple_oracle(rng):
    for _ in range(25):
        g = make_group(random_moduli(rng, 24))
        support = random_support(g, rng, int(rng.integers(1, 4)))
        b = canonical_basis(support, g)
        n = 4
        assert set(relators_up_to(b.lattice, n)) == tuple_oracle(b, n)


def test_reduced_length_is_word_length(rng):
    for _ in range(10):
        g = make_group(random_moduli(rng, 24))
        b = canonical_basis(random_support(g, rng, 3), g)
        for coords, d in bfs_lengths(b, 3).items():
            assert reduced_length(FSVector(coords[: b.p], coords[b.p:])) == d


def test_index_of_relator_lattice_is_order_of_E(rng):
    for _ in range(40):
        g = make_group(random_moduli(rng))
        support = random_support(g, rng, int(rng.integers(1, 5)))
        b = canonical_basis(support, g)
        E = subgroup_generated(g, support)
        assert lattice_index(b.lattice.lattice_hnf, b.ncols) == E.order
        for v in b.lattice.generators:
            assert sum_map(b, v) == g.zero


def brute_covering(g, support, E):
    reached = {g.zero}
    r = 0
    while len(reached) < E.order:
        reached |= {g.add(x, k) for x in reached for k in support}
        r += 1
    return max(r, 1)


def test_covering_bound_on_random_instances(rng):
    for _ in range(30):
        g = make_group(random_moduli(rng, 24))
        support = random_support(g, rng, int(rng.integers(1, 4)))
        b = canonical_basis(support, g)
        E = subgroup_generated(g, support)
        r, bound = covering_number(b, E)
        assert r == brute_covering(g, support, E)
        if b.p + b.q <= 4 and bound <= 12:
            n0 = n_zero(b.lattice, bound)
            assert n0 is not None and n0 <= bound


def test_exact_length_variant_parity():
    g = make_group((6,))
    lat = canonical_basis([(1,), (5,)], g).lattice
    # without 0 in S a length-6 class needs a tuple of length exactly m
    assert relators_up_to(lat, 6, exact_length=True) == [FSVector((0,)), FSVector((-6,)), FSVector((6,))]
    assert relators_up_to(lat, 7, exact_length=True) == []


def test_enumeration_caps():
    g = make_group((6,))
    lat = canonical_basis([(0,), (1,), (5,)], g).lattice
    with pytest.raises(ResourceCapError):
        relators_up_to(lat, 99)
    with pytest.raises(ValidationError):
        relators_up_to(lat, -1)
