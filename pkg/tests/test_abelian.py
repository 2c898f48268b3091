import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffrakt.abelian import (
    GroupFunction,
    annihilator,
    convolve,
    dft,
    idft,
    involute,
    make_group,
    pairing,
    pairing_turn,
    quotient,
    subgroup_generated,
    translate,
    unit_root,
)
from diffrakt.exceptions import ResourceCapError, ValidationError


def brute_dft(g, values):
    # oracle: direct double sum with floating exponentials
    els = g.elements
    out = np.zeros(g.order, dtype=complex)
    for a, k in enumerate(els):
        phase = sum(k[j] * els[:, j] / g.moduli[j] for j in range(g.rank))
        out[a] = np.sum(np.exp(-2j * np.pi * phase) * values) / g.order
    return out


moduli_st = st.lists(st.integers(1, 7), min_size=1, max_size=3).filter(lambda m: math.prod(m) <= 60)


def random_values(g, seed):
    r = np.random.default_rng(seed)
    return r.standard_normal(g.order) + 1j * r.standard_normal(g.order)


def test_unit_root_exact_quarter_turns():
    assert unit_root(1, 4) == 1j
    assert unit_root(2, 4) == -1
    assert unit_root(3, 4) == -1j
    assert unit_root(5, 5) == 1
    assert abs(unit_root(1, 6) - complex(0.5, math.sqrt(3) / 2)) < 1e-15


def test_pairing_turn_is_reduced_fraction():
    g = make_group((4, 6))
    assert pairing_turn(g, (1, 2), (2, 3)) == Fraction(1, 2)
    assert pairing_turn(g, (1, 1), (1, 1)) == Fraction(5, 12)
    assert pairing(g, (0, 0), (3, 5)) == 1


def test_group_validation_and_cap():
    with pytest.raises(ValidationError):
        make_group((0, 3))
    with pytest.raises(ResourceCapError):
        make_group((10, 10), cap=50)


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("DIFFRAKT_CAP", "5")
    with pytest.raises(ResourceCapError):
        make_group((6,))
    monkeypatch.setenv("DIFFRAKT_CAP", "many")
    with pytest.raises(ValidationError):
        make_group((2,))


def test_element_indexing_is_lexicographic():
    g = make_group((2, 3))
    assert [g.coords(i) for i in range(6)] == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert g.index((1, 5)) == g.index((1, 2))
    assert g.element_order((1, 1)) == 6


@settings(max_examples=40, deadline=None)
@given(moduli_st, st.integers(0, 2**32 - 1))
def test_dft_matches_direct_sum(moduli, seed):
    g = make_group(moduli)
    v = random_values(g, seed)
    assert np.allclose(dft(GroupFunction(g, v)).values, brute_dft(g, v), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(moduli_st, st.integers(0, 2**32 - 1))
def test_inverse_and_plancherel(moduli, seed):
    g = make_group(moduli)
    f = GroupFunction(g, random_values(g, seed))
    fh = dft(f)
    assert np.allclose(idft(fh).values, f.values, atol=1e-12)
    # mass-one Haar on G, counting measure on the dual
    assert math.isclose(np.mean(np.abs(f.values) ** 2), np.sum(np.abs(fh.values) ** 2), rel_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(moduli_st, st.integers(0, 2**32 - 1))
def test_convolution_theorem(moduli, seed):
    g = make_group(moduli)
    f = GroupFunction(g, random_values(g, seed))
    h = GroupFunction(g, random_values(g, seed + 1))
    lhs = dft(convolve(f, h)).values
    assert np.allclose(lhs, dft(f).values * dft(h).values, atol=1e-12)
    assert np.allclose(dft(involute(f)).values, np.conj(dft(f).values), atol=1e-12)


def test_translate_shifts_argument():
    g = make_group((5,))
    f = GroupFunction(g, np.arange(5))
    assert translate(f, 2)(3) == f(1)
    assert np.allclose(dft(translate(f, 2)).values,
                       dft(f).values * np.exp(-2j * np.pi * 2 * np.arange(5) / 5))


@settings(max_examples=40, deadline=None)
@given(moduli_st, st.data())
def test_annihilator_order(moduli, data):
    g = make_group(moduli)
    gens = data.draw(st.lists(st.integers(0, g.order - 1), max_size=3))
    E = subgroup_generated(g, [g.coords(i) for i in gens])
    perp = annihilator(E)
    assert E.order * perp.order == g.order
    assert annihilator(perp) == E
    X = quotient(g, perp)
    assert X.size == E.order


def test_quotient_shift_permutation():
    g = make_group((6,))
    X = quotient(g, subgroup_generated(g, [(3,)]))
    assert X.size == 3
    assert X.coset_of((4,)) == X.coset_of((1,))
    assert list(X.shift_permutation((1,))) == [1, 2, 0]
