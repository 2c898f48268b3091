import math

import numpy as np
import pytest

from diffrakt.abelian import GroupFunction, make_group
from diffrakt.density import PointMeasure, bragg_spectrum, diffraction
from diffrakt.exceptions import ResourceCapError, ValidationError
from diffrakt.inverse import extract_phase_from_density
from diffrakt.phaseforms import make_elementary, random_form, same_phase_form, twist_by_group_element
from diffrakt.process import (
    apply_N,
    build_process,
    extract_phase_data,
    find_translation,
    moment_formula,
    moment_scale,
    process_moment,
    pure_point_complete,
    second_moment_check,
    shift,
    spectral_measure,
    theta,
    two_point_correlation,
    verify,
)
from diffrakt.relators import canonical_basis

from conftest import random_instance


def z6_models(z6):
    g, r1, r2 = z6
    e1, e2 = extract_phase_from_density(r1), extract_phase_from_density(r2)
    return build_process(e1.omega, e1.form), build_process(e1.omega, e2.form)


def brute_N(omega, a, F, t, g):
    """1/|G| sum_x rho_a(x - t) F(x) with rho_a from floating exponentials."""
    total = 0j
    for x in range(g.order):
        xs = np.asarray(g.coords(x)) - np.asarray(g.coords(t))
        rho = 0j
        for k in a.basis.support:
            phase = sum(k[j] * xs[j] / g.moduli[j] for j in range(g.rank))
            rho += a(k) * math.sqrt(omega(k)) * np.exp(-2j * np.pi * phase)
        total += rho * F.values[x]
    return total / g.order


def test_z6_model_shape(z6):
    m1, _ = z6_models(z6)
    assert m1.size == 6
    assert m1.f_table.shape == (3, 6)
    assert m1.E.order == 6 and m1.E_perp.order == 1


def test_N_of_point_mass_is_reflected_density(z6):
    g, r1, _ = z6
    m1, _ = z6_models(z6)
    F = GroupFunction.indicator(g, g.zero)
    N = apply_N(m1, F)
    assert np.allclose(N, r1.weights[g.negation_index] / 6, atol=1e-12)


def test_N_matches_direct_integral(rng):
    for _ in range(10):
        g, omega = random_instance(rng, 24)
        a = random_form(canonical_basis(bragg_spectrum(omega), g), rng)
        model = build_process(omega, a)
        F = GroupFunction(g, rng.standard_normal(g.order))
        N = apply_N(model, F)
        for t in range(g.order):
            xi = model.X.labels[t]
            assert abs(N[xi] - brute_N(omega, a, F, t, g)) < 1e-9


def test_constant_and_off_spectrum_inputs(z6):
    g, _, _ = z6
    m1, _ = z6_models(z6)
    assert np.allclose(apply_N(m1, GroupFunction.constant(g, 2.0)), 2 * 28)
    off = GroupFunction(g, np.exp(-2j * np.pi * 3 * np.arange(6) / 6))  # pure frequency 3
    assert np.allclose(apply_N(m1, off), 0, atol=1e-12)


def test_theta_and_spectral_measure(z6, rng):
    g, _, _ = z6
    m1, _ = z6_models(z6)
    for k in [(0,), (1,), (5,)]:
        e = np.zeros(6)
        e[g.index(k)] = 1
        f = theta(m1, e)
        assert np.allclose(f, m1.f(k))
        sm = spectral_measure(m1, f)
        assert abs(sm(k) - m1.omega(k)) < 1e-9 and abs(sm.total_mass - m1.omega(k)) < 1e-9
    H = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    Hneg = np.conj(H[g.negation_index])
    assert np.allclose(theta(m1, Hneg), np.conj(theta(m1, H)))
    const = spectral_measure(m1, np.ones(6))
    assert const((0,)) == pytest.approx(1.0) and const.total_mass == pytest.approx(1.0)


def test_second_moment_special_cases(z6):
    g, _, _ = z6
    m1, _ = z6_models(z6)
    one = GroupFunction.indicator(g, g.zero)
    assert second_moment_check(m1, one, one) < 1e-9
    c, d = GroupFunction.constant(g, 2.0), GroupFunction.constant(g, 3.0)
    assert second_moment_check(m1, c, d) < 1e-12
    assert abs(np.mean(apply_N(m1, c) * np.conj(apply_N(m1, d))) - 784 * 6) < 1e-9


def test_two_point_correlation(z6):
    g, _, _ = z6
    m1, _ = z6_models(z6)
    one = GroupFunction.indicator(g, g.zero)
    # gamma(1_0) = gamma(0) / 6 with gamma(0) = total diffraction mass
    expected = (784 + 2 * 247 / 3) / 6
    for xi in range(6):
        assert abs(two_point_correlation(m1, xi, one) - expected) < 1e-9
    assert two_point_correlation(m1, 0, GroupFunction(g, np.zeros(6))) == 0
    h = make_group((4,))
    flat = build_process(PointMeasure(h, [2.0, 0, 0, 0]),
                         make_elementary(canonical_basis([(0,)], h)))
    F = GroupFunction(h, [1.0, 2.0, 3.0, 5.0])
    assert flat.size == 1
    assert abs(two_point_correlation(flat, 0, F) - 2.0 * 11 / 4) < 1e-12


def test_extraction_roundtrip_and_relator_value(z6):
    m1, m2 = z6_models(z6)
    ex = extract_phase_data(m1)
    assert same_phase_form(ex.representative, m1.form)
    (v, z), = ex.relator_values
    assert v.free == (6,)
    assert abs(z - np.exp(2j * np.pi * 6 * 0.44309816166210153678)) < 1e-9


def test_translations():
    g = make_group((2,))
    omega = PointMeasure(g, [1.0, 1.0])
    b = canonical_basis([(0,), (1,)], g)
    plus = build_process(omega, make_elementary(b, [], [1]))
    minus = build_process(omega, make_elementary(b, [], [-1]))
    assert find_translation(plus, minus) == (1,)
    assert find_translation(plus, plus) == (0,)
    assert extract_phase_data(plus).relator_values == ()


def test_z6_pair_not_translates(z6):
    m1, m2 = z6_models(z6)
    assert find_translation(m1, m2) is None
    with pytest.raises(ValidationError):
        find_translation(m1, build_process(PointMeasure(m1.group, [1, 1, 0, 0, 0, 1]),
                                           make_elementary(m1.basis, [0.1])))


def test_twist_is_translation_of_process(rng):
    for _ in range(25):
        g, omega = random_instance(rng, 36)
        b = canonical_basis(bragg_spectrum(omega), g)
        a = random_form(b, rng)
        u = g.coords(int(rng.integers(g.order)))
        base, twisted = build_process(omega, a), build_process(omega, twist_by_group_element(a, u))
        F = GroupFunction(g, rng.standard_normal(g.order))
        assert np.allclose(apply_N(twisted, F), shift(base, apply_N(base, F), g.neg(u)), atol=1e-10)
        assert find_translation(base, twisted) == base.X.representative(base.X.coset_of(u))


def test_moment_formula_routes_agree(rng):
    for _ in range(8):
        g, omega = random_instance(rng, 16)
        model = build_process(omega, random_form(canonical_basis(bragg_spectrum(omega), g), rng))
        for m in (1, 2, 3):
            Fs = [GroupFunction(g, rng.standard_normal(g.order)) for _ in range(m)]
            direct = process_moment(model, Fs)
            dp = moment_formula(model, Fs)
            brute = moment_formula(model, Fs, method="enumerate")
            scale = moment_scale(model, Fs)
            assert abs(direct - dp) / scale < 1e-8 and abs(dp - brute) / scale < 1e-8


def test_first_moment_is_mean_times_root(z6):
    g, _, _ = z6
    m1, _ = z6_models(z6)
    F = GroupFunction(g, np.arange(6.0))
    assert abs(process_moment(m1, [F]) - np.mean(np.arange(6.0)) * 28) < 1e-9


def test_moment_order_cap(z6):
    g, _, _ = z6
    m1, _ = z6_models(z6)
    F = GroupFunction.constant(g)
    with pytest.raises(ResourceCapError):
        process_moment(m1, [F] * 9)
    with pytest.raises(ValidationError):
        moment_formula(m1, [F], method="other")


def test_verify_random_models(rng):
    for _ in range(15):
        g, omega = random_instance(rng)
        model = build_process(omega, random_form(canonical_basis(bragg_spectrum(omega), g), rng))
        report = verify(model, rng)
        assert all(r["passed"] for r in report), [r for r in report if not r["passed"]]
        assert pure_point_complete(model)


def test_build_rejects_mismatch(z6):
    g, r1, _ = z6
    omega = diffraction(r1)
    wrong = make_elementary(canonical_basis([(0,)], g))
    with pytest.raises(ValidationError):
        build_process(omega, wrong)
