"""Worked examples: Z/M with flat diffraction for M <= 5, the Z/6 pair, and the circle.

Each demo returns a JSON-ready report whose ``checks`` list records every
asserted value with its outcome.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .abelian import GroupFunction, make_group, translate
from .density import Density, PointMeasure, bragg_spectrum, diffraction, homometric
from .inverse import (
    circle_family_check,
    density_from_phase,
    extract_phase_from_density,
    gm_rational_check,
    polynomial_phase,
    solve_family,
)
from .io import density_to_json, measure_to_json
from .phaseforms import first_divergent_moment, same_phase_form, twist_by_group_element
from .process import build_process, find_translation, process_moment
from .relators import covering_number, generated_equals, n_zero

__all__ = ["DEMOS", "run_demo", "z6_sweep", "Z6_FIRST", "Z6_SECOND", "Z6_FACTORS"]

Z6_FIRST = (11, 25, 42, 45, 31, 14)
Z6_SECOND = (10, 17, 35, 46, 39, 21)
# (w + 1)(w^2 + w + 1)(2 w^2 + 5)(3 w + 1), coefficients from the constant term up
Z6_FACTORS = ((1, 1), (1, 1, 1), (5, 0, 2), (1, 3))


class _Report:
    def __init__(self, name: str):
        self.name = name
        self.checks = []
        self.data = {}

    def check(self, label: str, passed, expected=None, actual=None) -> None:
        entry = {"name": label, "passed": bool(passed)}
        if expected is not None:
            entry["expected"] = expected
        if actual is not None:
            entry["actual"] = actual
        self.checks.append(entry)

    def close(self, value, expected, tol: float = 1e-9) -> bool:
        return bool(np.allclose(np.asarray(value, dtype=float), np.asarray(expected, dtype=float),
                                rtol=tol, atol=tol))

    def to_json(self) -> dict:
        return {
            "demo": self.name,
            "passed": all(c["passed"] for c in self.checks),
            "checks": self.checks,
            **self.data,
        }


def _flat(M: int) -> PointMeasure:
    return PointMeasure(make_group((M,)), np.ones(M))


def _weights(rho: Density) -> list:
    return [round(float(x), 12) + 0.0 for x in rho.real_weights]


def demo_m1() -> dict:
    rep = _Report("m1")
    fam = solve_family(_flat(1))
    rho = fam.sample()
    rep.check("free parameters", fam.p == 0 and fam.q == 0, [0, 0], [fam.p, fam.q])
    rep.check("unique solution is the unit point mass", rep.close(rho.real_weights, [1.0]),
              [1.0], _weights(rho))
    rep.check("phase-form group trivial", fam.class_group.is_trivial, "trivial", str(fam.class_group))
    rep.data["solution"] = density_to_json(rho)
    return rep.to_json()


def demo_m2() -> dict:
    rep = _Report("m2")
    omega = _flat(2)
    fam = solve_family(omega)
    plus, minus = fam.sample((), (1,)), fam.sample((), (-1,))
    rep.check("parameters (p, q)", (fam.p, fam.q) == (0, 1), [0, 1], [fam.p, fam.q])
    rep.check("rho_plus = (2, 0)", rep.close(plus.real_weights, [2, 0]), [2, 0], _weights(plus))
    rep.check("rho_minus = (0, 2)", rep.close(minus.real_weights, [0, 2]), [0, 2], _weights(minus))
    rep.check("relator group trivial", fam.basis.lattice.is_trivial)
    u = find_translation(build_process(omega, fam.form((), (1,))), build_process(omega, fam.form((), (-1,))))
    rep.check("related by translation 1/2", u == (1,), [1], list(u) if u else None)
    rep.check("rho_minus is rho_plus moved by 1",
              rep.close(translate(plus.as_function(), (1,)).values.real, minus.real_weights))
    # Z/2 with omega = delta_0: S generates only {0}, solutions are constant
    trivial = solve_family(PointMeasure(make_group((2,)), [1.0, 0.0]))
    rep.check("omega = delta_0 on Z/2 reduces to M = 1", trivial.periodic and trivial.p == trivial.q == 0)
    rep.data["solutions"] = [density_to_json(plus), density_to_json(minus)]
    return rep.to_json()


def demo_m3(t: float = 0.1) -> dict:
    rep = _Report("m3")
    omega = _flat(3)
    fam = solve_family(omega)
    rep.check("parameters (p, q)", (fam.p, fam.q) == (1, 0), [1, 0], [fam.p, fam.q])
    rho = fam.sample((t,))
    u = complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t))
    z = complex(-0.5, math.sqrt(3) / 2)
    expected = [(1 + u + u.conjugate()).real, (1 + u * z * z + u.conjugate() * z).real,
                (1 + u * z + u.conjugate() * z * z).real]
    rep.check("rho_u(0) = 1 + u + conj(u)", rep.close(rho.real_weights, expected), expected, _weights(rho))
    one = fam.sample((0,))
    rep.check("u = 1 gives (3, 0, 0)", rep.close(one.real_weights, [3, 0, 0]), [3, 0, 0], _weights(one))
    flat = diffraction(one)
    rep.check("its diffraction is flat", rep.close(flat.weights, [1, 1, 1]), [1, 1, 1],
              [round(float(x), 12) for x in flat.weights])
    moved = density_from_phase(omega, twist_by_group_element(fam.form((t,)), (1,)))
    rep.check("u -> zeta_3 u is a translation",
              rep.close(moved.real_weights, translate(rho.as_function(), (1,)).values.real))
    rep.check("phase-form group", str(fam.class_group) == "U(1)", "U(1)", str(fam.class_group))
    return rep.to_json()


def demo_m4() -> dict:
    rep = _Report("m4")
    fam = solve_family(_flat(4))
    rep.check("parameters (p, q)", (fam.p, fam.q) == (1, 1), [1, 1], [fam.p, fam.q])
    rep.check("torsion generator is 2", fam.basis.torsion == ((2,),), [[2]], [list(k) for k in fam.basis.torsion])
    rng = np.random.default_rng(4)
    ok = all(diffraction(fam.random_sample(rng)).allclose(fam.omega) for _ in range(20))
    rep.check("sampled densities are homometric", ok)
    rep.data["class_group"] = str(fam.class_group)
    return rep.to_json()


def demo_m5() -> dict:
    rep = _Report("m5")
    fam = solve_family(_flat(5))
    rep.check("parameters (p, q)", (fam.p, fam.q) == (2, 0), [2, 0], [fam.p, fam.q])
    rng = np.random.default_rng(5)
    ok = all(diffraction(fam.random_sample(rng)).allclose(fam.omega) for _ in range(20))
    rep.check("sampled densities are homometric", ok)
    rep.data["class_group"] = str(fam.class_group)
    return rep.to_json()


def demo_z6(moment_depth: int = 8) -> dict:
    rep = _Report("z6")
    g = make_group((6,))
    r1, r2 = Density(g, Z6_FIRST), Density(g, Z6_SECOND)
    omega = diffraction(r1)
    root = math.sqrt(247 / 3)
    expected = [28, root, 0, 0, 0, root]
    rep.check("omega^(1/2)", rep.close(np.sqrt(omega.weights), expected), expected,
              [float(x) for x in np.sqrt(omega.weights)])
    S = bragg_spectrum(omega)
    rep.check("Bragg spectrum", list(S) == [(0,), (1,), (5,)], [[0], [1], [5]], [list(k) for k in S])
    rep.check("homometric pair", homometric(r1, r2))
    e1, e2 = extract_phase_from_density(r1), extract_phase_from_density(r2)
    t1, t2 = float(e1.form.free_angles[0]), float(e2.form.free_angles[0])
    rep.check("first angle", abs(t1 - 0.443099) < 1e-5, 0.443099, t1)
    rep.check("second angle", abs(t2 - 0.520310) < 1e-5, 0.520310, t2)
    oracle = polynomial_phase(Z6_FACTORS, 6)
    rep.check("first angle from the factored polynomial", abs(oracle - t1) < 1e-12, oracle, t1)
    lat = e1.form.basis.lattice
    rep.check("Z = 6Z", lat.lattice_hnf == ((6,),), [[6]], [list(r) for r in lat.lattice_hnf])
    rep.check("<Z_6> = Z", generated_equals(lat, 6))
    rep.check("<Z_5> != Z", not generated_equals(lat, 5))
    n0 = n_zero(lat)
    r, bound = covering_number(e1.form.basis)
    rep.check("n_0 = 6", n0 == 6, 6, n0)
    rep.check("covering number 3, bound 7", (r, bound) == (3, 7), [3, 7], [r, bound])
    rep.check("n_0 <= 2r + 1", n0 is not None and n0 <= bound)
    div = first_divergent_moment(e1.form, e2.form, moment_depth)
    rep.check("phase-form moments diverge first at 6", div == 6, 6, div)
    rep.check("different phase forms", not same_phase_form(e1.form, e2.form))
    m1, m2 = build_process(omega, e1.form), build_process(omega, e2.form)
    F = GroupFunction.indicator(g, g.zero)
    diffs = []
    for m in range(1, 7):
        a, b = process_moment(m1, [F] * m), process_moment(m2, [F] * m)
        diffs.append(abs(a - b) / max(abs(a), abs(b)))
    rep.check("process moments agree for m <= 5", max(diffs[:5]) < 1e-9, None, diffs[:5])
    rep.check("process moments differ at m = 6", diffs[5] > 1e-6, None, diffs[5])
    gm = gm_rational_check(r1)
    rep.check("support closed under units", gm.closed and gm.moment_bound == 6)
    rep.data["omega"] = measure_to_json(omega)
    rep.data["angles"] = [t1, t2]
    return rep.to_json()


def demo_circle(seed: int = 0) -> dict:
    rep = _Report("circle")
    cases = {"K empty": {}, "K = {1, -1}, a(1) = i": {1: 1j, -1: -1j}}
    rng = np.random.default_rng(seed)
    phases = rng.random(2)
    random_case = {}
    for k, t in zip((1, 2), phases):
        z = complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t))
        random_case[k], random_case[-k] = z, z.conjugate()
    cases["K = {+-1, +-2}, random phases"] = random_case
    table = []
    for label, vals in cases.items():
        result = circle_family_check(vals)
        rep.check(label, result.passed, 1.0, result.max_deviation)
        table.append({"case": label, **result.to_json()})
    rep.data["table"] = table
    return rep.to_json()


def z6_sweep(samples: int = 600) -> tuple:
    """Weights rho_t(x) for t = j / samples, x = 0..5: (header, rows)."""
    if samples < 1:
        from .exceptions import ValidationError

        raise ValidationError("--samples must be positive")
    g = make_group((6,))
    fam = solve_family(diffraction(Density(g, Z6_FIRST)))
    rows = []
    for j in range(samples):
        t = j / samples
        rows.append([t, *fam.sample((t,)).real_weights.tolist()])
    return ["t"] + [f"x{x}" for x in range(6)], rows


DEMOS: dict[str, Callable[[], dict]] = {
    "m1": demo_m1,
    "m2": demo_m2,
    "m3": demo_m3,
    "m4": demo_m4,
    "m5": demo_m5,
    "z6": demo_z6,
    "circle": demo_circle,
}


def run_demo(name: str) -> dict:
    from .exceptions import ValidationError

    if name not in DEMOS:
        raise ValidationError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return DEMOS[name]()
