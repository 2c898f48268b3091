import math

import numpy as np
import pytest

from diffrakt.abelian import make_group
from diffrakt.density import Density, PointMeasure

Z6_FIRST = (11, 25, 42, 45, 31, 14)
Z6_SECOND = (10, 17, 35, 46, 39, 21)


def random_moduli(rng, max_order=48):
    while True:
        d = int(rng.integers(1, 4))
        moduli = tuple(int(m) for m in rng.integers(1, 13, size=d))
        if math.prod(moduli) <= max_order:
            return moduli


def random_omega(g, rng, density=0.5):
    """Symmetric nonnegative weights on a random symmetric support."""
    neg = g.negation_index
    w = np.zeros(g.order)
    for i in range(g.order):
        j = int(neg[i])
        if j < i:
            continue
        if rng.random() < density:
            w[i] = w[j] = rng.uniform(0.1, 2.0)
    if not w.any():
        w[0] = rng.uniform(0.1, 2.0)
    return PointMeasure(g, w)


def random_instance(rng, max_order=48):
    g = make_group(random_moduli(rng, max_order))
    return g, random_omega(g, rng)


@pytest.fixture
def z6():
    g = make_group((6,))
    return g, Density(g, Z6_FIRST), Density(g, Z6_SECOND)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
