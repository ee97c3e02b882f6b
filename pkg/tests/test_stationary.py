"""Pinned equilibria: jumps, closed forms, energy ordering.

The general jump formulas are frozen from tests/oracles/stationary_oracle.py
(sympy, exact arithmetic).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pierbeam.stationary import (
    energy_gap,
    four_point_solution,
    hinged_solution,
    pinned_solution,
)

PI = math.pi


def f_uniform(x):
    return 24.0 * np.ones_like(np.asarray(x, dtype=float))


def f_sine(x):
    return 81.0 * np.sin(3.0 * np.asarray(x, dtype=float))


# frozen from the symbolic oracle: exact rational-in-(a, b) jump amplitudes
def alpha_uniform(a, b):
    num = 12 * PI * (b + 1) * (2 * a**2 * b + 2 * a**2 - a * b**2 - 3 * a + b**3 - 2 * b**2 - 7 * b)
    den = (a - 1) * (a + b) * (a**2 - 2 * a * b - 4 * a + b**2 - 4 * b - 4)
    return num / den


def beta_uniform(a, b):
    num = 12 * PI * (a + 1) * (a**3 - a**2 * b - 2 * a**2 + 2 * a * b**2 - 7 * a + 2 * b**2 - 3 * b)
    den = (a + b) * (b - 1) * (a**2 - 2 * a * b - 4 * a + b**2 - 4 * b - 4)
    return num / den


POSITIONS = st.floats(min_value=0.12, max_value=0.88)


@settings(max_examples=30, deadline=None)
@given(a=POSITIONS, b=POSITIONS)
def test_uniform_jumps_match_symbolic_oracle(a, b):
    u = pinned_solution(f_uniform, a, b)
    assert u.alpha == pytest.approx(alpha_uniform(a, b), rel=1e-9)
    assert u.beta == pytest.approx(beta_uniform(a, b), rel=1e-9)


def test_uniform_jump_reflection_identity():
    for a, b in [(0.3, 0.7), (0.56, 0.4), (2 / 3, 0.25)]:
        assert alpha_uniform(a, b) == pytest.approx(beta_uniform(b, a), rel=1e-13)
        left = pinned_solution(f_uniform, a, b)
        right = pinned_solution(f_uniform, b, a)
        assert left.alpha == pytest.approx(right.beta, rel=1e-9)


def test_uniform_symmetric_closed_forms():
    for a in np.linspace(0.1, 0.9, 17):
        u = pinned_solution(f_uniform, a)
        ref = 3 * (1 + a) * (a**2 - 5) * PI / ((1 - a) * (2 * a + 1))
        assert u.beta == pytest.approx(ref, rel=1e-10)
        assert u.alpha == pytest.approx(u.beta, rel=1e-9)
        gap = energy_gap(f_uniform, a)
        gap_ref = (5 - a**2) ** 2 * (1 + 2 * a - 3 * a**2) * PI**5 / (2 * a + 1)
        assert gap == pytest.approx(gap_ref, rel=1e-10)


def test_uniform_four_point_profile():
    x = np.linspace(-PI, PI, 23)
    for a, b in [(0.5, 0.5), (0.3, 0.7), (2 / 3, 0.25)]:
        uf = four_point_solution(f_uniform, a, b)
        ref = (x + b * PI) * (x - a * PI) * (x**2 - PI**2)
        assert uf(x) == pytest.approx(ref, abs=1e-10)
        assert uf.derivative(-PI, 2) == pytest.approx(2 * PI**2 * (5 - 3 * b + 3 * a - a * b), rel=1e-12)
        assert uf.derivative(PI, 2) == pytest.approx(2 * PI**2 * (5 + 3 * b - 3 * a - a * b), rel=1e-12)


def test_sine_four_point_profile():
    x = np.linspace(-PI, PI, 23)
    for a, b in [(0.5, 0.5), (0.3, 0.7), (0.56, 0.56)]:
        uf = four_point_solution(f_sine, a, b)
        c = (np.sin(3 * b * PI) / (1 - b**2) + np.sin(3 * a * PI) / (1 - a**2)) / ((a + b) * PI**3)
        d = (b * np.sin(3 * a * PI) / (1 - a**2) - a * np.sin(3 * b * PI) / (1 - b**2)) / ((a + b) * PI**2)
        ref = np.sin(3 * x) + c * x * (x**2 - PI**2) + d * (x**2 - PI**2)
        assert uf(x) == pytest.approx(ref, abs=1e-10)


def test_sine_symmetric_closed_forms():
    for a in np.linspace(0.1, 0.9, 17):
        u = pinned_solution(f_sine, a)
        ref = 3 * np.sin(3 * a * PI) / ((1 - a) ** 2 * a**2 * PI**3)
        assert u.beta == pytest.approx(ref, abs=1e-9)
        gap = energy_gap(f_sine, a)
        gap_ref = 3 * (3 + a) * np.sin(3 * a * PI) ** 2 / ((1 - a) * a**2 * (1 + a) ** 2 * PI**3)
        assert gap == pytest.approx(gap_ref, abs=1e-9)


def test_sine_reactions_vanish_at_thirds():
    for pos in (1 / 3, 2 / 3):
        u = pinned_solution(f_sine, pos, pos)
        assert abs(u.alpha) < 1e-10
        assert abs(u.beta) < 1e-10
    u = pinned_solution(f_sine, 1 / 3, 2 / 3)
    assert abs(u.alpha) < 1e-10 and abs(u.beta) < 1e-10


def test_touching_profile_stays_positive():
    # a hand-built load whose pinned equilibrium is C4 and one-signed
    def f(x):
        x = np.asarray(x, dtype=float)
        return (
            (177 / 16) * np.cos(x / 2) * np.cos(x) ** 2
            - 17 * np.cos(x) * np.sin(x) * np.sin(x / 2)
            - 11 * np.cos(x / 2) * np.sin(x) ** 2
        )

    u = pinned_solution(f, 0.5)
    x = np.linspace(-PI, PI, 201)
    ref = np.cos(x) ** 2 * np.cos(x / 2)
    assert u(x) == pytest.approx(ref, abs=1e-11)
    assert abs(u.alpha) < 1e-10 and abs(u.beta) < 1e-10
    for p in (-PI, PI, -PI / 2, PI / 2):
        assert abs(u(p)) < 1e-11
    xi = np.linspace(-PI + 0.05, PI - 0.05, 401)
    assert np.nanmax(np.abs(u.residual(xi, h=0.001))) < 1e-10
    assert u(xi).min() > 0


_LOADS = [
    ("uniform", f_uniform),
    ("sine", f_sine),
    ("mixed", lambda x: 7.0 * np.cos(np.asarray(x, float)) - 3.0 * np.asarray(x, float) ** 2),
]


@settings(max_examples=25, deadline=None)
@given(
    a=POSITIONS,
    b=POSITIONS,
    gamma=st.sampled_from([0.0, 0.7, 3.2]),
    load=st.sampled_from(_LOADS),
)
def test_solution_satisfies_all_constraints(a, b, gamma, load):
    _, f = load
    u = pinned_solution(f, a, b, gamma=gamma)
    for p, expect_zero in ((-PI, True), (PI, True), (-b * PI, True), (a * PI, True)):
        assert abs(u(p)) < 1e-9
    assert abs(u.derivative(-PI, 2)) < 1e-8
    assert abs(u.derivative(PI, 2)) < 1e-8
    # C1 and C2 across the pins
    for p in (-b * PI, a * PI):
        for order in (0, 1, 2):
            assert u.derivative(p - 1e-10, order) == pytest.approx(
                u.derivative(p + 1e-10, order), abs=1e-6
            )
    xi = np.array([-2.8, -1.7, 0.45, 1.15, 2.6])
    res = u.residual(xi)
    assert np.nanmax(np.abs(res)) < 1e-5


@settings(max_examples=15, deadline=None)
@given(a=POSITIONS, b=POSITIONS, load=st.sampled_from(_LOADS))
def test_energy_ordering(a, b, load):
    _, f = load
    ub = pinned_solution(f, a, b)
    # the minimizer can never do worse than the zero profile or the
    # four-point comparison solution
    assert ub.energy() <= 1e-9
    assert energy_gap(f, a, b) >= -1e-9


def test_hinged_solution_no_pins():
    u = hinged_solution(f_sine)
    x = np.linspace(-PI, PI, 33)
    # for a pure sine load the hinged profile is the sine itself
    assert u(x) == pytest.approx(np.sin(3 * x), abs=1e-10)
    assert u.alpha == 0.0 and u.beta == 0.0


def test_residual_masks_near_pins():
    u = pinned_solution(f_uniform, 0.5)
    vals = u.residual(np.array([0.5 * PI + 0.001, 0.0]))
    assert np.isnan(vals[0]) and not np.isnan(vals[1])
