"""Degree, fixed-point index, isotopy index."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pirouette import (Aliased, Circle, FixedPointOnCurve, GeneratedMap,
                       GeneratingFunction, LiftedPath, NotCritical,
                       NotIsolated, Polyline, VanishingField, Window,
                       brouwer_degree, isotopy_index, lefschetz_index)

SQUARE = Window(-1.0, 1.0, -1.0, 1.0)


def power_field(k):
    def field(z):
        w = complex(z[0], z[1]) ** k
        return np.array([w.real, w.imag])
    return field


def test_degree_of_simple_fields():
    circle = Circle(np.zeros(2), 1.0)
    assert brouwer_degree(lambda z: z, circle) == 1
    assert brouwer_degree(lambda z: np.array([z[0], -z[1]]), circle) == -1
    assert brouwer_degree(lambda z: np.array([-z[1], z[0]]), circle) == 1
    assert brouwer_degree(lambda z: np.array([1.0, 0.0]), circle) == 0
    assert brouwer_degree(power_field(2), circle) == 2
    assert brouwer_degree(power_field(3), circle) == 3


def test_degree_on_polyline():
    square = Polyline([(1, 1), (-1, 1), (-1, -1), (1, -1)])
    assert brouwer_degree(lambda z: z, square) == 1
    assert brouwer_degree(power_field(2), square) == 2


@settings(max_examples=30, deadline=None)
@given(k=st.integers(min_value=1, max_value=5),
       cx=st.floats(-0.2, 0.2), cy=st.floats(-0.2, 0.2),
       radius=st.floats(0.5, 2.0))
def test_degree_counts_enclosed_zero_multiplicity(k, cx, cy, radius):
    circle = Circle(np.array([cx, cy]), radius)
    assert brouwer_degree(power_field(k), circle) == k


def test_degree_zero_when_origin_outside():
    circle = Circle(np.array([2.0, 0.0]), 0.5)
    assert brouwer_degree(power_field(2), circle) == 0


def test_vanishing_on_curve_detected():
    circle = Circle(np.array([1.0, 0.0]), 1.0)
    with pytest.raises(VanishingField):
        brouwer_degree(lambda z: z, circle)


def test_budget_exhaustion_reports_aliasing():
    circle = Circle(np.zeros(2), 1.0)
    with pytest.raises(Aliased):
        brouwer_degree(power_field(3), circle, initial=5, budget=3)


def test_lifted_path_turn_count():
    t = np.linspace(0.0, 1.0, 257)
    pts = np.column_stack([np.cos(6 * np.pi * t), np.sin(6 * np.pi * t)])
    lp = LiftedPath.from_curve(lambda s: np.array(
        [np.cos(6 * np.pi * s), np.sin(6 * np.pi * s)]), np.zeros(2))
    assert lp.turns == pytest.approx(3.0, abs=1e-9)
    direct = LiftedPath(pts, np.unwrap(np.arctan2(pts[:, 1], pts[:, 0])),
                        np.zeros(2))
    assert direct.turns == pytest.approx(3.0, abs=1e-9)


def test_lifted_path_rejects_puncture_touch():
    pts = np.array([[1.0, 0.0], [0.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(VanishingField):
        LiftedPath(pts, np.zeros(3), np.zeros(2))


def make_map(terms, window=SQUARE, bound=None):
    return GeneratedMap(GeneratingFunction.from_terms(terms, window,
                                                      twist_bound=bound))


def test_saddle_fixed_point_index():
    f = make_map([(2, 0, 0.5), (0, 2, -0.5)])
    rep = lefschetz_index(f, np.zeros(2), 0.1)
    assert rep.value == -1
    assert rep.min_displacement > 0.0
    assert rep.samples_used >= 64


def test_degenerate_maximum_index_is_plus_one():
    w = Window(-0.705, 0.705, -0.705, 0.705)
    f = make_map([(4, 0, -0.25), (2, 2, -0.5), (0, 4, -0.25)], w, 0.995)
    assert lefschetz_index(f, np.zeros(2), 0.2).value == 1


def test_index_requires_fixed_point():
    f = make_map([(2, 0, 0.5), (0, 2, -0.5)])
    with pytest.raises(NotCritical):
        lefschetz_index(f, np.array([0.3, 0.1]), 0.05)


def test_index_rejects_nonisolated_fixed_points():
    shear = make_map([(0, 2, 0.5)])
    with pytest.raises((NotIsolated, FixedPointOnCurve)):
        lefschetz_index(shear, np.zeros(2), 0.1)


def test_isotopy_index_values():
    saddle = make_map([(2, 0, 0.5), (0, 2, -0.5)])
    assert isotopy_index(saddle, np.zeros(2), 0.1) == -2
    w = Window(-0.705, 0.705, -0.705, 0.705)
    degmax = make_map([(4, 0, -0.25), (2, 2, -0.5), (0, 4, -0.25)], w,
                      0.995)
    assert isotopy_index(degmax, np.zeros(2), 0.3) == 0
    elliptic = make_map([(2, 0, 0.05), (0, 2, 0.05)])
    assert isotopy_index(elliptic, np.zeros(2), 0.1) == 0


def test_isotopy_index_matches_lefschetz_minus_one():
    for terms, window, bound, radius in [
            ([(2, 0, 0.5), (0, 2, -0.5)], SQUARE, None, 0.1),
            ([(2, 0, 0.05), (0, 2, 0.05)], SQUARE, None, 0.05),
            ([(4, 0, -0.25), (2, 2, -0.5), (0, 4, -0.25)],
             Window(-0.705, 0.705, -0.705, 0.705), 0.995, 0.2)]:
        f = make_map(terms, window, bound)
        lefschetz = lefschetz_index(f, np.zeros(2), radius).value
        assert isotopy_index(f, np.zeros(2), radius) == lefschetz - 1
