"""Implicit map construction, derivatives, composition."""

import numpy as np
import pytest

from pirouette import (GeneratedMap, GeneratingFunction, InvariantBreach,
                       MapFactorization, NormalFormViolated, NotCritical,
                       OrbitEscaped, OutOfWindow, Window, compose,
                       eigenvector_transport_check)

SQUARE = Window(-1.0, 1.0, -1.0, 1.0)
RNG_SEED = 20240817


def make_shear():
    return GeneratedMap(GeneratingFunction.from_terms([(0, 2, 0.5)], SQUARE))


def make_degmax():
    w = Window(-0.705, 0.705, -0.705, 0.705)
    terms = [(4, 0, -0.25), (2, 2, -0.5), (0, 4, -0.25)]
    return GeneratedMap(GeneratingFunction.from_terms(terms, w,
                                                      twist_bound=0.995))


def test_window_basics():
    w = Window(-1.0, 2.0, 0.0, 1.0)
    assert w.contains(0.0, 0.5)
    assert not w.contains(2.1, 0.5)
    assert w.span == 3.0
    cx, cy = w.clip(5.0, -3.0)
    assert (cx, cy) == (2.0, 0.0)
    pts = w.random_points(40, seed=3)
    assert pts.shape == (40, 2)
    assert np.array_equal(pts, w.random_points(40, seed=3))
    assert all(w.contains(x, y) for x, y in pts)


def test_polynomial_derivatives_match_finite_differences():
    terms = [(3, 1, 0.1), (1, 2, -0.2), (2, 0, 0.1), (0, 4, -0.05)]
    g = GeneratingFunction.from_terms(terms, SQUARE)
    rng = np.random.default_rng(RNG_SEED)
    h = 1e-6
    for _ in range(25):
        x, y = rng.uniform(-0.9, 0.9, 2)
        gx = (g.value(x + h, y) - g.value(x - h, y)) / (2 * h)
        gy = (g.value(x, y + h) - g.value(x, y - h)) / (2 * h)
        assert g.d1(x, y) == pytest.approx(gx, abs=1e-7)
        assert g.d2(x, y) == pytest.approx(gy, abs=1e-7)
        gxy = (g.d1(x, y + h) - g.d1(x, y - h)) / (2 * h)
        assert g.d12(x, y) == pytest.approx(gxy, abs=1e-7)


def test_twist_bound_enforced_at_construction():
    with pytest.raises(InvariantBreach):
        GeneratingFunction.from_terms([(1, 1, 1.2)], SQUARE)
    with pytest.raises(InvariantBreach):
        GeneratingFunction.from_terms([(1, 1, 0.9)], SQUARE,
                                      twist_bound=0.5)


def test_audit_catches_wrong_gradient():
    bad = GeneratingFunction.from_callables(
        lambda x, y: x * x + y * y,
        lambda x, y: (2 * x, 2 * y + 0.1),
        lambda x, y: ((2.0, 0.0), (0.0, 2.0)),
        SQUARE, twist_bound=0.0, audit=False)
    with pytest.raises(InvariantBreach):
        bad.audit()


def test_shear_is_explicit():
    f = make_shear()
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(20):
        x = rng.uniform(-0.9, 0.9)
        y = rng.uniform(-0.9, 0.9)
        if not SQUARE.contains(x + y, y):
            continue
        X, Y = f.forward((x, y))
        assert X == pytest.approx(x + y, abs=1e-12)
        assert Y == pytest.approx(y, abs=1e-12)


def test_forward_inverse_round_trip():
    for f in (make_shear(), make_degmax()):
        pts = f.window.random_points(200, seed=11)
        checked = 0
        for z in pts:
            try:
                w = f.forward(z)
                back = f.inverse(w)
            except OutOfWindow:
                continue
            assert np.allclose(back, z, atol=1e-10)
            checked += 1
        assert checked > 100


def test_jacobian_matches_map_differential():
    f = make_degmax()
    rng = np.random.default_rng(RNG_SEED)
    h = 1e-6
    checked = 0
    while checked < 15:
        z = rng.uniform(-0.4, 0.4, 2)
        try:
            J = f.jacobian(z)
            cols = []
            for d in (np.array([h, 0.0]), np.array([0.0, h])):
                cols.append((f.forward(z + d) - f.forward(z - d)) / (2 * h))
        except OutOfWindow:
            continue
        fd = np.column_stack(cols)
        assert np.allclose(J, fd, atol=1e-6)
        assert abs(np.linalg.det(J) - 1.0) < 1e-12
        checked += 1


def test_jacobian_handles_rank_one_hessian():
    # value c(x + sy)^2/2 keeps d11*d22 = d12^2, the branch where the
    # generic determinant formula degenerates
    g = GeneratingFunction.from_terms(
        [(2, 0, 0.15), (1, 1, 0.15), (0, 2, 0.0375)], SQUARE)
    f = GeneratedMap(g)
    z = np.array([0.2, -0.3])
    J = f.jacobian(z)
    h = 1e-6
    fd = np.column_stack([
        (f.forward(z + [h, 0]) - f.forward(z - [h, 0])) / (2 * h),
        (f.forward(z + [0, h]) - f.forward(z - [0, h])) / (2 * h)])
    assert np.allclose(J, fd, atol=1e-6)
    assert abs(np.linalg.det(J) - 1.0) < 1e-12


def test_iterate_matches_repeated_forward():
    f = make_degmax()
    z = np.array([0.2, 0.1])
    seg = f.iterate(z, 6)
    assert seg.shape == (7, 2)
    w = z.copy()
    for k in range(6):
        w = f.forward(w)
        assert np.allclose(seg[k + 1], w, atol=1e-12)


def test_iterate_escape_raises():
    f = make_degmax()
    with pytest.raises(OrbitEscaped):
        f.iterate(np.array([0.69, 0.69]), 50)


def test_isotopy_starts_at_identity_and_ends_at_map():
    f = make_degmax()
    z = np.array([0.3, -0.2])
    path = f.isotopy_path(z, np.linspace(0.0, 1.0, 9))
    assert np.allclose(path[0], z, atol=1e-12)
    assert np.allclose(path[-1], f.forward(z), atol=1e-10)
    steps = np.hypot(*np.diff(path, axis=0).T)
    assert steps.max() < 0.2
    mid = f.at_time(0.5).forward(z)
    assert np.allclose(path[4], mid, atol=1e-10)


def test_time_zero_is_identity():
    f = make_degmax().at_time(0.0)
    z = np.array([0.4, 0.2])
    assert np.allclose(f.forward(z), z, atol=1e-12)
    assert np.allclose(f.jacobian(z), np.eye(2), atol=1e-12)


def test_factorization_chains_factors():
    g = GeneratingFunction.from_terms(
        [(4, 0, -0.125), (2, 2, -0.25), (0, 4, -0.125)],
        Window(-0.705, 0.705, -0.705, 0.705), twist_bound=0.4975)
    single = GeneratedMap(g)
    pair = MapFactorization((g, g))
    z = np.array([0.25, -0.15])
    assert np.allclose(pair.forward(z), single.forward(single.forward(z)),
                       atol=1e-12)
    J = pair.jacobian(z)
    assert abs(np.linalg.det(J) - 1.0) < 1e-12
    # halfway through the staged isotopy only the first factor has acted
    assert np.allclose(pair.at_time(0.5).forward(z), single.forward(z),
                       atol=1e-12)
    assert np.allclose(pair.at_time(1.0).forward(z), pair.forward(z),
                       atol=1e-12)


def test_out_of_window_point_rejected():
    f = make_shear()
    with pytest.raises(OutOfWindow):
        f.forward((1.5, 0.0))


def test_eigenvector_transport():
    # fully degenerate quartic: kernel vector must survive every time
    v = eigenvector_transport_check(make_degmax().g)
    assert v is not None and np.hypot(*v) == pytest.approx(1.0, abs=1e-12)
    # a saddle critical point is far from degenerate, nothing to check
    saddle = GeneratingFunction.from_terms([(2, 0, 0.5), (0, 2, -0.5)],
                                           SQUARE)
    assert eigenvector_transport_check(saddle) is None
    tilted = GeneratingFunction.from_terms([(1, 0, 0.3), (0, 2, 0.5)],
                                           SQUARE)
    with pytest.raises(NotCritical):
        eigenvector_transport_check(tilted)


def test_compose_rejects_wrong_normal_form():
    w = Window(-2.0, 2.0, -2.0, 2.0)
    good = GeneratingFunction.from_terms(
        [(0, 2, -0.5), (4, 0, -0.002), (2, 2, -0.004), (0, 4, -0.002)], w)
    convex = GeneratingFunction.from_terms([(0, 2, 0.5)], w)
    with pytest.raises(NormalFormViolated):
        compose(good, convex, Window(-1.1, 1.1, -0.28, 0.28))


def test_compose_reproduces_two_step_map():
    w = Window(-2.0, 2.0, -2.0, 2.0)
    quart = [(4, 0, -0.002), (2, 2, -0.004), (0, 4, -0.002)]
    g0 = GeneratingFunction.from_terms([(0, 2, -0.5)] + quart, w)
    g1 = GeneratingFunction.from_terms([(0, 2, -1.0)] + quart, w)
    win = Window(-1.1, 1.1, -0.28, 0.28)
    gc = compose(g0, g1, win)
    fc = GeneratedMap(gc)
    two = MapFactorization((g0, g1))
    for x in np.linspace(-0.2, 0.2, 4):
        for y in np.linspace(-0.2, 0.2, 4):
            z = np.array([x, y])
            try:
                direct = two.forward(z)
            except OutOfWindow:
                continue
            if not win.contains(*direct):
                continue
            assert np.allclose(fc.forward(z), direct, atol=1e-9)
    H = np.array(gc.hessian(0.0, 0.0))
    assert np.allclose(H, [[0.0, 0.0], [0.0, -3.0]], atol=1e-8)
    assert gc.normal_form_constants == pytest.approx((-1.0, -2.0), abs=1e-8)
