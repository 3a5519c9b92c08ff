"""Discrete action: value, derivatives, critical chains, Morse data."""

import math

import numpy as np
import pytest

from pirouette import (ActionChain, ConvergedToPuncture, GeneratedMap,
                       GeneratingFunction, MapFactorization, NonConvergence,
                       Window, action_gradient, action_hessian, action_value,
                       find_critical_point, morse_data, rigid_rotation_terms)

QWIN = Window(-0.705, 0.705, -0.705, 0.705)


def degmax_factorization(k=1):
    s = 0.25 / k
    g = GeneratingFunction.from_terms(
        [(4, 0, -s), (2, 2, -2 * s), (0, 4, -s)], QWIN,
        twist_bound=0.995 / k)
    return MapFactorization((g,) * k)


def rigid_factorization(u):
    g = GeneratingFunction.from_terms(
        rigid_rotation_terms(-2 * math.pi * u),
        Window(-1.0, 1.0, -1.0, 1.0))
    return MapFactorization((g,))


def random_chain(fact, q, seed, scale=0.3):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-scale, scale, (fact.k * q, 2))
    return ActionChain(fact, q, pts)


def test_single_point_chain_reduces_to_g():
    fact = degmax_factorization()
    chain = ActionChain(fact, 1, [[0.2, -0.1]])
    g = fact.factors[0]
    assert action_value(chain) == pytest.approx(g.value(0.2, -0.1),
                                                abs=1e-15)
    H = action_hessian(chain)
    Hg = np.asarray(g.hessian(0.2, -0.1))
    assert np.max(np.abs(H - Hg)) < 1e-15


def test_gradient_matches_finite_differences():
    for fact, q in [(degmax_factorization(), 3),
                    (degmax_factorization(2), 2),
                    (rigid_factorization(0.12), 4)]:
        chain = random_chain(fact, q, seed=q + fact.k)
        grad = action_gradient(chain)
        flat = chain.flat()
        h = 1e-6
        for i in range(len(flat)):
            up = flat.copy(); up[i] += h
            dn = flat.copy(); dn[i] -= h
            fd = (action_value(chain.with_points(up)) -
                  action_value(chain.with_points(dn))) / (2 * h)
            assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_hessian_matches_gradient_differences():
    fact = degmax_factorization(2)
    chain = random_chain(fact, 2, seed=9)
    H = action_hessian(chain)
    assert np.array_equal(H, H.T)
    flat = chain.flat()
    h = 1e-6
    for i in range(len(flat)):
        up = flat.copy(); up[i] += h
        dn = flat.copy(); dn[i] -= h
        fd = (action_gradient(chain.with_points(up)) -
              action_gradient(chain.with_points(dn))) / (2 * h)
        assert np.allclose(H[:, i], fd, atol=1e-5)


def test_orbit_chains_are_critical():
    # a periodic orbit threads into a chain with vanishing gradient
    fact = rigid_factorization(1.0 / 7.0)
    chain = ActionChain.from_orbit(fact, 7, np.array([0.4, 0.0]))
    assert np.linalg.norm(action_gradient(chain)) < 1e-12
    bumped = chain.flat()
    bumped[3] += 1e-3
    assert np.linalg.norm(action_gradient(chain.with_points(bumped))) \
        > 1e-4


def test_zero_map_morse_data_is_degenerate():
    flat_g = GeneratingFunction.from_terms([(0, 0, 0.0)],
                                           Window(-1, 1, -1, 1))
    fact = MapFactorization((flat_g,))
    chain = ActionChain(fact, 1, [[0.1, 0.2]])
    assert morse_data(chain) == (0, 2)


def test_find_critical_point_recovers_orbit():
    fact = degmax_factorization()
    seed = ActionChain.from_orbit(fact, 12, np.array([0.66, 0.0]))
    rep = find_critical_point(fact, 12, seed, puncture=np.zeros(2))
    assert rep.converged
    assert rep.grad_norm < 1e-10
    assert rep.p == 1
    assert rep.nullity == 0
    r = np.hypot(rep.chain.points[:, 0], rep.chain.points[:, 1])
    assert r.max() == pytest.approx(0.752976, abs=1e-4)
    f = fact.maps[0]
    for j in range(12):
        img = f.forward(rep.chain.points[j])
        assert np.allclose(img, rep.chain.points[(j + 1) % 12],
                           atol=1e-8)


def test_find_critical_point_reports_nonconvergence():
    fact = degmax_factorization()
    seed = random_chain(fact, 5, seed=3, scale=0.5)
    rep = find_critical_point(fact, 5, seed, max_iter=2)
    if not rep.converged:
        assert rep.grad_norm > 0.0
        with pytest.raises(NonConvergence):
            find_critical_point(fact, 5, seed, max_iter=2, strict=True)


def test_find_critical_point_flags_puncture():
    fact = degmax_factorization()
    seed = ActionChain(fact, 1, [[1e-12, 0.0]])
    with pytest.raises(ConvergedToPuncture):
        find_critical_point(fact, 1, seed, puncture=np.zeros(2))


def test_record_export():
    fact = rigid_factorization(0.1)
    chain = ActionChain(fact, 1, [[0.0, 0.0]])
    rep = find_critical_point(fact, 1, chain)
    rec = rep.as_record()
    assert rec["finder"] == "action"
    assert rec["grad_norm"] < 1e-12
