import itertools

import numpy as np
import pytest

from steptwo.quadrature import (
    SURFACE_AREA,
    align_points,
    contour_nodes,
    householder_to,
    monomial_integral,
    polar_sinh_nodes,
    sphere_rule,
)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_weights_sum_to_area(r):
    rule = sphere_rule(r, 32)
    assert rule.weights.sum() == pytest.approx(SURFACE_AREA[r], rel=1e-13)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1, atol=1e-14)
    assert np.all(rule.weights > 0)


def test_monomial_oracle():
    assert monomial_integral((0, 0, 0)) == pytest.approx(4 * np.pi)
    assert monomial_integral((2, 0, 0)) == pytest.approx(4 * np.pi / 3)
    assert monomial_integral((1, 0)) == 0.0
    assert monomial_integral((2, 2)) == pytest.approx(np.pi / 4)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_rotated_rule_is_exact_and_distinct(r):
    a = sphere_rule(r, 32)
    b = sphere_rule(r, 32, rotation_seed=5)
    assert not np.allclose(a.nodes, b.nodes)
    for alpha in itertools.product(range(5), repeat=r):
        if sum(alpha) <= 6:
            want = monomial_integral(alpha)
            got = b.integrate(np.prod(b.nodes ** np.array(alpha), axis=1))
            assert got == pytest.approx(want, abs=1e-12)


def test_contour_nodes():
    eps = 0.1
    z, dz, opz, omz = contour_nodes(eps, 64)
    assert np.allclose(z.imag, eps * np.sqrt(np.clip(1 - z.real ** 2, 0, None)), atol=1e-12)
    assert np.allclose(opz, 1 + z, atol=1e-15) and np.allclose(omz, 1 - z, atol=1e-15)
    assert np.sum(dz) == pytest.approx(2.0, abs=1e-12)
    # analytic integrand: integral of z^2 over the path equals 2/3
    assert np.sum(z ** 2 * dz) == pytest.approx(2 / 3, abs=1e-12)
    z0, dz0, _, _ = contour_nodes(0.0, 64, False)
    assert np.allclose(z0.imag, 0)


def test_householder(rng):
    for r in (2, 3, 4):
        t = rng.standard_normal(r)
        t /= np.linalg.norm(t)
        H = householder_to(t)
        assert np.allclose(H @ np.eye(r)[0], t)
        assert np.allclose(H @ H.T, np.eye(r))
    assert np.array_equal(householder_to(np.array([1.0, 0.0, 0.0])), np.eye(3))


def test_polar_sinh_rule_integrates_polynomials(rng):
    for r in (3, 4):
        t = rng.standard_normal((2, r))
        t /= np.linalg.norm(t, axis=1)[:, None]
        local, w = polar_sinh_nodes(r, 64, 32, np.array([0.05, 0.3]))
        nodes = align_points(local, t)
        assert np.allclose(np.linalg.norm(nodes, axis=-1), 1)
        for alpha in [(0,) * r, (2,) + (0,) * (r - 1), (1, 1) + (0,) * (r - 2), (2, 2) + (0,) * (r - 2)]:
            vals = np.prod(nodes ** np.array(alpha), axis=-1)
            assert np.allclose(np.sum(vals * w, axis=1), monomial_integral(alpha), atol=1e-10)
