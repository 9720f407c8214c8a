import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steptwo.errors import DegreeCapExceeded, DimensionMismatch, NegativeArgument, NegativeDegree, ZeroTau
from steptwo.laguerre import (
    exp_laguerre,
    joint_eigenvalue,
    laguerre_l,
    laguerre_poly,
    laguerre_table,
    multi_indices,
    q_generating,
    q_m,
    twisted_sublaplacian_fd,
)
from steptwo.spectral import script_b, spectral_data


def series(m, a, x):
    """Explicit series oracle sum_i (-1)^i C(m+a, m-i) x^i / i!."""
    return sum((-1) ** i * math.comb(m + a, m - i) * x ** i / math.factorial(i) for i in range(m + 1))


def test_poly_examples():
    assert laguerre_poly(0, 3, 1.7) == 1.0
    assert laguerre_poly(1, 0, 2.0) == -1.0
    assert laguerre_poly(2, 0, 2.0) == pytest.approx(-1.0, abs=1e-15)


@pytest.mark.parametrize("a", [0, 1, 2, 3])
def test_poly_vs_series(a):
    x = np.linspace(0, 20, 41)
    for m in range(13):
        want = np.array([series(m, a, xi) for xi in x])
        assert np.allclose(laguerre_poly(m, a, x), want, rtol=1e-10, atol=1e-10 * np.abs(want).max())


def test_table_matches_poly():
    x = np.linspace(0, 10, 7)
    tab = laguerre_table(8, 1, x)
    for m in range(9):
        assert np.allclose(tab[m], laguerre_poly(m, 1, x), rtol=1e-13)


def test_degree_errors():
    with pytest.raises(NegativeDegree):
        laguerre_poly(-1, 0, 1.0)
    with pytest.raises(DegreeCapExceeded):
        laguerre_poly(61, 0, 1.0)
    with pytest.raises(NegativeArgument):
        laguerre_l(0, 0, -1.0)
    with pytest.raises(NegativeDegree):
        laguerre_l(0, -1, 1.0)


def test_l_examples():
    assert laguerre_l(0, 0, 2.0) == pytest.approx(0.367879, abs=1e-6)
    assert laguerre_l(1, 0, 1.0) == pytest.approx(0.0, abs=1e-16)
    s = np.linspace(0, 5, 11)
    assert np.allclose(laguerre_l(1, 0, s), (1 - s) * np.exp(-s / 2))


@pytest.mark.parametrize("p", [0, 1, 3])
def test_l_orthonormal(p):
    x, w = np.polynomial.laguerre.laggauss(80)
    # l_k l_k' = (poly) * sigma^p e^{-sigma}: Gauss-Laguerre with weight e^{-sigma}
    vals = np.stack([laguerre_l(k, p, x) for k in range(11)]) * np.exp(x / 2)
    G = (vals * w) @ vals.T
    assert np.allclose(G, np.eye(11), atol=1e-8)


def test_multi_indices_colex():
    assert multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert multi_indices(3, 1) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    for n in (1, 2, 3):
        for m in range(5):
            assert len(multi_indices(n, m)) == math.comb(m + n - 1, n - 1)


def test_exp_laguerre_examples(h1):
    assert exp_laguerre(h1, [0], [0], [1.0, 0.0], [1.0]) == pytest.approx(2 * np.exp(-1) / np.pi, rel=1e-14)
    y = np.array([[0.6, 0.8], [1.0, 0.0], [0.0, -1.0]])
    v = exp_laguerre(h1, [2], [0], y, [0.7])
    assert np.allclose(v.imag, 0) and np.allclose(v, v[0])
    with pytest.raises(ZeroTau):
        exp_laguerre(h1, [0], [0], [1.0, 0.0], [0.0])
    with pytest.raises(DimensionMismatch):
        exp_laguerre(h1, [0, 0], [0, 0], [1.0, 0.0], [1.0])


def test_exp_laguerre_nonzero_p_vanishes_at_origin(aniso21):
    v = exp_laguerre(aniso21, [1, 0], [2, 0], np.zeros(4), [1.0])
    assert v == 0


def test_exp_laguerre_nonzero_p_norm(h1):
    # |L~_k^{(p)}|^2 integrates to 2|tau|/pi for every p as well
    N, ext = 256, 6.0
    h = 2 * ext / N
    ax = (np.arange(N) - N // 2) * h
    Y = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1)
    for p in (1, -2):
        v = exp_laguerre(h1, [1], [p], Y, [1.0])
        assert np.sum(np.abs(v) ** 2) * h * h == pytest.approx(2 / np.pi, rel=1e-10)


def test_qm_examples(h1):
    assert q_m(h1, 0, [1.0, 0.0], [1.0]) == pytest.approx(2 * np.exp(-1) / np.pi, rel=1e-15)
    # closed form (2/pi) e^{-1} = 0.2341993...
    assert q_m(h1, 0, [1.0, 0.0], [1.0]) == pytest.approx(0.2341993, abs=1e-7)
    with pytest.raises(ZeroTau):
        q_m(h1, 0, [1.0, 0.0], [0.0])


@pytest.mark.parametrize("gname", ["h1", "aniso21", "aniso22", "quat"])
def test_qm_is_sum_of_exp_laguerre(gname, request, rng):
    G = request.getfixturevalue(gname)
    for _ in range(3):
        tau = rng.standard_normal(G.r)
        Y = rng.standard_normal((10, 2 * G.n))
        sp = spectral_data(G, tau, rng=rng)
        for m in range(5):
            s = sum(exp_laguerre(G, k, [0] * G.n, Y, tau, sp) for k in multi_indices(G.n, m))
            q = q_m(G, m, Y, tau)
            assert np.allclose(s, q, atol=1e-12 * np.abs(q).max())


def test_qm_scaling(aniso22, rng):
    y = rng.standard_normal((5, 4))
    tau = rng.standard_normal(2)
    for lam in (0.5, 3.0):
        for m in range(4):
            a = q_m(aniso22, m, y / lam, lam ** 2 * tau)
            b = lam ** (2 * aniso22.n) * q_m(aniso22, m, y, tau)
            assert np.allclose(a, b, rtol=1e-11)


def test_qm_bound(aniso22, rng):
    # |Q_m| <= const e^{-|tau||y|^2 / C} |tau|^n (C |tau||y|^2 + 1)^m
    ang = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    SB, _ = script_b(aniso22, np.stack([np.cos(ang), np.sin(ang)], 1))
    ev = np.linalg.eigvalsh(SB)
    C = max(ev.max(), 1 / ev.min())
    for _ in range(20):
        tau = rng.standard_normal(2) * 2
        y = rng.standard_normal(4) * 2
        tn, y2 = np.linalg.norm(tau), y @ y
        for m in range(5):
            bound = (2 ** 2 * C ** 2 / np.pi ** 2) * math.comb(m + 1, m) * np.exp(-tn * y2 / C) \
                * tn ** 2 * (2 * C * tn * y2 + 1) ** m
            assert abs(q_m(aniso22, m, y, tau)) <= bound


def test_generating_identity(aniso22, rng):
    y = rng.standard_normal((6, 4))
    tau = rng.standard_normal(2)
    for R in (0.3, 0.5):
        s = sum(R ** m * q_m(aniso22, m, y, tau) for m in range(41))
        g = q_generating(aniso22, R, y, tau)
        assert np.allclose(s, g, rtol=1e-8, atol=1e-8 * np.abs(g).max())


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 6), st.lists(st.floats(0, 5), min_size=4, max_size=4))
def test_addition_identity(n, m, sig):
    sig = np.array(sig[:n])
    lhs = sum(np.prod([laguerre_poly(k, 0, s) for k, s in zip(ks, sig)]) for ks in multi_indices(n, m))
    rhs = laguerre_poly(m, n - 1, sig.sum())
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_frame_independence_of_qm_sum(quat, rng):
    tau = rng.standard_normal(3)
    Y = rng.standard_normal((8, 4))
    a = spectral_data(quat, tau)
    b = spectral_data(quat, tau, rng=rng)
    for m in range(4):
        sa = sum(exp_laguerre(quat, k, [0, 0], Y, tau, a) for k in multi_indices(2, m))
        sb = sum(exp_laguerre(quat, k, [0, 0], Y, tau, b) for k in multi_indices(2, m))
        assert np.allclose(sa, sb, atol=1e-10 * np.abs(sa).max())


def test_eigenfunction_order_four(aniso22, rng):
    tau = np.array([0.8, -0.5])
    sp = spectral_data(aniso22, tau)
    Y = rng.uniform(-1, 1, (6, 4))
    for k in [(0, 0), (1, 0), (0, 2), (2, 1)]:
        f = lambda y: exp_laguerre(aniso22, k, [0, 0], y, tau, sp)
        lam = joint_eigenvalue(aniso22, k, tau, sp)
        res = [np.max(np.abs(twisted_sublaplacian_fd(aniso22, f, Y, tau, h, sp) - lam * f(Y)))
               for h in (0.08, 0.04, 0.02)]
        slopes = np.log2(np.array(res[:-1]) / np.array(res[1:]))
        assert np.all(np.abs(slopes - 4) < 0.5), slopes


def test_joint_eigenvalue(aniso21):
    assert joint_eigenvalue(aniso21, [1, 0], [2.0]) == pytest.approx(2 * (2 * 3 + 1 * 1))
