import numpy as np
import pytest
from scipy.signal import convolve2d

from steptwo.errors import DegreeCapExceeded, GridMismatch, RNotInRange, WrongSpace
from steptwo.laguerre import exp_laguerre, q_m
from steptwo.projection import (
    Grid,
    ProjectionConfig,
    SampledFunction,
    abel_reconstruct,
    apply_projection,
    inverse_partial_fourier,
    load_sampled,
    partial_fourier,
    sample,
    save_sampled,
    twisted_convolve,
    twisted_convolve_direct,
    twisted_convolve_fast,
    write_slice_csv,
)
from steptwo.verify import gaussian_sample

SMALL = Grid(1, 1, 6.0, 64, 12.0, 64)


@pytest.fixture(scope="module")
def pcfg():
    return ProjectionConfig()


def bump(y, t, c=(0.3, -0.2), c0=0.5):
    return np.exp(-np.sum((y - np.array(c)) ** 2, -1) - 0.5 * (t[..., 0] - c0) ** 2) * (1 + 0.3j * y[..., 0])


def test_grid_layout():
    g = Grid(1, 1, 6.0, 128, 12.0, 256)
    assert g.h == pytest.approx(12 / 128) and g.ht == pytest.approx(24 / 256)
    assert g.y_axis[64] == 0.0 and g.t_axis[128] == 0.0
    assert np.min(np.abs(g.tau_axis)) == pytest.approx(0.5 * g.dtau)
    assert g.dtau * g.ht * g.t_points == pytest.approx(2 * np.pi)
    with pytest.raises(GridMismatch):
        Grid(1, 1, 6.0, 100, 12.0, 256)


def test_partial_fourier_gaussian():
    g = Grid(1, 1, 2.0, 4, 12.0, 256)
    f = sample(g, lambda y, t: np.exp(-0.5 * t[..., 0] ** 2) + 0 * y[..., 0])
    F = partial_fourier(f)
    want = np.sqrt(2 * np.pi) * np.exp(-0.5 * g.tau_axis ** 2)
    assert np.max(np.abs(F.values[1, 2] - want)) < 1e-8


def test_round_trip_and_plancherel(rng):
    vals = rng.standard_normal(SMALL.shape) + 1j * rng.standard_normal(SMALL.shape)
    f = SampledFunction(SMALL, vals)
    F = partial_fourier(f)
    back = inverse_partial_fourier(F)
    assert np.max(np.abs(back.values - vals)) < 1e-10 * np.max(np.abs(vals))
    assert F.norm() ** 2 / (2 * np.pi) == pytest.approx(f.norm() ** 2, rel=1e-12)


def test_modulation_shifts_tau():
    f = sample(SMALL, bump)
    s = 3
    tau_s = s * SMALL.dtau
    g = sample(SMALL, lambda y, t: bump(y, t) * np.exp(1j * tau_s * t[..., 0]))
    Ff, Fg = partial_fourier(f).values, partial_fourier(g).values
    assert np.allclose(Fg, np.roll(Ff, s, axis=-1), atol=1e-12 * np.abs(Ff).max())


def test_space_errors(pcfg):
    f = sample(SMALL, bump)
    F = partial_fourier(f)
    with pytest.raises(WrongSpace):
        partial_fourier(F)
    with pytest.raises(WrongSpace):
        inverse_partial_fourier(f)
    with pytest.raises(WrongSpace):
        apply_projection(None, pcfg, F, 0)
    with pytest.raises(WrongSpace):
        SampledFunction(SMALL, f.values, "tau")
    with pytest.raises(GridMismatch):
        SampledFunction(SMALL, np.zeros((3, 3, 3)))
    with pytest.raises(GridMismatch):
        f - sample(SMALL.with_t(12.0, 32), bump)


def test_projection_errors(h1, pcfg):
    f = sample(SMALL, bump)
    with pytest.raises(RNotInRange):
        abel_reconstruct(h1, pcfg, f, 1.0)
    with pytest.raises(DegreeCapExceeded):
        apply_projection(h1, pcfg, f, 61)
    with pytest.raises(DegreeCapExceeded):
        abel_reconstruct(h1, pcfg, f, 0.5, 61)


def test_tau_zero_is_ordinary_convolution(h1, rng):
    N, h = 16, 0.3
    f = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    q = rng.standard_normal((2 * N, 2 * N))
    out = twisted_convolve(h1, f, q, [0.0], h, "direct")
    full = convolve2d(f, q)
    assert np.allclose(out, h * h * full[N:2 * N, N:2 * N], atol=1e-12)


@pytest.mark.parametrize("b", [0.0, 0.7, -2.3])
def test_fast_matches_direct(h1, rng, b):
    N, h = 16, 0.25
    f = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    q = rng.standard_normal((2 * N, 2 * N)) + 1j * rng.standard_normal((2 * N, 2 * N))
    tau = b  # B^tau = tau [[0,-1],[1,0]] on H1
    direct = twisted_convolve_direct(h1, f, q, [tau], h)
    fast = twisted_convolve_fast(b, f, q, h)
    assert np.max(np.abs(fast - direct)) < 1e-10 * np.max(np.abs(direct))


def test_young_inequality(h1, rng):
    N, h = 16, 0.3
    f = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    g = rng.standard_normal((N, N))
    out = twisted_convolve(h1, f, g, [1.3], h)
    l2 = lambda a: np.sqrt(np.sum(np.abs(a) ** 2) * h * h)
    assert l2(out) <= np.sum(np.abs(g)) * h * h * l2(f) * (1 + 1e-12)


def _q_slices(G, grid, tau, ms):
    Y = grid.y_mesh()
    return [q_m(G, m, Y.reshape(-1, 2), [tau]).reshape(grid.y_shape) for m in ms]


def test_twisted_orthogonality_small(h1):
    g = Grid(1, 1, 8.0, 128, 12.0, 64)
    qs = _q_slices(h1, g, 1.0, range(3))
    l2 = lambda a: np.sqrt(np.sum(np.abs(a) ** 2)) * g.h
    for a in range(3):
        for b in range(3):
            c = twisted_convolve(h1, qs[a], qs[b], [1.0], g.h)
            ref = qs[a] if a == b else 0
            assert l2(c - ref) / l2(qs[a]) < 1e-6


def test_associativity(h1):
    g = Grid(1, 1, 8.0, 64, 12.0, 64)
    tau = 0.8
    Y = g.y_mesh()
    a, b, c = (np.exp(-np.sum((Y - np.array(ctr)) ** 2, -1) + 1j * Y[..., 1] * w)
               for ctr, w in [((0.5, 0), 0.3), ((-0.3, 0.4), -0.7), ((0, -0.6), 1.1)])
    left = twisted_convolve(h1, twisted_convolve(h1, a, b, [tau], g.h), c, [tau], g.h)
    right = twisted_convolve(h1, a, twisted_convolve(h1, b, c, [tau], g.h), [tau], g.h)
    assert np.max(np.abs(left - right)) < 1e-8 * np.max(np.abs(left))


def test_self_adjoint_and_bessel(h1, pcfg):
    f = sample(SMALL, bump)
    g = sample(SMALL, lambda y, t: bump(y, t, (-0.4, 0.1), -0.3))
    for m in (0, 1, 2):
        Pf, Pg = apply_projection(h1, pcfg, f, m), apply_projection(h1, pcfg, g, m)
        assert Pf.inner(g) == pytest.approx(f.inner(Pg), rel=1e-10)
        assert Pf.norm() <= f.norm()


def test_eigenfunction_reproduction(h1, pcfg):
    g = Grid(1, 1, 8.0, 128, 12.0, 64)
    k0 = 36
    tau0 = g.tau_axis[k0]
    for k in (0, 1, 2):
        f = sample(g, lambda y, t: np.exp(1j * tau0 * t[..., 0]) * exp_laguerre(h1, [k], [0], y, [tau0]))
        F = partial_fourier(f).values
        # e^{i tau0 t} on the grid transforms to a single tau node
        assert np.sum(np.abs(F[..., k0]) ** 2) > (1 - 1e-12) * np.sum(np.abs(F) ** 2)
        for m in range(4):
            P = apply_projection(h1, pcfg, f, m)
            if m == k:
                assert (P - f).norm() < 1e-12 * f.norm()
            else:
                assert P.norm() < 1e-12 * f.norm()


def test_abel_modes(h1, pcfg):
    f = gaussian_sample(SMALL)
    P0 = apply_projection(h1, pcfg, f, 0)
    assert (abel_reconstruct(h1, pcfg, f, 0.0) - P0).norm() < 1e-14 * f.norm()
    assert (abel_reconstruct(h1, pcfg, f, 0.0, 0) - P0).norm() < 1e-14 * f.norm()
    gen = abel_reconstruct(h1, pcfg, f, 0.5)
    part = abel_reconstruct(h1, pcfg, f, 0.5, 40)
    assert (gen - part).norm() < 1e-8 * f.norm()
    direct = sum((0.5 ** m * apply_projection(h1, pcfg, f, m).values for m in range(4)))
    part3 = abel_reconstruct(h1, pcfg, f, 0.5, 3)
    assert np.max(np.abs(part3.values - direct)) < 1e-12 * np.max(np.abs(direct))


def test_workers_deterministic(h1):
    f = sample(SMALL, bump)
    a = apply_projection(h1, ProjectionConfig(workers=1), f, 1)
    b = apply_projection(h1, ProjectionConfig(workers=4), f, 1)
    assert np.array_equal(a.values, b.values)


def test_container_round_trip(tmp_path, rng):
    vals = (rng.standard_normal(SMALL.shape) + 1j * rng.standard_normal(SMALL.shape)).astype(np.complex64)
    f = SampledFunction(SMALL, vals.astype(complex))
    save_sampled(f, tmp_path / "f.bin")
    g = load_sampled(tmp_path / "f.bin")
    assert g.grid == SMALL and g.space == "yt"
    assert np.array_equal(g.values, f.values)
    F = partial_fourier(f)
    save_sampled(F, tmp_path / "F.bin")
    assert load_sampled(tmp_path / "F.bin").space == "ytau"
    (tmp_path / "bad.bin").write_bytes(b"nope")
    with pytest.raises(GridMismatch):
        load_sampled(tmp_path / "bad.bin")


def test_slice_csv(tmp_path):
    f = sample(SMALL, bump)
    write_slice_csv(f, tmp_path / "s.csv", (32,))
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "a,b,re,im" and len(lines) == 1 + 64 * 64
    a, b, re, im = map(float, lines[1 + 64 * 10 + 7].split(","))
    assert complex(re, im) == f.values[10, 7, 32]
