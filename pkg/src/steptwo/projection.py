"""Grid machinery: partial Fourier transform in t, twisted convolution in y,
the projections P_m and Abel reconstruction.

Grids are uniform with an even number of points per axis:
    y_i = (i - N/2) h,           h = 2 * y_extent / N
    t_l = (l - N_t/2) h_t,       h_t = 2 * t_extent / N_t
    tau_k = (k - N_t/2 + 1/2) pi / t_extent
The half-offset tau grid never contains tau = 0, where B^tau degenerates.
"""

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeCapExceeded, GridMismatch, RNotInRange, WrongSpace
from .laguerre import laguerre_poly
from .spectral import b_tau, script_b

SPACES = ("yt", "ytau")
ENV_WORKERS = "STEPTWO_WORKERS"
ROW_CUT = 1e-18


@dataclass(frozen=True)
class ProjectionConfig:
    """Engine settings: worker threads, slice pruning and convolution path."""
    workers: int = None
    prune: float = 1e-14
    method: str = "auto"
    m_max: int = 60

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in ("workers", "prune", "method", "m_max") if k in d})

    def to_dict(self):
        return {"workers": self.workers, "prune": self.prune, "method": self.method,
                "m_max": self.m_max}


@dataclass(frozen=True)
class Grid:
    n: int
    r: int
    y_extent: float = 6.0
    y_points: int = 128
    t_extent: float = 12.0
    t_points: int = 256

    def __post_init__(self):
        for p in (self.y_points, self.t_points):
            if p < 2 or p & (p - 1):
                raise GridMismatch(f"points per axis must be a power of two, got {p}")

    @property
    def h(self):
        return 2 * self.y_extent / self.y_points

    @property
    def ht(self):
        return 2 * self.t_extent / self.t_points

    @property
    def dtau(self):
        return np.pi / self.t_extent

    @property
    def y_axis(self):
        return (np.arange(self.y_points) - self.y_points // 2) * self.h

    @property
    def t_axis(self):
        return (np.arange(self.t_points) - self.t_points // 2) * self.ht

    @property
    def tau_axis(self):
        return (np.arange(self.t_points) - self.t_points // 2 + 0.5) * self.dtau

    @property
    def shape(self):
        return (self.y_points,) * (2 * self.n) + (self.t_points,) * self.r

    @property
    def y_shape(self):
        return (self.y_points,) * (2 * self.n)

    def y_mesh(self):
        ax = self.y_axis
        return np.stack(np.meshgrid(*([ax] * (2 * self.n)), indexing="ij"), axis=-1)

    def t_mesh(self, values=None):
        ax = self.t_axis if values is None else values
        return np.stack(np.meshgrid(*([ax] * self.r), indexing="ij"), axis=-1)

    def cell(self, space):
        dy = self.h ** (2 * self.n)
        return dy * (self.ht ** self.r if space == "yt" else self.dtau ** self.r)

    def with_t(self, t_extent, t_points):
        return Grid(self.n, self.r, self.y_extent, self.y_points, t_extent, t_points)

    def to_dict(self):
        return {
            "y_extent": self.y_extent,
            "y_points": self.y_points,
            "t_extent": self.t_extent,
            "t_points": self.t_points,
        }


@dataclass(frozen=True)
class SampledFunction:
    grid: Grid
    values: np.ndarray
    space: str = "yt"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.space not in SPACES:
            raise WrongSpace(f"unknown space tag {self.space!r}")
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise GridMismatch(f"values shape {v.shape} does not match grid {self.grid.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell(self.space)))

    def inner(self, other):
        if other.grid != self.grid or other.space != self.space:
            raise GridMismatch("inner product needs matching grids and spaces")
        return complex(np.vdot(other.values, self.values) * self.grid.cell(self.space))

    def __sub__(self, other):
        if other.grid != self.grid or other.space != self.space:
            raise GridMismatch("difference needs matching grids and spaces")
        return SampledFunction(self.grid, self.values - other.values, self.space)


def sample(grid, func):
    """Sample func(y, t) with y (..., 2n), t (..., r) on the (y, t) grid."""
    Y = grid.y_mesh()
    T = grid.t_mesh()
    ny, nt = 2 * grid.n, grid.r
    Yb = Y.reshape(Y.shape[:-1] + (1,) * nt + (ny,))
    Tb = T.reshape((1,) * ny + T.shape[:-1] + (nt,))
    return SampledFunction(grid, np.broadcast_to(func(Yb, Tb), grid.shape).copy(), "yt")


# ---------------------------------------------------------------- Fourier in t

def _phases(N):
    # tau_k t_l = (2 pi / N)(k - N/2 + 1/2)(l - N/2)
    k = np.arange(N)
    pre = np.exp(-2j * np.pi * (0.5 - N / 2) * k / N)      # on l
    post = np.exp(-2j * np.pi * k * (-N / 2) / N)          # on k
    const = np.exp(-2j * np.pi * (0.5 - N / 2) * (-N / 2) / N)
    return pre, post, const


def partial_fourier(f):
    """f~(y, tau) = int e^{-i tau.t} f(y, t) dt as a Riemann sum on the grid."""
    if f.space != "yt":
        raise WrongSpace("partial_fourier expects a (y, t) function")
    g = f.grid
    N = g.t_points
    pre, post, const = _phases(N)
    v = f.values
    for ax in range(2 * g.n, 2 * g.n + g.r):
        shape = [1] * v.ndim
        shape[ax] = N
        v = np.fft.fft(v * pre.reshape(shape), axis=ax) * (post * const).reshape(shape)
    return SampledFunction(g, v * g.ht ** g.r, "ytau")


def inverse_partial_fourier(F):
    """f(y, t) = (2 pi)^{-r} int e^{i tau.t} f~(y, tau) dtau, exact inverse of the above."""
    if F.space != "ytau":
        raise WrongSpace("inverse_partial_fourier expects a (y, tau) function")
    g = F.grid
    N = g.t_points
    pre, post, const = _phases(N)
    v = F.values
    for ax in range(2 * g.n, 2 * g.n + g.r):
        shape = [1] * v.ndim
        shape[ax] = N
        v = np.fft.ifft(v * np.conj(post * const).reshape(shape), axis=ax)
        v = v * np.conj(pre).reshape(shape)
    return SampledFunction(g, v / g.ht ** g.r, "yt")


# ---------------------------------------------------------------- twisted convolution

def _kernel_box(grid):
    """Offsets x_j = (j - N) h, j < 2N: every difference y_i - y_k lies in it."""
    N = grid.y_points
    return (np.arange(2 * N) - N) * grid.h


def twisted_convolve_direct(G, f, q, tau, h):
    """Reference O(N^{4n}) twisted convolution on one y-slice.

    f has shape (N,)*2n on the y grid; q has shape (2N,)*2n sampled at the
    offsets of ``_kernel_box``.  Returns h^{2n} sum_x e^{-2i y^T B^tau x} f(y - x) q(x).
    """
    N = f.shape[0]
    d = f.ndim
    ax = (np.arange(N) - N // 2) * h
    Y = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), -1).reshape(-1, d)
    idx = np.stack(np.meshgrid(*([np.arange(N)] * d), indexing="ij"), -1).reshape(-1, d)
    Bt = b_tau(G, np.atleast_1d(tau))
    ff = f.reshape(-1)
    out = np.zeros(len(Y), dtype=complex)
    for a, (yi, ii) in enumerate(zip(Y, idx)):
        # x_j with y - x_j on the grid: j = i - k + N for every grid index k
        j = ii[None, :] - idx + N
        x = (j - N) * h
        ph = np.exp(-2j * (x @ (Bt.T @ yi)))
        out[a] = np.sum(ph * ff * q[tuple(j.T)])
    return (out * h ** d).reshape(f.shape)


def twisted_convolve_fast(b, f, q, h):
    """n = 1 twisted convolution for B^tau = [[0, -b], [b, 0]] via batched FFTs.

    With y^T B x = b (y2 x1 - y1 x2):
        F[i1, i2] = h^2 sum_j1 e^{-2ib y2 x1} sum_j2 e^{2ib y1 x2} f[i1-j1+N, i2-j2+N] q[j1, j2]
    The inner sum is a circular convolution of length 2N for every (i1, j1).
    Rows of q below ROW_CUT relative to its peak are skipped.
    """
    N = f.shape[0]
    M = 2 * N
    y = (np.arange(N) - N // 2) * h
    x = (np.arange(M) - N) * h
    rows = np.flatnonzero(np.max(np.abs(q), axis=1) > ROW_CUT * np.max(np.abs(q)))
    fpad = np.zeros((N, M), dtype=complex)
    fpad[:, :N] = f
    Ff = np.fft.fft(fpad, axis=1)
    out = np.zeros((N, N), dtype=complex)
    mod = np.exp(2j * b * np.outer(y, x))          # (i1, j2)
    for j1 in rows:
        i1 = np.arange(N)
        rr = i1 - j1 + N
        ok = (rr >= 0) & (rr < N)
        if not np.any(ok):
            continue
        i1, rr = i1[ok], rr[ok]
        Fq = np.fft.fft(q[j1][None, :] * mod[i1], axis=1)
        c = np.fft.ifft(Ff[rr] * Fq, axis=1)[:, N:]
        out[i1] += np.exp(-2j * b * x[j1] * y)[None, :] * c
    return out * h * h


def twisted_convolve(G, f, g, tau, h, method="auto"):
    """Twisted convolution of two y-slices sampled on the same grid.

    ``g`` may be given on the same N-point grid (it is then zero-padded to the
    difference box) or already on the 2N-point difference box.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    N = f.shape[0]
    if g.shape == f.shape:
        pad = np.zeros((2 * N,) * f.ndim, dtype=complex)
        pad[(slice(N // 2, N // 2 + N),) * f.ndim] = g
        g = pad
    if g.shape != (2 * N,) * f.ndim or f.ndim != 2 * G.n:
        raise GridMismatch("slices must share the y grid")
    if method == "auto":
        method = "fast" if G.n == 1 else "direct"
    if method == "fast":
        if G.n != 1:
            raise GridMismatch("the FFT path is implemented for n = 1")
        b = float(b_tau(G, np.atleast_1d(tau))[1, 0])
        return twisted_convolve_fast(b, f, g, h)
    return twisted_convolve_direct(G, f, g, tau, h)


# ---------------------------------------------------------------- projections

def _kernel_slice(G, grid, tau, kind, m=0, R=0.0, M=None):
    """Q-type kernel on the 2N difference box for one tau node."""
    x = _kernel_box(grid)
    X = np.stack(np.meshgrid(*([x] * (2 * G.n)), indexing="ij"), -1)
    SB, det = script_b(G, np.atleast_1d(tau))
    s = np.einsum("...k,kl,...l->...", X, SB, X)
    n = G.n
    pref = 2.0 ** n * det / np.pi ** n
    if kind == "q":
        return pref * np.exp(-s) * laguerre_poly(m, n - 1, 2 * s)
    if kind == "generating":
        return pref * (1 - R) ** (-n) * np.exp(-s * (1 + R) / (1 - R))
    if kind == "partial":
        e = np.exp(-s)
        acc = np.zeros_like(s)
        for k in range(M + 1):
            acc += R ** k * laguerre_poly(k, n - 1, 2 * s)
        return pref * e * acc
    raise ValueError(kind)


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get(ENV_WORKERS, "1")))


def _apply_kernel(G, cfg, f, kernel_args):
    """Fiberwise twisted convolution of f~ with a Q-type kernel, back to (y, t)."""
    grid = f.grid
    Ft = partial_fourier(f)
    vals = Ft.values
    nyd = 2 * G.n
    taus = grid.tau_axis
    tau_idx = list(np.ndindex(*((grid.t_points,) * G.r)))
    norms = np.array([np.linalg.norm(vals[(Ellipsis,) + k]) for k in tau_idx])
    keep = [k for k, nv in zip(tau_idx, norms) if nv > cfg.prune * norms.max()]

    def work(k):
        tau = taus[list(k)]
        q = _kernel_slice(G, grid, tau, *kernel_args)
        return k, twisted_convolve(G, vals[(Ellipsis,) + k], q, tau, grid.h, cfg.method)

    out = np.zeros_like(vals)
    nw = _workers(cfg.workers)
    if nw == 1:
        results = map(work, keep)
    else:
        pool = ThreadPoolExecutor(nw)
        results = pool.map(work, keep)
    # ordered reduction: results arrive in the order of ``keep``
    for k, slab in results:
        out[(Ellipsis,) + k] = slab
    if nw > 1:
        pool.shutdown()
    assert out.shape[:nyd] == grid.y_shape
    return inverse_partial_fourier(SampledFunction(grid, out, "ytau"))


def apply_projection(G, cfg, f, m):
    """P_m f: f~(., tau) *_tau Q_m(., tau) on every tau node, then back to (y, t).

    Slices whose norm is below cfg.prune times the largest one are set to zero.
    """
    if f.space != "yt":
        raise WrongSpace("apply_projection expects a (y, t) function")
    if m > cfg.m_max:
        raise DegreeCapExceeded(f"degree {m} exceeds configured m_max {cfg.m_max}")
    return _apply_kernel(G, cfg, f, ("q", m))


def abel_reconstruct(G, cfg, f, R, M=None):
    """sum_{m<=M} R^m P_m f, or the full Abel sum when M is None.

    The kernels are summed before the convolution, so any M costs one pass.
    """
    if not 0 <= R < 1:
        raise RNotInRange(f"R must lie in [0, 1), got {R}")
    if M is None:
        args = ("generating", 0, R)
    else:
        if M > cfg.m_max:
            raise DegreeCapExceeded(f"M={M} exceeds configured m_max {cfg.m_max}")
        args = ("partial", 0, R, int(M))
    return _apply_kernel(G, cfg, f, args)


# ---------------------------------------------------------------- I/O

_MAGIC = b"STPW"


def save_sampled(f, path):
    """Binary container: header of dims, extents and space tag, then complex64 pairs."""
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<4i", g.n, g.r, g.y_points, g.t_points))
        fh.write(struct.pack("<2d", g.y_extent, g.t_extent))
        fh.write(struct.pack("<i", SPACES.index(f.space)))
        fh.write(np.ascontiguousarray(f.values, dtype="<c8").tobytes())


def load_sampled(path):
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise GridMismatch(f"{path} is not a sampled-function container")
        n, r, ny, nt = struct.unpack("<4i", fh.read(16))
        ye, te = struct.unpack("<2d", fh.read(16))
        (tag,) = struct.unpack("<i", fh.read(4))
        grid = Grid(n, r, ye, ny, te, nt)
        data = np.frombuffer(fh.read(), dtype="<c8")
    if data.size != int(np.prod(grid.shape)):
        raise GridMismatch("payload size does not match header")
    return SampledFunction(grid, data.reshape(grid.shape).astype(complex), SPACES[tag])


def write_slice_csv(f, path, index):
    """CSV of a 2D slice; ``index`` fixes every axis except the first two."""
    v = f.values[(slice(None), slice(None)) + tuple(index)]
    g = f.grid
    ax0 = g.y_axis
    ax1 = g.y_axis if 2 * g.n >= 2 else (g.t_axis if f.space == "yt" else g.tau_axis)
    with open(path, "w") as fh:
        fh.write("a,b,re,im\n")
        for i, a in enumerate(ax0):
            for j, b in enumerate(ax1):
                row = (float(a), float(b), float(v[i, j].real), float(v[i, j].imag))
                fh.write(",".join(map(repr, row)) + "\n")
