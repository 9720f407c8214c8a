"""Laguerre polynomials, Laguerre functions and the kernels Q_m."""

import itertools

import numpy as np
from scipy.special import gammaln

from .errors import DegreeCapExceeded, DimensionMismatch, NegativeArgument, NegativeDegree, ZeroTau
from .spectral import script_b, spectral_data

M_CAP = 60


def _check_degree(m):
    if m < 0:
        raise NegativeDegree(f"degree must be >= 0, got {m}")
    if m > M_CAP:
        raise DegreeCapExceeded(f"degree {m} exceeds cap {M_CAP}")


def laguerre_table(m, alpha, x):
    """Array of L_0^{(alpha)}(x), ..., L_m^{(alpha)}(x) stacked on axis 0."""
    _check_degree(m)
    x = np.asarray(x)
    out = np.empty((m + 1,) + x.shape, dtype=np.result_type(x, float))
    out[0] = 1.0
    if m >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, m):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def laguerre_poly(m, alpha, x):
    """L_m^{(alpha)}(x) by the three-term recurrence."""
    _check_degree(m)
    x = np.asarray(x)
    prev = np.ones_like(x, dtype=np.result_type(x, float))
    if m == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def laguerre_l(k, p, sigma):
    """Orthonormal Laguerre function l_k^{(p)} on [0, inf)."""
    if k < 0 or p < 0:
        raise NegativeDegree("k and p must be nonnegative")
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise NegativeArgument("sigma must be >= 0")
    c = np.exp(0.5 * (gammaln(k + 1) - gammaln(k + p + 1)))
    return c * laguerre_poly(k, p, sigma) * sigma ** (0.5 * p) * np.exp(-0.5 * sigma)


def multi_indices(n, m):
    """All k in Z_{>=0}^n with |k| = m, in colexicographic order."""
    ks = [
        k for k in itertools.product(range(m + 1), repeat=n) if sum(k) == m
    ]
    return sorted(ks, key=lambda k: k[::-1])


def exp_laguerre(G, k, p, y, tau, spec=None):
    """Exponential Laguerre function of multi-indices k, p at points y (..., 2n)."""
    k = np.asarray(k, dtype=int)
    p = np.asarray(p, dtype=int)
    if len(k) != G.n or len(p) != G.n:
        raise DimensionMismatch("multi-index length must equal n")
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    tnorm = np.linalg.norm(tau)
    if tnorm == 0:
        raise ZeroTau("tau must be nonzero")
    spec = spec or spectral_data(G, tau)
    yt = np.asarray(y, dtype=float) @ spec.O  # tau-coordinates, shape (..., 2n)
    mu_dot = spec.mu / tnorm
    val = np.ones(yt.shape[:-1], dtype=complex)
    for j in range(G.n):
        a, b = yt[..., 2 * j], yt[..., 2 * j + 1]
        r2 = mu_dot[j] * (a * a + b * b)
        pj = abs(int(p[j]))
        sgn = (-1.0) ** pj if p[j] < 0 else 1.0
        plane = (2 * tnorm / np.pi) * sgn * laguerre_l(int(k[j]), pj, 2 * tnorm * r2)
        if p[j] != 0:
            # the angle of sqrt(mu) * y_j equals the angle of y_j
            plane = plane * np.exp(1j * p[j] * np.arctan2(b, a))
        val *= mu_dot[j] * plane
    return val


def q_m(G, m, y, tau, sb=None):
    """Q_m(y, tau) = (2^n det_sqrt / pi^n) e^{-s} L_m^{(n-1)}(2 s), s = <B^tau y, y>."""
    _check_degree(m)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.linalg.norm(tau) == 0:
        raise ZeroTau("tau must be nonzero")
    SB, det = sb if sb is not None else script_b(G, tau)
    y = np.asarray(y, dtype=float)
    s = np.einsum("...k,kl,...l->...", y, SB, y)
    n = G.n
    return (2.0 ** n * det / np.pi ** n) * np.exp(-s) * laguerre_poly(m, n - 1, 2 * s)


def q_generating(G, R, y, tau, sb=None):
    """Closed form of sum_m R^m Q_m(y, tau)."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    SB, det = sb if sb is not None else script_b(G, tau)
    y = np.asarray(y, dtype=float)
    s = np.einsum("...k,kl,...l->...", y, SB, y)
    n = G.n
    return (2.0 ** n * det / np.pi ** n) * (1 - R) ** (-n) * np.exp(-s * (1 + R) / (1 - R))


def twisted_sublaplacian_fd(G, f, y, tau, h, spec=None):
    """Finite-difference twisted sub-Laplacian applied to a callable f at y.

    Uses -1/4 sum_j (Y_j)^2 over the orthonormal frame O(tau), with
    Y_v f = d_v f + 2i <y, B^tau v> f and fourth-order central differences.
    """
    spec = spec or spectral_data(G, tau)
    y = np.asarray(y, dtype=float)
    Bt = spec.B_tau
    f0 = f(y)
    out = np.zeros_like(f0, dtype=complex)
    for v in spec.O.T:
        fs = {s: f(y + s * h * v) for s in (-2, -1, 1, 2)}
        d1 = (-fs[2] + 8 * fs[1] - 8 * fs[-1] + fs[-2]) / (12 * h)
        d2 = (-fs[2] + 16 * fs[1] - 30 * f0 + 16 * fs[-1] - fs[-2]) / (12 * h * h)
        c = y @ (Bt @ v)
        out += d2 + 4j * c * d1 - 4 * c * c * f0
    return -0.25 * out


def joint_eigenvalue(G, k, tau, spec=None):
    spec = spec or spectral_data(G, tau)
    return float(np.sum(spec.mu * (2 * np.asarray(k) + 1)))
