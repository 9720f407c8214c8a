"""Spectral projection kernels P_m and the Abel-summed kernel.

Three evaluations of P_m are provided:

* ``p_m``            sphere quadrature of the closed-form integrand,
* ``p_m_continued``  the same integral with the polar variable moved onto the
                     complex arc L_eps, which stays finite at y = 0,
* ``p_m_oracle``     sphere quadrature of the radial Laplace-type integral,
                     kept independent of the closed form and used only as a
                     cross-check.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    OriginPoint,
    QuadratureNotConverged,
    RNotInRange,
    SpectrumEscapedContour,
    YZero,
)
from .laguerre import laguerre_poly
from .quadrature import (
    align_points,
    contour_nodes,
    householder_to,
    polar_sinh_nodes,
    sphere_rule,
)
from .spectral import script_b, script_b_batch_complex


@dataclass(frozen=True)
class KernelConfig:
    epsilon: float = 0.1
    sphere_n: int = 128          # azimuthal resolution of the sphere rule
    oracle_sphere_n: int = 96
    oracle_rotation_seed: int = 20240611
    radial_nodes: int = 96       # Gauss-Laguerre order in the oracle
    contour_n: int = 64          # initial number of nodes on L_eps
    inner_n: int = 32            # resolution of the S^{r-2} rule
    m_max: int = 60
    rtol: float = 1e-10          # refinement stopping tolerance
    max_refine: int = 6
    max_eps_halvings: int = 4

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def to_dict(self):
        return asdict(self)


def c_mj(n, r, m, j):
    if j > m:
        return 0.0
    return (
        (-1) ** m
        * 2.0 ** (n - r)
        / np.pi ** (n + r)
        * math.comb(r, j)
        * math.factorial(m + n + r - 1 - j)
        / math.factorial(m - j)
    )


def _points(G, y, t):
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    single = y.ndim == 1
    Y = np.atleast_2d(y)
    T = np.atleast_2d(t)
    if Y.shape[1] != 2 * G.n or T.shape[1] != G.r or len(Y) != len(T):
        raise DimensionMismatch("point arrays do not match the group dimensions")
    return Y, T, single


def _ms(m):
    ms = np.atleast_1d(np.asarray(m, dtype=int))
    return ms, np.ndim(m) == 0


def _shape_out(vals, single_m, single_pt):
    if single_pt:
        vals = vals[:, 0]
    if single_m:
        vals = vals[0]
    return vals


def _combine(G, ms, ratio, inv_bm, weight):
    """sum_j C_{m,j} sum_nodes weight * ratio^{m-j} * inv_bm, for each m.

    ``ratio`` = (s + i t.tau)/(s - i t.tau) and ``inv_bm`` = (s - i t.tau)^{-(n+r)};
    node axes are all trailing axes after the point axis.
    """
    n, r = G.n, G.r
    axes = tuple(range(1, ratio.ndim))
    mmax = int(ms.max())
    base = weight * inv_bm
    powers = [base]
    for _ in range(mmax):
        powers.append(powers[-1] * ratio)
    sums = [np.sum(p, axis=axes) for p in powers]
    abs_sums = [np.sum(np.abs(p), axis=axes) for p in powers]
    out = np.zeros((len(ms), ratio.shape[0]), dtype=complex)
    mass = np.zeros((len(ms), ratio.shape[0]))
    for a, m in enumerate(ms):
        for j in range(min(r, m) + 1):
            c = c_mj(n, r, m, j)
            out[a] += c * sums[m - j]
            mass[a] += abs(c) * abs_sums[m - j]
    return out, mass


_RULE_CACHE = {}


def _sphere_data(G, N, seed=None):
    key = (G.fingerprint(), N, seed)
    if key not in _RULE_CACHE:
        rule = sphere_rule(G.r, N, seed)
        SB, det = script_b(G, rule.nodes)
        _RULE_CACHE[key] = (rule, SB, det)
    return _RULE_CACHE[key]


def _quad_forms(Y, SB):
    """<SB y, y> for every y in Y (P, d) and every matrix in SB (..., d, d).

    Returns shape (P, ...).  Written as one matrix product of y (x) y against
    the flattened matrices.
    """
    d = Y.shape[-1]
    yy = (Y[:, :, None] * Y[:, None, :]).reshape(len(Y), d * d)
    flat = SB.reshape(-1, d * d)
    return (yy @ flat.T).reshape((len(Y),) + SB.shape[:-2])


def _chunks(P, per_point, budget=2_000_000):
    step = max(1, budget // max(per_point, 1))
    for a in range(0, P, step):
        yield slice(a, min(P, a + step))


NOISE = 1e3 * np.finfo(float).eps


def _refine(evaluate, start, rtol, max_refine, what):
    """Double the resolution until two successive evaluations agree.

    ``evaluate(N)`` returns (values, mass), mass being the sum of absolute
    values of the summed terms; it sets the rounding floor of the comparison,
    which matters when the integrand is much larger than the integral.
    """
    N = start
    prev, _ = evaluate(N)
    for _ in range(max_refine):
        N *= 2
        cur, mass = evaluate(N)
        if np.all(np.abs(cur - prev) <= rtol * np.abs(cur) + NOISE * mass):
            return cur, N
        prev = cur
    raise QuadratureNotConverged(f"{what}: no agreement after {max_refine} refinements")


# ---------------------------------------------------------------- sphere form

def _node_blocks(G, Y, T, N, Na, kind, seed=None, cost=8):
    """Yield (slice, s, t.tau, weight*det) over chunks of points.

    r <= 2 uses one fixed rule for all points.  For r >= 3 each point gets a
    polar rule whose axis is t/|t|, which puts the near-singular band
    t.tau ~ 0 on the polar coordinate; ``kind`` selects one of two distinct
    node families so that the oracle does not share nodes with p_m.
    """
    if G.r <= 2:
        rule, SB, det = _sphere_data(G, N, seed)
        wd = rule.weights * det
        for sl in _chunks(len(Y), len(rule.weights) * cost):
            yield sl, _quad_forms(Y[sl], SB), T[sl] @ rule.nodes.T, wd
        return
    tn = np.linalg.norm(T, axis=1)
    t_hat = T / np.where(tn > 0, tn, 1.0)[:, None]
    t_hat[tn == 0] = np.eye(G.r)[0]
    # t and -t share one axis, so the rules for (y, t) and (-y, -t) coincide
    # and conjugate symmetry holds to rounding
    lead = np.argmax(np.abs(t_hat), axis=1)
    sgn = np.sign(t_hat[np.arange(len(t_hat)), lead])
    t_hat *= sgn[:, None]
    # distance scale of the near-singular band around t.tau = 0
    mu_lo = np.sqrt(G.eig_range[0])
    delta = mu_lo * np.sum(Y * Y, axis=1) / np.where(tn > 0, tn, 1.0)
    if kind == "cos":
        delta = 1.5 * delta
    K = N * len(sphere_rule(G.r - 1, Na).weights)
    for sl in _chunks(len(Y), K * max(cost, 2 * G.n * G.n)):
        local, w = polar_sinh_nodes(G.r, N, Na, delta[sl])
        nodes = align_points(local, t_hat[sl])
        SB, det = script_b(G, nodes.reshape(-1, G.r))
        SB = SB.reshape(nodes.shape[:2] + SB.shape[-2:])
        d = 2 * G.n
        yy = (Y[sl, :, None] * Y[sl, None, :]).reshape(-1, d * d, 1)
        s = (SB.reshape(nodes.shape[:2] + (d * d,)) @ yy)[..., 0]
        # t.tau = |t| times the polar coordinate
        tt = (sgn[sl] * tn[sl])[:, None] * local[..., 0]
        yield sl, s, tt, w * det.reshape(nodes.shape[:2])


def _pm_sphere(G, ms, Y, T, N, Na=32):
    out = np.empty((len(ms), len(Y)), dtype=complex)
    mass = np.empty((len(ms), len(Y)))
    for sl, s, tt, wd in _node_blocks(G, Y, T, N, Na, "theta", cost=ms.max() + 3):
        bm = s - 1j * tt
        ratio = (s + 1j * tt) / bm
        out[:, sl], mass[:, sl] = _combine(G, ms, ratio, bm ** -(G.n + G.r), wd)
    return out, mass


def p_m(G, cfg, m, y, t, return_level=False):
    """P_m(y, t) by sphere quadrature; y must be nonzero."""
    ms, single_m = _ms(m)
    Y, T, single = _points(G, y, t)
    if np.any(np.linalg.norm(Y, axis=1) == 0):
        raise YZero("p_m needs y != 0; use p_m_continued")
    if G.r == 1:
        vals, N = _pm_sphere(G, ms, Y, T, 2)[0], 2
    else:
        start = cfg.sphere_n if G.r == 2 else cfg.sphere_n // 2
        vals, N = _refine(
            lambda N: _pm_sphere(G, ms, Y, T, N, cfg.inner_n),
            start, cfg.rtol, cfg.max_refine, "p_m",
        )
    out = _shape_out(vals, single_m, single)
    return (out, N) if return_level else out


def p_m_fixed(G, cfg, m, y, t, N, oracle=False):
    """Sphere-form or oracle value at one fixed sphere resolution N, no refinement.

    Used to show that the error against the other forms shrinks as N grows.
    For r = 1 the sphere is two points and N sets the oracle's radial order.
    """
    ms, single_m = _ms(m)
    Y, T, single = _points(G, y, t)
    if G.r == 1:
        if oracle:
            vals = _pm_oracle(G, ms, Y, T, 2, 0, None, N)[0]
        else:
            vals = _pm_sphere(G, ms, Y, T, 2)[0]
    elif oracle:
        vals = _pm_oracle(G, ms, Y, T, N, cfg.inner_n + 8, cfg.oracle_rotation_seed,
                          cfg.radial_nodes)[0]
    else:
        vals = _pm_sphere(G, ms, Y, T, N, cfg.inner_n)[0]
    return _shape_out(vals, single_m, single)


# ---------------------------------------------------------------- oracle

def _pm_oracle(G, ms, Y, T, N, Na, seed, radial_nodes):
    n, r = G.n, G.r
    u, wu = np.polynomial.laguerre.laggauss(radial_nodes)
    keep = wu > 1e-300
    u, wu = u[keep], wu[keep]
    pref = 2.0 ** (n - r) / np.pi ** (n + r)
    out = np.empty((len(ms), len(Y)), dtype=complex)
    mass = np.empty((len(ms), len(Y)))
    for sl, s, tt, wd in _node_blocks(G, Y, T, N, Na, "cos", seed, cost=4):
        a = s - 1j * tt
        # rotate the radial ray onto a^{-1} R_+ so that the exponential is real;
        # the remaining factor is a polynomial, integrated exactly.
        c = 2 * s / a
        acc = np.zeros((len(ms),) + s.shape, dtype=complex)
        for uk, wk in zip(u, wu):
            lag = np.stack([laguerre_poly(int(m), n - 1, c * uk) for m in ms])
            acc += wk * uk ** (n + r - 1) * lag
        acc *= a ** -(n + r)
        out[:, sl] = pref * np.sum(acc * wd, axis=-1)
        mass[:, sl] = pref * np.sum(np.abs(acc * wd), axis=-1)
    return out, mass


def p_m_oracle(G, cfg, m, y, t):
    """Independent evaluation of P_m from the radial integral over |tau|."""
    ms, single_m = _ms(m)
    Y, T, single = _points(G, y, t)
    if np.any(np.linalg.norm(Y, axis=1) == 0):
        raise YZero("p_m_oracle needs y != 0")
    seed = cfg.oracle_rotation_seed
    if G.r == 1:
        vals = _pm_oracle(G, ms, Y, T, 2, 0, None, cfg.radial_nodes)[0]
    else:
        start = cfg.oracle_sphere_n if G.r == 2 else cfg.oracle_sphere_n // 2
        vals, _ = _refine(
            lambda N: _pm_oracle(G, ms, Y, T, N, cfg.inner_n + 8, seed, cfg.radial_nodes),
            start, cfg.rtol, cfg.max_refine, "p_m_oracle",
        )
    return _shape_out(vals, single_m, single)


# ---------------------------------------------------------------- contour form

_CONTOUR_CACHE = {}


def _contour_data(G, t_hat, eps, Nz, inner_n):
    """Complex script B and weights on L_eps x S^{r-2} for one direction t_hat."""
    key = (G.fingerprint(), tuple(np.round(t_hat, 14)), eps, Nz, inner_n)
    if key in _CONTOUR_CACHE:
        return _CONTOUR_CACHE[key]
    r = G.r
    z, dz, opz, omz = contour_nodes(eps, Nz)
    inner = sphere_rule(r - 1, inner_n)
    one_mz2 = opz * omz
    sq = np.sqrt(one_mz2)
    K = len(inner.weights)
    chi = np.empty((len(z), K, r), dtype=complex)
    chi[..., 0] = z[:, None]
    chi[..., 1:] = sq[:, None, None] * inner.nodes[None, :, :]
    H = householder_to(t_hat)
    tau_z = chi @ H.T
    SB, det = script_b_batch_complex(G, tau_z.reshape(-1, r))
    SB = SB.reshape(len(z), K, 2 * G.n, 2 * G.n)
    det = det.reshape(len(z), K)
    wz = dz * one_mz2 ** ((r - 3) / 2)
    weight = wz[:, None] * inner.weights[None, :] * det
    if len(_CONTOUR_CACHE) > 4096:
        _CONTOUR_CACHE.clear()
    _CONTOUR_CACHE[key] = (z, SB, weight)
    return _CONTOUR_CACHE[key]


def _pm_contour_dir(G, ms, Y, tn, t_hat, eps, Nz, inner_n):
    z, SB, weight = _contour_data(G, t_hat, eps, Nz, inner_n)
    out = np.empty((len(ms), len(Y)), dtype=complex)
    mass = np.empty((len(ms), len(Y)))
    for sl in _chunks(len(Y), weight.size * (ms.max() + 3)):
        s = _quad_forms(Y[sl], SB)
        itz = 1j * tn[sl, None, None] * z[None, :, None]
        bm = s - itz
        if np.any(bm.real <= 0):
            raise SpectrumEscapedContour("Re(<B y,y> - i|t|z) <= 0 on the contour")
        ratio = (s + itz) / bm
        inv = bm ** -(G.n + G.r)
        out[:, sl], mass[:, sl] = _combine(G, ms, ratio, inv, weight)
    return out, mass


def _pm_continued_r1(G, ms, Y, T):
    # r = 1: the sphere is {+1, -1} and the two-point sum is finite at y = 0
    rule, SB, det = _sphere_data(G, 2)
    s = _quad_forms(Y, SB)
    tt = T @ rule.nodes.T
    bm = s - 1j * tt
    return _combine(G, ms, (s + 1j * tt) / bm, bm ** -(G.n + 1), rule.weights * det)[0]


def p_m_continued(G, cfg, m, y, t):
    """P_m through the contour representation; valid on the whole of N minus 0."""
    ms, single_m = _ms(m)
    Y, T, single = _points(G, y, t)
    ny = np.linalg.norm(Y, axis=1)
    tn = np.linalg.norm(T, axis=1)
    if np.any((ny == 0) & (tn == 0)):
        raise OriginPoint("P_m is not evaluated at the origin")
    if G.r == 1:
        return _shape_out(_pm_continued_r1(G, ms, Y, T), single_m, single)
    t_hat = np.where(tn[:, None] > 0, T / np.where(tn > 0, tn, 1.0)[:, None], 0.0)
    t_hat[tn == 0, 0] = 1.0
    keys = np.round(t_hat, 13)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    out = np.empty((len(ms), len(Y)), dtype=complex)
    for g in np.unique(inverse):
        idx = np.flatnonzero(inverse == g)
        direction = t_hat[idx[0]]
        out[:, idx] = _continued_adaptive(G, cfg, ms, Y[idx], tn[idx], direction)
    return _shape_out(out, single_m, single)


def _continued_adaptive(G, cfg, ms, Y, tn, direction):
    eps = cfg.epsilon
    for _ in range(cfg.max_eps_halvings + 1):
        try:
            vals, _ = _refine(
                lambda N: _pm_contour_dir(G, ms, Y, tn, direction, eps, N, cfg.inner_n),
                cfg.contour_n, cfg.rtol, cfg.max_refine, "p_m_continued",
            )
            return vals
        except SpectrumEscapedContour:
            eps /= 2
    raise SpectrumEscapedContour(f"contour escape persists down to eps={eps * 2:g}")


# ---------------------------------------------------------------- Abel kernel

def _abel_sphere(G, R, Y, T, N, Na=32):
    n, r = G.n, G.r
    M = (1 - R) / (1 + R)
    pref = math.factorial(n + r - 1) * 2.0 ** (n - r) * M ** r / (np.pi ** (n + r) * (1 + R) ** n)
    out = np.empty(len(Y), dtype=complex)
    mass = np.empty(len(Y))
    # the closed form is the m = 0 integrand with t scaled by M
    for sl, s, tt, wd in _node_blocks(G, Y, M * T, N, Na, "theta", cost=3):
        terms = (s - 1j * tt) ** -(n + r) * wd
        out[sl] = pref * np.sum(terms, axis=-1)
        mass[sl] = pref * np.sum(np.abs(terms), axis=-1)
    return out[None], mass[None]


def abel_kernel(G, cfg, R, y, t):
    """Closed form of sum_m R^m P_m(y, t) for 0 <= R < 1."""
    if not 0 <= R < 1:
        raise RNotInRange(f"R must lie in [0, 1), got {R}")
    Y, T, single = _points(G, y, t)
    if np.any(np.linalg.norm(Y, axis=1) == 0):
        raise YZero("abel_kernel needs y != 0")
    if G.r == 1:
        vals = _abel_sphere(G, R, Y, T, 2)[0]
    else:
        start = cfg.sphere_n if G.r == 2 else cfg.sphere_n // 2
        vals, _ = _refine(
            lambda N: _abel_sphere(G, R, Y, T, N, cfg.inner_n),
            start, cfg.rtol, cfg.max_refine, "abel",
        )
    return _shape_out(vals, True, single)


# ---------------------------------------------------------------- mean value

def radial_closed_form(n, a, K, z):
    """int_0^inf u^{n-1} (u + i z)^a / (u - i z)^K du for K >= n + a + 1.

    With w = u - i z the integrand is P(w) w^{-K}, P(w) = (w + i z)^{n-1} (w + 2 i z)^a,
    and each monomial integrates in closed form from w0 = -i z to infinity.
    """
    z = np.asarray(z, dtype=complex)
    iz = 1j * z
    w0 = -iz
    out = np.zeros_like(z)
    for p in range(n):
        for q in range(a + 1):
            e = p + q
            coef = math.comb(n - 1, p) * math.comb(a, q)
            c = coef * iz ** (n - 1 - p) * (2 * iz) ** (a - q)
            k = e - K + 1
            out += -c * w0 ** k / k
    return out


def _omega_rule(n, N):
    # S^{2n-1} in R^{2n}: the circle for n = 1, the Hopf rule on S^3 for n = 2
    return sphere_rule(2 * n, N)


def _mean_value_terms(G, ms, SB, weight, z, N_omega):
    """sum over nodes of weight * int_{R^{2n}} sum_j C (s+iz)^{m-j}/(s-iz)^{K} dy.

    SB has shape (nodes..., 2n, 2n), weight and z broadcast over the node axes.
    """
    n, r = G.n, G.r
    om = _omega_rule(n, N_omega)
    a = np.moveaxis(_quad_forms(om.nodes, SB), 0, -1)
    ang = 0.5 * np.sum(om.weights * a ** (-n), axis=-1)
    out = np.zeros(len(ms), dtype=complex)
    mass = np.zeros(len(ms))
    for i, m in enumerate(ms):
        for j in range(min(r, m) + 1):
            rad = radial_closed_form(n, m - j, m + n + r - j, z)
            terms = c_mj(n, r, m, j) * weight * ang * rad
            out[i] += np.sum(terms)
            mass[i] += np.sum(np.abs(terms))
    return out, mass


def mean_value_integral(G, cfg, m, N_omega=None, outer_n=None):
    """int_{S^{r-1}} int_{R^{2n}} P_m(y, t_dot) dy dt_dot for each requested m."""
    ms, single_m = _ms(m)
    if G.n > 2:
        raise NotImplementedError("the y-sphere rule is implemented for n <= 2")
    N_omega = N_omega or 64
    r = G.r
    if r == 1:
        rule, SB, det = _sphere_data(G, 2)
        total = np.zeros(len(ms), dtype=complex)
        for t_dot in (1.0, -1.0):
            z = t_dot * rule.nodes[:, 0]
            total += _mean_value_terms(G, ms, SB, rule.weights * det, z, N_omega)[0]
        return total[0] if single_m else total

    outer = sphere_rule(r, outer_n or (16 if r == 2 else 8))

    def evaluate(Nz, eps):
        total = np.zeros(len(ms), dtype=complex)
        mass = np.zeros(len(ms))
        for t_dot, w_t in zip(outer.nodes, outer.weights):
            zz, SBz, weight = _contour_data(G, t_dot, eps, Nz, cfg.inner_n)
            zb = np.broadcast_to(zz[:, None], weight.shape)
            v, a = _mean_value_terms(G, ms, SBz, weight, zb, N_omega)
            total += w_t * v
            mass += w_t * a
        return total[:, None], mass[:, None]

    eps = cfg.epsilon
    for _ in range(cfg.max_eps_halvings + 1):
        try:
            vals, _ = _refine(lambda N: evaluate(N, eps), cfg.contour_n, cfg.rtol,
                              cfg.max_refine, "mean_value_integral")
            return vals[0, 0] if single_m else vals[:, 0]
        except SpectrumEscapedContour:
            eps /= 2
    raise SpectrumEscapedContour("mean value contour escaped")


def abs_mass(G, cfg, m, n_radial=40, N_omega=None, outer_n=None):
    """Crude estimate of int_{S^{r-1}} int_{R^{2n}} |P_m(y, t_dot)| dy dt_dot."""
    n, r = G.n, G.r
    om = _omega_rule(n, N_omega or (32 if n == 1 else 16))
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    x, wx = 0.5 * (x + 1), 0.5 * wx
    rho = x / (1 - x)
    drho = wx / (1 - x) ** 2
    outer = sphere_rule(r, outer_n or (2 if r == 1 else 8))
    Y = (rho[:, None, None] * om.nodes[None]).reshape(-1, 2 * n)
    wy = (drho[:, None] * rho[:, None] ** (2 * n - 1) * om.weights[None]).ravel()
    total = 0.0
    for t_dot, w_t in zip(outer.nodes, outer.weights):
        T = np.broadcast_to(t_dot, (len(Y), r))
        vals = p_m_continued(G, cfg, m, Y, T)
        total += w_t * np.sum(wy * np.abs(vals))
    return float(total)


# ---------------------------------------------------------------- CZ statistics

def cz_size_statistic(G, cfg, m, Y, T):
    """sup over samples of ||g||^Q |P_m(g)|."""
    Y, T, _ = _points(G, Y, T)
    vals = p_m_continued(G, cfg, m, Y, T)
    norm = (np.sum(Y ** 2, 1) ** 2 + np.sum(T ** 2, 1)) ** 0.25
    return float(np.max(norm ** G.Q * np.abs(vals)))


def horizontal_gradient(G, cfg, m, Y, T, rel_step=1e-2):
    """Left-invariant derivatives Y_k P_m at each sample, shape (P, 2n).

    Y_k f(g) = d/ds f(g . (s e_k, 0)) at s = 0, by fourth-order central
    differences with a step proportional to ||g||.
    """
    Y, T, _ = _points(G, Y, T)
    norm = (np.sum(Y ** 2, 1) ** 2 + np.sum(T ** 2, 1)) ** 0.25
    h = rel_step * norm
    out = np.empty(Y.shape, dtype=complex)
    for k in range(2 * G.n):
        # g . (s e_k, 0) = (y + s e_k, t + 2 s B(y, e_k))
        dt = 2 * np.einsum("bl,pl->pb", G.B[:, :, k], Y)
        vals = {}
        for s in (-2, -1, 1, 2):
            Ys = Y.copy()
            Ys[:, k] += s * h
            vals[s] = p_m_continued(G, cfg, m, Ys, T + s * h[:, None] * dt)
        out[:, k] = (-vals[2] + 8 * vals[1] - 8 * vals[-1] + vals[-2]) / (12 * h)
    return out


def cz_gradient_statistic(G, cfg, m, Y, T, rel_step=1e-2):
    """sup over samples and k of ||g||^{Q+1} |Y_k P_m(g)|."""
    Y, T, _ = _points(G, Y, T)
    grad = horizontal_gradient(G, cfg, m, Y, T, rel_step)
    norm = (np.sum(Y ** 2, 1) ** 2 + np.sum(T ** 2, 1)) ** 0.25
    return float(np.max(norm[:, None] ** (G.Q + 1) * np.abs(grad)))


# ---------------------------------------------------------------- export

def evaluate(G, cfg, m, Y, T, method="sphere"):
    f = {"sphere": p_m, "contour": p_m_continued, "oracle": p_m_oracle}[method]
    return f(G, cfg, m, Y, T)


def write_csv(path, Y, T, m, values):
    Y = np.atleast_2d(Y)
    T = np.atleast_2d(T)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [f"y{i + 1}" for i in range(Y.shape[1])]
            + [f"t{i + 1}" for i in range(T.shape[1])]
            + ["m", "re", "im"]
        )
        for y, t, v in zip(Y, T, np.atleast_1d(values)):
            w.writerow([repr(float(a)) for a in y] + [repr(float(a)) for a in t]
                       + [int(m), repr(float(v.real)), repr(float(v.imag))])


def write_json(path, Y, T, m, values):
    rows = [
        {"y": list(map(float, y)), "t": list(map(float, t)), "m": int(m),
         "re": float(v.real), "im": float(v.imag)}
        for y, t, v in zip(np.atleast_2d(Y), np.atleast_2d(T), np.atleast_1d(values))
    ]
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1)
