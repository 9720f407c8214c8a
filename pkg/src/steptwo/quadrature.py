"""Quadrature rules on spheres S^{r-1} and on the contour L_eps."""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln
from scipy.stats import special_ortho_group

SURFACE_AREA = {1: 2.0, 2: 2 * np.pi, 3: 4 * np.pi, 4: 2 * np.pi ** 2}


@dataclass(frozen=True)
class SphereRule:
    r: int
    nodes: np.ndarray    # (K, r)
    weights: np.ndarray  # (K,)
    degree: int          # polynomial degree integrated exactly

    def integrate(self, values):
        return np.tensordot(values, self.weights, axes=([-1], [0]))


def monomial_integral(alpha):
    """Exact integral of prod x_i^{alpha_i} over the unit sphere."""
    alpha = np.asarray(alpha)
    if np.any(alpha % 2):
        return 0.0
    beta = (alpha + 1) / 2.0
    return 2.0 * np.exp(np.sum(gammaln(beta)) - gammaln(np.sum(beta)))


def _trapezoid(N):
    a = 2 * np.pi * np.arange(N) / N
    return a, np.full(N, 2 * np.pi / N)


def _build(r, N):
    if r == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2), 10 ** 6
    if r == 2:
        a, w = _trapezoid(N)
        return np.stack([np.cos(a), np.sin(a)], axis=1), w, N - 1
    if r == 3:
        nt = max(N // 2, 2)
        c, wc = np.polynomial.legendre.leggauss(nt)
        a, wa = _trapezoid(N)
        C, A = np.meshgrid(c, a, indexing="ij")
        s = np.sqrt(1 - C * C)
        nodes = np.stack([s * np.cos(A), s * np.sin(A), C], axis=-1).reshape(-1, 3)
        return nodes, np.outer(wc, wa).ravel(), min(2 * nt - 1, N - 1)
    if r == 4:
        # Hopf coordinates: (cos e cos a, cos e sin a, sin e cos b, sin e sin b),
        # surface measure (1/2) du da db with u = sin^2 e.
        nu = max(N // 4, 2)
        na = max(N // 4, 4)
        u, wu = np.polynomial.legendre.leggauss(nu)
        u, wu = 0.5 * (u + 1), 0.5 * wu
        a, wa = _trapezoid(na)
        U, A1, A2 = np.meshgrid(u, a, a, indexing="ij")
        ce, se = np.sqrt(1 - U), np.sqrt(U)
        nodes = np.stack(
            [ce * np.cos(A1), ce * np.sin(A1), se * np.cos(A2), se * np.sin(A2)], axis=-1
        ).reshape(-1, 4)
        w = 0.5 * np.einsum("i,j,k->ijk", wu, wa, wa).ravel()
        # in u the integrand of a degree-d monomial is a polynomial of degree d/2
        return nodes, w, min(4 * nu - 1, na - 1)
    raise ValueError(f"sphere rules are implemented for r <= 4, got {r}")


def _validate(r, nodes, weights, degree):
    assert np.allclose(np.linalg.norm(nodes, axis=1), 1.0, atol=1e-14, rtol=0)
    dmax = min(degree, 8)
    for alpha in itertools.product(range(dmax + 1), repeat=r):
        if sum(alpha) > dmax:
            continue
        got = np.sum(weights * np.prod(nodes ** np.array(alpha), axis=1))
        want = monomial_integral(alpha)
        if abs(got - want) > 1e-11 * max(1.0, abs(want)):
            raise AssertionError(f"sphere rule fails on monomial {alpha}: {got} vs {want}")


@lru_cache(maxsize=64)
def sphere_rule(r, N=128, rotation_seed=None):
    """Product rule on S^{r-1}; N controls the azimuthal resolution.

    With ``rotation_seed`` the nodes are rotated by a fixed random orthogonal
    matrix, which gives a second rule independent of the default one.
    """
    nodes, weights, degree = _build(r, N)
    if rotation_seed is not None and r > 1:
        Rm = special_ortho_group.rvs(r, random_state=rotation_seed)
        nodes = nodes @ Rm.T
    _validate(r, nodes, weights, degree)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereRule(r, nodes, weights, degree)


@lru_cache(maxsize=64)
def contour_nodes(eps, N, cluster=True):
    """Nodes on L_eps = {x + i eps sqrt(1-x^2)} traversed from -1 to 1.

    Returns (z, dz, one_plus_z, one_minus_z).  The parametrisation
    z = -cos(phi) + i eps sin(phi), phi = pi (1 - cos s)/2, s in (0, pi),
    removes the square-root endpoint behaviour of the (1 - z^2) weights.
    With ``cluster`` the s nodes are s = pi/2 + d sinh(v), Gauss-Legendre in v,
    d = eps: the integrands have a pole about eps below the apex z = i eps
    (at y = 0 exactly at z = 0), and the map resolves it with O(log 1/eps) nodes.
    """
    x, w = np.polynomial.legendre.leggauss(N)
    if cluster and 0 < eps < 1:
        A = np.arcsinh(0.5 * np.pi / eps)
        v = A * x
        s = 0.5 * np.pi + eps * np.sinh(v)
        ws = A * w * eps * np.cosh(v)
    else:
        s = 0.5 * np.pi * (x + 1)
        ws = 0.5 * np.pi * w
    phi = 0.5 * np.pi * (1 - np.cos(s))
    dphi = 0.5 * np.pi * np.sin(s)
    z = -np.cos(phi) + 1j * eps * np.sin(phi)
    dz = (np.sin(phi) + 1j * eps * np.cos(phi)) * dphi * ws
    opz = 2 * np.sin(phi / 2) ** 2 + 1j * eps * np.sin(phi)
    omz = 2 * np.cos(phi / 2) ** 2 - 1j * eps * np.sin(phi)
    for arr in (z, dz, opz, omz):
        arr.setflags(write=False)
    return z, dz, opz, omz


def householder_to(t_hat):
    """Orthogonal symmetric matrix H with H e_1 = t_hat."""
    r = len(t_hat)
    e1 = np.zeros(r)
    e1[0] = 1.0
    v = e1 - t_hat
    nv = v @ v
    if nv < 1e-30:
        return np.eye(r)
    return np.eye(r) - 2.0 * np.outer(v, v) / nv


def polar_sinh_nodes(r, Nt, Na, delta):
    """Per-point polar rules about e_1, clustered at the equator.

    theta = pi/2 + d sinh(v) with Gauss-Legendre in v, one scale d per point.
    The kernel integrand has poles at distance ~d from theta = pi/2 when
    |t| dominates, and this map resolves them with O(log(1/d)) nodes.
    Returns local nodes (P, Nt*K, r) and weights (P, Nt*K).
    """
    inner = sphere_rule(r - 1, Na)
    d = np.clip(np.asarray(delta, dtype=float), 1e-8, 1.0)[:, None]
    x, w = np.polynomial.legendre.leggauss(Nt)
    A = np.arcsinh(0.5 * np.pi / d)
    v = A * x[None]
    th = 0.5 * np.pi + d * np.sinh(v)
    wth = A * w[None] * d * np.cosh(v) * np.sin(th) ** (r - 2)
    P, K = len(d), len(inner.weights)
    nodes = np.empty((P, Nt, K, r))
    nodes[..., 0] = np.cos(th)[:, :, None]
    nodes[..., 1:] = np.sin(th)[:, :, None, None] * inner.nodes[None, None]
    weights = wth[:, :, None] * inner.weights[None, None]
    return nodes.reshape(P, Nt * K, r), weights.reshape(P, Nt * K)


def align_points(nodes, t_hat):
    """Per-point Householder e_1 -> t_hat applied to nodes of shape (P, K, r)."""
    v = -np.asarray(t_hat, dtype=float)
    v[:, 0] += 1.0
    nv = np.sum(v * v, axis=1)
    coef = np.where(nv > 1e-30, 2.0 / np.where(nv > 1e-30, nv, 1.0), 0.0)
    proj = np.einsum("pkr,pr->pk", nodes, v)
    return nodes - (coef[:, None] * proj)[:, :, None] * v[:, None, :]
