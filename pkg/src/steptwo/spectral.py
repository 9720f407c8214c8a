"""Per-frequency spectral data of B^tau and its holomorphic extension."""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTau, DimensionMismatch, SpectrumEscapedContour, ZeroTau


@dataclass(frozen=True)
class TauSpectrum:
    tau: np.ndarray
    B_tau: np.ndarray
    mu: np.ndarray        # length n, descending
    O: np.ndarray         # columns (u_1, v_1, u_2, v_2, ...)
    script_B: np.ndarray
    det_sqrt: float

    def J(self):
        return j_matrix(self.mu)

    def to_json(self):
        return json.dumps(
            {
                "tau": self.tau.tolist(),
                "B_tau": self.B_tau.tolist(),
                "mu": self.mu.tolist(),
                "O": self.O.tolist(),
                "script_B": self.script_B.tolist(),
                "det_sqrt": self.det_sqrt,
            }
        )


@dataclass(frozen=True)
class ComplexTauMatrix:
    z: np.ndarray
    script_B_z: np.ndarray
    det_sqrt_z: complex


def j_matrix(mu):
    n = len(mu)
    J = np.zeros((2 * n, 2 * n))
    for j, m in enumerate(mu):
        J[2 * j, 2 * j + 1] = -m
        J[2 * j + 1, 2 * j] = m
    return J


def _tau(G, tau):
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if tau.shape[-1] != G.r:
        raise DimensionMismatch(f"tau has length {tau.shape[-1]}, group has r={G.r}")
    return tau


def b_tau(G, tau):
    """B^tau = sum_b tau_b B^b.  Accepts a batch of shape (..., r); complex allowed."""
    tau = np.asarray(tau)
    if tau.ndim == 0:
        tau = tau[None]
    if tau.shape[-1] != G.r:
        raise DimensionMismatch(f"tau has length {tau.shape[-1]}, group has r={G.r}")
    return np.einsum("...b,bkl->...kl", tau, G.B)


def _clusters(vals, tol):
    groups, start = [], 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or abs(vals[i] - vals[start]) > tol:
            groups.append((start, i))
            start = i
    return groups


def spectral_data(G, tau, rng=None):
    """Normalising frame O(tau) with O^T B^tau O = J(mu).

    If ``rng`` is given, each degenerate eigenspace is randomly rotated before the
    pairs are picked, which exercises the freedom in the choice of O.
    """
    tau = _tau(G, tau)
    norm = np.linalg.norm(tau)
    if norm == 0:
        raise ZeroTau("tau must be nonzero")
    Bt = b_tau(G, tau)
    smin = np.linalg.svd(Bt, compute_uv=False)[-1]
    if smin < G.sigma_min_threshold * norm:
        raise DegenerateTau(f"sigma_min(B^tau)={smin:.3e} at tau={tau.tolist()}")
    M = Bt.T @ Bt
    w, V = np.linalg.eigh(M)
    w, V = w[::-1], V[:, ::-1]
    tol = 1e-8 * w[0]
    cols, mus = [], []
    for a, b in _clusters(w, tol):
        S = V[:, a:b]
        if rng is not None:
            q, _ = np.linalg.qr(rng.standard_normal((b - a, b - a)))
            S = S @ q
        while S.shape[1] > 0:
            u = S[:, 0]
            Bu = Bt @ u
            mu = np.linalg.norm(Bu)
            v = Bu / mu
            cols += [u, v]
            mus.append(mu)
            k = S.shape[1] - 2
            if k <= 0:
                break
            P = S - np.outer(u, u @ S) - np.outer(v, v @ S)
            U, _, _ = np.linalg.svd(P, full_matrices=False)
            S = U[:, :k]
    O = np.stack(cols, axis=1)
    mu = np.array(mus)
    order = np.argsort(-mu, kind="stable")
    mu = mu[order]
    O = O[:, np.ravel([[2 * i, 2 * i + 1] for i in order])]
    SB = (V * np.sqrt(np.clip(w, 0, None))) @ V.T
    SB = 0.5 * (SB + SB.T)
    return TauSpectrum(tau, Bt, mu, O, SB, float(np.prod(mu)))


def script_b(G, tau):
    """(script B^tau, det_sqrt) for one tau or a batch of shape (N, r)."""
    tau = _tau(G, tau)
    tn = np.linalg.norm(tau, axis=-1)
    if np.any(tn == 0):
        raise ZeroTau("tau must be nonzero")
    c = htype_constant(G)
    if c is not None:
        root = np.sqrt(c) * tn
        return root[..., None, None] * np.eye(2 * G.n), root ** G.n
    Bt = b_tau(G, tau)
    M = np.swapaxes(Bt, -1, -2) @ Bt
    w, V = np.linalg.eigh(M)
    w = np.clip(w, 0, None)
    SB = (V * np.sqrt(w)[..., None, :]) @ np.swapaxes(V, -1, -2)
    det = np.prod(w, axis=-1) ** 0.25
    return SB, det


def tau_coordinates(G, y, tau, spec=None):
    spec = spec or spectral_data(G, tau)
    return spec.O.T @ np.asarray(y, dtype=float)


def lemma_constant(G, taus):
    """C with C^{-1}|y|^2 <= <B^tau y, y> <= C|y|^2 over the given unit taus."""
    SB, _ = script_b(G, taus)
    ev = np.linalg.eigvalsh(SB)
    return float(max(ev.max(), 1.0 / ev.min()))


# ---------------------------------------------------------------- complex tau

def contour_rectangle(G):
    a, b = G.eig_range
    return a / 2, 2 * b, a / 4


def _rect_nodes(G, per_panel=16):
    """Nodes and weights dw on the rectangle enclosing the real spectrum.

    Each side is cut into Gauss-Legendre panels no longer than the half-height,
    so the nearest eigenvalue is always about one panel length away.
    """
    lo, hi, h = contour_rectangle(G)
    x, wx = np.polynomial.legendre.leggauss(per_panel)
    corners = [lo - 1j * h, hi - 1j * h, hi + 1j * h, lo + 1j * h, lo - 1j * h]
    nodes, weights = [], []
    for c0, c1 in zip(corners[:-1], corners[1:]):
        k = max(1, int(np.ceil(abs(c1 - c0) / h)))
        ends = c0 + (c1 - c0) * np.arange(k + 1) / k
        for e0, e1 in zip(ends[:-1], ends[1:]):
            nodes.append(0.5 * (e0 + e1) + 0.5 * (e1 - e0) * x)
            weights.append(0.5 * (e1 - e0) * wx)
    return np.concatenate(nodes), np.concatenate(weights)


def _check_inside(G, lam):
    lo, hi, h = contour_rectangle(G)
    margin = 1e-3 * (hi - lo)
    ok = (
        (lam.real > lo + margin)
        & (lam.real < hi - margin)
        & (np.abs(lam.imag) < h - margin)
    )
    if not np.all(ok):
        bad = lam[~ok].ravel()[0]
        raise SpectrumEscapedContour(
            f"eigenvalue {bad:.4g} of (B^z)^T B^z left the contour rectangle"
        )


def script_b_cauchy(G, z, per_panel=16):
    """Cauchy-integral functional calculus, principal square root.

    Returns (script_B_z, det_sqrt_z) for z of shape (N, r).
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    Bz = b_tau(G, z)
    M = np.swapaxes(Bz, -1, -2) @ Bz
    lam = np.linalg.eigvals(M)
    _check_inside(G, lam)
    w, dw = _rect_nodes(G, per_panel)
    d = M.shape[-1]
    eye = np.eye(d)
    A = w[None, :, None, None] * eye - M[:, None]
    R = np.linalg.inv(A)
    coef = np.sqrt(w) * dw / (2j * np.pi)
    SB = np.einsum("k,nkij->nij", coef, R)
    # log det(script B) = (1/2) tr log M, via the same contour
    coef_log = np.log(w) * dw / (2j * np.pi)
    logdet = 0.5 * np.einsum("k,nkii->n", coef_log, R)
    return SB, np.exp(0.5 * logdet)


def script_b_eig(G, z):
    """Fast path: diagonalise (B^z)^T B^z and take principal roots.

    Falls back to the Cauchy integral when the eigenvector matrix is badly
    conditioned.
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    Bz = b_tau(G, z)
    M = np.swapaxes(Bz, -1, -2) @ Bz
    lam, V = np.linalg.eig(M)
    _check_inside(G, lam)
    cond = np.linalg.cond(V)
    SB = np.empty_like(M)
    good = cond < 1e6
    if np.any(good):
        Vg = V[good]
        SB[good] = (Vg * np.sqrt(lam[good])[:, None, :]) @ np.linalg.inv(Vg)
    if np.any(~good):
        SB[~good], _ = script_b_cauchy(G, z[~good])
    det = np.prod(np.sqrt(np.sqrt(lam)), axis=-1)
    return SB, det


def script_b_complex(G, z, method="eig"):
    """Holomorphic extension of script B to complex tau (one z of length r)."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (G.r,):
        raise DimensionMismatch(f"z has shape {z.shape}, expected ({G.r},)")
    f = script_b_eig if method == "eig" else script_b_cauchy
    SB, det = f(G, z[None])
    return ComplexTauMatrix(z, SB[0], complex(det[0]))


def htype_constant(G):
    """c if (B^tau)^T B^tau = c |tau|^2 I for all tau (H-type up to scale), else None."""
    key = "_htype"
    if key in G.meta:
        return G.meta[key]
    d = 2 * G.n
    c = float(np.trace(G.B[0].T @ G.B[0]) / d)
    ok = True
    for b in range(G.r):
        for g in range(b, G.r):
            A = G.B[b].T @ G.B[g] + G.B[g].T @ G.B[b]
            want = 2 * c * np.eye(d) if b == g else np.zeros((d, d))
            ok &= np.allclose(A, want, atol=1e-13, rtol=0)
    G.meta[key] = c if ok else None
    return G.meta[key]


def script_b_batch_complex(G, z):
    """(script_B_z, det_sqrt_z) for z of shape (N, r), complex.

    H-type groups use the scalar functional calculus; all others go through
    the eigen-decomposition with a Cauchy-integral fallback.
    """
    z = np.asarray(z, dtype=complex)
    c = htype_constant(G)
    if c is None:
        return script_b_eig(G, z)
    q = c * np.sum(z * z, axis=-1)
    lam = np.repeat(q[:, None], 2 * G.n, axis=1)
    _check_inside(G, lam)
    root = np.sqrt(q)
    SB = root[:, None, None] * np.eye(2 * G.n)
    return SB, root ** G.n
