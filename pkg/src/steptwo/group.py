"""Step-two nilpotent groups on R^{2n} x R^r.

A group is fixed by r skew-symmetric 2n x 2n matrices B^1..B^r.  The law is

    (x, t) . (y, s) = (x + y, t + s + 2 B(x, y)),   B(x, y)_b = x^T B^b y.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    Degenerate,
    NonPositiveLambda,
    NotSkewSymmetric,
    ShapeError,
)

MAX_N = 16
MAX_R = 4
DEFAULT_SIGMA_THRESHOLD = 1e-8


@dataclass(frozen=True)
class GroupPoint:
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        t = np.asarray(self.t, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(t))):
            raise ShapeError("group point entries must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)

    def astuple(self):
        return tuple(self.y), tuple(self.t)


@dataclass(frozen=True)
class GroupDescriptor:
    n: int
    r: int
    B: np.ndarray  # shape (r, 2n, 2n)
    sigma_min: float = float("nan")
    sigma_min_threshold: float = DEFAULT_SIGMA_THRESHOLD
    # eigenvalue range of (B^tau)^T B^tau over the unit sphere
    eig_range: tuple = (float("nan"), float("nan"))
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def Q(self):
        return 2 * self.n + 2 * self.r

    @property
    def dim(self):
        return 2 * self.n + self.r

    def fingerprint(self):
        h = hashlib.sha256()
        h.update(np.int64([self.n, self.r]).tobytes())
        h.update(np.ascontiguousarray(self.B, dtype="<f8").tobytes())
        return h.hexdigest()[:16]

    def to_dict(self):
        return {
            "n": self.n,
            "r": self.r,
            "B": self.B.tolist(),
            "sigma_min_threshold": self.sigma_min_threshold,
        }


def degeneracy_sample(r, seed=0):
    """Unit vectors on S^{r-1} used for the non-degeneracy test."""
    if r == 1:
        return np.array([[1.0], [-1.0]])
    if r == 2:
        a = 2 * np.pi * np.arange(360) / 360
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    eye = np.eye(r)
    pts = [eye, -eye]
    for i in range(r):
        for j in range(i + 1, r):
            for si in (1, -1):
                for sj in (1, -1):
                    pts.append((si * eye[i] + sj * eye[j])[None, :] / np.sqrt(2))
    design = np.concatenate(pts)
    # top up to 2r(r+1) points with the all-sign diagonals
    need = 2 * r * (r + 1) - len(design)
    if need > 0:
        rng = np.random.default_rng(12345)
        signs = rng.choice([-1.0, 1.0], size=(need, r))
        design = np.concatenate([design, signs / np.sqrt(r)])
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((1000, r))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.concatenate([design[: 2 * r * (r + 1)], g])


def validate_group(n, r, B_list, sigma_min_threshold=DEFAULT_SIGMA_THRESHOLD, name=""):
    n, r = int(n), int(r)
    if n < 1 or r < 1:
        raise ShapeError("n and r must be positive")
    if n > MAX_N or r > MAX_R:
        raise ShapeError(f"dimension limits exceeded: n <= {MAX_N}, r <= {MAX_R}")
    B = np.asarray(B_list, dtype=float)
    if B.shape != (r, 2 * n, 2 * n):
        raise ShapeError(f"expected B of shape {(r, 2 * n, 2 * n)}, got {B.shape}")
    for b in range(r):
        bad = np.argwhere(B[b] != -B[b].T)
        if len(bad):
            k, l = bad[0]
            raise NotSkewSymmetric(b, int(k), int(l))

    taus = degeneracy_sample(r)
    Bt = np.einsum("sb,bkl->skl", taus, B)
    sv = np.linalg.svd(Bt, compute_uv=False)
    smin = sv[:, -1]
    worst = int(np.argmin(smin))
    if smin[worst] < sigma_min_threshold:
        raise Degenerate(taus[worst], float(smin[worst]), sigma_min_threshold)
    lo = float(np.min(smin) ** 2)
    hi = float(np.max(sv[:, 0]) ** 2)
    return GroupDescriptor(
        n=n,
        r=r,
        B=B,
        sigma_min=float(smin[worst]),
        sigma_min_threshold=float(sigma_min_threshold),
        eig_range=(lo, hi),
        name=name,
    )


def bilinear(G, x, y):
    """B(x, y) in R^r; broadcasts over leading axes."""
    return np.einsum("...k,bkl,...l->...b", x, G.B, y)


def _check_point(G, g):
    if g.y.shape != (2 * G.n,) or g.t.shape != (G.r,):
        raise DimensionMismatch(
            f"point dims ({g.y.size}, {g.t.size}) do not match group ({2 * G.n}, {G.r})"
        )


def group_mul(G, g, h):
    _check_point(G, g)
    _check_point(G, h)
    return GroupPoint(g.y + h.y, g.t + h.t + 2 * bilinear(G, g.y, h.y))


def group_inv(G, g):
    _check_point(G, g)
    return GroupPoint(-g.y, -g.t)


def dilate(G, lam, g):
    if not lam > 0:
        raise NonPositiveLambda(f"dilation factor must be positive, got {lam}")
    return GroupPoint(lam * g.y, lam * lam * g.t)


def homogeneous_norm(G, g):
    y2 = float(g.y @ g.y)
    return (y2 * y2 + float(g.t @ g.t)) ** 0.25


def norm_arrays(y, t):
    """Vectorised homogeneous norm for arrays of shape (..., 2n) and (..., r)."""
    y2 = np.sum(np.asarray(y) ** 2, axis=-1)
    return (y2 * y2 + np.sum(np.asarray(t) ** 2, axis=-1)) ** 0.25


def quasi_distance(G, g, h):
    """rho(g, h) = ||h^{-1} g||."""
    return homogeneous_norm(G, group_mul(G, group_inv(G, h), g))


def estimate_quasi_constant(G, n_samples=2000, seed=0):
    """Monte Carlo estimate of the constant in rho(h,g) <= C(rho(h,w) + rho(w,g))."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_samples):
        pts = [
            GroupPoint(rng.standard_normal(2 * G.n), rng.standard_normal(G.r))
            for _ in range(3)
        ]
        g, h, w = pts
        lhs = quasi_distance(G, h, g)
        rhs = quasi_distance(G, h, w) + quasi_distance(G, w, g)
        if rhs > 0:
            best = max(best, lhs / rhs)
    return best


# ---------------------------------------------------------------- config I/O

def group_from_dict(d, name=""):
    try:
        n, r, B = d["n"], d["r"], d["B"]
    except KeyError as exc:
        raise ShapeError(f"group config missing field {exc}") from None
    thr = d.get("sigma_min_threshold", DEFAULT_SIGMA_THRESHOLD)
    return validate_group(n, r, B, sigma_min_threshold=thr, name=d.get("name", name))


def load_group(path):
    with open(path) as fh:
        d = json.load(fh)
    return group_from_dict(d.get("group", d))


def save_group(G, path):
    # json writes floats with repr, so the round trip is bit-exact
    with open(path, "w") as fh:
        json.dump(G.to_dict(), fh, indent=1)


# ---------------------------------------------------------------- factories

_J = np.array([[0.0, -1.0], [1.0, 0.0]])


def _blockdiag(*blocks):
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def heisenberg(n=1):
    B = _blockdiag(*([_J] * n))
    return validate_group(n, 1, [B], name=f"H{n}")


def anisotropic_n2r1():
    return validate_group(2, 1, [_blockdiag(_J, 2 * _J)], name="aniso21")


def anisotropic_n2r2():
    B1 = _blockdiag(_J, 2 * _J)
    B2 = np.zeros((4, 4))
    B2[0, 2], B2[2, 0] = 1.0, -1.0
    B2[1, 3], B2[3, 1] = -1.0, 1.0
    return validate_group(2, 2, [B1, B2], name="aniso22")


def quaternionic():
    """H-type group with n=2, r=3: left multiplication by i, j, k on R^4."""
    Bi = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
    Bj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], float)
    Bk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], float)
    return validate_group(2, 3, [Bi, Bj, Bk], name="quaternionic")


NAMED_GROUPS = {
    "H1": heisenberg,
    "aniso21": anisotropic_n2r1,
    "aniso22": anisotropic_n2r2,
    "quaternionic": quaternionic,
}
