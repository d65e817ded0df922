"""Lattice toolbox: LLL, Babai nearest-plane, and sphere decoding.

Everything operates on row bases.  Gram-Schmidt data is kept in 64-bit
floats; the sphere decoder re-checks its final answer against the best
running distance so the returned vector is the exact closest point for
the radii used here (integer bases, moderate dimensions).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NoPointInRadius, RankDeficient, ReductionBudgetExceeded


class ReducedBasis:
    """LLL output: integer rows plus the Gram-Schmidt data used to reduce them."""

    __slots__ = ("rows", "mu", "bstar", "norms_sq", "delta")

    def __init__(self, rows, mu, bstar, norms_sq, delta):
        self.rows = rows
        self.mu = mu
        self.bstar = bstar
        self.norms_sq = norms_sq
        self.delta = delta

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def is_size_reduced(self, tol: float = 1e-9) -> bool:
        k = self.dim
        for i in range(k):
            for j in range(i):
                if abs(self.mu[i, j]) > 0.5 + tol:
                    return False
        return True

    def satisfies_lovasz(self, tol: float = 1e-9) -> bool:
        for i in range(1, self.dim):
            lhs = (self.delta - self.mu[i, i - 1] ** 2) * self.norms_sq[i - 1]
            if self.norms_sq[i] < lhs - tol * self.norms_sq[i - 1]:
                return False
        return True


def _gso_rows(rows: np.ndarray, mu, bstar, norms, start: int):
    """Recompute Gram-Schmidt data for rows start..k-1 (earlier rows valid)."""
    k = rows.shape[0]
    for i in range(start, k):
        b = rows[i].astype(np.float64)
        v = b.copy()
        if i:
            mu[i, :i] = b @ bstar[:i].T / norms[:i]
            v -= mu[i, :i] @ bstar[:i]
        mu[i, i:] = 0.0
        bstar[i] = v
        norms[i] = v @ v
        if norms[i] <= 1e-12:
            raise RankDeficient(f"row {i} is dependent on earlier rows")


def _gso(rows: np.ndarray):
    k, m = rows.shape
    mu = np.zeros((k, k))
    bstar = np.zeros((k, m))
    norms = np.zeros(k)
    _gso_rows(rows, mu, bstar, norms, 0)
    return mu, bstar, norms


def lll_reduce(basis, delta: float = 0.99,
               max_swaps: int | None = None) -> ReducedBasis:
    """Standard LLL with floating-point Gram-Schmidt.

    Accepts a LatticeBasis or a plain integer matrix; the input is copied.
    max_swaps caps the number of Lovasz swaps before giving up.
    """
    if not 0.25 < delta < 1:
        raise ValueError("delta must lie in (0.25, 1)")
    rows = np.array(getattr(basis, "rows", basis), dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] > rows.shape[1]:
        raise RankDeficient("need at most as many rows as columns")
    k = rows.shape[0]
    mu, bstar, norms = _gso(rows)
    swaps = 0
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            r = round(mu[i, j])
            if r:
                rows[i] -= r * rows[j]
                mu[i, :j] -= r * mu[j, :j]
                mu[i, j] -= r
        if norms[i] >= (delta - mu[i, i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            swaps += 1
            if max_swaps is not None and swaps > max_swaps:
                raise ReductionBudgetExceeded(f"more than {max_swaps} swaps needed")
            rows[[i - 1, i]] = rows[[i, i - 1]]
            _gso_rows(rows, mu, bstar, norms, i - 1)
            i = max(i - 1, 1)
    mu, bstar, norms = _gso(rows)
    return ReducedBasis(rows, mu, bstar, norms, delta)


def babai_nearest_plane(rb: ReducedBasis, t) -> np.ndarray:
    """Nearest-plane estimate; distance at most half the sum of GSO lengths."""
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (rb.rows.shape[1],):
        raise ValueError("target has the wrong dimension")
    w = t.copy()
    out = np.zeros(rb.rows.shape[1], dtype=np.int64)
    for i in range(rb.dim - 1, -1, -1):
        c = round(w @ rb.bstar[i] / rb.norms_sq[i])
        if c:
            out += c * rb.rows[i]
            w = w - c * rb.rows[i].astype(np.float64)
    return out


def sphere_decode(rb: ReducedBasis, t, radius: float | None = None,
                  max_nodes: int | None = None) -> np.ndarray:
    """Exact closest vector by Schnorr-Euchner enumeration.

    The search starts from the Babai solution (or the caller's radius) and
    shrinks whenever a better point is found, so the result is the true
    closest point whenever any lattice point lies within the initial radius.

    max_nodes caps the number of visited tree nodes; when the cap is hit
    the best point found so far is returned (for targets far from the
    lattice the full tree is astronomically large and the exact answer is
    worthless anyway).
    """
    t = np.asarray(t, dtype=np.float64)
    k = rb.dim
    # coordinates of t in the basis (least squares handles non-square spans)
    x, *_ = np.linalg.lstsq(rb.rows.T.astype(np.float64), t, rcond=None)

    if radius is None:
        guess = babai_nearest_plane(rb, t)
        best_sq = float(np.sum((t - guess) ** 2))
        best = guess
        bound = best_sq * (1 + 1e-9) + 1e-9
    else:
        best = None
        best_sq = math.inf
        bound = float(radius) ** 2 * (1 + 1e-9)

    u = np.zeros(k)
    centers = np.zeros(k)
    dists = np.zeros(k + 1)
    steps = np.zeros(k)
    i = k - 1
    centers[i] = x[i]
    u[i] = round(centers[i])
    steps[i] = math.copysign(1.0, centers[i] - u[i]) or 1.0
    best_u = None
    nodes = 0
    while True:
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            break
        diff = centers[i] - u[i]
        d = dists[i + 1] + diff * diff * rb.norms_sq[i]
        if d <= bound:
            if i == 0:
                if d < best_sq:
                    best_sq = d
                    best_u = u.copy()
                    bound = d * (1 + 1e-9) + 1e-9
                u[0] += steps[0]
                steps[0] = -steps[0] - math.copysign(1.0, steps[0])
            else:
                dists[i] = d
                i -= 1
                centers[i] = x[i] + (x[i + 1:] - u[i + 1:]) @ rb.mu[i + 1:, i]
                u[i] = round(centers[i])
                steps[i] = math.copysign(1.0, centers[i] - u[i]) or 1.0
        else:
            i += 1
            if i == k:
                break
            u[i] += steps[i]
            steps[i] = -steps[i] - math.copysign(1.0, steps[i])
    if best_u is not None:
        best = best_u.astype(np.int64) @ rb.rows
    if best is None:
        raise NoPointInRadius("no lattice point within the given radius")
    return best


def gaussian_heuristic(dim: int, det_abs: int) -> float:
    """Expected first-minimum length sqrt(dim / (2 pi e)) * det^(1/dim)."""
    if dim < 1 or det_abs <= 0:
        raise ValueError("need dim >= 1 and a positive determinant")
    return math.sqrt(dim / (2 * math.pi * math.e)) * math.exp(math.log(det_abs) / dim)


def poltyrev_sigma_max(vol: int, N: int) -> float:
    """Largest per-coordinate noise variance decodable on a volume-vol lattice."""
    if vol <= 0 or N < 1:
        raise ValueError("need a positive volume and dimension")
    return math.exp(2 * math.log(vol) / N) / (2 * math.pi * math.e)
