"""Exact arithmetic in Z_m[x,y]/(x^n - 1, y^n - 1).

Elements are length-n**2 coefficient vectors; the coefficient of x^a y^b
lives at index a*n + b (x-major lexicographic order).  The modulus is an
odd prime, or None for unreduced integer arithmetic.

A module-level counter tracks convolution products so that callers can
verify operation counts (16 vs 7 ring products per quaternion multiply).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ContextMismatch, NotAGridPoint, NotInvertible


class _ConvCounter:
    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


#: incremented once per convolution product (diagnostic only; not used for logic)
CONV_COUNTER = _ConvCounter()


@lru_cache(maxsize=None)
def _sub_index(n: int) -> np.ndarray:
    """SUB[k, m] = index of the monomial x^(a-c) y^(b-d) for k=(a,b), m=(c,d)."""
    idx = np.arange(n * n)
    a, b = idx // n, idx % n
    c, d = a[:, None], b[:, None]
    return (((a[None, :] - c) % n) * n + (b[None, :] - d) % n).T


class RingElem:
    """Element of Z_m[x,y]/(x^n-1, y^n-1) as a coefficient vector."""

    __slots__ = ("coeffs", "modulus", "n")

    def __init__(self, coeffs, n: int, modulus=None):
        arr = np.asarray(coeffs, dtype=np.int64).copy()
        if arr.shape != (n * n,):
            raise ValueError(f"expected {n * n} coefficients, got {arr.shape}")
        if modulus is not None:
            arr %= modulus
        self.coeffs = arr
        self.n = n
        self.modulus = modulus

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, n: int, modulus=None) -> "RingElem":
        return cls(np.zeros(n * n, dtype=np.int64), n, modulus)

    @classmethod
    def one(cls, n: int, modulus=None) -> "RingElem":
        c = np.zeros(n * n, dtype=np.int64)
        c[0] = 1
        return cls(c, n, modulus)

    @classmethod
    def monomial(cls, n: int, a: int, b: int, coeff: int = 1, modulus=None) -> "RingElem":
        c = np.zeros(n * n, dtype=np.int64)
        c[(a % n) * n + (b % n)] = coeff
        return cls(c, n, modulus)

    # -- context ------------------------------------------------------
    def _check_ctx(self, other: "RingElem"):
        if self.n != other.n or self.modulus != other.modulus:
            raise ContextMismatch(
                f"(n={self.n}, m={self.modulus}) vs (n={other.n}, m={other.modulus})"
            )

    def with_modulus(self, modulus) -> "RingElem":
        """Reinterpret the coefficients under a (possibly different) modulus."""
        return RingElem(self.coeffs, self.n, modulus)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "RingElem") -> "RingElem":
        self._check_ctx(other)
        return RingElem(self.coeffs + other.coeffs, self.n, self.modulus)

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check_ctx(other)
        return RingElem(self.coeffs - other.coeffs, self.n, self.modulus)

    def __neg__(self) -> "RingElem":
        return RingElem(-self.coeffs, self.n, self.modulus)

    def __mul__(self, other: "RingElem") -> "RingElem":
        return conv_mul(self, other)

    def scale(self, c: int) -> "RingElem":
        """Scalar multiple; not counted as a convolution."""
        return RingElem(self.coeffs * c, self.n, self.modulus)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElem):
            return NotImplemented
        return (
            self.n == other.n
            and self.modulus == other.modulus
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.n, self.modulus, self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __repr__(self):
        return f"RingElem(n={self.n}, mod={self.modulus}, {self.coeffs.tolist()})"

    # -- lifts --------------------------------------------------------
    def lift_centered(self) -> "RingElem":
        """Map each coefficient to its representative in [-(m-1)/2, (m-1)/2]."""
        m = self.modulus
        if m is None:
            return RingElem(self.coeffs, self.n, None)
        if m % 2 == 0:
            raise ValueError("centered lift requires an odd modulus")
        half = (m - 1) // 2
        c = self.coeffs % m
        c = np.where(c > half, c - m, c)
        return RingElem(c, self.n, None)

    def lift_positive(self) -> "RingElem":
        """Representative in [0, m) viewed over Z."""
        if self.modulus is None:
            return RingElem(self.coeffs, self.n, None)
        return RingElem(self.coeffs % self.modulus, self.n, None)

    # -- text rendering (key file format) -----------------------------
    def render(self) -> str:
        return " ".join(str(int(c)) for c in self.coeffs)

    @classmethod
    def parse(cls, text: str, n: int, modulus=None) -> "RingElem":
        vals = [int(t) for t in text.split()]
        return cls(np.array(vals, dtype=np.int64), n, modulus)


def conv_mul(f: RingElem, g: RingElem) -> RingElem:
    """2-D cyclic convolution product."""
    f._check_ctx(g)
    CONV_COUNTER.count += 1
    res = g.coeffs[_sub_index(f.n)] @ f.coeffs
    return RingElem(res, f.n, f.modulus)


def mult_matrix(f: RingElem) -> np.ndarray:
    """Matrix M with row r equal to the coefficient vector of (monomial_r * f).

    Satisfies vec(g) @ M = vec(g * f) for every g in the same ring.
    """
    return f.coeffs[_sub_index(f.n)].T.copy()


def ring_eval(f: RingElem, a: int, b: int) -> int:
    """Evaluate f at (a, b) in Z_q; a ring homomorphism for modulus q."""
    q = f.modulus
    if q is None:
        raise ValueError("evaluation requires a modular context")
    n = f.n
    pa = np.ones(n, dtype=np.int64)
    pb = np.ones(n, dtype=np.int64)
    for i in range(1, n):
        pa[i] = pa[i - 1] * a % q
        pb[i] = pb[i - 1] * b % q
    grid = f.coeffs.reshape(n, n)
    return int((pa @ (grid @ pb % q)) % q)


class EvalDomain:
    """The n**2-point root-of-unity grid mod q, with Lagrange machinery.

    omega is derived from the smallest primitive root of q, so domains are
    deterministic and reproducible for fixed (n, q).
    """

    def __init__(self, n: int, q: int):
        if (q - 1) % n != 0:
            raise ValueError(f"n={n} must divide q-1={q - 1}")
        self.n = n
        self.q = q
        self.omega = self._find_omega(n, q)
        w_pows = [pow(self.omega, a, q) for a in range(n)]
        self.points = [(w_pows[a], w_pows[b]) for a in range(n) for b in range(n)]
        self._point_index = {pt: i for i, pt in enumerate(self.points)}
        self._lagrange_rows = None
        self._eval_matrix = None

    @staticmethod
    def _find_omega(n: int, q: int) -> int:
        g = _primitive_root(q)
        omega = pow(g, (q - 1) // n, q)
        assert pow(omega, n, q) == 1
        return omega

    @property
    def size(self) -> int:
        return self.n * self.n

    def index_of(self, a: int, b: int) -> int:
        try:
            return self._point_index[(a % self.q, b % self.q)]
        except KeyError:
            raise NotAGridPoint(f"({a}, {b}) is not on the grid")

    def lagrange_matrix(self) -> np.ndarray:
        """Row k = coefficient vector of the interpolant for points[k], in [0, q)."""
        if self._lagrange_rows is None:
            n, q = self.n, self.q
            ninv2 = pow(n * n, q - 2, q)
            rows = np.empty((n * n, n * n), dtype=np.int64)
            for k, (a, b) in enumerate(self.points):
                ainv, binv = pow(a, q - 2, q), pow(b, q - 2, q)
                pa = np.array([pow(ainv, i, q) for i in range(n)], dtype=np.int64)
                pb = np.array([pow(binv, j, q) for j in range(n)], dtype=np.int64)
                rows[k] = (np.outer(pa, pb).reshape(-1) * ninv2) % q
            self._lagrange_rows = rows
        return self._lagrange_rows

    def eval_matrix(self) -> np.ndarray:
        """E with E[k, i*n+j] = a_k^i * b_k^j, so E @ vec(f) = grid values of f."""
        if self._eval_matrix is None:
            n, q = self.n, self.q
            rows = np.empty((n * n, n * n), dtype=np.int64)
            for k, (a, b) in enumerate(self.points):
                pa = np.array([pow(a, i, q) for i in range(n)], dtype=np.int64)
                pb = np.array([pow(b, j, q) for j in range(n)], dtype=np.int64)
                rows[k] = np.outer(pa, pb).reshape(-1) % q
            self._eval_matrix = rows
        return self._eval_matrix

    def eval_all(self, f: RingElem) -> np.ndarray:
        """Values of f on all grid points, ordered like self.points."""
        if f.modulus != self.q or f.n != self.n:
            raise ContextMismatch("element does not match the domain")
        return self.eval_matrix() @ (f.coeffs % self.q) % self.q


def _primitive_root(q: int) -> int:
    phi = q - 1
    factors = set()
    m, f = phi, 2
    while f * f <= m:
        while m % f == 0:
            factors.add(f)
            m //= f
        f += 1
    if m > 1:
        factors.add(m)
    for g in range(2, q):
        if all(pow(g, phi // r, q) != 1 for r in factors):
            return g
    raise ValueError(f"no primitive root mod {q}")


def lagrange_interpolant(dom: EvalDomain, a: int, b: int) -> RingElem:
    """The unique element that is 1 at (a, b) and 0 at every other grid point."""
    k = dom.index_of(a, b)
    return RingElem(dom.lagrange_matrix()[k], dom.n, dom.q)


def absorb_check(alpha: RingElem, dom: EvalDomain, a: int, b: int) -> bool:
    """Check alpha * lam_{a,b} == alpha(a,b) * lam_{a,b} coefficientwise."""
    lam = lagrange_interpolant(dom, a, b)
    lhs = conv_mul(alpha, lam)
    rhs = lam.scale(ring_eval(alpha, a, b))
    return lhs == rhs


def interpolate(dom: EvalDomain, values) -> RingElem:
    """Inverse of grid evaluation: the element taking the given grid values."""
    vals = np.asarray(values, dtype=np.int64) % dom.q
    if vals.shape != (dom.size,):
        raise ValueError(f"expected {dom.size} values")
    coeffs = vals @ dom.lagrange_matrix() % dom.q
    return RingElem(coeffs, dom.n, dom.q)


def _solve_mod_prime(A: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Solve A x = b over Z_m (m prime) by Gaussian elimination."""
    k = A.shape[0]
    M = np.concatenate([A % m, (b % m).reshape(-1, 1)], axis=1).astype(object)
    row = 0
    pivots = []
    for col in range(k):
        piv = None
        for r in range(row, k):
            if M[r, col] % m != 0:
                piv = r
                break
        if piv is None:
            raise NotInvertible("singular system")
        if piv != row:
            M[[row, piv]] = M[[piv, row]]
        inv = pow(int(M[row, col]), m - 2, m)
        M[row] = M[row] * inv % m
        for r in range(k):
            if r != row and M[r, col] % m != 0:
                M[r] = (M[r] - M[r, col] * M[row]) % m
        pivots.append(col)
        row += 1
    x = np.zeros(k, dtype=np.int64)
    for r, col in enumerate(pivots):
        x[col] = int(M[r, k])
    return x


def ring_inverse(f: RingElem, m: int | None = None) -> RingElem:
    """Inverse of f in Z_m[x,y]/(x^n-1, y^n-1), m an odd prime.

    Solves the n**2 x n**2 linear system given by f's multiplication matrix;
    raises NotInvertible when the system is singular.
    """
    if m is None:
        m = f.modulus
    if m is None:
        raise ValueError("modulus required")
    fm = f if f.modulus == m else f.with_modulus(m)
    M = mult_matrix(fm)
    e0 = np.zeros(fm.n * fm.n, dtype=np.int64)
    e0[0] = 1
    # u * M(f) = e0  <=>  M(f)^T u = e0
    u = _solve_mod_prime(M.T, e0, m)
    return RingElem(u, fm.n, m)


def lift_centered(f: RingElem) -> RingElem:
    return f.lift_centered()
