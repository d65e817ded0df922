"""Split-quaternion algebra (i^2 = j^2 = 1, ij = -ji = k) over the bivariate ring.

Products are available in two equivalent forms: the schoolbook expansion
(16 ring products) and the Strassen route through the 2x2 matrix image
(7 ring products).  Both are instrumented via ring.CONV_COUNTER.

Scalar quaternions (entries in Z_q rather than ring elements) back the
grid-evaluation map and the blinding factor used in key generation.
"""

from __future__ import annotations

import numpy as np

from .errors import ContextMismatch, EvenModulus, NormVanishesOutsideT, NotInvertible
from .ring import EvalDomain, RingElem, conv_mul, interpolate, ring_inverse


class Quaternion:
    """c0 + c1*i + c2*j + c3*k with RingElem components sharing one context."""

    __slots__ = ("c0", "c1", "c2", "c3")

    def __init__(self, c0: RingElem, c1: RingElem, c2: RingElem, c3: RingElem):
        for c in (c1, c2, c3):
            if c.n != c0.n or c.modulus != c0.modulus:
                raise ContextMismatch("quaternion components must share one ring context")
        self.c0, self.c1, self.c2, self.c3 = c0, c1, c2, c3

    @property
    def components(self):
        return (self.c0, self.c1, self.c2, self.c3)

    @property
    def n(self) -> int:
        return self.c0.n

    @property
    def modulus(self):
        return self.c0.modulus

    @classmethod
    def zero(cls, n: int, modulus=None) -> "Quaternion":
        return cls(*(RingElem.zero(n, modulus) for _ in range(4)))

    @classmethod
    def one(cls, n: int, modulus=None) -> "Quaternion":
        z = RingElem.zero(n, modulus)
        return cls(RingElem.one(n, modulus), z, z, z)

    @classmethod
    def unit(cls, which: str, n: int, modulus=None) -> "Quaternion":
        comps = [RingElem.zero(n, modulus) for _ in range(4)]
        comps["1ijk".index(which)] = RingElem.one(n, modulus)
        return cls(*comps)

    @classmethod
    def from_scalar(cls, s, n: int, modulus=None) -> "Quaternion":
        """Embed a length-4 scalar quaternion as constant polynomials."""
        comps = []
        for v in s:
            c = np.zeros(n * n, dtype=np.int64)
            c[0] = int(v)
            comps.append(RingElem(c, n, modulus))
        return cls(*comps)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "Quaternion":
        return Quaternion(*(-a for a in self.components))

    def scale(self, c: int) -> "Quaternion":
        return Quaternion(*(a.scale(c) for a in self.components))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quaternion):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    def __hash__(self):
        return hash(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def with_modulus(self, modulus) -> "Quaternion":
        return Quaternion(*(c.with_modulus(modulus) for c in self.components))

    def lift_centered(self) -> "Quaternion":
        return Quaternion(*(c.lift_centered() for c in self.components))

    def lift_positive(self) -> "Quaternion":
        return Quaternion(*(c.lift_positive() for c in self.components))

    def vector(self) -> np.ndarray:
        """Concatenated coefficient vector (length 4*n**2)."""
        return np.concatenate([c.coeffs for c in self.components])

    @classmethod
    def from_vector(cls, vec, n: int, modulus=None) -> "Quaternion":
        vec = np.asarray(vec)
        nsq = n * n
        return cls(*(RingElem(vec[i * nsq:(i + 1) * nsq], n, modulus) for i in range(4)))

    def __repr__(self):
        return f"Quaternion(n={self.n}, mod={self.modulus})"


def quat_mul_schoolbook(F: Quaternion, G: Quaternion) -> Quaternion:
    """Direct product expansion; exactly 16 convolution products."""
    f0, f1, f2, f3 = F.components
    g0, g1, g2, g3 = G.components
    c0 = conv_mul(f0, g0) + conv_mul(f1, g1) + conv_mul(f2, g2) - conv_mul(f3, g3)
    c1 = conv_mul(f0, g1) + conv_mul(f1, g0) - conv_mul(f2, g3) + conv_mul(f3, g2)
    c2 = conv_mul(f0, g2) + conv_mul(f1, g3) + conv_mul(f2, g0) - conv_mul(f3, g1)
    c3 = conv_mul(f0, g3) + conv_mul(f1, g2) - conv_mul(f2, g1) + conv_mul(f3, g0)
    return Quaternion(c0, c1, c2, c3)


def quat_to_matrix(F: Quaternion):
    """2x2 matrix image [[c0+c1, c2+c3], [c2-c3, c0-c1]] of the algebra isomorphism."""
    c0, c1, c2, c3 = F.components
    return [[c0 + c1, c2 + c3], [c2 - c3, c0 - c1]]


def matrix_to_quat(M) -> Quaternion:
    """Inverse of quat_to_matrix; requires an odd modulus (divides by 2)."""
    m = M[0][0].modulus
    if m is None or m % 2 == 0:
        raise EvenModulus("matrix image inversion needs an odd modulus")
    inv2 = (m + 1) // 2
    c0 = (M[0][0] + M[1][1]).scale(inv2)
    c1 = (M[0][0] - M[1][1]).scale(inv2)
    c2 = (M[0][1] + M[1][0]).scale(inv2)
    c3 = (M[0][1] - M[1][0]).scale(inv2)
    return Quaternion(c0, c1, c2, c3)


def quat_mul_strassen(F: Quaternion, G: Quaternion) -> Quaternion:
    """Product via Strassen's seven multiplications on the 2x2 images."""
    m = F.modulus
    if m is None or m % 2 == 0:
        raise EvenModulus("Strassen recombination needs the inverse of 2")
    A = quat_to_matrix(F)
    B = quat_to_matrix(G)
    m1 = conv_mul(A[0][0] + A[1][1], B[0][0] + B[1][1])
    m2 = conv_mul(A[1][0] + A[1][1], B[0][0])
    m3 = conv_mul(A[0][0], B[0][1] - B[1][1])
    m4 = conv_mul(A[1][1], B[1][0] - B[0][0])
    m5 = conv_mul(A[0][0] + A[0][1], B[1][1])
    m6 = conv_mul(A[1][0] - A[0][0], B[0][0] + B[0][1])
    m7 = conv_mul(A[0][1] - A[1][1], B[1][0] + B[1][1])
    C = [[m1 + m4 - m5 + m7, m3 + m5], [m2 + m4, m1 - m2 + m3 + m6]]
    return matrix_to_quat(C)


def conjugate(F: Quaternion) -> Quaternion:
    return Quaternion(F.c0, -F.c1, -F.c2, -F.c3)


def quat_norm(F: Quaternion) -> RingElem:
    """N(F) = c0^2 - c1^2 - c2^2 + c3^2; satisfies F o conj(F) = N(F)."""
    c0, c1, c2, c3 = F.components
    return conv_mul(c0, c0) - conv_mul(c1, c1) - conv_mul(c2, c2) + conv_mul(c3, c3)


def quat_inverse_mod_p(F: Quaternion) -> Quaternion:
    """Inverse in the quaternion algebra over Z_p: N(F)^-1 o conj(F)."""
    ninv = ring_inverse(quat_norm(F))
    Fbar = conjugate(F)
    return Quaternion(*(conv_mul(ninv, c) for c in Fbar.components))


# ---------------------------------------------------------------------------
# scalar quaternions over Z_q (entries are integers, not polynomials)
# ---------------------------------------------------------------------------

def scalar_mul(a, b, q: int):
    """Product of two scalar quaternions (4-tuples) mod q."""
    a0, a1, a2, a3 = (int(v) % q for v in a)
    b0, b1, b2, b3 = (int(v) % q for v in b)
    return (
        (a0 * b0 + a1 * b1 + a2 * b2 - a3 * b3) % q,
        (a0 * b1 + a1 * b0 - a2 * b3 + a3 * b2) % q,
        (a0 * b2 + a1 * b3 + a2 * b0 - a3 * b1) % q,
        (a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0) % q,
    )


def scalar_norm(a, q: int) -> int:
    a0, a1, a2, a3 = (int(v) % q for v in a)
    return (a0 * a0 - a1 * a1 - a2 * a2 + a3 * a3) % q


def scalar_inverse(a, q: int):
    """Inverse of a scalar quaternion mod prime q; fails on zero norm."""
    nrm = scalar_norm(a, q)
    if nrm == 0:
        raise NotInvertible("scalar quaternion has zero norm")
    ninv = pow(nrm, q - 2, q)
    a0, a1, a2, a3 = (int(v) % q for v in a)
    return (a0 * ninv % q, -a1 * ninv % q, -a2 * ninv % q, -a3 * ninv % q)


def rho(F: Quaternion, dom: EvalDomain) -> np.ndarray:
    """Grid evaluation map: row k is the scalar quaternion F(points[k]).

    Shape (n**2, 4); a homomorphism for both + and the quaternion product.
    """
    return np.stack([dom.eval_all(c) for c in F.components], axis=1)


def rho_mul(u: np.ndarray, v: np.ndarray, q: int) -> np.ndarray:
    """Pointwise scalar-quaternion product of two evaluation vectors."""
    return np.array([scalar_mul(a, b, q) for a, b in zip(u, v)], dtype=np.int64)


def quat_inverse_mod_J(F: Quaternion, t_indices, dom: EvalDomain) -> Quaternion:
    """Inverse of F modulo the secret ideal: pointwise inversion off T.

    Every grid zero of N(F) must lie inside T; the result evaluates to the
    scalar inverse of F at each point of E \\ T and to zero on T, so that
    F o F^-1 == 1 at every point off T.
    """
    q = dom.q
    t_set = set(int(i) for i in t_indices)
    vals = rho(F, dom)
    norm_vals = dom.eval_all(quat_norm(F))
    inv_vals = np.zeros_like(vals)
    for k in range(dom.size):
        if k in t_set:
            continue
        if norm_vals[k] == 0:
            raise NormVanishesOutsideT(f"norm of F vanishes at grid index {k} outside T")
        inv_vals[k] = scalar_inverse(vals[k], q)
    return Quaternion(*(interpolate(dom, inv_vals[:, c]) for c in range(4)))
