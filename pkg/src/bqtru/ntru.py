"""Minimal univariate NTRU over Z_q[x]/(x^n - 1), used as a baseline.

Deliberately schoolbook: one encryption costs a single cyclic convolution
of n^2 scalar multiplications, which is the figure the operation-count
comparisons are made against.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import (
    DecryptionFailure,
    MalformedData,
    NotInvertible,
    RetriesExhausted,
    WeightTooLarge,
)


class _MultCounter:
    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


MULT_COUNTER = _MultCounter()


@dataclass(frozen=True)
class NtruParams:
    n: int
    p: int
    q: int
    d: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p and q must be coprime")
        if self.q <= self.p:
            raise ValueError("q must exceed p")
        if 2 * self.d + 1 > self.n:
            raise WeightTooLarge("2d+1 nonzero slots do not fit")


def conv(f: np.ndarray, g: np.ndarray, modulus: int | None = None) -> np.ndarray:
    """Cyclic convolution; counts its n^2 scalar multiplications."""
    n = len(f)
    MULT_COUNTER.count += n * n
    out = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(f):
        if c:
            out += c * np.roll(g, i)
    return out % modulus if modulus is not None else out


def circulant(h: np.ndarray) -> np.ndarray:
    """Matrix with row r = x^r * h; vector(f) @ circulant(h) = vector(f*h)."""
    n = len(h)
    return np.stack([np.roll(h, r) for r in range(n)])


def _poly_inverse_mod_prime(f: np.ndarray, m: int) -> np.ndarray:
    """Inverse in Z_m[x]/(x^n-1), m prime, by solving the circulant system."""
    n = len(f)
    M = (circulant(f).T % m).astype(object)
    aug = np.concatenate([M, np.eye(n, dtype=object)], axis=1)
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if aug[r][col] % m), None)
        if piv is None:
            continue
        aug[[row, piv]] = aug[[piv, row]]
        inv = pow(int(aug[row][col]) % m, m - 2, m)
        aug[row] = aug[row] * inv % m
        for r in range(n):
            if r != row and aug[r][col] % m:
                aug[r] = (aug[r] - aug[r][col] * aug[row]) % m
        row += 1
    if row < n:
        raise NotInvertible("polynomial is singular modulo the prime")
    sol = aug[:, n:]
    e0 = np.zeros(n, dtype=object)
    e0[0] = 1
    return np.array(sol @ e0 % m, dtype=np.int64)


def poly_inverse(f: np.ndarray, modulus: int) -> np.ndarray:
    """Inverse mod a prime or a power of two (Hensel lifting from GF(2))."""
    f = np.asarray(f, dtype=np.int64) % modulus
    if modulus % 2 == 0:
        k = modulus.bit_length() - 1
        if modulus != 1 << k:
            raise ValueError("even modulus must be a power of two")
        inv = _poly_inverse_mod_prime(f, 2)
        two = np.zeros(len(f), dtype=np.int64)
        two[0] = 2
        m = 2
        while m < modulus:
            m = min(m * m, modulus)
            # Newton step: inv <- inv * (2 - f * inv) mod m
            prod = conv(f % m, inv, m)
            inv = conv(inv, (two - prod) % m, m)
        return inv % modulus
    return _poly_inverse_mod_prime(f, modulus)


def sample_ntru_ternary(n: int, plus: int, minus: int, rng: random.Random) -> np.ndarray:
    if plus + minus > n:
        raise WeightTooLarge("too many nonzero coefficients")
    out = np.zeros(n, dtype=np.int64)
    picks = rng.sample(range(n), plus + minus)
    out[picks[:plus]] = 1
    out[picks[plus:]] = -1
    return out


def ntru_keygen(params: NtruParams, rng, max_attempts: int = 1000):
    """Public h = f^{-1} * g mod q; private (f, g).

    f takes d+1 ones and d minus-ones -- a balanced f has f(1) = 0 and is
    never invertible.  g is balanced.
    """
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    n, p, q, d = params.n, params.p, params.q, params.d
    for _ in range(max_attempts):
        f = sample_ntru_ternary(n, d + 1, d, rng)
        try:
            f_q = poly_inverse(f, q)
            f_p = poly_inverse(f, p)
        except NotInvertible:
            continue
        g = sample_ntru_ternary(n, d, d, rng)
        h = conv(f_q, g, q)
        return h, (f, g, f_p)
    raise RetriesExhausted(f"no invertible f in {max_attempts} attempts")


def ntru_encrypt(h: np.ndarray, m: np.ndarray, params: NtruParams, rng,
                 r: np.ndarray | None = None) -> np.ndarray:
    if r is None:
        rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        r = sample_ntru_ternary(params.n, params.d, params.d, rng)
    return (params.p * conv(h, r, params.q) + m) % params.q


def ntru_decrypt(sk, c: np.ndarray, params: NtruParams, strict: bool = False) -> np.ndarray:
    f, g, f_p = sk
    p, q = params.p, params.q
    a = conv(f, c, q)
    a = (a + (q - 1) // 2) % q - (q - 1) // 2  # center
    m = conv(f_p, a % p, p)
    m = (m + (p - 1) // 2) % p - (p - 1) // 2
    if strict:
        resid = (a - conv(f, m)) // p
        if np.abs(resid).max() > 2 * params.d or resid.sum() != 0:
            raise DecryptionFailure("mask residual is not a valid g*r")
    return m


def ntru_public_key_bits(params: NtruParams) -> int:
    return params.n * (params.q - 1).bit_length()


# ---------------------------------------------------------------------------
# text serialization, mirroring the quaternion scheme's format
# ---------------------------------------------------------------------------

_MAGIC = "NTRU v1"


def serialize_ntru_public(h: np.ndarray, params: NtruParams) -> str:
    return "\n".join([
        f"{_MAGIC} public",
        f"n={params.n} p={params.p} q={params.q} d={params.d}",
        "h: " + " ".join(str(int(v)) for v in h % params.q),
    ]) + "\n"


def deserialize_ntru_public(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 3 or lines[0] != f"{_MAGIC} public":
        raise MalformedData("bad NTRU public key")
    try:
        kv = dict(tok.split("=") for tok in lines[1].split())
        params = NtruParams(int(kv["n"]), int(kv["p"]), int(kv["q"]), int(kv["d"]))
    except (KeyError, ValueError) as exc:
        raise MalformedData("bad NTRU parameter line") from exc
    label, _, rest = lines[2].partition(":")
    if label.strip() != "h":
        raise MalformedData("missing h line")
    h = np.array([int(v) for v in rest.split()], dtype=np.int64)
    if len(h) != params.n or h.min() < 0 or h.max() >= params.q:
        raise MalformedData("h coefficients out of range")
    return h, params
