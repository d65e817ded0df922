"""Public system parameters and the shipped parameter sets."""

from __future__ import annotations

from dataclasses import dataclass, field


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Params:
    """Public parameters (n, p, q) plus the ternary weight counts.

    n is the degree of both cyclic variables, so ring elements have n**2
    coefficients and quaternions 4*n**2.  The splitting condition n | q-1
    guarantees the full n**2-point evaluation grid exists mod q.
    """

    n: int
    p: int
    q: int
    d_f: int
    d_g: int
    d_phi: int
    d_m: int = 0
    max_T: int = field(default=0)

    def __post_init__(self):
        n, p, q = self.n, self.p, self.q
        if not _is_prime(n):
            raise ValueError(f"n={n} must be prime")
        if not _is_prime(p) or not _is_prime(q):
            raise ValueError("p and q must be prime")
        if q <= p:
            raise ValueError("q must exceed p")
        if p == 2 or q == 2:
            raise ValueError("even moduli are not supported (centered lift needs odd m)")
        if (q - 1) % n != 0:
            raise ValueError(f"n={n} must divide q-1={q - 1}")
        if q % n == 0:
            raise ValueError("gcd(n, q) must be 1")
        half = n * n // 2
        for name in ("d_f", "d_g", "d_phi", "d_m"):
            d = getattr(self, name)
            if d < 0 or d > half:
                raise ValueError(f"{name}={d} out of range [0, {half}]")
        if self.max_T == 0:
            object.__setattr__(self, "max_T", n)
        if self.max_T > n:
            raise ValueError(f"max_T={self.max_T} exceeds n={n}")

    @property
    def nsq(self) -> int:
        return self.n * self.n


# "toy" relaxes the weight guidance so n=3 keygen terminates quickly.
# It is NOT SECURE and exists for testing and demonstrations only.
TOY = Params(n=3, p=3, q=7, d_f=1, d_g=1, d_phi=1, d_m=1)

# The two production-style sets (moderate / highest security levels).
MODERATE = Params(n=7, p=3, q=113, d_f=7, d_g=6, d_phi=6, d_m=6)
HIGHEST = Params(n=11, p=3, q=199, d_f=17, d_g=17, d_phi=13, d_m=13)

PARAM_SETS = {"toy": TOY, "moderate": MODERATE, "highest": HIGHEST}


def get_params(name: str) -> Params:
    try:
        return PARAM_SETS[name]
    except KeyError:
        raise ValueError(f"unknown parameter set {name!r}; pick from {sorted(PARAM_SETS)}")
