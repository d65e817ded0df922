"""Key generation, encryption, and CVP-based decryption.

Keys live over the bivariate convolution ring; a keypair carries the
secret grid subset T, the interpolant combination sigma, and the derived
coefficient-lattice basis used by decryption.  All randomness comes from
an explicit random.Random instance supplied by the caller.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DecryptionFailure,
    MalformedData,
    MessageOutOfRange,
    NotInvertible,
    PayloadTooLarge,
    RetriesExhausted,
    WeightTooLarge,
)
from .ideal import IdealSpec, LatticeBasis, build_D_prime, derive_T, make_ideal
from .lattice import lll_reduce, sphere_decode
from .params import Params
from .quat import (
    Quaternion,
    quat_inverse_mod_J,
    quat_inverse_mod_p,
    quat_mul_schoolbook,
    quat_mul_strassen,
    quat_norm,
    rho,
    scalar_norm,
)
from .ring import EvalDomain, RingElem, ring_inverse


@dataclass
class PublicKey:
    params: Params
    H: Quaternion


@dataclass
class PrivateKey:
    params: Params
    F: Quaternion
    G: Quaternion
    rho_gamma: np.ndarray
    ideal: IdealSpec
    F_p_inv: Quaternion
    D_prime: LatticeBasis
    W: tuple
    _reduced: object = field(default=None, repr=False, compare=False)

    def reduced_basis(self):
        if self._reduced is None:
            self._reduced = lll_reduce(self.D_prime.rows.astype(np.int64))
        return self._reduced


@dataclass
class Ciphertext:
    C: Quaternion


def sample_ternary(n: int, d: int, rng: random.Random) -> RingElem:
    """Uniform polynomial with exactly d coefficients +1 and d coefficients -1."""
    return _sample_signed(n, d, d, rng)


def _sample_signed(n: int, plus: int, minus: int, rng: random.Random) -> RingElem:
    if plus + minus > n * n:
        raise WeightTooLarge(f"{plus}+{minus} nonzeros do not fit in {n * n} slots")
    coeffs = np.zeros(n * n, dtype=np.int64)
    picks = rng.sample(range(n * n), plus + minus)
    coeffs[picks[:plus]] = 1
    coeffs[picks[plus:]] = -1
    return RingElem(coeffs, n, None)


def _rng_of(rng) -> random.Random:
    return rng if isinstance(rng, random.Random) else random.Random(rng)


def keygen(params: Params, rng, max_attempts: int = 10_000):
    """Generate a keypair, retrying G until its zero set and F cooperate.

    The first component of F carries one extra +1 (d_f+1 ones, d_f minus
    ones): a fully balanced component vanishes at the grid point (1,1),
    which would force the norm of F to vanish there and make the required
    inverses impossible.
    """
    rng = _rng_of(rng)
    n, p, q = params.n, params.p, params.q
    dom = EvalDomain(n, q)
    for _ in range(max_attempts):
        G = Quaternion(*(sample_ternary(n, params.d_g, rng) for _ in range(4)))
        G_q = G.with_modulus(q)
        T = derive_T(G_q, dom)
        if not 1 <= len(T) <= params.max_T:
            continue
        F = _find_F(params, T, dom, rng)
        if F is None:
            continue
        F_q = F.with_modulus(q)
        weights = [rng.randrange(1, q) for _ in T]
        while True:
            W = tuple(rng.randrange(1, q) for _ in range(4))
            if scalar_norm(W, q) != 0:
                break
        ideal = make_ideal(T, weights, dom)
        theta = Quaternion(*(ideal.sigma.scale(w) for w in W))
        F_inv = quat_inverse_mod_J(F_q, T, dom)
        H = quat_mul_schoolbook(F_inv, G_q) + theta
        rho_gamma = rho(quat_mul_schoolbook(F_q, theta), dom)
        F_p_inv = quat_inverse_mod_p(F.with_modulus(p))
        D_prime = build_D_prime(ideal, dom)
        pk = PublicKey(params, H)
        sk = PrivateKey(params, F, G, rho_gamma, ideal, F_p_inv, D_prime, W)
        return pk, sk
    raise RetriesExhausted(f"no usable G found in {max_attempts} attempts")


def _find_F(params: Params, T, dom: EvalDomain, rng: random.Random,
            attempts: int = 100):
    """F whose norm vanishes only inside T and is invertible mod p."""
    for _ in range(attempts):
        comps = [_sample_signed(params.n, params.d_f + 1, params.d_f, rng)]
        comps += [sample_ternary(params.n, params.d_f, rng) for _ in range(3)]
        F = Quaternion(*comps)
        norm_vals = dom.eval_all(quat_norm(F.with_modulus(dom.q)))
        if any(norm_vals[k] == 0 for k in range(dom.size) if k not in T):
            continue
        try:
            ring_inverse(quat_norm(F.with_modulus(params.p)))
        except NotInvertible:
            continue
        return F
    return None


def random_message(params: Params, rng) -> Quaternion:
    """Uniform quaternion with coefficients centered mod p (test utility)."""
    rng = _rng_of(rng)
    half = (params.p - 1) // 2
    nsq = params.nsq
    comps = [
        RingElem(np.array([rng.randrange(-half, half + 1) for _ in range(nsq)]),
                 params.n, None)
        for _ in range(4)
    ]
    return Quaternion(*comps)


def encrypt(pk: PublicKey, M: Quaternion, rng, phi: Quaternion | None = None) -> Ciphertext:
    """C = p * H o Phi + M mod q, with a fresh ternary blinding Phi."""
    params = pk.params
    half = (params.p - 1) // 2
    for c in M.components:
        if c.modulus is not None or np.abs(c.coeffs).max(initial=0) > half:
            raise MessageOutOfRange("message coefficients must be centered mod p")
    if phi is None:
        rng = _rng_of(rng)
        phi = Quaternion(*(sample_ternary(params.n, params.d_phi, rng) for _ in range(4)))
    prod = quat_mul_strassen(pk.H, phi.with_modulus(params.q))
    return Ciphertext(prod.scale(params.p) + M.with_modulus(params.q))


def decrypt(sk: PrivateKey, ct: Ciphertext, strict: bool = False) -> Quaternion:
    """Recover M by solving one closest-vector problem per component.

    F o C equals a coefficient-lattice point plus the small vector
    p*G o Phi + F o M; subtracting the closest lattice point and reducing
    centered mod p undoes the blinding.
    """
    params = sk.params
    p, q = params.p, params.q
    rb = sk.reduced_basis()
    A = quat_mul_schoolbook(sk.F.with_modulus(q), ct.C).lift_positive()
    half_q = (q - 1) // 2
    v_comps = []
    for comp in A.components:
        a = comp.coeffs.astype(np.int64)
        B = sphere_decode(rb, a.astype(np.float64), max_nodes=50_000)
        v = a - B
        v = (v + half_q) % q - half_q
        v_comps.append(v)
    V = Quaternion(*(RingElem(v % p, params.n, p) for v in v_comps))
    M_hat = quat_mul_schoolbook(sk.F_p_inv, V).lift_centered()
    if strict:
        # On success V - F o M_hat equals p * G o Phi exactly over Z.  Two
        # checkable consequences: each quaternion component of G o Phi sums
        # four convolution products bounded by the support overlap, and --
        # because G is balanced -- it evaluates to 0 at the grid point
        # (1, 1), i.e. its coefficients sum to zero.  (The mod-p residue of
        # V - F o M_hat is zero by construction of M_hat and carries no
        # information.)
        FM = quat_mul_schoolbook(sk.F, M_hat)
        limit = 8 * min(params.d_g, params.d_phi)
        for v, c in zip(v_comps, FM.components):
            resid = (v - c.coeffs) // p
            if np.abs(resid).max() > limit or resid.sum() != 0:
                raise DecryptionFailure("blinding residual is not a valid mask")
    return M_hat


# ---------------------------------------------------------------------------
# message encoding: bytes <-> centered base-p digits packed into a quaternion
# ---------------------------------------------------------------------------

_LEN_DIGITS = 16


def _digits_per_byte(p: int) -> int:
    k, v = 0, 1
    while v < 256:
        v *= p
        k += 1
    return k


def message_capacity(params: Params) -> int:
    """Largest payload (bytes) that fits after the length prefix."""
    return (4 * params.nsq - _LEN_DIGITS) // _digits_per_byte(params.p)


def encode_message(payload: bytes, params: Params) -> Quaternion:
    p = params.p
    per = _digits_per_byte(p)
    if len(payload) > message_capacity(params):
        raise PayloadTooLarge(
            f"{len(payload)} bytes exceed the {message_capacity(params)}-byte capacity"
        )
    digits = []
    v = len(payload)
    for _ in range(_LEN_DIGITS):
        digits.append(v % p)
        v //= p
    for byte in payload:
        b = byte
        for _ in range(per):
            digits.append(b % p)
            b //= p
    nsq = params.nsq
    flat = np.zeros(4 * nsq, dtype=np.int64)
    flat[:len(digits)] = digits
    # centered residue: digit 0 stays 0 so padding and leading zeros do not
    # bias the coefficient sums (a large per-component sum lines up with a
    # short lattice direction and breaks decryption)
    half = (p - 1) // 2
    flat[flat > half] -= p
    return Quaternion.from_vector(flat, params.n, None)


def decode_message(M: Quaternion, params: Params) -> bytes:
    p = params.p
    per = _digits_per_byte(p)
    half = (p - 1) // 2
    flat = M.vector().astype(np.int64)
    if flat.min() < -half or flat.max() > half:
        raise MalformedData("coefficients are not centered base-p digits")
    flat = flat % p  # undo the centered residue: -1 -> p-1
    length = 0
    for i in range(_LEN_DIGITS - 1, -1, -1):
        length = length * p + int(flat[i])
    if length > message_capacity(params):
        raise MalformedData("length prefix exceeds capacity")
    out = bytearray()
    pos = _LEN_DIGITS
    for _ in range(length):
        b = 0
        for i in range(per - 1, -1, -1):
            b = b * p + int(flat[pos + i])
        if b > 255:
            raise MalformedData("byte group out of range")
        out.append(b)
        pos += per
    return bytes(out)


# ---------------------------------------------------------------------------
# serialization (text format, one item per file)
# ---------------------------------------------------------------------------

_MAGIC = "BQTRU v1"


def _param_line(params: Params) -> str:
    return (f"n={params.n} p={params.p} q={params.q} "
            f"df={params.d_f} dg={params.d_g} dphi={params.d_phi}")


def _parse_params(line: str) -> Params:
    try:
        kv = dict(tok.split("=") for tok in line.split())
        # the message weight is not part of the wire format; every shipped
        # parameter set uses d_m = d_phi
        return Params(n=int(kv["n"]), p=int(kv["p"]), q=int(kv["q"]),
                      d_f=int(kv["df"]), d_g=int(kv["dg"]), d_phi=int(kv["dphi"]),
                      d_m=int(kv["dphi"]))
    except (KeyError, ValueError) as exc:
        raise MalformedData(f"bad parameter line: {line!r}") from exc


def _coeff_line(label: str, values) -> str:
    return label + ": " + " ".join(str(int(v)) for v in values)


def _read_coeffs(lines: dict, label: str, count: int, lo: int, hi: int) -> np.ndarray:
    if label not in lines:
        raise MalformedData(f"missing field {label}")
    vals = np.array([int(v) for v in lines[label].split()], dtype=np.int64)
    if len(vals) != count or vals.min() < lo or vals.max() >= hi:
        raise MalformedData(f"field {label} malformed")
    return vals


def serialize_public(pk: PublicKey) -> str:
    out = [f"{_MAGIC} public", _param_line(pk.params)]
    H = pk.H.lift_positive()
    for i, c in enumerate(H.components):
        out.append(_coeff_line(f"h{i}", c.coeffs))
    return "\n".join(out) + "\n"


def serialize_private(sk: PrivateKey) -> str:
    out = [f"{_MAGIC} private", _param_line(sk.params)]
    for i, c in enumerate(sk.F.components):
        out.append(_coeff_line(f"f{i}", c.coeffs))
    for i, c in enumerate(sk.G.components):
        out.append(_coeff_line(f"g{i}", c.coeffs))
    out.append(_coeff_line("T", sk.ideal.T))
    out.append(_coeff_line("weights", sk.ideal.weights))
    out.append(_coeff_line("W", sk.W))
    out.append(_coeff_line("rhogamma", np.asarray(sk.rho_gamma).reshape(-1)))
    return "\n".join(out) + "\n"


def serialize_ct(ct: Ciphertext) -> str:
    q = ct.C.modulus
    out = [f"{_MAGIC} ct", f"q={q} n={ct.C.n}"]
    for i, c in enumerate(ct.C.lift_positive().components):
        out.append(_coeff_line(f"c{i}", c.coeffs))
    return "\n".join(out) + "\n"


def _split_fields(lines) -> dict:
    fields = {}
    for ln in lines:
        if ":" not in ln:
            raise MalformedData(f"expected 'label: values', got {ln!r}")
        label, _, rest = ln.partition(":")
        fields[label.strip()] = rest.strip()
    return fields


def deserialize_public(text: str) -> PublicKey:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or lines[0] != f"{_MAGIC} public":
        raise MalformedData("bad public key header")
    params = _parse_params(lines[1])
    fields = _split_fields(lines[2:])
    comps = [
        RingElem(_read_coeffs(fields, f"h{i}", params.nsq, 0, params.q),
                 params.n, params.q)
        for i in range(4)
    ]
    return PublicKey(params, Quaternion(*comps))


def deserialize_private(text: str) -> PrivateKey:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or lines[0] != f"{_MAGIC} private":
        raise MalformedData("bad private key header")
    params = _parse_params(lines[1])
    fields = _split_fields(lines[2:])
    nsq = params.nsq
    F = Quaternion(*(RingElem(_read_coeffs(fields, f"f{i}", nsq, -1, 2),
                              params.n, None) for i in range(4)))
    G = Quaternion(*(RingElem(_read_coeffs(fields, f"g{i}", nsq, -1, 2),
                              params.n, None) for i in range(4)))
    T = [int(v) for v in fields.get("T", "").split()]
    if not T or any(not 0 <= t < nsq for t in T):
        raise MalformedData("bad T field")
    weights = _read_coeffs(fields, "weights", len(T), 1, params.q)
    W = tuple(int(v) for v in _read_coeffs(fields, "W", 4, 1, params.q))
    rho_gamma = _read_coeffs(fields, "rhogamma", 4 * nsq, 0, params.q).reshape(nsq, 4)
    dom = EvalDomain(params.n, params.q)
    ideal = make_ideal(T, weights, dom)
    F_p_inv = quat_inverse_mod_p(F.with_modulus(params.p))
    D_prime = build_D_prime(ideal, dom)
    return PrivateKey(params, F, G, rho_gamma, ideal, F_p_inv, D_prime, W)


def deserialize_ct(text: str) -> Ciphertext:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or lines[0] != f"{_MAGIC} ct":
        raise MalformedData("bad ciphertext header")
    try:
        kv = dict(tok.split("=") for tok in lines[1].split())
        q, n = int(kv["q"]), int(kv["n"])
    except (KeyError, ValueError) as exc:
        raise MalformedData("bad ciphertext parameter line") from exc
    fields = _split_fields(lines[2:])
    comps = [RingElem(_read_coeffs(fields, f"c{i}", n * n, 0, q), n, q)
             for i in range(4)]
    return Ciphertext(Quaternion(*comps))


def packed_public_key_bits(params: Params) -> int:
    """Payload size of the bit-packed public key: one field element per slot."""
    return 4 * params.nsq * (params.q - 1).bit_length()


def pack_public_key(pk: PublicKey) -> bytes:
    """Fixed-width bit packing, used only for size accounting."""
    width = (pk.params.q - 1).bit_length()
    acc = 0
    nbits = 0
    for c in pk.H.lift_positive().components:
        for v in c.coeffs:
            acc = (acc << width) | int(v)
            nbits += width
    return acc.to_bytes((nbits + 7) // 8, "big")
