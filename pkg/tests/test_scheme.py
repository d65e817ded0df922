import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bqtru.errors import (
    DecryptionFailure,
    MalformedData,
    MessageOutOfRange,
    PayloadTooLarge,
    RetriesExhausted,
    WeightTooLarge,
)
from bqtru.ideal import verify_key_membership
from bqtru.params import MODERATE, TOY, Params
from bqtru.quat import Quaternion, quat_mul_schoolbook, rho
from bqtru.ring import EvalDomain
from bqtru.scheme import (
    Ciphertext,
    decode_message,
    decrypt,
    deserialize_ct,
    deserialize_private,
    deserialize_public,
    encode_message,
    encrypt,
    keygen,
    message_capacity,
    pack_public_key,
    packed_public_key_bits,
    random_message,
    sample_ternary,
    serialize_ct,
    serialize_private,
    serialize_public,
)

# oversized q beyond the 24*d*p guard: decryption noise can never wrap mod q
HIGH_Q = Params(7, 3, 547, 7, 7, 7)


@pytest.fixture(scope="module")
def toy_key():
    return keygen(TOY, random.Random(60))


@pytest.fixture(scope="module")
def moderate_key():
    return keygen(MODERATE, random.Random(61))


class TestSampleTernary:
    def test_zero_weight(self):
        assert sample_ternary(3, 0, random.Random(0)).is_zero()

    def test_counts(self):
        f = sample_ternary(7, 7, random.Random(1))
        vals, counts = np.unique(f.coeffs, return_counts=True)
        assert dict(zip(vals.tolist(), counts.tolist())) == {-1: 7, 0: 35, 1: 7}

    def test_weight_too_large(self):
        with pytest.raises(WeightTooLarge):
            sample_ternary(3, 5, random.Random(2))

    def test_mean_and_spread(self):
        rng = random.Random(3)
        total = np.zeros(49, dtype=np.int64)
        hit = np.zeros(49, dtype=np.int64)
        for _ in range(10_000):
            f = sample_ternary(7, 7, rng)
            total += f.coeffs
            hit += f.coeffs != 0
        assert abs(total.sum()) / 10_000 < 0.05
        # each slot is nonzero with probability 14/49
        assert np.allclose(hit / 10_000, 14 / 49, atol=0.02)


class TestKeygen:
    def test_public_residual_vanishes_off_T(self, toy_key):
        pk, sk = toy_key
        dom = EvalDomain(3, 7)
        resid = quat_mul_schoolbook(sk.F.with_modulus(7), pk.H) - sk.G.with_modulus(7)
        vals = rho(resid, dom)
        for k in range(9):
            if k not in sk.ideal.T:
                assert not vals[k].any()

    def test_rho_gamma_identity(self, moderate_key):
        # rho(F o H) = rho(G) + rho(gamma) pointwise
        pk, sk = moderate_key
        dom = EvalDomain(7, 113)
        lhs = rho(quat_mul_schoolbook(sk.F.with_modulus(113), pk.H), dom)
        rhs = (rho(sk.G.with_modulus(113), dom) + np.asarray(sk.rho_gamma)) % 113
        assert np.array_equal(lhs, rhs)

    def test_theta_support(self, moderate_key):
        pk, sk = moderate_key
        # gamma is supported on T: weights times W, carried through F
        for k in range(49):
            if k not in sk.ideal.T:
                assert not np.asarray(sk.rho_gamma)[k].any()

    def test_membership_identity(self, moderate_key):
        pk, sk = moderate_key
        assert verify_key_membership(sk, pk, EvalDomain(7, 113))

    def test_membership_many_toy_keys(self):
        rng = random.Random(62)
        dom = EvalDomain(3, 7)
        for _ in range(100):
            pk, sk = keygen(TOY, rng)
            assert verify_key_membership(sk, pk, dom)

    def test_f_inverse_mod_p(self, moderate_key):
        _, sk = moderate_key
        prod = quat_mul_schoolbook(sk.F.with_modulus(3), sk.F_p_inv)
        assert prod == Quaternion.one(7, 3)

    def test_F_weight_convention(self, moderate_key):
        _, sk = moderate_key
        c0 = sk.F.c0.coeffs
        assert (c0 == 1).sum() == 8 and (c0 == -1).sum() == 7
        for c in sk.F.components[1:]:
            assert (c.coeffs == 1).sum() == 7 and (c.coeffs == -1).sum() == 7

    def test_T_window(self, moderate_key):
        _, sk = moderate_key
        assert 1 <= len(sk.ideal.T) <= 7

    def test_retries_exhausted(self):
        with pytest.raises(RetriesExhausted):
            keygen(TOY, random.Random(0), max_attempts=0)


class TestEncrypt:
    def test_zero_phi_hook(self, moderate_key):
        pk, _ = moderate_key
        M = random_message(MODERATE, random.Random(63))
        ct = encrypt(pk, M, None, phi=Quaternion.zero(7))
        assert ct.C == M.with_modulus(113)

    def test_all_zero(self, moderate_key):
        pk, _ = moderate_key
        ct = encrypt(pk, Quaternion.zero(7), None, phi=Quaternion.zero(7))
        assert ct.C.is_zero()

    def test_message_out_of_range(self, moderate_key):
        pk, _ = moderate_key
        bad = Quaternion.one(7).scale(2)
        with pytest.raises(MessageOutOfRange):
            encrypt(pk, bad, random.Random(0))

    def test_strassen_schoolbook_agree(self, moderate_key):
        pk, _ = moderate_key
        rng = random.Random(64)
        M = random_message(MODERATE, rng)
        phi = Quaternion(*(sample_ternary(7, 6, rng) for _ in range(4)))
        ct = encrypt(pk, M, None, phi=phi)
        direct = quat_mul_schoolbook(pk.H, phi.with_modulus(113)).scale(3) + M.with_modulus(113)
        assert ct.C == direct


class TestDecrypt:
    def test_zero_round_trip_toy(self, toy_key):
        pk, sk = toy_key
        ct = encrypt(pk, Quaternion.zero(3), None, phi=Quaternion.zero(3))
        assert decrypt(sk, ct).is_zero()

    def test_round_trips_moderate(self, moderate_key):
        pk, sk = moderate_key
        rng = random.Random(65)
        ok = 0
        for _ in range(100):
            M = random_message(MODERATE, rng)
            ok += decrypt(sk, encrypt(pk, M, rng)) == M
        assert ok >= 99

    def test_oversized_q_never_fails(self):
        assert HIGH_Q.q > 24 * 7 * 3
        rng = random.Random(66)
        pk, sk = keygen(HIGH_Q, rng)
        for _ in range(100):
            M = random_message(HIGH_Q, rng)
            assert decrypt(sk, encrypt(pk, M, rng)) == M

    def test_strict_mode_flags_noise_overflow(self, toy_key):
        # toy parameters overflow q/2 almost surely; the zero-sum property
        # of the blinding residual catches nearly all of those wrecks
        pk, sk = toy_key
        rng = random.Random(67)
        flagged = 0
        for _ in range(50):
            M = random_message(TOY, rng)
            ct = encrypt(pk, M, rng)
            try:
                decrypt(sk, ct, strict=True)
            except DecryptionFailure:
                flagged += 1
        assert flagged >= 45

    def test_strict_mode_flags_garbage_ciphertext(self, moderate_key):
        _, sk = moderate_key
        rng = random.Random(75)
        for _ in range(3):
            from bqtru.ring import RingElem
            C = Quaternion(*(
                RingElem(np.array([rng.randrange(113) for _ in range(49)]), 7, 113)
                for _ in range(4)
            ))
            with pytest.raises(DecryptionFailure):
                decrypt(sk, Ciphertext(C), strict=True)

    def test_strict_mode_no_false_positives(self, moderate_key):
        pk, sk = moderate_key
        rng = random.Random(73)
        good = 0
        for _ in range(50):
            M = random_message(MODERATE, rng)
            try:
                good += decrypt(sk, encrypt(pk, M, rng), strict=True) == M
            except DecryptionFailure:
                pass
        assert good >= 49


class TestMessageCodec:
    def test_capacity_moderate(self):
        assert message_capacity(MODERATE) == 30

    def test_empty_payload(self):
        M = encode_message(b"", MODERATE)
        # zero length, zero padding: the whole quaternion is zero
        assert M.is_zero()
        assert decode_message(M, MODERATE) == b""

    def test_single_byte_0xff(self):
        M = encode_message(b"\xff", MODERATE)
        flat = M.vector()
        assert flat[0] == 1  # length prefix: 1 = [1,0,...]
        assert not flat[1:16].any()
        # 255 = [0,1,1,0,0,1] in little-endian base 3; digits are the
        # centered residues mod 3 so 0 and 1 map to themselves
        assert flat[16:22].tolist() == [0, 1, 1, 0, 0, 1]
        assert not flat[22:].any()
        assert decode_message(M, MODERATE) == b"\xff"

    def test_payload_too_large(self):
        with pytest.raises(PayloadTooLarge):
            encode_message(b"x" * 31, MODERATE)

    @settings(max_examples=200, deadline=None)
    @given(st.binary(max_size=30))
    def test_round_trip(self, payload):
        assert decode_message(encode_message(payload, MODERATE), MODERATE) == payload

    def test_round_trip_many(self):
        rng = random.Random(68)
        for _ in range(1000):
            payload = bytes(rng.randrange(256) for _ in range(rng.randrange(31)))
            assert decode_message(encode_message(payload, MODERATE), MODERATE) == payload

    def test_encoding_sums_unbiased(self):
        # digit 0 must map to coefficient 0: a biased encoding drives the
        # per-component coefficient sums toward the short all-ones lattice
        # direction and decryption starts failing deterministically
        rng = random.Random(76)
        worst = 0
        for _ in range(200):
            payload = bytes(rng.randrange(256) for _ in range(rng.randrange(31)))
            M = encode_message(payload, MODERATE)
            for c in M.components:
                worst = max(worst, abs(int(c.coeffs.sum())))
        assert worst < 24  # comfortably below the n^2/2 failure threshold

    def test_text_payload_regression(self):
        # this key/payload pair failed 20/20 blinding choices under the
        # digit-minus-one encoding (c0 coefficient sum was -25)
        rng = random.Random(5)
        pk, sk = keygen(MODERATE, rng)
        payload = b"hello quaternions, 30 bytes!!"
        for seed in range(5):
            ct = encrypt(pk, encode_message(payload, MODERATE), random.Random(seed))
            assert decode_message(decrypt(sk, ct), MODERATE) == payload

    def test_full_pipeline(self, moderate_key):
        pk, sk = moderate_key
        rng = random.Random(69)
        payload = b"attack at dawn, all four lanes"
        ct = encrypt(pk, encode_message(payload, MODERATE), rng)
        assert decode_message(decrypt(sk, ct), MODERATE) == payload


class TestSerialization:
    def test_public_round_trip(self, moderate_key):
        pk, _ = moderate_key
        text = serialize_public(pk)
        again = deserialize_public(text)
        assert again.params == pk.params
        assert again.H == pk.H
        assert serialize_public(again) == text

    def test_private_round_trip(self, moderate_key):
        _, sk = moderate_key
        again = deserialize_private(serialize_private(sk))
        assert again.F == sk.F and again.G == sk.G
        assert again.ideal == sk.ideal
        assert again.W == sk.W
        assert np.array_equal(np.asarray(again.rho_gamma), np.asarray(sk.rho_gamma))

    def test_deserialized_key_decrypts(self, moderate_key):
        pk, sk = moderate_key
        sk2 = deserialize_private(serialize_private(sk))
        rng = random.Random(70)
        M = random_message(MODERATE, rng)
        assert decrypt(sk2, encrypt(pk, M, rng)) == M

    def test_ct_round_trip(self, moderate_key):
        pk, _ = moderate_key
        ct = encrypt(pk, random_message(MODERATE, random.Random(71)), random.Random(72))
        again = deserialize_ct(serialize_ct(ct))
        assert again.C == ct.C

    def test_header_corruption_rejected(self, moderate_key):
        pk, _ = moderate_key
        text = serialize_public(pk)
        header = text.splitlines()[0]
        rest = text.split("\n", 1)[1]
        for pos in range(len(header)):
            flipped = header[:pos] + chr(ord(header[pos]) ^ 1) + header[pos + 1:]
            with pytest.raises(MalformedData):
                deserialize_public(flipped + "\n" + rest)

    def test_out_of_range_coefficient(self, moderate_key):
        pk, _ = moderate_key
        text = serialize_public(pk)
        bad = text.replace("h3:", "h3: 113", 1)  # 113 is not a residue mod 113
        with pytest.raises(MalformedData):
            deserialize_public(bad)

    def test_wrong_kind(self, moderate_key):
        pk, _ = moderate_key
        with pytest.raises(MalformedData):
            deserialize_private(serialize_public(pk))


class TestPackedSizes:
    def test_table_values(self):
        assert packed_public_key_bits(MODERATE) == 1372
        assert packed_public_key_bits(Params(11, 3, 199, 17, 17, 13)) == 3872

    def test_packed_length(self, moderate_key):
        pk, _ = moderate_key
        assert len(pack_public_key(pk)) == (1372 + 7) // 8
