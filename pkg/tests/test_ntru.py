import random

import numpy as np
import pytest

from bqtru.errors import (
    DecryptionFailure,
    MalformedData,
    NotInvertible,
    WeightTooLarge,
)
from bqtru.ntru import (
    MULT_COUNTER,
    NtruParams,
    circulant,
    conv,
    deserialize_ntru_public,
    ntru_decrypt,
    ntru_encrypt,
    ntru_keygen,
    ntru_public_key_bits,
    poly_inverse,
    sample_ntru_ternary,
    serialize_ntru_public,
)

SMALL = NtruParams(17, 3, 103, 2)
GUARDED = NtruParams(107, 3, 659, 34)  # q > (6d+1)p = 627


def naive_conv(f, g):
    n = len(f)
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out[(i + j) % n] += f[i] * g[j]
    return out


class TestParams:
    def test_coprimality_enforced(self):
        with pytest.raises(ValueError):
            NtruParams(11, 3, 9, 2)

    def test_weight_window(self):
        with pytest.raises(WeightTooLarge):
            NtruParams(7, 3, 101, 4)


class TestConv:
    def test_matches_naive(self):
        rng = random.Random(80)
        for _ in range(20):
            f = np.array([rng.randrange(-5, 6) for _ in range(11)])
            g = np.array([rng.randrange(-5, 6) for _ in range(11)])
            assert np.array_equal(conv(f, g), naive_conv(f, g))

    def test_mult_count(self):
        f = np.ones(13, dtype=np.int64)
        MULT_COUNTER.reset()
        conv(f, f)
        assert MULT_COUNTER.count == 169

    def test_circulant_row_identity(self):
        rng = random.Random(81)
        f = np.array([rng.randrange(-2, 3) for _ in range(9)])
        h = np.array([rng.randrange(-2, 3) for _ in range(9)])
        assert np.array_equal(f @ circulant(h), conv(f, h))


class TestInverse:
    def test_prime_modulus(self):
        rng = random.Random(82)
        found = 0
        while found < 10:
            f = np.array([rng.randrange(7) for _ in range(11)])
            try:
                inv = poly_inverse(f, 7)
            except NotInvertible:
                continue
            e0 = np.zeros(11, dtype=np.int64)
            e0[0] = 1
            assert np.array_equal(conv(f, inv, 7), e0)
            found += 1

    def test_power_of_two_modulus(self):
        rng = random.Random(83)
        found = 0
        while found < 10:
            f = sample_ntru_ternary(17, 3, 2, rng)
            try:
                inv = poly_inverse(f, 128)
            except NotInvertible:
                continue
            e0 = np.zeros(17, dtype=np.int64)
            e0[0] = 1
            assert np.array_equal(conv(f, inv, 128), e0)
            found += 1

    def test_singular_rejected(self):
        # all-ones vanishes at x=1
        with pytest.raises(NotInvertible):
            poly_inverse(np.ones(5, dtype=np.int64), 7)


class TestScheme:
    def test_inverse_identity(self):
        rng = random.Random(84)
        h, (f, g, f_p) = ntru_keygen(SMALL, rng)
        f_q = poly_inverse(f, SMALL.q)
        e0 = np.zeros(17, dtype=np.int64)
        e0[0] = 1
        assert np.array_equal(conv(f, f_q, SMALL.q), e0)
        assert np.array_equal(conv(f, f_p, SMALL.p), e0)

    def test_h_times_f_is_g(self):
        rng = random.Random(85)
        h, (f, g, _) = ntru_keygen(SMALL, rng)
        assert np.array_equal(conv(h, f, SMALL.q), g % SMALL.q)

    def test_zero_round_trip(self):
        rng = random.Random(86)
        h, sk = ntru_keygen(SMALL, rng)
        z = np.zeros(17, dtype=np.int64)
        c = ntru_encrypt(h, z, SMALL, None, r=z)
        assert not c.any()
        assert not ntru_decrypt(sk, c, SMALL).any()

    def test_guarded_round_trips(self):
        rng = random.Random(87)
        h, sk = ntru_keygen(GUARDED, rng)
        for _ in range(1000):
            m = sample_ntru_ternary(107, 20, 20, rng)
            c = ntru_encrypt(h, m, GUARDED, rng)
            assert np.array_equal(ntru_decrypt(sk, c, GUARDED, strict=True), m)

    def test_encryption_mult_count(self):
        rng = random.Random(88)
        h, _ = ntru_keygen(SMALL, rng)
        m = sample_ntru_ternary(17, 2, 2, rng)
        r = sample_ntru_ternary(17, 2, 2, rng)
        MULT_COUNTER.reset()
        ntru_encrypt(h, m, SMALL, None, r=r)
        assert MULT_COUNTER.count == 17 * 17

    def test_strict_flags_garbage(self):
        rng = random.Random(89)
        h, sk = ntru_keygen(GUARDED, rng)
        flagged = 0
        for _ in range(10):
            c = np.array([rng.randrange(659) for _ in range(107)])
            try:
                ntru_decrypt(sk, c, GUARDED, strict=True)
            except DecryptionFailure:
                flagged += 1
        assert flagged >= 9


class TestSizing:
    def test_table_value(self):
        assert ntru_public_key_bits(NtruParams(167, 3, 128, 3)) == 1169

    def test_serialization_round_trip(self):
        rng = random.Random(90)
        h, _ = ntru_keygen(SMALL, rng)
        text = serialize_ntru_public(h, SMALL)
        h2, params2 = deserialize_ntru_public(text)
        assert np.array_equal(h2, h % SMALL.q)
        assert params2 == SMALL

    def test_malformed_rejected(self):
        with pytest.raises(MalformedData):
            deserialize_ntru_public("NTRU v2 public\nn=3 p=3 q=8 d=1\nh: 1 2 3\n")
