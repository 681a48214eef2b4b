from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from chronicpred.rng import SplitMix64, derive_seed, fnv1a64, mix64

REFERENCE_1234567 = [
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
    16408922859458223821,
]


def test_reference_vector():
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(5)] == REFERENCE_1234567


def test_block_matches_scalar_stream():
    a, b = SplitMix64(99), SplitMix64(99)
    block = a.u64_block(7).tolist()
    assert block == [b.next_u64() for _ in range(7)]
    assert a.next_u64() == b.next_u64()


def test_fnv1a64_known_values():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C


def test_derive_seed_depends_on_name():
    assert derive_seed(1, "split") != derive_seed(1, "synth")
    assert derive_seed(1, "split") == mix64(1 ^ fnv1a64(b"split"))


def test_random_in_unit_interval():
    u = SplitMix64(3).random_block(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.02


@given(st.integers(min_value=1, max_value=50), st.integers(min_value=0, max_value=2**64 - 1))
def test_permutation_is_bijection(n, seed):
    p = SplitMix64(seed).permutation(n)
    assert sorted(p.tolist()) == list(range(n))


@settings(max_examples=50)
@given(st.integers(min_value=1, max_value=40), st.data())
def test_sample_without_replacement(n, data):
    k = data.draw(st.integers(min_value=0, max_value=n))
    s = SplitMix64(data.draw(st.integers(0, 2**32))).sample_without_replacement(n, k)
    assert len(set(s.tolist())) == k
    assert list(s) == sorted(s)
    assert all(0 <= v < n for v in s)


def test_below_block_range_and_rough_uniformity():
    v = SplitMix64(5).below_block(6, 60_000)
    counts = np.bincount(v, minlength=6)
    assert v.min() >= 0 and v.max() < 6
    assert np.all(np.abs(counts - 10_000) < 500)
