import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bmpstego import (
    CapacityExceeded,
    SlotParams,
    bits_to_bytes,
    bytes_to_bits,
    embed_bits,
    extract_bits,
    set_lsb_pm1,
    slot_address,
)


class TestSetLsb:
    def test_known_moves(self):
        assert set_lsb_pm1(44, 1) == 45
        assert set_lsb_pm1(45, 1) == 45
        assert set_lsb_pm1(255, 0) == 254
        assert set_lsb_pm1(0, 1) == 1

    def test_exhaustive_no_wrap(self):
        for b in range(256):
            for bit in (0, 1):
                out = set_lsb_pm1(b, bit)
                assert 0 <= out <= 255
                assert abs(out - b) <= 1
                assert (out & 1) == bit


class TestBitPacking:
    def test_lsb_first_order(self):
        assert bytes_to_bits(b"\x01") == [1, 0, 0, 0, 0, 0, 0, 0]
        assert bytes_to_bits(b"\x80") == [0, 0, 0, 0, 0, 0, 0, 1]

    def test_rejects_ragged_bits(self):
        with pytest.raises(ValueError):
            bits_to_bytes([1, 0, 1])

    @given(st.binary(max_size=300))
    def test_round_trip(self, data):
        assert bits_to_bytes(bytes_to_bits(data)) == data


class TestSlotAddress:
    def test_six_streams_first_bit(self):
        assert slot_address(SlotParams(6, 1), 1) == 7

    def test_six_streams_second_of_second(self):
        assert slot_address(SlotParams(6, 2), 2) == 14

    def test_single_stream_series(self):
        for k in range(1, 50):
            assert slot_address(SlotParams(1, 1), k) == k + 1

    def test_validates_params(self):
        with pytest.raises(ValueError):
            SlotParams(0, 1)
        with pytest.raises(ValueError):
            SlotParams(2, 3)
        with pytest.raises(ValueError):
            slot_address(SlotParams(1, 1), 0)

    def test_interleaved_streams_never_collide(self):
        for n in (2, 3, 6):
            seen = set()
            for c in range(1, n + 1):
                for i in range(1, 65):
                    z = slot_address(SlotParams(n, c), i)
                    assert z not in seen
                    seen.add(z)


class TestEmbedExtract:
    def test_two_bits_in_zero_region(self):
        out = embed_bits(bytes(16), [1, 1], SlotParams(1, 1))
        assert out[1] == 1 and out[2] == 1
        assert all(b == 0 for i, b in enumerate(out) if i not in (1, 2))

    def test_extract_from_even_bytes(self):
        assert extract_bits(bytes(10), 8, SlotParams(1, 1)) == [0] * 8

    def test_extract_addressing(self):
        assert extract_bits(b"\x00\x00\x01", 1, SlotParams(1, 1)) == [0]
        assert extract_bits(b"\x00\x01\x00", 1, SlotParams(1, 1)) == [1]

    def test_capacity_checked_before_write(self):
        with pytest.raises(CapacityExceeded):
            embed_bits(bytes(8), [1] * 8, SlotParams(1, 1))
        with pytest.raises(CapacityExceeded):
            extract_bits(bytes(8), 8, SlotParams(1, 1))

    def test_locality_and_delta(self):
        rng = random.Random(5)
        region = bytes(rng.randrange(256) for _ in range(300))
        bits = [rng.randrange(2) for _ in range(40)]
        params = SlotParams(3, 2)
        out = embed_bits(region, bits, params)
        touched = {slot_address(params, i) - 1 for i in range(1, len(bits) + 1)}
        for i, (a, b) in enumerate(zip(region, out)):
            if i in touched:
                assert abs(a - b) <= 1
            else:
                assert a == b

    @given(
        seed=st.integers(0, 2**30),
        n=st.integers(1, 6),
        count=st.integers(0, 50),
    )
    def test_round_trip(self, seed, n, count):
        rng = random.Random(seed)
        c = rng.randint(1, n)
        params = SlotParams(n, c)
        region = bytes(rng.randrange(256) for _ in range(n * count + c + rng.randrange(8)))
        bits = [rng.randrange(2) for _ in range(count)]
        out = embed_bits(region, bits, params)
        assert extract_bits(out, count, params) == bits

    def test_interleaved_sinks_round_trip(self):
        rng = random.Random(11)
        region = bytes(rng.randrange(256) for _ in range(200))
        streams = [[rng.randrange(2) for _ in range(30)] for _ in range(3)]
        out = region
        for c, bits in enumerate(streams, start=1):
            out = embed_bits(out, bits, SlotParams(3, c))
        for c, bits in enumerate(streams, start=1):
            assert extract_bits(out, 30, SlotParams(3, c)) == bits
