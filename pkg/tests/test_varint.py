import random

import pytest

from textindex.varint import (
    MAX_VALUE,
    cb_length,
    decode_cb,
    decode_gaps,
    encode_cb,
    encode_gaps,
)


def test_single_byte_fixtures():
    assert encode_cb(0) == b"\x80"
    assert encode_cb(127) == b"\xff"          # payload 1111111 plus tag
    assert encode_cb(128) == b"\x81\x00"      # groups 0000001 | 0000000


def test_decode_fixtures():
    assert decode_cb(b"\x81\x00", 0) == (128, 2)
    assert decode_cb(b"\x80\xff", 0) == (0, 1)
    assert decode_cb(b"\x80\xff", 1) == (127, 2)


def test_decode_untagged_start_rejected():
    with pytest.raises(ValueError):
        decode_cb(b"\x00", 0)
    with pytest.raises(ValueError):
        decode_cb(b"\x80", 1)


def test_range_limits():
    with pytest.raises(ValueError):
        encode_cb(-1)
    with pytest.raises(ValueError):
        encode_cb(MAX_VALUE)
    top = MAX_VALUE - 1
    assert decode_cb(encode_cb(top))[0] == top


def test_round_trip_sampled():
    rng = random.Random(7)
    values = [rng.randrange(MAX_VALUE) for _ in range(2000)]
    values += [0, 1, 127, 128, 16383, 16384, MAX_VALUE - 1]
    for x in values:
        cw = encode_cb(x)
        assert len(cw) == max(1, -(-x.bit_length() // 7))
        assert cb_length(x) == len(cw)
        assert decode_cb(cw) == (x, len(cw))


def test_resynchronization_random_streams():
    # In a concatenation of codewords the tagged bytes are exactly the starts.
    rng = random.Random(11)
    for _ in range(50):
        values = [rng.randrange(1 << rng.randrange(1, 56)) for _ in range(rng.randrange(1, 60))]
        stream = bytearray()
        starts = set()
        for v in values:
            starts.add(len(stream))
            stream += encode_cb(v)
        tagged = {i for i, b in enumerate(stream) if b & 0x80}
        assert tagged == starts


def test_gaps_empty():
    assert encode_gaps([]) == b""
    assert decode_gaps(b"") == []


def test_gaps_fixture():
    assert encode_gaps([3, 5, 12]) == encode_cb(3) + encode_cb(2) + encode_cb(7)


def test_gaps_rejects_non_increasing():
    with pytest.raises(ValueError):
        encode_gaps([3, 3])
    with pytest.raises(ValueError):
        encode_gaps([0, 1])


def test_gaps_round_trip_random():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randrange(0, 80)
        vals = sorted(rng.sample(range(1, 10_000), n))
        assert decode_gaps(encode_gaps(vals)) == vals
