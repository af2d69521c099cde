"""Byte-aligned continuation-bit integer code.

A codeword stores 7 payload bits per byte, most significant group first
(the value is left-padded with zeros to a whole number of groups).  The
first byte of every codeword carries a 1 in its top bit, all following
bytes carry a 0, so codeword starts can be located in a raw byte stream
without decoding.  This format is used for posting-list gaps, Skip
streams inside tree pages, and assorted index metadata; it is normative
and bit-exact for everything serialized by this package.
"""

__all__ = [
    "MAX_VALUE",
    "encode_cb",
    "decode_cb",
    "cb_length",
    "encode_gaps",
    "decode_gaps",
]

MAX_VALUE = 1 << 56  # 8 groups of 7 bits; covers every offset we produce
_MAX_GROUPS = 8


def cb_length(x: int) -> int:
    """Number of bytes encode_cb(x) produces: max(1, ceil(bitlen(x)/7))."""
    return max(1, -(-x.bit_length() // 7))


def encode_cb(x: int) -> bytes:
    """Encode a non-negative integer < 2**56 as one continuation-bit codeword."""
    if x < 0 or x >= MAX_VALUE:
        raise ValueError(f"value out of supported range [0, 2**56): {x}")
    groups = cb_length(x)
    out = bytearray(groups)
    for i in range(groups - 1, -1, -1):
        out[i] = x & 0x7F
        x >>= 7
    out[0] |= 0x80
    return bytes(out)


def decode_cb(buf, offset: int = 0):
    """Decode one codeword starting at `offset`; returns (value, next_offset).

    The byte at `offset` must be tagged (MSB set); the codeword extends over
    the following untagged bytes and ends at the next tagged byte or at the
    end of the buffer.
    """
    if offset >= len(buf):
        raise ValueError("offset past end of buffer")
    b = buf[offset]
    if not b & 0x80:
        raise ValueError(f"untagged byte at offset {offset}: no codeword starts here")
    x = b & 0x7F
    i = offset + 1
    while i < len(buf) and not buf[i] & 0x80:
        x = (x << 7) | buf[i]
        i += 1
        if i - offset > _MAX_GROUPS:
            raise ValueError("corrupt codeword: more than 8 groups")
    return x, i


def encode_gaps(values) -> bytes:
    """Gap-encode a strictly increasing list of positive integers.

    The first value is stored absolutely, each later one as the difference
    from its predecessor.
    """
    out = bytearray()
    prev = 0
    for v in values:
        if v <= prev:
            raise ValueError(f"gap input not strictly increasing at value {v}")
        out += encode_cb(v - prev)
        prev = v
    return bytes(out)


def decode_gaps(data) -> list:
    """Inverse of encode_gaps."""
    values = []
    offset = 0
    prev = 0
    while offset < len(data):
        d, offset = decode_cb(data, offset)
        prev += d
        values.append(prev)
    return values
