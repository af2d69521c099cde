"""Bit-level view of suffix keys.

Every character is widened to 9 bits so a terminator symbol (511) can
order above all byte values; keys are compared most significant bit
first.  Routing inside tree nodes works on bit positions: adjacent-key
common prefixes are measured in bits, and a pattern is steered by its
bit at each recorded mismatch position.

A pattern never carries the terminator, so its per-character symbols
all have a 0 top bit.  Two useful consequences: a pattern can never
match a key through the key's terminator, and at any mismatch position
that is a multiple of 9 the pattern always takes the 0 branch.
"""

__all__ = ["TERMINATOR", "SYM_BITS", "BitKey", "sym_lcp_bits", "bit_lcp_from_char_lcp"]

TERMINATOR = 511
SYM_BITS = 9


class BitKey:
    """Immutable sequence of 9-bit symbols addressed by bit position."""

    __slots__ = ("symbols",)

    def __init__(self, symbols):
        self.symbols = tuple(symbols)

    @classmethod
    def from_bytes(cls, data: bytes, terminated: bool = False):
        syms = list(data)
        if terminated:
            syms.append(TERMINATOR)
        return cls(syms)

    @property
    def bit_len(self) -> int:
        return SYM_BITS * len(self.symbols)

    def bit(self, i: int) -> int:
        sym = self.symbols[i // SYM_BITS]
        return (sym >> (SYM_BITS - 1 - i % SYM_BITS)) & 1

    def __eq__(self, other):
        return isinstance(other, BitKey) and self.symbols == other.symbols

    def __lt__(self, other):
        return self.symbols < other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"BitKey({self.symbols!r})"


def sym_lcp_bits(a, b) -> int:
    """Common prefix in bits of two symbol sequences."""
    m = min(len(a), len(b))
    k = 0
    while k < m and a[k] == b[k]:
        k += 1
    bits = SYM_BITS * k
    if k < m:
        bits += SYM_BITS - (a[k] ^ b[k]).bit_length()
    return bits


def bit_lcp_from_char_lcp(sym_a_at_mismatch: int, sym_b_at_mismatch: int, char_lcp: int) -> int:
    """Bit-level common prefix of two keys that agree on `char_lcp` characters.

    The two symbols are the keys' symbols right after the shared prefix
    (TERMINATOR when a key's content ends there).  Keys whose contents are
    both exhausted are identical up to the terminator; their lcp is the
    full key length including it, which doubles as the equal-keys marker.
    """
    if sym_a_at_mismatch == sym_b_at_mismatch:
        if sym_a_at_mismatch != TERMINATOR:
            raise ValueError("symbols after the common prefix must differ")
        return SYM_BITS * (char_lcp + 1)
    return SYM_BITS * char_lcp + SYM_BITS - (sym_a_at_mismatch ^ sym_b_at_mismatch).bit_length()
