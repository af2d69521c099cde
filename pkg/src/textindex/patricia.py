"""In-memory Patricia tree over sampled sorted keys.

Built purely from the samples' pairwise bit-LCPs (no string access):
within any range of distinct sorted keys the minimum adjacent LCP is the
unique top branch, so the tree falls out of a recursive min split.

Search is blind: descend comparing only the pattern's bit at each branch
position, then compare the pattern against the single reached key and
fix up the position from the shallowest ancestor deeper than the
compared prefix.  The caller supplies that one key comparison.
"""

from .bitkey import SYM_BITS, BitKey, sym_lcp_bits

__all__ = ["PatriciaTree"]


class _Node:
    __slots__ = ("skip", "left", "right", "lo", "hi")

    def __init__(self, skip, left, right, lo, hi):
        self.skip = skip      # branch bit position; None for leaves
        self.left = left
        self.right = right
        self.lo = lo          # leftmost / rightmost key index in the subtree
        self.hi = hi


class PatriciaTree:
    """Positions a pattern within a sorted list of distinct keys.

    Built from `lcp_bits` alone (lcp_bits[i] is the bit-LCP of keys i and
    i+1): the minimum LCP in any range is its unique top branch.
    """

    def __init__(self, nkeys: int, lcp_bits):
        if nkeys < 1:
            raise ValueError("need at least one key")
        self.nkeys = nkeys
        self.root = self._build(0, nkeys - 1, lcp_bits)

    def _build(self, lo, hi, lcp_bits):
        if lo == hi:
            return _Node(None, None, None, lo, hi)
        split = lo
        best = lcp_bits[lo]
        for i in range(lo + 1, hi):
            if lcp_bits[i] < best:
                best = lcp_bits[i]
                split = i
        return _Node(
            best,
            self._build(lo, split, lcp_bits),
            self._build(split + 1, hi, lcp_bits),
            lo,
            hi,
        )

    def locate(self, pattern: BitKey, key_symbols) -> int:
        """Number of keys <= pattern (bit order; an exactly equal key counts).

        `key_symbols(k)` must return key k's symbols at least one past the
        pattern length; it is invoked for the single key the blind descent
        reaches.
        """
        plen = pattern.bit_len
        path = []
        node = self.root
        while node.skip is not None:
            path.append(node)
            bit = pattern.bit(node.skip) if node.skip < plen else 0
            node = node.right if bit else node.left
        leaf = node
        key_syms = key_symbols(leaf.lo)
        ell = sym_lcp_bits(pattern.symbols, key_syms)
        if ell == plen and plen == SYM_BITS * len(key_syms):
            return leaf.lo + 1
        take_right = ell < plen and pattern.bit(ell) == 1
        # Shallowest node whose subtree shares more than ell bits: every key
        # below it diverges from the pattern at exactly bit ell.
        anchor = leaf
        for node in path:
            if node.skip > ell:
                anchor = node
                break
        if take_right:
            return anchor.hi + 1
        return anchor.lo
