"""Burrows-Wheeler transform and a compressed full-text self-index.

The transform sorts the cyclic shifts of the text extended with a
terminator that orders below every other symbol, and keeps the last
column.  The index answers count(P) by walking the pattern backwards
through cumulative symbol counts plus an occurrence oracle, and
locate(row) by stepping the LF mapping until a sampled row is hit.

Two build modes: "tiny" keeps only the counting machinery, "fat" also
samples row positions so occurrences can be located.  The serialized
form compresses the transformed string bucket-wise with move-to-front,
zero-run-length and canonical Huffman coding.

Symbols are text bytes shifted by `symbol_shift`, with 0 reserved for
the terminator.  Plain byte texts use shift 0 (so byte 0x00 must not
occur); indexes over digested token streams use shift 1 and accept any
byte value.
"""

import heapq
import struct

import numpy as np

from .suffarr import suffix_sort_codes
from .varint import decode_cb, encode_cb

__all__ = [
    "FMIndex",
    "bwt_forward",
    "bwt_inverse",
    "fm_build",
    "fm_serialize",
    "fm_deserialize",
]

FM_MAGIC = b"FMI1"
DEFAULT_SAMPLE_RATE = 32
DEFAULT_BUCKET_SIZE = 256


def _byte_codes(text: bytes, shift: int) -> np.ndarray:
    codes = np.frombuffer(bytes(text), dtype=np.uint8).astype(np.int32) + shift
    if shift == 0 and codes.size and codes.min() == 0:
        raise ValueError("text contains reserved terminator byte 0x00")
    return codes


def bwt_forward(text: bytes) -> bytes:
    """Last column of the sorted cyclic-shift matrix of text + terminator.

    The terminator is rendered as byte 0x00 (it orders below every text
    byte, which therefore must not contain 0x00).
    """
    codes = _byte_codes(text, 0)
    ext = np.concatenate([codes, [0]]).astype(np.int64)
    sa0 = suffix_sort_codes(ext)
    return bytes(int(ext[(s - 1) % ext.size]) for s in sa0)


def bwt_inverse(l: bytes) -> bytes:
    """Rebuild the text from its transform by iterating the LF mapping."""
    if l.count(b"\x00") != 1:
        raise ValueError("transform must contain exactly one terminator byte")
    arr = np.frombuffer(l, dtype=np.uint8)
    # Stable sort of positions by symbol: LF of position i is i's sorted rank.
    perm = np.argsort(arr, kind="stable")
    lf = np.empty(arr.size, dtype=np.int64)
    lf[perm] = np.arange(arr.size)
    out = bytearray()
    i = 0  # the row that starts with the terminator
    for _ in range(arr.size - 1):
        out.append(arr[i])
        i = lf[i]
    out.reverse()
    return bytes(out)


class FMIndex:
    """Self-index over a byte text; rows and text positions are 1-based."""

    def __init__(self, l_codes, nsyms, mode, sample_rate, bucket_size, marked, symbol_shift):
        self.l = np.asarray(l_codes, dtype=np.int32)
        self.n = self.l.size - 1
        self.nsyms = nsyms
        self.mode = mode
        self.sample_rate = sample_rate
        self.bucket_size = bucket_size
        self.marked = marked  # 1-based row -> 1-based position, fat mode only
        self.symbol_shift = symbol_shift
        counts = np.bincount(self.l, minlength=nsyms).astype(np.int64)
        self.C = np.concatenate([[0], np.cumsum(counts)])  # C[c] = #symbols < c
        nb = self.l.size // bucket_size
        cp = np.zeros((nb + 1, nsyms), dtype=np.int64)
        for b in range(nb):
            cp[b + 1] = cp[b] + np.bincount(
                self.l[b * bucket_size : (b + 1) * bucket_size], minlength=nsyms
            )
        self._checkpoints = cp

    # -- queries ---------------------------------------------------------

    def occ(self, c: int, k: int) -> int:
        """Occurrences of symbol c in the first k characters of the transform."""
        if not 0 <= k <= self.n + 1:
            raise ValueError(f"prefix length {k} out of range 0..{self.n + 1}")
        b = k // self.bucket_size
        base = int(self._checkpoints[b, c]) if 0 <= c < self.nsyms else 0
        return base + int(np.count_nonzero(self.l[b * self.bucket_size : k] == c))

    def _pattern_codes(self, pattern: bytes):
        if not pattern:
            raise ValueError("empty pattern")
        codes = [b + self.symbol_shift for b in pattern]
        if self.symbol_shift == 0 and 0 in codes:
            raise ValueError("pattern contains the terminator byte")
        return codes

    def get_rows(self, pattern: bytes):
        """(first, last) rows prefixed by the pattern, or None if absent."""
        sym = self._pattern_codes(pattern)
        p = len(sym)
        c = sym[p - 1]
        first = int(self.C[c]) + 1
        last = int(self.C[c + 1])
        i = p
        while first <= last and i >= 2:
            c = sym[i - 2]
            first = int(self.C[c]) + self.occ(c, first - 1) + 1
            last = int(self.C[c]) + self.occ(c, last)
            i -= 1
        if last < first:
            return None
        return first, last

    def count(self, pattern: bytes) -> int:
        rows = self.get_rows(pattern)
        return 0 if rows is None else rows[1] - rows[0] + 1

    def lf(self, i: int) -> int:
        c = int(self.l[i - 1])
        return int(self.C[c]) + self.occ(c, i)

    def locate(self, i: int) -> int:
        """Starting position (1-based, in text + terminator) of row i's suffix."""
        if self.mode != "fat":
            raise ValueError("locate requires a fat index")
        if not 1 <= i <= self.n + 1:
            raise ValueError(f"row {i} out of range")
        v = 0
        while True:
            if i == 1:
                # The terminator row: either queried directly or the walk
                # wrapped around the text start after v steps.
                return self.n + 1 if v == 0 else v
            if i in self.marked:
                return self.marked[i] + v
            i = self.lf(i)
            v += 1

    def bwt_bytes(self) -> bytes:
        if self.symbol_shift:
            raise ValueError("transform is not byte-valued for shifted indexes")
        return bytes(int(x) for x in self.l)


def fm_build(text: bytes, mode: str = "fat", sample_rate: int = DEFAULT_SAMPLE_RATE,
             bucket_size: int = DEFAULT_BUCKET_SIZE, symbol_shift: int = 0) -> FMIndex:
    if mode not in ("tiny", "fat"):
        raise ValueError(f"unknown mode {mode!r}")
    if sample_rate < 1 or bucket_size < 1:
        raise ValueError("sample_rate and bucket_size must be positive")
    codes = _byte_codes(text, symbol_shift)
    ext = np.concatenate([codes, [0]]).astype(np.int64)
    sa0 = suffix_sort_codes(ext)
    l = ext[(sa0 - 1) % ext.size].astype(np.int32)
    marked = {}
    if mode == "fat":
        pos = sa0 + 1  # 1-based suffix starts per row
        for row0 in np.nonzero(pos % sample_rate == 0)[0]:
            marked[int(row0) + 1] = int(pos[row0])
    return FMIndex(l, 256 + symbol_shift + 1, mode, sample_rate, bucket_size, marked, symbol_shift)


# -- canonical Huffman over small integer alphabets ------------------------


def _huff_lengths(freqs) -> list:
    """Binary Huffman code lengths; deterministic tie-breaking by symbol."""
    lengths = [0] * len(freqs)
    items = sorted((f, s) for s, f in enumerate(freqs) if f > 0)
    if not items:
        return lengths
    if len(items) == 1:
        lengths[items[0][1]] = 1
        return lengths
    nodes = []  # ("leaf", symbol) or ("int", left, right)
    heap = []
    for f, s in items:
        nodes.append(("leaf", s))
        heapq.heappush(heap, (f, len(nodes) - 1))
    while len(heap) > 1:
        f1, a = heapq.heappop(heap)
        f2, b = heapq.heappop(heap)
        nodes.append(("int", a, b))
        heapq.heappush(heap, (f1 + f2, len(nodes) - 1))
    stack = [(heap[0][1], 0)]
    while stack:
        idx, d = stack.pop()
        node = nodes[idx]
        if node[0] == "leaf":
            lengths[node[1]] = d
        else:
            stack.append((node[1], d + 1))
            stack.append((node[2], d + 1))
    return lengths


def _canonical_codes(lengths):
    """Assign canonical codes (ordered by length, then symbol)."""
    order = sorted((l, s) for s, l in enumerate(lengths) if l > 0)
    codes = {}
    code = 0
    prev_len = 0
    for l, s in order:
        code <<= l - prev_len
        codes[s] = (code, l)
        code += 1
        prev_len = l
    return codes


class _BitWriter:
    def __init__(self):
        self.acc = 0
        self.nbits = 0
        self.out = bytearray()

    def write(self, code, length):
        self.acc = (self.acc << length) | code
        self.nbits += length
        while self.nbits >= 8:
            self.nbits -= 8
            self.out.append((self.acc >> self.nbits) & 0xFF)
        self.acc &= (1 << self.nbits) - 1

    def finish(self) -> bytes:
        if self.nbits:
            self.out.append((self.acc << (8 - self.nbits)) & 0xFF)
            self.acc = 0
            self.nbits = 0
        return bytes(self.out)


class _BitReader:
    def __init__(self, data):
        self.data = data
        self.pos = 0
        self.acc = 0
        self.nbits = 0

    def read_bit(self) -> int:
        if self.nbits == 0:
            self.acc = self.data[self.pos]
            self.pos += 1
            self.nbits = 8
        self.nbits -= 1
        return (self.acc >> self.nbits) & 1


class _HuffDecoder:
    """Canonical decoder: per length the first code and the symbol run."""

    def __init__(self, lengths):
        self.by_length = {}  # length -> (first_code, [symbols in canonical order])
        order = sorted((l, s) for s, l in enumerate(lengths) if l > 0)
        code = 0
        prev_len = 0
        for l, s in order:
            code <<= l - prev_len
            if l not in self.by_length:
                self.by_length[l] = (code, [])
            self.by_length[l][1].append(s)
            code += 1
            prev_len = l

    def decode(self, reader: _BitReader) -> int:
        code = 0
        length = 0
        while True:
            code = (code << 1) | reader.read_bit()
            length += 1
            if length > 64:
                raise ValueError("corrupt Huffman stream")
            entry = self.by_length.get(length)
            if entry is not None:
                first, syms = entry
                if first <= code < first + len(syms):
                    return syms[code - first]


# -- move-to-front + zero-run tokenization ---------------------------------


def _mtf_encode(values, nsyms):
    table = list(range(nsyms))
    out = []
    for v in values:
        r = table.index(v)
        out.append(r)
        if r:
            table.pop(r)
            table.insert(0, v)
    return out


def _mtf_decode(ranks, nsyms):
    table = list(range(nsyms))
    out = []
    for r in ranks:
        v = table[r]
        out.append(v)
        if r:
            table.pop(r)
            table.insert(0, v)
    return out


def _tokenize_bucket(mtf_ranks):
    """Zero runs become token 0 plus a side-stream length; others literal."""
    tokens = []
    runlens = []
    i = 0
    while i < len(mtf_ranks):
        if mtf_ranks[i] == 0:
            j = i
            while j < len(mtf_ranks) and mtf_ranks[j] == 0:
                j += 1
            tokens.append(0)
            runlens.append(j - i)
            i = j
        else:
            tokens.append(mtf_ranks[i])
            i += 1
    return tokens, runlens


def _detokenize_bucket(tokens, runlens):
    out = []
    r = iter(runlens)
    for t in tokens:
        if t == 0:
            out.extend([0] * next(r))
        else:
            out.append(t)
    return out


# -- serialization ----------------------------------------------------------


def fm_serialize(idx: FMIndex) -> bytes:
    l = [int(x) for x in idx.l]
    nsyms = idx.nsyms
    bsz = idx.bucket_size
    buckets = [l[i : i + bsz] for i in range(0, len(l), bsz)]
    per_bucket = []
    token_freqs = [0] * nsyms
    for b in buckets:
        tokens, runlens = _tokenize_bucket(_mtf_encode(b, nsyms))
        per_bucket.append((tokens, runlens))
        for t in tokens:
            token_freqs[t] += 1
    lengths = _huff_lengths(token_freqs)
    codes = _canonical_codes(lengths)

    out = bytearray()
    out += FM_MAGIC
    out += struct.pack(
        "<BBIIQI",
        1 if idx.mode == "fat" else 0,
        idx.symbol_shift,
        idx.sample_rate,
        idx.bucket_size,
        idx.n,
        nsyms,
    )
    out += bytes(lengths)  # one code length per token symbol
    out += struct.pack("<I", len(buckets))
    payloads = []
    for tokens, runlens in per_bucket:
        w = _BitWriter()
        for t in tokens:
            w.write(*codes[t])
        bits = w.finish()
        lens = b"".join(encode_cb(r) for r in runlens)
        payloads.append(struct.pack("<III", len(tokens), len(bits), len(lens)) + bits + lens)
    for p in payloads:
        out += struct.pack("<I", len(p))
    for p in payloads:
        out += p
    marked = sorted(idx.marked.items())
    out += struct.pack("<Q", len(marked))
    for row, pos in marked:
        out += row.to_bytes(5, "little") + pos.to_bytes(5, "little")
    return bytes(out)


def fm_deserialize(data: bytes) -> FMIndex:
    if data[:4] != FM_MAGIC:
        raise ValueError(f"bad index magic: {data[:4]!r}")
    off = 4
    mode_b, shift, sample_rate, bucket_size, n, nsyms = struct.unpack_from("<BBIIQI", data, off)
    off += struct.calcsize("<BBIIQI")
    lengths = list(data[off : off + nsyms])
    off += nsyms
    (nbuckets,) = struct.unpack_from("<I", data, off)
    off += 4
    sizes = struct.unpack_from(f"<{nbuckets}I", data, off)
    off += 4 * nbuckets
    decoder = _HuffDecoder(lengths)
    l = []
    for size in sizes:
        payload = data[off : off + size]
        off += size
        ntokens, nbits_b, nlens = struct.unpack_from("<III", payload, 0)
        body = payload[12:]
        reader = _BitReader(body[:nbits_b])
        tokens = [decoder.decode(reader) for _ in range(ntokens)]
        runlens = []
        lo = 0
        lens_buf = body[nbits_b : nbits_b + nlens]
        while lo < len(lens_buf):
            v, lo = decode_cb(lens_buf, lo)
            runlens.append(v)
        l.extend(_mtf_decode(_detokenize_bucket(tokens, runlens), nsyms))
    if len(l) != n + 1:
        raise ValueError("corrupt index: transform length mismatch")
    (nmarked,) = struct.unpack_from("<Q", data, off)
    off += 8
    marked = {}
    for _ in range(nmarked):
        row = int.from_bytes(data[off : off + 5], "little")
        pos = int.from_bytes(data[off + 5 : off + 10], "little")
        marked[row] = pos
        off += 10
    mode = "fat" if mode_b else "tiny"
    return FMIndex(l, nsyms, mode, sample_rate, bucket_size, marked, shift)
