"""Word tokenizer, 128-ary tagged Huffman coder, and search in the
compressed token stream.

Words are maximal ASCII-alphanumeric runs; everything between two words
is a separator token, and both kinds enter the vocabulary so that
decoding is lossless.  Codewords are sequences of 7-bit symbols from a
fan-out-128 Huffman tree, packed one symbol per byte with the first
byte's top bit set and the rest clear.  A codeword therefore never
matches inside another codeword at a byte-aligned position, which makes
a plain byte search over the compressed stream exact.
"""

import heapq
import re
import struct

__all__ = [
    "tokenize",
    "detokenize",
    "Vocabulary",
    "build_vocab",
    "HuffwordModel",
    "build_huffword",
    "encode_text",
    "decode_text",
    "compressed_find",
    "save_model",
    "load_model",
]

MODEL_MAGIC = b"HWM1"
FANOUT = 128

_WORD_RE = re.compile(rb"[0-9A-Za-z]+")


def tokenize(text: bytes) -> list:
    """Alternating word / separator tokens whose concatenation is `text`."""
    tokens = []
    pos = 0
    for m in _WORD_RE.finditer(text):
        if m.start() > pos:
            tokens.append(text[pos : m.start()])
        tokens.append(m.group())
        pos = m.end()
    if pos < len(text):
        tokens.append(text[pos:])
    return tokens


def is_word_token(token: bytes) -> bool:
    return bool(_WORD_RE.fullmatch(token))


def detokenize(tokens) -> bytes:
    return b"".join(tokens)


class Vocabulary:
    """Distinct tokens with their frequencies, ordered lexicographically."""

    def __init__(self, freqs: dict):
        self.freqs = dict(freqs)
        self.terms = sorted(self.freqs)

    def __len__(self):
        return len(self.terms)

    def word_terms(self) -> list:
        return [t for t in self.terms if is_word_token(t)]


def build_vocab(tokens) -> Vocabulary:
    freqs = {}
    for t in tokens:
        freqs[t] = freqs.get(t, 0) + 1
    return Vocabulary(freqs)


def _code_symbol_lengths(vocab: Vocabulary) -> dict:
    """Huffman codeword length in 7-bit symbols for every term.

    Dummy zero-frequency leaves pad the leaf count so a full fan-out-128
    tree exists; ties break on (frequency, term) for determinism.
    """
    terms = vocab.terms
    v = len(terms)
    if v == 0:
        raise ValueError("empty vocabulary")
    if v == 1:
        return {terms[0]: 1}
    dummies = (-(v - 1)) % (FANOUT - 1)
    nodes = [("leaf", t) for t in terms] + [("dummy", i) for i in range(dummies)]
    heap = []
    for i, node in enumerate(nodes):
        if node[0] == "leaf":
            heap.append((vocab.freqs[node[1]], 0, node[1], i))
        else:
            heap.append((0, -1, b"", i))  # dummies sort below every real term
    heapq.heapify(heap)
    children = {}
    while len(heap) > 1:
        group = [heapq.heappop(heap) for _ in range(min(FANOUT, len(heap)))]
        nodes.append(("int",))
        idx = len(nodes) - 1
        children[idx] = [g[3] for g in group]
        freq = sum(g[0] for g in group)
        heapq.heappush(heap, (freq, 0, b"", idx))
    root = heap[0][3]
    lengths = {}
    stack = [(root, 0)]
    while stack:
        idx, d = stack.pop()
        node = nodes[idx]
        if node[0] == "leaf":
            lengths[node[1]] = d
        elif node[0] == "int":
            for ch in children[idx]:
                stack.append((ch, d + 1))
    return lengths


def _canonical_codewords(lengths: dict) -> dict:
    """Map terms to tagged byte codewords, canonically by (length, term)."""
    code = 0
    prev_len = 0
    out = {}
    for term in sorted(lengths, key=lambda t: (lengths[t], t)):
        l = lengths[term]
        code <<= 7 * (l - prev_len)
        symbols = [(code >> (7 * (l - 1 - i))) & 0x7F for i in range(l)]
        cw = bytes([0x80 | symbols[0]] + symbols[1:])
        out[term] = cw
        code += 1
        prev_len = l
    return out


class HuffwordModel:
    def __init__(self, codewords: dict):
        self.codewords = codewords
        self.decode_map = {cw: t for t, cw in codewords.items()}

    def codeword(self, term: bytes):
        return self.codewords.get(term)

    def __len__(self):
        return len(self.codewords)


def build_huffword(vocab: Vocabulary) -> HuffwordModel:
    return HuffwordModel(_canonical_codewords(_code_symbol_lengths(vocab)))


def encode_text(tokens, model: HuffwordModel) -> bytes:
    out = bytearray()
    for t in tokens:
        cw = model.codewords.get(t)
        if cw is None:
            raise KeyError(f"token not in vocabulary: {t!r}")
        out += cw
    return bytes(out)


def iter_codewords(dt: bytes):
    """Yield (offset, codeword bytes) for every codeword in the stream."""
    i = 0
    n = len(dt)
    while i < n:
        if not dt[i] & 0x80:
            raise ValueError(f"untagged byte at offset {i}: not a codeword start")
        j = i + 1
        while j < n and not dt[j] & 0x80:
            j += 1
        yield i, dt[i:j]
        i = j


def decode_text(dt: bytes, model: HuffwordModel) -> bytes:
    out = bytearray()
    for _, cw in iter_codewords(dt):
        term = model.decode_map.get(cw)
        if term is None:
            raise ValueError(f"unknown codeword {cw.hex()} in stream")
        out += term
    return bytes(out)


def compressed_find(dt: bytes, cw: bytes) -> list:
    """Byte offsets of every occurrence of codeword `cw` in the stream.

    The code is prefix-free and only codeword starts carry a tag bit, so
    a byte-level match starting at a tagged byte is always a whole-token
    occurrence; no decompression is needed.
    """
    out = []
    start = 0
    while True:
        i = dt.find(cw, start)
        if i < 0:
            return out
        if dt[i] & 0x80:  # always true: cw starts tagged
            out.append(i)
        start = i + len(cw)


def save_model(model: HuffwordModel, path):
    """Model file: magic, term count, per-term code lengths, sorted terms."""
    terms = sorted(model.codewords)
    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        f.write(struct.pack("<I", len(terms)))
        f.write(bytes(len(model.codewords[t]) for t in terms))
        for t in terms:
            f.write(struct.pack("<H", len(t)))
            f.write(t)


def load_model(path) -> HuffwordModel:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != MODEL_MAGIC:
        raise ValueError(f"bad model magic: {data[:4]!r}")
    (count,) = struct.unpack_from("<I", data, 4)
    lengths_raw = data[8 : 8 + count]
    off = 8 + count
    terms = []
    for _ in range(count):
        (tl,) = struct.unpack_from("<H", data, off)
        off += 2
        terms.append(data[off : off + tl])
        off += tl
    lengths = dict(zip(terms, lengths_raw))
    return HuffwordModel(_canonical_codewords(lengths))
