"""Word-based self-index over Huffword-digested text.

The source text is tokenized and compressed into the tagged codeword
stream DT; a fat full-text index built over DT's bytes then answers
word queries as exact byte-string queries for the word's codeword.
Because a codeword occurs in DT exactly where its word occurs as a
token, no post-filtering of partial-word hits is needed.  Prefix-word
queries expand the prefix over the sorted vocabulary first and run one
codeword query per matching word.

DT bytes may take any value, so its index uses symbol shift 1.
"""

import bisect
import struct

from . import huffword
from .fmindex import FMIndex, fm_build, fm_deserialize, fm_serialize

__all__ = ["WFMIndex", "wfm_build", "save_wfm", "load_wfm"]

BUNDLE_MAGIC = b"WFM1"
DEFAULT_ALIGN_EVERY = 64


class WFMIndex:
    def __init__(self, model, fm, dt, align, words):
        self.model = model          # HuffwordModel or None for empty text
        self.fm = fm                # fat FMIndex over DT bytes (shift 1)
        self.dt = dt                # digested text bytes
        self.align = align          # sampled (dt offset, source offset), both 0-based
        self.words = words          # sorted word terms for prefix expansion

    # -- queries ---------------------------------------------------------

    def word_count(self, w: bytes) -> int:
        cw = self.model.codeword(w) if self.model else None
        if cw is None:
            return 0
        return self.fm.count(cw)

    def word_locate(self, w: bytes) -> list:
        cw = self.model.codeword(w) if self.model else None
        if cw is None:
            return []
        rows = self.fm.get_rows(cw)
        if rows is None:
            return []
        out = []
        for i in range(rows[0], rows[1] + 1):
            dt_off = self.fm.locate(i) - 1  # 0-based offset into DT
            assert self.dt[dt_off] & 0x80, "codeword match must start tagged"
            out.append(self._source_offset(dt_off))
        out.sort()
        return out

    def prefix_word_search(self, prefix: bytes) -> dict:
        if not prefix:
            raise ValueError("empty prefix")
        lo = bisect.bisect_left(self.words, prefix)
        hi = bisect.bisect_left(self.words, prefix + b"\xff\xff\xff\xff")
        out = {}
        for w in self.words[lo:hi]:
            if w.startswith(prefix):
                offs = self.word_locate(w)
                if offs:
                    out[w] = offs
        return out

    def _source_offset(self, dt_off: int) -> int:
        """Map a DT byte offset to the source byte offset of its token."""
        k = bisect.bisect_right(self.align, (dt_off, float("inf"))) - 1
        dpos, spos = self.align[k]
        while dpos < dt_off:
            cw_len = 1
            while dpos + cw_len < len(self.dt) and not self.dt[dpos + cw_len] & 0x80:
                cw_len += 1
            spos += len(self.model.decode_map[self.dt[dpos : dpos + cw_len]])
            dpos += cw_len
        return spos


def wfm_build(text: bytes, align_every: int = DEFAULT_ALIGN_EVERY,
              sample_rate: int = 32, bucket_size: int = 256) -> WFMIndex:
    tokens = huffword.tokenize(text)
    if not tokens:
        return WFMIndex(None, None, b"", [], [])
    vocab = huffword.build_vocab(tokens)
    model = huffword.build_huffword(vocab)
    dt = huffword.encode_text(tokens, model)
    fm = fm_build(dt, mode="fat", sample_rate=sample_rate,
                  bucket_size=bucket_size, symbol_shift=1)
    align = []
    dpos = spos = 0
    for k, t in enumerate(tokens):
        if k % align_every == 0:
            align.append((dpos, spos))
        dpos += len(model.codewords[t])
        spos += len(t)
    return WFMIndex(model, fm, dt, align, vocab.word_terms())


# -- bundle serialization ----------------------------------------------------


def _section(magic: bytes, payload: bytes) -> bytes:
    return magic + struct.pack("<Q", len(payload)) + payload


def save_wfm(idx: WFMIndex, path):
    parts = [BUNDLE_MAGIC]
    if idx.model is None:
        parts.append(_section(b"EMPT", b""))
    else:
        terms = sorted(idx.model.codewords)
        model_payload = bytearray()
        model_payload += struct.pack("<I", len(terms))
        model_payload += bytes(len(idx.model.codewords[t]) for t in terms)
        for t in terms:
            model_payload += struct.pack("<H", len(t)) + t
        parts.append(_section(b"MODL", bytes(model_payload)))
        parts.append(_section(b"FMIX", fm_serialize(idx.fm)))
        parts.append(_section(b"DTXT", idx.dt))
        align_payload = b"".join(struct.pack("<QQ", d, s) for d, s in idx.align)
        parts.append(_section(b"ALGN", align_payload))
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_wfm(path) -> WFMIndex:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != BUNDLE_MAGIC:
        raise ValueError(f"bad bundle magic: {data[:4]!r}")
    off = 4
    sections = {}
    while off < len(data):
        magic = data[off : off + 4]
        (size,) = struct.unpack_from("<Q", data, off + 4)
        off += 12
        sections[magic] = data[off : off + size]
        off += size
    if b"EMPT" in sections:
        return WFMIndex(None, None, b"", [], [])
    payload = sections[b"MODL"]
    (count,) = struct.unpack_from("<I", payload, 0)
    lengths_raw = payload[4 : 4 + count]
    off = 4 + count
    terms = []
    for _ in range(count):
        (tl,) = struct.unpack_from("<H", payload, off)
        off += 2
        terms.append(payload[off : off + tl])
        off += tl
    lengths = dict(zip(terms, lengths_raw))
    model = huffword.HuffwordModel(huffword._canonical_codewords(lengths))
    fm = fm_deserialize(sections[b"FMIX"])
    dt = sections[b"DTXT"]
    align_payload = sections[b"ALGN"]
    align = [
        struct.unpack_from("<QQ", align_payload, i)
        for i in range(0, len(align_payload), 16)
    ]
    vocab_words = sorted(t for t in terms if huffword.is_word_token(t))
    return WFMIndex(model, fm, dt, [tuple(a) for a in align], vocab_words)
