"""Paged B+-style tree over the sorted suffixes of a text collection.

Nodes hold only ordered suffix references plus delta-coded bit-LCPs of
adjacent keys (no trie topology).  Routing a pattern through a node uses
the two-phase scan: phase one walks the reference/LCP arrays steering by
one pattern bit per recorded mismatch position, phase two fetches a
single suffix from the text store, measures its common prefix with the
pattern, and scans to the exact insertion point.  Root-to-leaf descent
passes the verified-bit count down so deeper comparisons resume where
shallower ones stopped.

Leaves are chained; a left-to-right leaf scan yields the suffix array of
the collection.  Text insertion and deletion rebuild the leaf sequence
by merging / filtering and then rebuild the internal levels bottom-up,
which reproduces exactly the tree a fresh batch build would create.

All node pages, texts and headers live in one PagedStore so every disk
touch is accounted.  Deleted texts leave their pages orphaned (no
compaction).  Suffix references are 5 bytes: text id u16, offset u24.
"""

import math
import struct

import numpy as np

from . import suffarr
from .bitkey import SYM_BITS, TERMINATOR, BitKey, bit_lcp_from_char_lcp, sym_lcp_bits
from .pager import PagedStore
from .patricia import PatriciaTree
from .varint import decode_cb, encode_cb

__all__ = [
    "LEAF",
    "INTERNAL",
    "NodePage",
    "node_locate",
    "fit_branching",
    "collection_suffix_array",
    "StringBTree",
    "build_from_sa",
    "build_supra",
    "supra_locate",
]

LEAF = 0
INTERNAL = 1
NO_PAGE = 0xFFFFFFFF
MAX_SKIP_BYTES = 5  # covers LCP deltas of texts up to ~2^31 bits

TREE_MAGIC = b"SBT1"
HEADER_MAGIC = b"SBTH"


def _zigzag(d: int) -> int:
    return (d << 1) if d >= 0 else ((-d) << 1) - 1


def _unzigzag(z: int) -> int:
    return (z >> 1) if not z & 1 else -((z + 1) >> 1)


class NodePage:
    __slots__ = ("kind", "refs", "lcp_bits", "children", "left_sib", "right_sib")

    def __init__(self, kind, refs, lcp_bits, children=None, left_sib=NO_PAGE, right_sib=NO_PAGE):
        self.kind = kind
        self.refs = refs            # [(tid, off 1-based)], sorted by key
        self.lcp_bits = lcp_bits    # len(refs) - 1 adjacent bit-LCPs
        self.children = children or []
        self.left_sib = left_sib
        self.right_sib = right_sib

    def encode(self, page_size: int) -> bytes:
        out = bytearray()
        out.append(self.kind)
        out += struct.pack("<H", len(self.refs))
        for tid, off in self.refs:
            out += struct.pack("<H", tid)
            out += off.to_bytes(3, "little")
        prev = 0
        for l in self.lcp_bits:
            out += encode_cb(_zigzag(l - prev))
            prev = l
        if self.kind == LEAF:
            out += struct.pack("<II", self.left_sib, self.right_sib)
        else:
            for c in self.children:
                out += struct.pack("<I", c)
        if len(out) > page_size:
            raise ValueError(
                f"page overflow: node needs {len(out)} bytes, page holds {page_size}"
            )
        return bytes(out)

    @classmethod
    def decode(cls, data: bytes):
        kind = data[0]
        (count,) = struct.unpack_from("<H", data, 1)
        off = 3
        refs = []
        for _ in range(count):
            (tid,) = struct.unpack_from("<H", data, off)
            o = int.from_bytes(data[off + 2 : off + 5], "little")
            refs.append((tid, o))
            off += 5
        lcp_bits = []
        prev = 0
        for _ in range(max(0, count - 1)):
            z, off = decode_cb(data, off)
            prev += _unzigzag(z)
            if prev < 0:
                raise ValueError("corrupt skip stream: negative prefix sum")
            lcp_bits.append(prev)
        if kind == LEAF:
            left, right = struct.unpack_from("<II", data, off)
            return cls(LEAF, refs, lcp_bits, left_sib=left, right_sib=right)
        nchildren = count // 2
        children = list(struct.unpack_from(f"<{nchildren}I", data, off))
        return cls(INTERNAL, refs, lcp_bits, children=children)


def fit_branching(page_size: int) -> int:
    """Largest b whose worst-case node encoding fits one page."""
    leaf_b = (page_size - 11 + MAX_SKIP_BYTES) // (10 + 2 * MAX_SKIP_BYTES)
    internal_b = (page_size - 3 + MAX_SKIP_BYTES) // (14 + 2 * MAX_SKIP_BYTES)
    b = min(leaf_b, internal_b)
    if b < 2:
        raise ValueError(f"page size {page_size} too small for any branching factor")
    return b


# -- node search -------------------------------------------------------------


def _locate(nkeys, lcp_bits, pattern: BitKey, hint, fetch):
    """Two-phase scan; returns (r, ell, x).

    r counts the keys ordering at or below the pattern (bit order, with a
    bit-identical key counting below), ell is the bit-LCP of the pattern
    with the one fetched candidate key, x is that key's 1-based index.
    `fetch(k, from_char, n_chars)` returns key k's symbols for that char
    range, including its terminator when the range covers it.
    """
    plen = pattern.bit_len
    # Phase 1: at each recorded mismatch position the left key carries a 0
    # bit and the right key a 1; follow the pattern's bit, skipping whole
    # subtrees on the 0 branch.
    x = 0
    i = 1
    while i <= nkeys - 1:
        l = lcp_bits[i - 1]
        if l < plen and pattern.bit(l) == 1:
            x = i + 1
            i += 1
        else:
            i += 1
            while i <= nkeys - 1 and lcp_bits[i - 1] >= l:
                i += 1
    if x == 0:
        x = 1
    # Phase 2: one string access.
    c0 = hint // SYM_BITS
    pchars = len(pattern.symbols)
    requested = pchars - c0 + 1
    syms = list(fetch(x, c0, requested))
    ell = SYM_BITS * c0 + sym_lcp_bits(pattern.symbols[c0:], syms)
    if ell == plen and len(syms) < requested and SYM_BITS * (c0 + len(syms)) == plen:
        return x, ell, x  # pattern equals the key outright
    if ell >= plen or pattern.bit(ell) == 0:
        # Pattern orders below the candidate: scan backward.
        x2 = x - 1
        while x2 >= 1 and lcp_bits[x2 - 1] >= ell:
            x2 -= 1
        return x2, ell, x
    x2 = x
    while x2 <= nkeys - 1 and lcp_bits[x2 - 1] >= ell:
        x2 += 1
    return x2, ell, x


def node_locate(page: NodePage, pattern: BitKey, fetch, hint: int = 0):
    """Insertion point of the pattern among a page's keys plus the bit-LCP
    with the single fetched candidate suffix."""
    if not page.refs:
        return 0, 0
    r, ell, _ = _locate(len(page.refs), page.lcp_bits, pattern, hint, fetch)
    return r, ell


# -- collection suffix sorting ----------------------------------------------


def _kasai_int(codes, sa0):
    n = len(codes)
    rank = [0] * n
    for r, s in enumerate(sa0):
        rank[s] = r
    lcp = [0] * max(0, n - 1)
    k = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            k = 0
            continue
        j = sa0[r + 1]
        while i + k < n and j + k < n and codes[i + k] == codes[j + k]:
            k += 1
        lcp[r] = k
        if k:
            k -= 1
    return lcp


def collection_suffix_array(texts: dict):
    """Sorted suffix references over a {tid: bytes} collection plus the
    character-level LCPs of adjacent suffixes.

    Suffix order treats each text's end as a terminator above every byte;
    identical suffixes from different texts order by (tid, offset).
    """
    tids = sorted(texts)
    codes = []
    refs = []
    for rank, t in enumerate(tids):
        data = texts[t]
        codes.extend(data)
        refs.extend((t, j + 1) for j in range(len(data)))
        codes.append(256 + rank)  # distinct per-text terminator: ties follow tid order
        refs.append(None)
    arr = np.array(codes, dtype=np.int64)
    sa0 = suffarr.suffix_sort_codes(arr)
    lcp_all = _kasai_int(codes, [int(s) for s in sa0])
    pairs = []
    lcps = []
    pending = None  # running min of adjacent lcps since the last kept suffix
    for idx, s in enumerate(sa0):
        ref = refs[int(s)]
        if ref is None:
            if pending is not None and idx < len(lcp_all):
                pending = min(pending, lcp_all[idx])
            continue
        if pairs:
            lcps.append(pending)
        pairs.append(ref)
        pending = lcp_all[idx] if idx < len(lcp_all) else None
    return pairs, lcps


def _suffix_content(texts, ref):
    tid, off = ref
    return texts[tid][off - 1 :]


def _bit_lcp_refs(texts, a, b, char_lcp=None):
    sa = _suffix_content(texts, a)
    sb = _suffix_content(texts, b)
    if char_lcp is None:
        char_lcp = 0
        m = min(len(sa), len(sb))
        while char_lcp < m and sa[char_lcp] == sb[char_lcp]:
            char_lcp += 1
    syma = sa[char_lcp] if char_lcp < len(sa) else TERMINATOR
    symb = sb[char_lcp] if char_lcp < len(sb) else TERMINATOR
    return bit_lcp_from_char_lcp(syma, symb, char_lcp)


# -- the tree ----------------------------------------------------------------


class StringBTree:
    def __init__(self, store: PagedStore, b: int, root_id, height, texts_dir, next_tid):
        self.store = store
        self.b = b
        self.root_id = root_id          # None for an empty tree
        self.height = height
        self.texts_dir = texts_dir      # tid -> (start_page, byte length)
        self.next_tid = next_tid

    # -- construction ------------------------------------------------------

    @classmethod
    def build(cls, texts, store: PagedStore, b: int | None = None):
        """Batch-build over a list of texts (ids 1..k) or a {tid: bytes} dict."""
        if isinstance(texts, (list, tuple)):
            texts = {i + 1: t for i, t in enumerate(texts)}
        sa_pairs, lcp_chars = (collection_suffix_array(texts) if texts else ([], []))
        return build_from_sa(texts, sa_pairs, lcp_chars, store, b)

    @classmethod
    def open(cls, store: PagedStore):
        page0 = store.read_page(0)
        if page0[:4] != TREE_MAGIC:
            raise ValueError(f"bad tree magic: {page0[:4]!r}")
        hpage, hcount = struct.unpack_from("<II", page0, 4)
        blob = b"".join(store.read_page(hpage + i) for i in range(hcount))
        return cls(store, *(_decode_header(blob)))

    def _append_text_pages(self, tid, data):
        start = self.store.page_count
        for off in range(0, len(data), self.store.page_size):
            self.store.append_page(data[off : off + self.store.page_size])
        if not data:
            raise ValueError("empty text")
        self.texts_dir[tid] = (start, len(data))

    def _write_header(self):
        blob = _encode_header(self.b, self.root_id, self.height, self.texts_dir, self.next_tid)
        hpage = self.store.page_count
        hcount = max(1, -(-len(blob) // self.store.page_size))
        for i in range(hcount):
            self.store.append_page(blob[i * self.store.page_size : (i + 1) * self.store.page_size])
        self.store.write_page(0, TREE_MAGIC + struct.pack("<II", hpage, hcount))

    def _write_levels(self, keys, lcp_bits):
        """Append leaf and internal pages for the sorted key sequence;
        returns (root id, height)."""
        if not keys:
            return None, 0
        b = self.b
        cap = 2 * b
        ngroups = max(1, -(-len(keys) // cap))
        sizes = [len(keys) // ngroups + (1 if i < len(keys) % ngroups else 0) for i in range(ngroups)]
        base = self.store.page_count
        leaf_ids = [base + i for i in range(ngroups)]
        bounds = []
        pos = 0
        level = []  # (page id, minimum lcp inside the node)
        for gi, size in enumerate(sizes):
            refs = keys[pos : pos + size]
            lcps = lcp_bits[pos : pos + size - 1]
            left = leaf_ids[gi - 1] if gi > 0 else NO_PAGE
            right = leaf_ids[gi + 1] if gi + 1 < ngroups else NO_PAGE
            page = NodePage(LEAF, refs, lcps, left_sib=left, right_sib=right)
            self.store.append_page(page.encode(self.store.page_size))
            inner_min = min(lcps) if lcps else None
            level.append((leaf_ids[gi], refs[0], refs[-1], inner_min))
            if gi + 1 < ngroups:
                bounds.append(lcp_bits[pos + size - 1])
            pos += size
        height = 1
        while len(level) > 1:
            ngroups = max(1, -(-len(level) // b))
            sizes = [len(level) // ngroups + (1 if i < len(level) % ngroups else 0) for i in range(ngroups)]
            new_level = []
            new_bounds = []
            pos = 0
            for gi, size in enumerate(sizes):
                group = level[pos : pos + size]
                refs = []
                lcps = []
                for ci, (cid, lkey, rkey, inner) in enumerate(group):
                    refs += [lkey, rkey]
                    # The two copies span the whole child: their lcp is the
                    # minimum of everything stored below it.  Children always
                    # hold at least two keys, so `inner` is known.
                    assert inner is not None, "child node with a single key"
                    lcps.append(inner)
                    if ci + 1 < size:
                        lcps.append(bounds[pos + ci])
                page = NodePage(INTERNAL, refs, lcps, children=[g[0] for g in group])
                pid = self.store.append_page(page.encode(self.store.page_size))
                new_level.append((pid, group[0][1], group[-1][2], min(lcps)))
                if gi + 1 < ngroups:
                    new_bounds.append(bounds[pos + size - 1])
                pos += size
            level = new_level
            bounds = new_bounds
            height += 1
        return level[0][0], height

    # -- page / text access --------------------------------------------------

    def read_node(self, pid: int) -> NodePage:
        return NodePage.decode(self.store.read_page(pid))

    def text_length(self, tid: int) -> int:
        return self.texts_dir[tid][1]

    def text_bytes(self, tid: int) -> bytes:
        start, length = self.texts_dir[tid]
        npages = -(-length // self.store.page_size)
        return b"".join(self.store.read_page(start + i) for i in range(npages))[:length]

    def suffix_symbols(self, ref, from_char: int, n_chars: int) -> list:
        """Symbols of the suffix `ref` for chars [from_char, from_char+n_chars),
        where char index == content length yields the terminator."""
        tid, off = ref
        start_page, tlen = self.texts_dir[tid]
        content_len = tlen - (off - 1)
        if from_char > content_len or n_chars <= 0:
            return []
        last_exclusive = min(from_char + n_chars, content_len + 1)
        byte_lo = (off - 1) + from_char
        byte_hi = min((off - 1) + last_exclusive, tlen)
        ps = self.store.page_size
        first_pg, last_pg = byte_lo // ps, max(byte_lo, byte_hi - 1) // ps
        raw = b"".join(self.store.read_page(start_page + p) for p in range(first_pg, last_pg + 1))
        chunk = raw[byte_lo - first_pg * ps : byte_hi - first_pg * ps]
        syms = list(chunk)
        if last_exclusive == content_len + 1:
            syms.append(TERMINATOR)
        return syms

    def _fetcher(self, page: NodePage, counter=None):
        def fetch(k, from_char, n_chars):
            if counter is not None:
                counter[0] += 1
            return self.suffix_symbols(page.refs[k - 1], from_char, n_chars)

        return fetch

    # -- search ---------------------------------------------------------------

    def search(self, pattern: bytes) -> list:
        """All (tid, offset) positions where the pattern occurs, ascending."""
        if not pattern:
            raise ValueError("empty pattern")
        if self.root_id is None:
            return []
        pat = BitKey.from_bytes(pattern)
        pid = self.root_id
        hint = 0
        while True:
            page = self.read_node(pid)
            r, ell, x = _locate(len(page.refs), page.lcp_bits, pat, hint, self._fetcher(page))
            if page.kind == LEAF:
                break
            n = len(page.children)
            child = min(n, r // 2 + 1)
            hint = max(
                self._lcp_bound(page, x, 2 * child - 1, ell),
                self._lcp_bound(page, x, 2 * child, ell),
            )
            pid = page.children[child - 1]
        return sorted(self._collect(page, r, pat))

    def _lcp_bound(self, page: NodePage, x: int, k: int, ell: int) -> int:
        """Lower bound on the pattern's bit-LCP with key k, given its exact
        LCP `ell` with key x (prefix identity through the page's LCPs)."""
        if k == x:
            return ell
        lo, hi = min(x, k), max(x, k)
        m = min(page.lcp_bits[lo - 1 : hi - 1])
        return min(ell, m)

    def _collect(self, leaf: NodePage, r: int, pat: BitKey) -> list:
        plen = pat.bit_len
        out = []
        idx = r + 1
        need_direct = True
        while True:
            while idx <= len(leaf.refs):
                if need_direct:
                    syms = self.suffix_symbols(leaf.refs[idx - 1], 0, len(pat.symbols))
                    ok = tuple(syms) == pat.symbols
                    need_direct = False
                else:
                    ok = leaf.lcp_bits[idx - 2] >= plen
                if not ok:
                    return out
                out.append(leaf.refs[idx - 1])
                idx += 1
            if leaf.right_sib == NO_PAGE:
                return out
            leaf = self.read_node(leaf.right_sib)
            idx = 1
            need_direct = True

    def leaf_scan(self) -> list:
        """Concatenated leaf references left to right (the suffix array)."""
        if self.root_id is None:
            return []
        pid = self.root_id
        for _ in range(self.height - 1):
            pid = self.read_node(pid).children[0]
        out = []
        while pid != NO_PAGE:
            page = self.read_node(pid)
            out.extend(page.refs)
            pid = page.right_sib
        return out

    def _leaf_scan_with_lcps(self, texts):
        """Leaf keys plus the full adjacent bit-LCP sequence (boundary LCPs
        between neighbouring leaves are recomputed from the texts)."""
        if self.root_id is None:
            return [], []
        pid = self.root_id
        for _ in range(self.height - 1):
            pid = self.read_node(pid).children[0]
        keys = []
        lcps = []
        while pid != NO_PAGE:
            page = self.read_node(pid)
            if keys:
                lcps.append(_bit_lcp_refs(texts, keys[-1], page.refs[0]))
            keys.extend(page.refs)
            lcps.extend(page.lcp_bits)
            pid = page.right_sib
        return keys, lcps

    def structure_signature(self):
        """Per level, the key count of every node (for structural equality)."""
        if self.root_id is None:
            return []
        levels = []
        frontier = [self.root_id]
        while frontier:
            pages = [self.read_node(p) for p in frontier]
            levels.append([len(p.refs) for p in pages])
            nxt = []
            for p in pages:
                nxt.extend(p.children)
            frontier = nxt
        return levels

    # -- updates --------------------------------------------------------------

    def insert_text(self, text: bytes) -> int:
        """Add a text: merge its sorted suffixes into the leaf sequence and
        rebuild the internal levels.  Returns the new text id."""
        if not text:
            raise ValueError("empty text")
        if b"\x00" in text:
            raise ValueError("text contains reserved byte 0x00")
        if len(text) > 0xFFFFFF:
            raise ValueError("text too long for 3-byte offsets")
        tid = self.next_tid
        if tid > 0xFFFF:
            raise ValueError("text id space exhausted")
        self.next_tid += 1
        texts = {t: self.text_bytes(t) for t in self.texts_dir}
        old_keys, old_lcps = self._leaf_scan_with_lcps(texts)
        self._append_text_pages(tid, text)
        texts[tid] = text

        sa_new = suffarr.build_sa_internal(text)
        lcp_new_chars = suffarr.build_lcp(text, sa_new)
        new_keys = [(tid, off) for off in sa_new]
        new_lcps = [
            _bit_lcp_refs(texts, new_keys[i], new_keys[i + 1], lcp_new_chars[i])
            for i in range(len(new_keys) - 1)
        ]
        keys, lcps = _merge_key_runs(texts, old_keys, old_lcps, new_keys, new_lcps)
        self.root_id, self.height = self._write_levels(keys, lcps)
        self._write_header()
        return tid

    def delete_text(self, tid: int):
        """Drop every suffix of a text and rebuild the levels.  The text's
        pages stay behind unreferenced."""
        if tid not in self.texts_dir:
            raise KeyError(f"unknown text id {tid}")
        texts = {t: self.text_bytes(t) for t in self.texts_dir}
        keys, lcps = self._leaf_scan_with_lcps(texts)
        kept_keys = []
        kept_lcps = []
        pending = None
        for i, ref in enumerate(keys):
            if ref[0] == tid:
                if pending is not None and i < len(lcps):
                    pending = min(pending, lcps[i])
                continue
            if kept_keys:
                kept_lcps.append(min(pending, lcps[i - 1]) if pending is not None else pending)
            kept_keys.append(ref)
            pending = lcps[i] if i < len(lcps) else None
        del self.texts_dir[tid]
        self.root_id, self.height = self._write_levels(kept_keys, kept_lcps)
        self._write_header()


def _merge_key_runs(texts, a_keys, a_lcps, b_keys, b_lcps):
    """Merge two sorted suffix-key runs, producing merged keys and LCPs.

    LCPs between keys adjacent in the same input run are reused; LCPs
    across runs are computed from the texts.
    """
    keys = []
    lcps = []
    ia = ib = 0

    def less(x, y):
        cx = _suffix_content(texts, x)
        cy = _suffix_content(texts, y)
        if cx == cy:
            return x < y
        # Terminator above every byte: the key whose content ends first
        # sorts after the one that continues.
        if cx.startswith(cy):
            return True
        if cy.startswith(cx):
            return False
        return cx < cy

    def push(ref, same_run_lcp):
        if keys:
            lcps.append(
                same_run_lcp
                if same_run_lcp is not None
                else _bit_lcp_refs(texts, keys[-1], ref)
            )
        keys.append(ref)

    prev_from = None
    while ia < len(a_keys) or ib < len(b_keys):
        take_a = ib >= len(b_keys) or (ia < len(a_keys) and less(a_keys[ia], b_keys[ib]))
        if take_a:
            push(a_keys[ia], a_lcps[ia - 1] if prev_from == "a" and ia > 0 else None)
            prev_from = "a"
            ia += 1
        else:
            push(b_keys[ib], b_lcps[ib - 1] if prev_from == "b" and ib > 0 else None)
            prev_from = "b"
            ib += 1
    return keys, lcps


def _encode_header(b, root_id, height, texts_dir, next_tid):
    out = bytearray()
    out += HEADER_MAGIC
    out += struct.pack(
        "<IIIII",
        b,
        NO_PAGE if root_id is None else root_id,
        height,
        next_tid,
        len(texts_dir),
    )
    for tid in sorted(texts_dir):
        start, length = texts_dir[tid]
        out += struct.pack("<HII", tid, start, length)
    return bytes(out)


def _decode_header(blob):
    if blob[:4] != HEADER_MAGIC:
        raise ValueError(f"bad header magic: {blob[:4]!r}")
    b, root_raw, height, next_tid, ntexts = struct.unpack_from("<IIIII", blob, 4)
    off = 4 + 20
    texts_dir = {}
    for _ in range(ntexts):
        tid, start, length = struct.unpack_from("<HII", blob, off)
        texts_dir[tid] = (start, length)
        off += 10
    root_id = None if root_raw == NO_PAGE else root_raw
    return b, root_id, height, texts_dir, next_tid


def build_from_sa(texts: dict, sa_pairs, lcp_chars, store: PagedStore, b: int | None = None) -> StringBTree:
    """Bottom-up construction from a precomputed collection suffix array.

    Lays out: reserved header page, text pages, node pages (leaves then
    each internal level, all appended left to right), header blob.
    """
    for tid, data in texts.items():
        if not 1 <= tid <= 0xFFFF:
            raise ValueError(f"text id {tid} out of range")
        if len(data) > 0xFFFFFF:
            raise ValueError("text too long for 3-byte offsets")
        if b"\x00" in data:
            raise ValueError("text contains reserved byte 0x00")
        if not data:
            raise ValueError("empty text")
    if len(sa_pairs) != sum(len(t) for t in texts.values()):
        raise ValueError("suffix array does not cover the collection")
    if b is None:
        b = fit_branching(store.page_size)
    if b < 2:
        raise ValueError("branching factor must be at least 2")
    if store.page_count == 0:
        store.append_page(b"")  # reserve the pointer page
    tree = StringBTree(store, b, None, 0, {}, max(texts, default=0) + 1)
    for tid in sorted(texts):
        tree._append_text_pages(tid, texts[tid])
    lcp_bits = [
        _bit_lcp_refs(texts, sa_pairs[i], sa_pairs[i + 1], lcp_chars[i])
        for i in range(len(sa_pairs) - 1)
    ]
    tree.root_id, tree.height = tree._write_levels(list(sa_pairs), lcp_bits)
    tree._write_header()
    return tree


# -- sampled supra-index ------------------------------------------------------


class SupraIndex:
    """Routes a pattern to the sub-array of a key sequence containing its
    position, touching a single sampled string.

    Samples are the rightmost key of each sub-array.  The Patricia tree
    spans the distinct sampled keys; `distinct_last[d]` is the ordinal of
    the last sample equal to distinct key d (duplicate suffixes across
    texts can be sampled more than once)."""

    def __init__(self, sub_size, nkeys, sample_pos, distinct_pos, distinct_last, patricia, refs, texts):
        self.sub_size = sub_size
        self.nkeys = nkeys
        self.sample_pos = sample_pos
        self.distinct_pos = distinct_pos
        self.distinct_last = distinct_last
        self.patricia = patricia
        self._refs = refs
        self._texts = texts

    @property
    def sub_count(self):
        return len(self.sample_pos)

    def sub_array_bounds(self, j: int):
        """(start, end) key indices (0-based, end exclusive) of sub-array j."""
        start = 0 if j == 1 else self.sample_pos[j - 2] + 1
        return start, self.sample_pos[j - 1] + 1

    def _key_symbols(self, d: int, plen_chars: int):
        tid, off = self._refs[self.sample_pos[self.distinct_pos[d]]]
        content = self._texts[tid][off - 1 :]
        syms = list(content[: plen_chars + 1])
        if len(content) <= plen_chars:
            syms.append(TERMINATOR)
        return syms


def build_supra(refs, lcp_bits, texts) -> SupraIndex:
    """Sampled routing structure over a node's ordered suffix references.

    Sub-arrays have size ceil(log2(len)^2) (floored at 4); the rightmost
    key of each is indexed by an in-memory Patricia tree built purely
    from the samples' pairwise LCPs (range minima over the node's LCPs).
    """
    s = len(refs)
    if s < 2:
        return SupraIndex(max(4, s), s, [s - 1] if s else [], [0], [0], None, refs, texts)
    sub_size = max(4, math.ceil(math.log2(s) ** 2))
    sample_pos = list(range(sub_size - 1, s, sub_size))
    if sample_pos[-1] != s - 1:
        sample_pos.append(s - 1)
    sample_lcps = [
        min(lcp_bits[sample_pos[i] : sample_pos[i + 1]])
        for i in range(len(sample_pos) - 1)
    ]

    def content_len(i):
        tid, off = refs[sample_pos[i]]
        return len(texts[tid]) - (off - 1)

    # Adjacent samples are the same suffix string exactly when their LCP is
    # the full key including terminator (content lengths must then agree).
    distinct_pos = [0]
    for i in range(1, len(sample_pos)):
        la = content_len(i - 1)
        if content_len(i) == la and sample_lcps[i - 1] == SYM_BITS * (la + 1):
            continue
        distinct_pos.append(i)
    distinct_last = [
        (distinct_pos[d + 1] - 1) if d + 1 < len(distinct_pos) else len(sample_pos) - 1
        for d in range(len(distinct_pos))
    ]
    distinct_lcps = [
        min(sample_lcps[distinct_pos[d] : distinct_pos[d + 1]])
        for d in range(len(distinct_pos) - 1)
    ]
    patricia = PatriciaTree(len(distinct_pos), distinct_lcps) if len(distinct_pos) > 1 else None
    return SupraIndex(sub_size, s, sample_pos, distinct_pos, distinct_last, patricia, refs, texts)


def supra_locate(supra: SupraIndex, pattern: bytes) -> int:
    """1-based sub-array index containing the pattern's insertion point."""
    if supra.sub_count <= 1:
        return 1
    pat = BitKey.from_bytes(pattern)
    if supra.patricia is None:
        d = 1  # all samples are one repeated key; any sub-array works
        syms = supra._key_symbols(0, len(pat.symbols))
        ell = sym_lcp_bits(pat.symbols, syms)
        below = ell >= pat.bit_len or pat.bit(ell) == 0
        samples_le = 0 if below else supra.distinct_last[0] + 1
    else:
        d = supra.patricia.locate(pat, lambda k: supra._key_symbols(k, len(pat.symbols)))
        samples_le = supra.distinct_last[d - 1] + 1 if d >= 1 else 0
    return min(samples_le + 1, supra.sub_count)
