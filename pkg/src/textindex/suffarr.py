"""Suffix arrays: in-memory construction, pattern search, LCP arrays,
and the staged construction that keeps the growing array on disk.

Suffix comparison appends a logical terminator that sorts above every
byte, so a suffix that is a proper prefix of another sorts after it.
Offsets in suffix arrays are 1-based.  Byte 0x00 is reserved as a text
separator for multi-text concatenations and must not occur in a text.
"""

import struct

import numpy as np

from .pager import PagedStore

__all__ = [
    "TERMINATOR",
    "suffix_sort_codes",
    "build_sa_internal",
    "build_lcp",
    "sa_search",
    "build_sa_incremental",
    "save_sa",
    "load_sa",
]

TERMINATOR = 256  # logical end-of-text symbol, above every byte

SA_MAGIC = b"SA01"
SA_REF_BYTES = 5


def suffix_sort_codes(codes) -> np.ndarray:
    """Sort all suffixes of an integer sequence by prefix doubling.

    Returns the 0-based suffix array of `codes` (any non-negative ints).
    """
    codes = np.asarray(codes, dtype=np.int64)
    n = codes.size
    if n == 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(codes, kind="stable")
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.cumsum(np.concatenate(([0], np.diff(codes[order]) != 0)))
    k = 1
    while rank[order[-1]] != n - 1:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - k] = rank[k:]
        order = np.lexsort((key2, rank))
        changed = (np.diff(rank[order]) != 0) | (np.diff(key2[order]) != 0)
        newrank = np.empty(n, dtype=np.int64)
        newrank[order] = np.cumsum(np.concatenate(([0], changed)))
        rank = newrank
        k *= 2
    return order


def _check_text(text: bytes):
    if not isinstance(text, (bytes, bytearray)):
        raise TypeError("text must be bytes")
    if b"\x00" in text:
        raise ValueError("text contains reserved separator byte 0x00")


def _codes_with_terminator(text: bytes) -> np.ndarray:
    ext = np.empty(len(text) + 1, dtype=np.int64)
    ext[:-1] = np.frombuffer(bytes(text), dtype=np.uint8)
    ext[-1] = TERMINATOR
    return ext


def build_sa_internal(text: bytes) -> list:
    """Suffix array of `text` as a list of 1-based offsets."""
    _check_text(text)
    if len(text) == 0:
        raise ValueError("text must be non-empty")
    ext = _codes_with_terminator(text)
    sa0 = suffix_sort_codes(ext)
    return [int(i) + 1 for i in sa0 if i != len(text)]


def build_lcp(text: bytes, sa) -> list:
    """Lengths of the common prefixes of adjacent suffixes in `sa` (Kasai)."""
    n = len(text)
    if sorted(sa) != list(range(1, n + 1)):
        raise ValueError("suffix array does not match text: not a permutation of 1..n")
    rank = [0] * (n + 1)
    for r, s in enumerate(sa):
        rank[s] = r
    lcp = [0] * max(0, n - 1)
    k = 0
    for i in range(1, n + 1):
        r = rank[i]
        if r == n - 1:
            k = 0
            continue
        j = sa[r + 1]
        while i + k <= n and j + k <= n and text[i + k - 1] == text[j + k - 1]:
            k += 1
        lcp[r] = k
        if k:
            k -= 1
    return lcp


def _suffix_ge_pattern(text: bytes, start: int, pattern: bytes) -> bool:
    """Is the suffix at 1-based `start` >= `pattern` (terminator above bytes)?"""
    window = text[start - 1 : start - 1 + len(pattern)]
    if len(window) < len(pattern):
        # Suffix content ran out: its terminator beats any pattern byte.
        return pattern.startswith(window) or window > pattern[: len(window)]
    return window >= pattern


def sa_search(text: bytes, sa, pattern: bytes) -> list:
    """All 1-based positions where `pattern` occurs, via binary search on `sa`.

    Binary search locates the leftmost suffix >= pattern, then a rightward
    scan collects the suffixes that carry the pattern as a prefix.
    """
    if not pattern:
        raise ValueError("empty pattern")
    lo, hi = 0, len(sa)
    while lo < hi:
        mid = (lo + hi) // 2
        if _suffix_ge_pattern(text, sa[mid], pattern):
            hi = mid
        else:
            lo = mid + 1
    out = []
    p = len(pattern)
    for r in range(lo, len(sa)):
        s = sa[r]
        if text[s - 1 : s - 1 + p] != pattern:
            break
        out.append(s)
    out.sort()
    return out


class _SuffixCmp:
    """Order 0-based suffix starts of a terminated code array."""

    def __init__(self, ext: np.ndarray):
        self.ext = ext

    def less(self, i: int, j: int) -> bool:
        if i == j:
            return False
        a = self.ext[i:]
        b = self.ext[j:]
        m = min(a.size, b.size)
        neq = a[:m] != b[:m]
        k = int(np.argmax(neq))
        if not neq[k]:
            # Cannot happen for distinct suffixes: the unique terminator
            # forces a mismatch before the shorter one runs out.
            raise AssertionError("suffixes compared equal")
        return bool(a[k] < b[k])


def _sa_ext_layout(n: int, page_size: int):
    per_page = page_size // SA_REF_BYTES
    region_pages = max(1, -(-n // per_page))
    return per_page, region_pages


class _RegionReader:
    """Stream 5-byte records out of a page region, `chunk_pages` at a time."""

    def __init__(self, store, base_page, chunk_pages, count):
        self.store = store
        self.page = base_page
        self.chunk_pages = max(1, chunk_pages)
        self.remaining = count
        self.buf = []
        self.pos = 0

    def _refill(self):
        per_page = self.store.page_size // SA_REF_BYTES
        npages = min(self.chunk_pages, -(-self.remaining // per_page))
        self.buf = []
        left = self.remaining
        for i in range(npages):
            raw = self.store.read_page(self.page + i)
            take = min(left, per_page)  # records never straddle pages
            self.buf.extend(
                int.from_bytes(raw[j * SA_REF_BYTES : (j + 1) * SA_REF_BYTES], "little")
                for j in range(take)
            )
            left -= take
        self.page += npages
        self.pos = 0

    def next(self):
        if self.remaining <= 0:
            raise IndexError("region exhausted")
        if self.pos >= len(self.buf):
            self._refill()
        v = self.buf[self.pos]
        self.pos += 1
        self.remaining -= 1
        return v

    def read_all(self):
        return [self.next() for _ in range(self.remaining)]


class _RegionWriter:
    """Stream 5-byte records into a page region, flushing full chunks."""

    def __init__(self, store, base_page, chunk_pages):
        self.store = store
        self.page = base_page
        self.chunk_pages = max(1, chunk_pages)
        self.buf = []

    def write(self, v):
        self.buf.append(v)
        per_page = self.store.page_size // SA_REF_BYTES
        if len(self.buf) >= per_page * self.chunk_pages:
            self.flush()

    def flush(self):
        per_page = self.store.page_size // SA_REF_BYTES
        for lo in range(0, len(self.buf), per_page):
            chunk = self.buf[lo : lo + per_page]
            data = b"".join(v.to_bytes(SA_REF_BYTES, "little") for v in chunk)
            self.store.write_page(self.page, data)
            self.page += 1
        self.buf = []


def build_sa_incremental(text: bytes, stage_size: int, store: PagedStore, on_stage_end=None) -> list:
    """Suffix array built in ceil(n/m) stages with the growing array on disk.

    Each stage sorts the suffixes starting in the next text slice of
    `stage_size` in memory, locates every previously placed suffix among
    them by binary search to fill a counter array, and merges the two
    ordered sequences in one disk scan.  The array alternates between two
    page regions of `store`; per stage the old region is read and the new
    one written in bulk runs sized by the store's memory budget.

    `on_stage_end(stage_number)` is invoked after each stage, for I/O audits.
    """
    _check_text(text)
    n = len(text)
    if not 1 <= stage_size <= n:
        raise ValueError(f"stage size {stage_size} out of range 1..{n}")
    ext = _codes_with_terminator(text)
    cmp = _SuffixCmp(ext)

    per_page, region_pages = _sa_ext_layout(n, store.page_size)
    base = store.page_count
    for _ in range(2 * region_pages):
        store.append_page()
    regions = (base, base + region_pages)

    # Half the budget buffers the incoming region, half the outgoing one.
    chunk_pages = max(1, store.mem_budget // 2 // store.page_size)

    ext_count = 0
    cur = 0  # region currently holding SA_ext
    stages = -(-n // stage_size)
    for h in range(1, stages + 1):
        lo = (h - 1) * stage_size + 1
        hi = min(h * stage_size, n)
        block = list(range(lo, hi + 1))
        # In-memory suffix array of the current slice (suffixes run to the
        # end of the text, so comparisons may look past the slice).
        sa_int = sorted(block, key=lambda s: _SuffixKey(cmp, s - 1))
        m = len(sa_int)

        if ext_count == 0:
            out = _RegionWriter(store, regions[cur], chunk_pages)
            for v in sa_int:
                out.write(v)
            out.flush()
            ext_count = m
        else:
            counts = [0] * (m + 2)  # slots 1..m+1
            for i in range(1, lo):  # every previously placed suffix
                p = _locate_slot(cmp, sa_int, i - 1)
                counts[p] += 1
            old = _RegionReader(store, regions[cur], chunk_pages, ext_count)
            cur ^= 1
            out = _RegionWriter(store, regions[cur], chunk_pages)
            for j in range(1, m + 2):
                for _ in range(counts[j]):
                    out.write(old.next())
                if j <= m:
                    out.write(sa_int[j - 1])
            out.flush()
            ext_count += m
        if on_stage_end is not None:
            on_stage_end(h)

    return _RegionReader(store, regions[cur], chunk_pages, ext_count).read_all()


class _SuffixKey:
    __slots__ = ("cmp", "i")

    def __init__(self, cmp, i):
        self.cmp = cmp
        self.i = i

    def __lt__(self, other):
        return self.cmp.less(self.i, other.i)


def _locate_slot(cmp: _SuffixCmp, sa_int, suffix0: int) -> int:
    """1-based slot of a suffix among the stage's sorted suffixes.

    Slot j means the suffix orders between sa_int[j-1] and sa_int[j];
    slot len(sa_int)+1 means it follows all of them.
    """
    lo, hi = 0, len(sa_int)
    while lo < hi:
        mid = (lo + hi) // 2
        if cmp.less(suffix0, sa_int[mid] - 1):
            hi = mid
        else:
            lo = mid + 1
    return lo + 1


def save_sa(path, sa):
    """Write a suffix array: magic, count as u64 LE, then 5-byte offsets."""
    with open(path, "wb") as f:
        f.write(SA_MAGIC)
        f.write(struct.pack("<Q", len(sa)))
        for v in sa:
            f.write(int(v).to_bytes(SA_REF_BYTES, "little"))


def load_sa(path) -> list:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != SA_MAGIC:
            raise ValueError(f"bad suffix-array file magic: {magic!r}")
        (n,) = struct.unpack("<Q", f.read(8))
        data = f.read(n * SA_REF_BYTES)
        if len(data) != n * SA_REF_BYTES:
            raise ValueError("truncated suffix-array file")
        return [int.from_bytes(data[i * SA_REF_BYTES : (i + 1) * SA_REF_BYTES], "little") for i in range(n)]
