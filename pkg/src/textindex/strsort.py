"""Randomized external string sorting.

Arbitrary-length strings are shrunk by hashing fixed-size pieces into
short names, the compressed strings are sorted, and the order is then
repaired: only the names where lexicographically adjacent compressed
strings first disagree are given true ranks (by sorting the underlying
pieces), every other name becomes a zero filler, and two copy passes
propagate the ranks so that a final column sort yields the exact
lexicographic permutation.

Hashing can map distinct pieces to one name.  Collisions among ranked
pieces are detected outright; collisions elsewhere are caught by a
final order verification.  Either way the sort retries with a fresh
seed, making it Las Vegas: the returned permutation is always correct.

Pieces are `piece_bits` bits (a multiple of 8); names are
2*ceil(log2 K) bits for K input strings.  Returned permutations use
1-based source indices.
"""

import hashlib
import heapq
import math
import struct
from collections import namedtuple

__all__ = [
    "CollisionError",
    "RetriesExhausted",
    "PieceNamer",
    "CString",
    "make_cstrings",
    "sort_and_mark",
    "rank_marked",
    "resolve_and_sort",
    "sort_strings",
    "suggested_piece_bits",
]

DEFAULT_PIECE_BITS = 128


class CollisionError(Exception):
    """Two distinct pieces received the same name; rerun with a new seed."""


class RetriesExhausted(Exception):
    pass


class PieceNamer:
    """Names pieces with `name_bits`-bit values.

    Seeded-hash mode derives names from a keyed hash of the piece bytes
    with the piece's bit length mixed in (so a short final piece cannot
    collide with a distinct padded one).  Injected-table mode replays a
    fixed piece -> name mapping.
    """

    def __init__(self, name_bits: int, seed: int = 0, table: dict | None = None):
        if name_bits < 1:
            raise ValueError("name_bits must be positive")
        self.name_bits = name_bits
        self.seed = seed
        self.table = dict(table) if table is not None else None
        self._mask = (1 << name_bits) - 1

    def name(self, piece: bytes) -> int:
        if self.table is not None:
            return self.table[piece]
        key = struct.pack("<QI", self.seed & 0xFFFFFFFFFFFFFFFF, 8 * len(piece))
        digest = hashlib.blake2b(piece, digest_size=16, key=key).digest()
        return int.from_bytes(digest[:8], "little") & self._mask


CString = namedtuple("CString", ["names", "source_index", "piece_count"])

# A mark records the 1-based piece positions (with their contents) where a
# c-string first disagrees with a lexicographic neighbour.
Marks = namedtuple("Marks", ["source_index", "pieces"])  # pieces: {position: piece bytes}


def _pieces_of(s: bytes, piece_bytes: int) -> list:
    return [s[i : i + piece_bytes] for i in range(0, len(s), piece_bytes)]


def make_cstrings(strings, piece_bits: int, namer: PieceNamer) -> list:
    """One compressed string per input, 1-based source indices."""
    if not strings:
        raise ValueError("empty string set")
    if piece_bits <= 0 or piece_bits % 8:
        raise ValueError("piece length must be a positive multiple of 8 bits")
    if piece_bits < namer.name_bits:
        raise ValueError("piece length must be at least the name width")
    piece_bytes = piece_bits // 8
    out = []
    for k, s in enumerate(strings, start=1):
        names = tuple(namer.name(p) for p in _pieces_of(s, piece_bytes))
        out.append(CString(names, k, len(names)))
    return out


def sort_and_mark(cstrings, sorter=None):
    """Sort by name sequence and mark the first differing name on each
    side of every adjacency.  Returns (sorted list, lcp_names, marks)
    where marks holds 1-based positions only; piece contents are attached
    afterwards via attach_piece_contents."""
    if sorter is None:
        order = sorted(cstrings, key=lambda c: (c.names, c.source_index))
    else:
        by_src = {c.source_index: c for c in cstrings}
        order = [by_src[src] for _, src in sorter([(c.names, c.source_index) for c in cstrings])]
    lcp_names = []
    positions = [set() for _ in order]
    for i in range(len(order) - 1):
        a, b = order[i].names, order[i + 1].names
        l = 0
        while l < min(len(a), len(b)) and a[l] == b[l]:
            l += 1
        lcp_names.append(l)
        if l < len(a):
            positions[i].add(l + 1)
        if l < len(b):
            positions[i + 1].add(l + 1)
    return order, lcp_names, positions


def attach_piece_contents(strings, sorted_c, positions, piece_bits: int) -> list:
    piece_bytes = piece_bits // 8
    marks = []
    for c, pos in zip(sorted_c, positions):
        s = strings[c.source_index - 1]
        marks.append(Marks(c.source_index, {
            p: s[(p - 1) * piece_bytes : p * piece_bytes] for p in sorted(pos)
        }))
    return marks


def rank_marked(sorted_c, marks) -> dict:
    """Dense 1-based ranks of the distinct marked pieces, in piece order.

    Raises CollisionError when two unequal marked pieces carry one name.
    """
    piece_by_name = {}
    pieces = set()
    for c, mk in zip(sorted_c, marks):
        for pos, piece in mk.pieces.items():
            name = c.names[pos - 1]
            other = piece_by_name.get(name)
            if other is not None and other != piece:
                raise CollisionError(f"name {name} shared by pieces {other!r} and {piece!r}")
            piece_by_name[name] = piece
            pieces.add(piece)
    return {p: r for r, p in enumerate(sorted(pieces), start=1)}


def resolve_and_sort(sorted_c, lcp_names, marks, ranks, sorter=None) -> list:
    """Build the rank/filler table, run both copy passes, sort its columns.

    Returns the original 1-based indices in final sorted order.
    """
    k = len(sorted_c)
    cols = []
    for c, mk in zip(sorted_c, marks):
        col = [0] * c.piece_count
        for pos, piece in mk.pieces.items():
            col[pos - 1] = ranks[piece]
        cols.append(col)
    # Rightward pass: pull shared prefixes forward, never clobbering marks.
    for x in range(1, k):
        for i in range(lcp_names[x - 1]):
            if i + 1 not in marks[x].pieces:
                cols[x][i] = cols[x - 1][i]
    # Leftward pass.
    for x in range(k - 2, -1, -1):
        for i in range(lcp_names[x]):
            if i + 1 not in marks[x].pieces:
                cols[x][i] = cols[x + 1][i]
    width = max((len(c) for c in cols), default=0)
    keyed = [
        (tuple(col) + (0,) * (width - len(col)), sorted_c[x].source_index)
        for x, col in enumerate(cols)
    ]
    if sorter is None:
        keyed.sort()
    else:
        keyed = sorter(keyed)
    return [src for _, src in keyed]


def _verify_sorted(strings, perm) -> bool:
    for a, b in zip(perm, perm[1:]):
        sa, sb = strings[a - 1], strings[b - 1]
        if sa > sb or (sa == sb and a > b):
            return False
    return True


def sort_strings(strings, piece_bits: int = DEFAULT_PIECE_BITS, seed: int = 0,
                 max_retries: int = 8, namer: PieceNamer | None = None,
                 store=None, mem_budget: int | None = None) -> list:
    """Sort byte strings lexicographically (ties by original index).

    Runs the full pipeline; on a detected name collision or a failed
    final order check it reruns with a fresh seed, up to `max_retries`
    times.  With `store` given, the two big sorts go through external
    page-backed merge sort whenever their data exceeds `mem_budget`
    (the store's own budget by default).
    """
    k = len(strings)
    if k == 0:
        raise ValueError("empty string set")
    if k == 1:
        return [1]
    name_bits = 2 * max(1, math.ceil(math.log2(k)))
    attempts = 1 if namer is not None else max_retries + 1
    for attempt in range(attempts):
        n = namer if namer is not None else PieceNamer(name_bits, seed=seed + attempt)
        try:
            cs = make_cstrings(strings, piece_bits, n)
            sorter = _make_sorter(store, mem_budget)
            order, lcp_names, positions = sort_and_mark(cs, sorter=sorter)
            marks = attach_piece_contents(strings, order, positions, piece_bits)
            ranks = rank_marked(order, marks)
            perm = resolve_and_sort(order, lcp_names, marks, ranks, sorter=sorter)
        except CollisionError:
            if namer is not None:
                raise
            continue
        if _verify_sorted(strings, perm):
            return perm
        if namer is not None:
            raise CollisionError("injected names produced an incorrect order")
    raise RetriesExhausted(f"no collision-free run in {attempts} attempts")


def suggested_piece_bits(total_bytes: int, mem_budget: int, page_size: int, k: int) -> int:
    """Piece width from the asymptotic choice L ~ log_m(n) * log2(K),
    rounded up to whole bytes and floored at the name width."""
    n = max(2.0, total_bytes / page_size)
    m = max(2.0, mem_budget / page_size)
    name_bits = 2 * max(1, math.ceil(math.log2(max(2, k))))
    raw = math.log(n, m) * math.log2(max(2, k))
    bits = max(name_bits, int(raw) + 1, 8)
    return ((bits + 7) // 8) * 8


# -- external staging --------------------------------------------------------
#
# Rows are (key tuple of ints, source index).  Keys are packed at a fixed
# 8 bytes per entry, big endian, so byte order equals tuple order (shorter
# keys sort first in both views).


def _pack_key(key) -> bytes:
    return b"".join(v.to_bytes(8, "big") for v in key)


def _pack_row(key_bytes: bytes, src: int) -> bytes:
    return struct.pack("<I", len(key_bytes)) + key_bytes + struct.pack("<I", src)


def _iter_rows(buf):
    off = 0
    while off < len(buf):
        (klen,) = struct.unpack_from("<I", buf, off)
        off += 4
        key = bytes(buf[off : off + klen])
        off += klen
        (src,) = struct.unpack_from("<I", buf, off)
        off += 4
        yield key, src


def _make_sorter(store, mem_budget):
    """A sorter for (key tuple, src) rows: in memory while the serialized
    rows fit the budget, page-backed run merge otherwise."""
    if store is None:
        return None
    budget = mem_budget if mem_budget is not None else store.mem_budget

    def sorter(rows):
        packed = [(_pack_key(k), s) for k, s in rows]
        est = sum(len(k) + 8 for k, _ in packed)
        if est <= budget:
            return sorted(rows)
        runs = []
        per_run_bytes = max(64, budget // 2)
        chunk, size = [], 0
        for row in packed:
            chunk.append(row)
            size += len(row[0]) + 8
            if size >= per_run_bytes:
                runs.append(_write_run(store, chunk))
                chunk, size = [], 0
        if chunk:
            runs.append(_write_run(store, chunk))
        merged = heapq.merge(*(_read_run(store, *r) for r in runs))
        return [(k, s) for k, s in merged]

    return sorter


def _write_run(store, rows):
    rows.sort()
    payload = b"".join(_pack_row(k, s) for k, s in rows)
    base = store.page_count
    for off in range(0, len(payload), store.page_size):
        store.append_page(payload[off : off + store.page_size])
    return base, len(payload)


def _read_run(store, base, nbytes):
    buf = bytearray()
    for i in range(-(-nbytes // store.page_size)):
        buf += store.read_page(base + i)
    yield from _iter_rows(bytes(buf[:nbytes]))
