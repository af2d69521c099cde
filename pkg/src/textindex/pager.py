"""Fixed-size-page storage with bulk/random access accounting.

Every other component reads and writes through a PagedStore so that its
disk behaviour can be audited.  The store counts logical page accesses,
not OS caching effects: an access whose page id is exactly one past the
previously touched page extends the current run; any other access is a
seek and starts a new run.  Run count and the maximum run length are
reported so analyses can classify runs as bulk transfers under whatever
threshold they prefer.
"""

import os

__all__ = ["IoStats", "PagedStore", "create_store"]

MIN_PAGE_SIZE = 64


class IoStats:
    """Snapshot of a store's access counters."""

    __slots__ = ("page_reads", "page_writes", "seeks", "bulk_runs", "max_run_len")

    def __init__(self, page_reads=0, page_writes=0, seeks=0, bulk_runs=0, max_run_len=0):
        self.page_reads = page_reads
        self.page_writes = page_writes
        self.seeks = seeks
        self.bulk_runs = bulk_runs
        self.max_run_len = max_run_len

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__slots__}

    def __eq__(self, other):
        return isinstance(other, IoStats) and self.as_dict() == other.as_dict()

    def __repr__(self):
        inner = ", ".join(f"{k}={v}" for k, v in self.as_dict().items())
        return f"IoStats({inner})"


class PagedStore:
    """Dense array of fixed-size pages backed by a single raw file.

    Page ids run from 0; append_page extends the store by exactly one page.
    Not thread-safe: a store has a single owner at any time (the counters
    are plain attributes).
    """

    def __init__(self, page_size: int, mem_budget: int, path):
        if page_size < MIN_PAGE_SIZE:
            raise ValueError(f"page_size must be >= {MIN_PAGE_SIZE}, got {page_size}")
        if mem_budget < page_size:
            raise ValueError(f"mem_budget ({mem_budget}) must be >= page_size ({page_size})")
        self.page_size = page_size
        self.mem_budget = mem_budget
        self.path = os.fspath(path)
        self._f = open(self.path, "w+b")
        self._pages = 0
        self._last = None       # last accessed page id
        self._run_len = 0
        self._stats = IoStats()

    @property
    def page_count(self) -> int:
        return self._pages

    def _account(self, pid):
        if self._last is not None and pid == self._last + 1:
            self._run_len += 1
        else:
            self._stats.seeks += 1
            self._stats.bulk_runs += 1
            self._run_len = 1
        if self._run_len > self._stats.max_run_len:
            self._stats.max_run_len = self._run_len
        self._last = pid

    def read_page(self, pid: int) -> bytes:
        if not 0 <= pid < self._pages:
            raise IndexError(f"page id {pid} out of range (have {self._pages} pages)")
        self._stats.page_reads += 1
        self._account(pid)
        self._f.seek(pid * self.page_size)
        return self._f.read(self.page_size)

    def write_page(self, pid: int, data: bytes):
        if not 0 <= pid < self._pages:
            raise IndexError(f"page id {pid} out of range (have {self._pages} pages)")
        self._write(pid, data)

    def append_page(self, data: bytes = b"") -> int:
        pid = self._pages
        self._pages += 1
        self._write(pid, data)
        return pid

    def _write(self, pid, data):
        if len(data) > self.page_size:
            raise ValueError(f"payload of {len(data)} bytes exceeds page size {self.page_size}")
        if len(data) < self.page_size:
            data = data + b"\x00" * (self.page_size - len(data))
        self._stats.page_writes += 1
        self._account(pid)
        self._f.seek(pid * self.page_size)
        self._f.write(data)

    def io_stats(self) -> IoStats:
        return IoStats(**self._stats.as_dict())

    def reset_stats(self):
        # A reset also forgets the run in progress, so the next access
        # starts a fresh trace (keeps the run-sum invariant intact).
        self._stats = IoStats()
        self._last = None
        self._run_len = 0

    def flush(self):
        self._f.flush()

    def close(self):
        if not self._f.closed:
            self._f.flush()
            self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @classmethod
    def open_existing(cls, path, page_size: int, mem_budget: int):
        """Attach to an existing backing file (size must be page-aligned)."""
        store = cls.__new__(cls)
        if page_size < MIN_PAGE_SIZE:
            raise ValueError(f"page_size must be >= {MIN_PAGE_SIZE}, got {page_size}")
        if mem_budget < page_size:
            raise ValueError(f"mem_budget ({mem_budget}) must be >= page_size ({page_size})")
        store.page_size = page_size
        store.mem_budget = mem_budget
        store.path = os.fspath(path)
        store._f = open(store.path, "r+b")
        size = os.fstat(store._f.fileno()).st_size
        if size % page_size:
            raise ValueError(f"backing file size {size} is not a multiple of page size {page_size}")
        store._pages = size // page_size
        store._last = None
        store._run_len = 0
        store._stats = IoStats()
        return store


def create_store(page_size: int, mem_budget: int, path) -> PagedStore:
    """Create an empty store at `path` (truncating any existing file)."""
    return PagedStore(page_size, mem_budget, path)
