import random

import pytest

from textindex.pager import PagedStore, create_store


def replay_counters(ids):
    """Recompute seek/run counters from an access log."""
    seeks = runs = max_run = 0
    last = None
    run_len = 0
    for pid in ids:
        if last is not None and pid == last + 1:
            run_len += 1
        else:
            seeks += 1
            runs += 1
            run_len = 1
        max_run = max(max_run, run_len)
        last = pid
    return {"seeks": seeks, "bulk_runs": runs, "max_run_len": max_run}


def test_create_empty(tmp_path):
    store = create_store(4096, 1 << 20, tmp_path / "p.dat")
    assert store.page_count == 0
    assert store.io_stats().as_dict() == {
        "page_reads": 0, "page_writes": 0, "seeks": 0, "bulk_runs": 0, "max_run_len": 0,
    }


def test_minimal_store_boundary(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    assert store.page_size == 64


def test_invalid_sizes(tmp_path):
    with pytest.raises(ValueError):
        create_store(32, 1 << 20, tmp_path / "a.dat")
    with pytest.raises(ValueError):
        create_store(4096, 1024, tmp_path / "b.dat")


def test_round_trip_and_overwrite(tmp_path):
    for page_size in (64, 512, 4096):
        store = create_store(page_size, 1 << 20, tmp_path / f"p{page_size}.dat")
        payloads = [bytes([i]) * page_size for i in range(3)]
        for p in payloads:
            store.append_page(p)
        for i, p in enumerate(payloads):
            assert store.read_page(i) == p
        store.write_page(0, b"\xaa" * page_size)
        assert store.read_page(0) == b"\xaa" * page_size
        store.close()


def test_short_payload_zero_padded(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    store.append_page(b"xy")
    assert store.read_page(0) == b"xy" + b"\x00" * 62


def test_oversized_payload_rejected(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    with pytest.raises(ValueError):
        store.append_page(b"z" * 65)


def test_out_of_range_ids(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    store.append_page(b"a")
    with pytest.raises(IndexError):
        store.read_page(1)
    with pytest.raises(IndexError):
        store.write_page(5, b"a")


def test_contiguous_run_counts_one_seek(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    for _ in range(8):
        store.append_page(b"")
    store.reset_stats()
    for pid in (5, 6, 7):
        store.read_page(pid)
    st = store.io_stats()
    assert st.page_reads == 3
    assert st.seeks == 1
    assert st.bulk_runs == 1
    assert st.max_run_len == 3


def test_jump_counts_extra_seek(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    for _ in range(11):
        store.append_page(b"")
    store.reset_stats()
    for pid in (5, 9, 10):
        store.read_page(pid)
    assert store.io_stats().seeks == 2


def test_random_trace_matches_replay_oracle(tmp_path):
    rng = random.Random(5)
    store = create_store(64, 64, tmp_path / "p.dat")
    for _ in range(100):
        store.append_page(b"")
    store.reset_stats()

    ids = list(range(100))
    rng.shuffle(ids)
    log = []
    for pid in ids:
        store.read_page(pid)
        log.append(pid)
    expected = replay_counters(log)
    st = store.io_stats()
    assert st.seeks == expected["seeks"]
    assert st.bulk_runs == expected["bulk_runs"]
    assert st.max_run_len == expected["max_run_len"]
    assert st.page_reads == 100
    # Invariants: seeks bounded by accesses, runs partition the accesses.
    assert st.seeks <= st.page_reads + st.page_writes


def test_interleaved_appends_and_reads_match_oracle(tmp_path):
    rng = random.Random(9)
    store = create_store(64, 64, tmp_path / "p.dat")
    log = []
    for _ in range(300):
        if store.page_count == 0 or rng.random() < 0.4:
            pid = store.append_page(bytes([rng.randrange(256)]))
            log.append(pid)
        else:
            pid = rng.randrange(store.page_count)
            store.read_page(pid)
            log.append(pid)
    expected = replay_counters(log)
    st = store.io_stats()
    assert st.seeks == expected["seeks"]
    assert st.bulk_runs == expected["bulk_runs"]
    assert st.max_run_len == expected["max_run_len"]


def test_reset_stats_starts_fresh_trace(tmp_path):
    store = create_store(64, 64, tmp_path / "p.dat")
    for _ in range(4):
        store.append_page(b"")
    store.reset_stats()
    assert store.io_stats().as_dict() == {
        "page_reads": 0, "page_writes": 0, "seeks": 0, "bulk_runs": 0, "max_run_len": 0,
    }
    store.read_page(3)  # continuation of the old run still counts as a seek
    assert store.io_stats().seeks == 1


def test_open_existing(tmp_path):
    path = tmp_path / "p.dat"
    store = create_store(64, 128, path)
    store.append_page(b"hello")
    store.close()
    again = PagedStore.open_existing(path, 64, 128)
    assert again.page_count == 1
    assert again.read_page(0).startswith(b"hello")
