import random

import pytest

from textindex.pager import create_store
from textindex.suffarr import (
    build_lcp,
    build_sa_internal,
    build_sa_incremental,
    load_sa,
    sa_search,
    save_sa,
)


def naive_sa(text: bytes):
    """Sort suffixes directly, terminator above every byte."""
    # Map bytes to ints and append 256 so prefix-shorter sorts last.
    def key(i):
        return tuple(text[i - 1 :]) + (256,)
    return sorted(range(1, len(text) + 1), key=key)


def naive_lcp(text: bytes, sa):
    out = []
    for a, b in zip(sa, sa[1:]):
        x, y = text[a - 1 :], text[b - 1 :]
        k = 0
        while k < min(len(x), len(y)) and x[k] == y[k]:
            k += 1
        out.append(k)
    return out


def naive_occurrences(text: bytes, pattern: bytes):
    return [i + 1 for i in range(len(text) - len(pattern) + 1) if text[i : i + len(pattern)] == pattern]


def random_text(rng, n, sigma):
    alphabet = [rng.randrange(1, 256) for _ in range(sigma)]
    return bytes(rng.choice(alphabet) for _ in range(n))


def test_paper_running_example():
    assert build_sa_internal(b"abababbc") == [1, 3, 5, 2, 4, 6, 7, 8]


def test_single_char():
    assert build_sa_internal(b"a") == [1]


def test_reserved_byte_rejected():
    with pytest.raises(ValueError):
        build_sa_internal(b"a\x00b")


def test_sa_matches_naive_oracle():
    rng = random.Random(42)
    for _ in range(120):
        t = random_text(rng, rng.randrange(1, 300), rng.choice([2, 4, 256]))
        assert build_sa_internal(t) == naive_sa(t)


def test_sa_matches_naive_oracle_large():
    rng = random.Random(43)
    for _ in range(6):
        t = random_text(rng, rng.randrange(2000, 4096), rng.choice([2, 4, 16]))
        assert build_sa_internal(t) == naive_sa(t)


def test_sa_is_sorted_permutation():
    rng = random.Random(44)
    for _ in range(40):
        t = random_text(rng, rng.randrange(1, 200), 4)
        sa = build_sa_internal(t)
        assert sorted(sa) == list(range(1, len(t) + 1))
        keys = [tuple(t[i - 1 :]) + (256,) for i in sa]
        assert all(a < b for a, b in zip(keys, keys[1:]))


def test_lcp_fixture_abababbc():
    t = b"abababbc"
    sa = build_sa_internal(t)
    # Hand comparison of adjacent sorted suffixes.
    assert build_lcp(t, sa) == [4, 2, 0, 3, 1, 1, 0]


def test_lcp_run_of_equal_letters():
    # Terminator sorts above 'a', so the longest suffix comes first.
    t = b"aaaa"
    sa = build_sa_internal(t)
    assert sa == [1, 2, 3, 4]
    assert build_lcp(t, sa) == [3, 2, 1]


def test_lcp_distinct_bytes_all_zero():
    t = bytes(range(1, 40))
    sa = build_sa_internal(t)
    assert build_lcp(t, sa) == [0] * (len(t) - 1)


def test_lcp_matches_naive():
    rng = random.Random(45)
    for _ in range(60):
        t = random_text(rng, rng.randrange(2, 150), rng.choice([2, 4]))
        sa = build_sa_internal(t)
        assert build_lcp(t, sa) == naive_lcp(t, sa)


def test_lcp_rejects_mismatched_sa():
    with pytest.raises(ValueError):
        build_lcp(b"ab", [1, 5])


def test_search_paper_fixtures():
    t = b"abababbc"
    sa = build_sa_internal(t)
    assert sa_search(t, sa, b"ab") == [1, 3, 5]
    assert sa_search(t, sa, b"baa") == []


def test_search_rejects_empty_pattern():
    t = b"ab"
    sa = build_sa_internal(t)
    with pytest.raises(ValueError):
        sa_search(t, sa, b"")


def test_search_matches_scan_oracle():
    rng = random.Random(46)
    for _ in range(150):
        t = random_text(rng, rng.randrange(4, 200), rng.choice([2, 4]))
        sa = build_sa_internal(t)
        if rng.random() < 0.5 and len(t) > 3:
            i = rng.randrange(len(t) - 2)
            p = t[i : i + rng.randrange(1, min(8, len(t) - i) + 1)]
        else:
            p = random_text(rng, rng.randrange(1, 5), 2)
        assert sa_search(t, sa, p) == naive_occurrences(t, p)


def test_incremental_matches_internal_abababbc(tmp_path):
    t = b"abababbc"
    store = create_store(64, 4096, tmp_path / "sa.dat")
    stages = []
    sa = build_sa_incremental(t, 3, store, on_stage_end=stages.append)
    assert sa == build_sa_internal(t)
    assert stages == [1, 2, 3]


def test_incremental_single_stage(tmp_path):
    t = b"bananaband"
    store = create_store(64, 4096, tmp_path / "sa.dat")
    sa = build_sa_incremental(t, len(t), store)
    assert sa == build_sa_internal(t)


def test_incremental_random_texts(tmp_path):
    rng = random.Random(47)
    for i in range(25):
        t = random_text(rng, rng.randrange(2, 120), rng.choice([2, 4, 256]))
        m = rng.randrange(1, len(t) + 1)
        store = create_store(64, 4096, tmp_path / f"sa{i}.dat")
        assert build_sa_incremental(t, m, store) == build_sa_internal(t)
        store.close()


def test_incremental_pathological_run_seeks(tmp_path):
    t = b"a" * 32
    store = create_store(64, 1 << 16, tmp_path / "sa.dat")
    deltas = []
    last = {"seeks": 0}

    def snap(_stage):
        st = store.io_stats()
        deltas.append(st.seeks - last["seeks"])
        last["seeks"] = st.seeks

    sa = build_sa_incremental(t, 8, store, on_stage_end=snap)
    assert sa == build_sa_internal(t)
    assert len(deltas) == 4
    assert all(d <= 4 for d in deltas)


def test_incremental_stage_size_validation(tmp_path):
    store = create_store(64, 4096, tmp_path / "sa.dat")
    with pytest.raises(ValueError):
        build_sa_incremental(b"abc", 0, store)
    with pytest.raises(ValueError):
        build_sa_incremental(b"abc", 4, store)


def test_sa_file_round_trip(tmp_path):
    t = b"abababbc"
    sa = build_sa_internal(t)
    path = tmp_path / "x.sa"
    save_sa(path, sa)
    assert load_sa(path) == sa
    raw = path.read_bytes()
    assert raw[:4] == b"SA01"
    assert len(raw) == 4 + 8 + 5 * len(sa)


def test_sa_file_bad_magic(tmp_path):
    path = tmp_path / "bad.sa"
    path.write_bytes(b"XXXX" + b"\x00" * 16)
    with pytest.raises(ValueError):
        load_sa(path)
