import random

import pytest

from textindex.huffword import tokenize
from textindex.wfm import load_wfm, save_wfm, wfm_build


def token_offsets(text, word):
    out = []
    pos = 0
    for t in tokenize(text):
        if t == word:
            out.append(pos)
        pos += len(t)
    return out


def word_vocab(text):
    return sorted({t for t in tokenize(text) if t.isalnum()})


def random_corpus(rng, n_tokens):
    vocab = [b"the", b"cat", b"cap", b"capet", b"dog", b"a", b"thorn", b"x9y"]
    parts = []
    for _ in range(n_tokens):
        parts.append(rng.choice(vocab))
        parts.append(rng.choice([b" ", b", ", b"\n", b"  "]))
    return b"".join(parts)


def test_fixture_counts_and_offsets():
    idx = wfm_build(b"the cat the")
    assert idx.word_count(b"the") == 2
    assert idx.word_locate(b"the") == [0, 8]
    assert idx.word_count(b"cat") == 1
    assert idx.word_locate(b"cat") == [4]


def test_absent_word():
    idx = wfm_build(b"the cat the")
    assert idx.word_count(b"zebra") == 0
    assert idx.word_locate(b"zebra") == []


def test_empty_text():
    idx = wfm_build(b"")
    assert idx.word_count(b"the") == 0
    assert idx.word_locate(b"the") == []


def test_no_partial_word_hits():
    # "cap" occurs inside "capet" as a substring but only once as a token.
    text = b"capet cap capet"
    idx = wfm_build(text)
    assert idx.word_count(b"cap") == 1
    assert idx.word_locate(b"cap") == [6]


def test_prefix_search_fixture():
    idx = wfm_build(b"the cat the cap")
    assert idx.prefix_word_search(b"ca") == {b"cat": [4], b"cap": [12]}
    assert idx.prefix_word_search(b"zz") == {}


def test_prefix_search_rejects_empty():
    idx = wfm_build(b"a b")
    with pytest.raises(ValueError):
        idx.prefix_word_search(b"")


def test_random_corpora_match_token_oracle():
    rng = random.Random(0)
    for _ in range(30):
        text = random_corpus(rng, rng.randrange(1, 120))
        idx = wfm_build(text, align_every=rng.choice([1, 8, 64]))
        for w in word_vocab(text):
            expect = token_offsets(text, w)
            assert idx.word_count(w) == len(expect)
            assert idx.word_locate(w) == expect
        for prefix in (b"c", b"ca", b"cap", b"th", b"x"):
            got = idx.prefix_word_search(prefix)
            expect = {
                w: token_offsets(text, w)
                for w in word_vocab(text)
                if w.startswith(prefix) and token_offsets(text, w)
            }
            assert got == expect


def test_count_equals_locate_length():
    rng = random.Random(1)
    text = random_corpus(rng, 150)
    idx = wfm_build(text)
    for w in word_vocab(text) + [b"nope"]:
        assert idx.word_count(w) == len(idx.word_locate(w))


def test_bundle_round_trip(tmp_path):
    rng = random.Random(2)
    text = random_corpus(rng, 100)
    idx = wfm_build(text)
    path = tmp_path / "w.wfm"
    save_wfm(idx, path)
    back = load_wfm(path)
    for w in word_vocab(text) + [b"absent"]:
        assert back.word_count(w) == idx.word_count(w)
        assert back.word_locate(w) == idx.word_locate(w)
    assert back.prefix_word_search(b"c") == idx.prefix_word_search(b"c")


def test_bundle_round_trip_empty(tmp_path):
    idx = wfm_build(b"")
    path = tmp_path / "e.wfm"
    save_wfm(idx, path)
    back = load_wfm(path)
    assert back.word_count(b"x") == 0
