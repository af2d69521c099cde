import random

import pytest

from textindex.huffword import (
    build_huffword,
    build_vocab,
    compressed_find,
    decode_text,
    detokenize,
    encode_text,
    load_model,
    save_model,
    tokenize,
)


def random_corpus(rng, n_tokens=60, vocab=("the", "cat", "cap", "dog", "a", "bb", "x1")):
    words = [rng.choice(vocab).encode() for _ in range(n_tokens)]
    seps = [rng.choice([b" ", b"  ", b", ", b"\n"]) for _ in range(n_tokens)]
    text = b"".join(w + s for w, s in zip(words, seps))
    return text


def token_positions(text, word):
    """Byte offsets where `word` occurs as a whole token."""
    out = []
    pos = 0
    for t in tokenize(text):
        if t == word:
            out.append(pos)
        pos += len(t)
    return out


def test_tokenize_simple():
    assert tokenize(b"the cat") == [b"the", b" ", b"cat"]
    assert tokenize(b"") == []
    assert tokenize(b"  x") == [b"  ", b"x"]
    assert tokenize(b"x  ") == [b"x", b"  "]


def test_tokenize_round_trip_random_ascii():
    rng = random.Random(0)
    for _ in range(200):
        text = bytes(rng.randrange(32, 127) for _ in range(rng.randrange(0, 120)))
        assert detokenize(tokenize(text)) == text


def test_single_term_model():
    vocab = build_vocab([b"solo"])
    model = build_huffword(vocab)
    assert model.codewords[b"solo"] == b"\x80"


def test_empty_vocab_rejected():
    with pytest.raises(ValueError):
        build_huffword(build_vocab([]))


def test_130_equal_frequency_terms():
    terms = [f"w{i:03d}".encode() for i in range(130)]
    model = build_huffword(build_vocab(terms))
    lengths = {len(cw) for cw in model.codewords.values()}
    assert lengths == {1, 2}
    assert sum(1 for cw in model.codewords.values() if len(cw) == 2) == 3


def test_codeword_tagging():
    rng = random.Random(1)
    text = random_corpus(rng, 200)
    model = build_huffword(build_vocab(tokenize(text)))
    for cw in model.codewords.values():
        assert cw[0] & 0x80
        assert all(not b & 0x80 for b in cw[1:])


def test_prefix_freeness_random_vocabularies():
    rng = random.Random(2)
    for _ in range(20):
        n = rng.randrange(1, 400)
        terms = [f"t{i}".encode() for i in range(n)]
        freqs = [rng.randrange(1, 50) for _ in range(n)]
        vocab = build_vocab([t for t, f in zip(terms, freqs) for _ in range(f)])
        cws = sorted(model_cw for model_cw in build_huffword(vocab).codewords.values())
        for a, b in zip(cws, cws[1:]):
            assert not b.startswith(a), (a, b)


def test_encode_decode_round_trip():
    text = b"the cat"
    tokens = tokenize(text)
    model = build_huffword(build_vocab(tokens))
    dt = encode_text(tokens, model)
    assert len(list(filter(lambda b: b & 0x80, dt))) == 3
    assert decode_text(dt, model) == text


def test_encode_empty():
    model = build_huffword(build_vocab([b"x"]))
    assert encode_text([], model) == b""
    assert decode_text(b"", model) == b""


def test_encode_unknown_token_rejected():
    model = build_huffword(build_vocab([b"x"]))
    with pytest.raises(KeyError):
        encode_text([b"y"], model)


def test_round_trip_random_corpora():
    rng = random.Random(3)
    for _ in range(100):
        text = random_corpus(rng, rng.randrange(1, 80))
        tokens = tokenize(text)
        model = build_huffword(build_vocab(tokens))
        assert decode_text(encode_text(tokens, model), model) == text


def test_compressed_find_fixture():
    text = b"the cat the"
    tokens = tokenize(text)
    model = build_huffword(build_vocab(tokens))
    dt = encode_text(tokens, model)
    offs = compressed_find(dt, model.codewords[b"the"])
    assert len(offs) == 2


def test_compressed_find_absent_codeword():
    text = b"the cat the"
    model = build_huffword(build_vocab(tokenize(text) + [b"zebra"]))
    dt = encode_text(tokenize(text), model)
    assert compressed_find(dt, model.codewords[b"zebra"]) == []


def test_compressed_find_matches_token_oracle():
    rng = random.Random(4)
    for _ in range(40):
        text = random_corpus(rng, rng.randrange(5, 120))
        tokens = tokenize(text)
        model = build_huffword(build_vocab(tokens))
        dt = encode_text(tokens, model)
        # Recover the source offset of each dt offset by decoding.
        dt_to_src = {}
        src = 0
        dtoff = 0
        for t in tokens:
            dt_to_src[dtoff] = src
            dtoff += len(model.codewords[t])
            src += len(t)
        for term in build_vocab(tokens).terms:
            found = compressed_find(dt, model.codewords[term])
            assert [dt_to_src[o] for o in found] == token_positions(text, term)


def test_no_false_byte_aligned_matches():
    # Exhaustive: every byte offset that starts a match of some codeword
    # and carries a tag is a true token start.
    rng = random.Random(5)
    for _ in range(20):
        text = random_corpus(rng, rng.randrange(5, 60))
        tokens = tokenize(text)
        model = build_huffword(build_vocab(tokens))
        dt = encode_text(tokens, model)
        starts = set()
        off = 0
        for t in tokens:
            starts.add(off)
            off += len(model.codewords[t])
        for term, cw in model.codewords.items():
            for o in range(len(dt) - len(cw) + 1):
                if dt[o : o + len(cw)] == cw and dt[o] & 0x80:
                    assert o in starts


def test_canonical_determinism():
    tokens = tokenize(b"b a a c b b")
    m1 = build_huffword(build_vocab(tokens))
    m2 = build_huffword(build_vocab(list(reversed(tokens))))
    assert m1.codewords == m2.codewords


def test_model_file_round_trip(tmp_path):
    rng = random.Random(6)
    text = random_corpus(rng, 150)
    model = build_huffword(build_vocab(tokenize(text)))
    path = tmp_path / "m.hwm"
    save_model(model, path)
    back = load_model(path)
    assert back.codewords == model.codewords
    assert path.read_bytes()[:4] == b"HWM1"
