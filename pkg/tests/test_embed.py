"""TF-IDF/SIF aggregation numerics, remote client, binary store."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from litscout.embed import (
    CorruptHeaderError,
    CountMismatchError,
    DimensionMismatchError,
    EmbedConfig,
    EmbeddingFixtureStore,
    InsufficientRankError,
    RemoteEmbeddingClient,
    RemoteUnavailableError,
    WordVectorTable,
    compute_tfidf,
    content_hash,
    embed_corpus_sif,
    embed_corpus_tfidf,
    embed_text_sif,
    embed_text_tfidf,
    embed_tfidf,
    load_embeddings,
    load_word_vectors,
    store_embeddings,
    tfidf_stats,
    tokenize,
)


def table_2d(**vectors) -> WordVectorTable:
    return WordVectorTable(
        dims=2, vectors={k: np.asarray(v, dtype=np.float64) for k, v in vectors.items()}
    )


# ---------------------------------------------------------------------------
# tokenize / word vectors
# ---------------------------------------------------------------------------


def test_tokenize_lowercase_alnum():
    assert tokenize("Maps, 3-D maps; MAPS!") == ["maps", "3", "d", "maps", "maps"]
    assert tokenize("") == []


def test_load_word_vectors(fixtures_dir):
    table = load_word_vectors(fixtures_dir / "wordvecs_4d.txt")
    assert table.dims == 4
    assert "data" in table
    assert all(len(v) == 4 for v in table.vectors.values())


def test_load_word_vectors_rejects_ragged(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("a 1 2 3\nb 1 2\n")
    with pytest.raises(Exception):
        load_word_vectors(path)


# ---------------------------------------------------------------------------
# compute_tfidf
# ---------------------------------------------------------------------------


def test_tfidf_hand_values():
    weights = compute_tfidf([["a", "b"], ["a"]])
    assert weights[0]["b"] == pytest.approx(math.log(2), abs=1e-12)
    assert weights[0]["a"] == 0.0
    assert weights[1]["a"] == 0.0


def test_tfidf_single_document_all_zero():
    weights = compute_tfidf([["a", "b", "b"]])
    assert all(w == 0.0 for w in weights[0].values())


@given(st.integers(1, 20))
def test_tfidf_linear_in_term_count(k):
    # Brute-force recount oracle: weight must be tf * ln(N/df) exactly.
    corpus = [["t"] * k + ["filler"], ["other"]]
    weights = compute_tfidf(corpus)
    assert weights[0]["t"] == pytest.approx(k * math.log(2 / 1), rel=1e-12)


def test_tfidf_empty_corpus_rejected():
    with pytest.raises(Exception):
        compute_tfidf([])


# ---------------------------------------------------------------------------
# embed_tfidf
# ---------------------------------------------------------------------------


def test_single_in_table_token_returns_its_vector():
    table = table_2d(only=[3.0, -1.5], other=[9.9, 9.9])
    weights = compute_tfidf([["only"], ["other"]])
    vec, flagged = embed_tfidf(["only"], weights[0], table)
    assert not flagged
    np.testing.assert_array_equal(vec, [3.0, -1.5])


def test_opposite_vectors_cancel_and_flag():
    table = table_2d(plus=[1.0, 2.0], minus=[-1.0, -2.0], other=[0.5, 0.5])
    weights = compute_tfidf([["plus", "minus"], ["other"]])
    vec, flagged = embed_tfidf(["plus", "minus"], weights[0], table)
    np.testing.assert_array_equal(vec, [0.0, 0.0])
    assert flagged


def test_no_table_tokens_flagged():
    table = table_2d(known=[1.0, 0.0])
    weights = compute_tfidf([["unknown"], ["known"]])
    vec, flagged = embed_tfidf(["unknown"], weights[0], table)
    assert flagged and not vec.any()


def test_three_doc_corpus_matches_hand_oracle():
    table = table_2d(x=[1.0, 0.0], y=[0.0, 1.0], z=[2.0, -1.0])
    corpus = [["x", "y"], ["x"], ["y", "z"]]
    matrix, flagged = embed_corpus_tfidf(corpus, table)
    assert flagged == []
    ln15, ln3 = math.log(3 / 2), math.log(3 / 1)
    # independent arithmetic, term by term
    expected = [
        [(ln15 * 1.0) / (2 * ln15), (ln15 * 1.0) / (2 * ln15)],
        [1.0, 0.0],
        [(ln3 * 2.0) / (ln15 + ln3), (ln15 * 1.0 + ln3 * -1.0) / (ln15 + ln3)],
    ]
    np.testing.assert_allclose(matrix, expected, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(st.sampled_from(["a", "b", "c", "d", "oov"]), max_size=8),
        min_size=2,
        max_size=6,
    ),
    st.integers(0, 1000),
)
def test_tfidf_vector_in_box_hull_of_used_vectors(corpus, seed):
    rng = np.random.default_rng(seed)
    table = WordVectorTable(
        dims=3, vectors={t: rng.normal(size=3) for t in ("a", "b", "c", "d")}
    )
    matrix, flagged = embed_corpus_tfidf(corpus, table)
    for i, tokens in enumerate(corpus):
        if i in flagged:
            continue
        used = [table.vectors[t] for t in set(tokens) if t in table]
        lo = np.min(used, axis=0) - 1e-9
        hi = np.max(used, axis=0) + 1e-9
        assert ((matrix[i] >= lo) & (matrix[i] <= hi)).all()


# ---------------------------------------------------------------------------
# SIF
# ---------------------------------------------------------------------------


def sif_oracle(corpus, table_vectors, a):
    """Independent SIF computation: pure python sums + closed-form 2x2 eig."""
    total = sum(len(d) for d in corpus)
    counts = {}
    for doc in corpus:
        for tok in doc:
            counts[tok] = counts.get(tok, 0) + 1
    raw = []
    for doc in corpus:
        acc = [0.0, 0.0]
        for tok in doc:
            if tok not in table_vectors:
                continue
            w = a / (a + counts[tok] / total)
            acc[0] += w * table_vectors[tok][0]
            acc[1] += w * table_vectors[tok][1]
        n = len(doc)
        raw.append([acc[0] / n, acc[1] / n] if n else acc)
    # Gram matrix of the stacked rows
    g00 = sum(v[0] * v[0] for v in raw)
    g01 = sum(v[0] * v[1] for v in raw)
    g11 = sum(v[1] * v[1] for v in raw)
    theta = 0.5 * math.atan2(2 * g01, g00 - g11)
    u = (math.cos(theta), math.sin(theta))
    # self-check: u must be an eigenvector of the larger eigenvalue
    lam = (g00 + g11 + math.hypot(g00 - g11, 2 * g01)) / 2
    assert abs(g00 * u[0] + g01 * u[1] - lam * u[0]) < 1e-9
    assert abs(g01 * u[0] + g11 * u[1] - lam * u[1]) < 1e-9
    out = []
    for v in raw:
        proj = v[0] * u[0] + v[1] * u[1]
        out.append([v[0] - proj * u[0], v[1] - proj * u[1]])
    return out


def test_identical_one_token_docs_collapse_to_zero():
    table = table_2d(w=[0.6, 0.8])
    model = embed_corpus_sif([["w"], ["w"]], table)
    np.testing.assert_allclose(model.vectors, np.zeros((2, 2)), atol=1e-12)


def test_sif_four_doc_corpus_matches_oracle():
    vectors = {"p": (1.0, 0.0), "q": (0.0, 1.0), "r": (1.0, 1.0)}
    table = table_2d(**{k: list(v) for k, v in vectors.items()})
    corpus = [["p", "p", "q"], ["q"], ["p", "r"], ["q", "r", "q"]]
    model = embed_corpus_sif(corpus, table, EmbedConfig(sif_a=0.5))
    expected = sif_oracle(corpus, vectors, a=0.5)
    np.testing.assert_allclose(model.vectors, expected, atol=1e-9)


@given(st.floats(0.1, 10.0))
def test_scaling_word_vectors_scales_outputs(c):
    table = table_2d(p=[1.0, 0.5], q=[-0.5, 2.0])
    scaled = table_2d(p=[c * 1.0, c * 0.5], q=[c * -0.5, c * 2.0])
    corpus = [["p", "q"], ["q"], ["p"]]
    base = embed_corpus_sif(corpus, table).vectors
    out = embed_corpus_sif(corpus, scaled).vectors
    np.testing.assert_allclose(out, c * base, rtol=1e-9, atol=1e-12)


def test_sif_outputs_orthogonal_to_component():
    table = table_2d(p=[1.0, 0.2], q=[-0.3, 1.1], r=[0.4, -0.9])
    corpus = [["p", "q"], ["q", "r"], ["p", "r", "r"], ["q"]]
    model = embed_corpus_sif(corpus, table)
    for row in model.vectors:
        norm = np.linalg.norm(row)
        assert abs(float(row @ model.component)) <= 1e-6 * max(norm, 1e-12)


def test_sif_insufficient_rank():
    table = table_2d(known=[1.0, 0.0])
    with pytest.raises(InsufficientRankError):
        embed_corpus_sif([["oov1"], ["oov2"]], table)


def test_sif_requires_two_documents():
    table = table_2d(known=[1.0, 0.0])
    with pytest.raises(Exception):
        embed_corpus_sif([["known"]], table)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(st.sampled_from(["a", "b", "c", "oov"]), max_size=6),
        min_size=2,
        max_size=6,
    ),
    st.integers(0, 10_000),
)
def test_no_nan_under_fuzzing(corpus, seed):
    rng = np.random.default_rng(seed)
    table = WordVectorTable(dims=4, vectors={t: rng.normal(size=4) for t in ("a", "b", "c")})
    matrix, _ = embed_corpus_tfidf(corpus, table)
    assert np.isfinite(matrix).all()
    has_in_table = any(t in table for doc in corpus for t in doc)
    assume(has_in_table)
    model = embed_corpus_sif(corpus, table)
    assert np.isfinite(model.vectors).all()


def test_text_embedders_match_corpus_route():
    table = table_2d(p=[1.0, 0.2], q=[-0.3, 1.1], r=[0.4, -0.9])
    corpus = [["p", "q"], ["q", "r"], ["p", "r", "r"]]
    stats = tfidf_stats(corpus)
    # A new doc repeating corpus vocabulary embeds finitely and deterministically
    v1 = embed_text_tfidf("p q", "r", table, stats)
    v2 = embed_text_tfidf("p q", "r", table, stats)
    np.testing.assert_array_equal(v1, v2)
    model = embed_corpus_sif(corpus, table)
    s1 = embed_text_sif("p", "q r", table, model)
    assert abs(float(s1 @ model.component)) <= 1e-9 * max(np.linalg.norm(s1), 1e-12)


# ---------------------------------------------------------------------------
# Remote client
# ---------------------------------------------------------------------------


def test_fixture_store_hit_no_network():
    store = EmbeddingFixtureStore(dims=3)
    store.put("A Title", "An abstract", [1.0, 2.0, 3.0])

    def no_post(url, payload, timeout):
        raise AssertionError("upstream called")

    client = RemoteEmbeddingClient(endpoint=None, fixture=store, post_fn=no_post)
    np.testing.assert_array_equal(client.embed("A Title", "An abstract"), [1.0, 2.0, 3.0])


def test_offline_miss_raises_remote_unavailable():
    client = RemoteEmbeddingClient(endpoint=None, fixture=EmbeddingFixtureStore(dims=3))
    with pytest.raises(RemoteUnavailableError):
        client.embed("T", "A")


def test_batch_partial_failure():
    def post(url, payload, timeout):
        out = []
        for entry in payload:
            if entry["paper_id"] == 1:
                out.append({"paper_id": 1, "error": "model overloaded"})
            else:
                out.append({"paper_id": entry["paper_id"], "embedding": [1.0, 0.0]})
        return out

    client = RemoteEmbeddingClient(endpoint="http://svc.example/embed", post_fn=post)
    vectors, errors = client.embed_batch([(0, "t0", "a0"), (1, "t1", "a1"), (2, "t2", "a2")])
    assert sorted(vectors) == [0, 2]
    assert errors == {1: "model overloaded"}


def test_memoization_single_upstream_call():
    calls = []

    def post(url, payload, timeout):
        calls.append(payload)
        return [{"paper_id": e["paper_id"], "embedding": [0.5, 0.5]} for e in payload]

    client = RemoteEmbeddingClient(endpoint="http://svc.example/embed", post_fn=post)
    client.embed("Same", "Text")
    client.embed("Same", "Text")
    assert client.upstream_calls == 1
    assert len(calls) == 1


def test_batching_respects_batch_size():
    sizes = []

    def post(url, payload, timeout):
        sizes.append(len(payload))
        return [{"paper_id": e["paper_id"], "embedding": [1.0]} for e in payload]

    client = RemoteEmbeddingClient(endpoint="http://svc.example/embed", batch_size=2, post_fn=post)
    client.embed_batch([(i, f"t{i}", f"a{i}") for i in range(5)])
    assert sizes == [2, 2, 1]


def test_dimension_mismatch():
    def post(url, payload, timeout):
        return [{"paper_id": e["paper_id"], "embedding": [1.0, 2.0]} for e in payload]

    client = RemoteEmbeddingClient(
        endpoint="http://svc.example/embed", expected_dims=3, post_fn=post
    )
    with pytest.raises(DimensionMismatchError):
        client.embed("T", "A")


def test_content_hash_distinguishes_title_abstract_split():
    assert content_hash("ab", "c") != content_hash("a", "bc")


# ---------------------------------------------------------------------------
# Binary store
# ---------------------------------------------------------------------------


def test_store_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(7)
    matrix = rng.normal(size=(100, 16)).astype(np.float32)
    ids = list(range(100, 200))
    path = tmp_path / "vectors.bin"
    store_embeddings(path, ids, matrix, "tfidf")
    got_ids, got, method = load_embeddings(path)
    assert got_ids == ids and method == "tfidf"
    assert got.dtype == np.float32
    assert got.tobytes() == matrix.tobytes()


def test_store_empty_set(tmp_path):
    path = tmp_path / "empty.bin"
    store_embeddings(path, [], np.zeros((0, 8), dtype=np.float32), "sif")
    ids, matrix, method = load_embeddings(path)
    assert ids == [] and matrix.shape == (0, 8) and method == "sif"


def test_truncated_file_raises_count_mismatch(tmp_path):
    path = tmp_path / "trunc.bin"
    store_embeddings(path, [0, 1], np.ones((2, 4), dtype=np.float32), "m")
    blob = path.read_bytes()
    path.write_bytes(blob[:-5])
    with pytest.raises(CountMismatchError):
        load_embeddings(path)


def test_corrupt_header(tmp_path):
    path = tmp_path / "bad.bin"
    store_embeddings(path, [0], np.ones((1, 4), dtype=np.float32), "m")
    blob = bytearray(path.read_bytes())
    blob[:4] = b"NOPE"
    path.write_bytes(bytes(blob))
    with pytest.raises(CorruptHeaderError):
        load_embeddings(path)
