"""Document embeddings.

Three routes produce a fixed-length vector per paper:

* TF-IDF-weighted aggregation of pretrained word vectors,
* SIF-weighted aggregation (a/(a+p(w)) weights) followed by removal of the
  corpus's first principal component,
* a remote embedding HTTP service (batched, cached, with an offline
  fixture store for tests and air-gapped runs).

Plus a binary store for embedding matrices (float32 little-endian).
"""

from __future__ import annotations

import hashlib
import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import requests

TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs. No stemming, no stopwords."""
    return TOKEN_RE.findall(text.lower())


class EmbeddingError(Exception):
    pass


class InsufficientRankError(EmbeddingError):
    """All aggregated document vectors are zero; no component to remove."""


class RemoteUnavailableError(EmbeddingError):
    pass


class DimensionMismatchError(EmbeddingError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} dims, got {got}")
        self.expected = expected
        self.got = got


class CorruptHeaderError(EmbeddingError):
    pass


class CountMismatchError(EmbeddingError):
    pass


# ---------------------------------------------------------------------------
# Word-vector table
# ---------------------------------------------------------------------------


@dataclass
class WordVectorTable:
    """Pretrained word vectors, tokens normalized to lowercase ASCII."""

    dims: int
    vectors: dict[str, np.ndarray]

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_word_vectors(path: str | Path) -> WordVectorTable:
    """Read the standard text format: one "token v1 v2 ... vD" line per token.

    The first line fixes the dimensionality; later lines must agree.
    First occurrence wins when normalized tokens collide.
    """
    vectors: dict[str, np.ndarray] = {}
    dims: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                if not line.strip():
                    continue
                raise EmbeddingError(f"{path}:{lineno}: expected 'token v1 ... vD'")
            token = parts[0].lower()
            try:
                values = np.array([float(p) for p in parts[1:] if p], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingError(f"{path}:{lineno}: bad float ({exc})") from None
            if dims is None:
                dims = len(values)
            elif len(values) != dims:
                raise EmbeddingError(
                    f"{path}:{lineno}: {len(values)} dims, expected {dims}"
                )
            vectors.setdefault(token, values)
    if dims is None:
        raise EmbeddingError(f"{path}: empty word-vector file")
    return WordVectorTable(dims=dims, vectors=vectors)


# ---------------------------------------------------------------------------
# TF-IDF aggregation
# ---------------------------------------------------------------------------


def compute_tfidf(corpus_tokens: Sequence[Sequence[str]]) -> list[dict[str, float]]:
    """Per-document token weights: tf(t,d) * ln(N / df(t)).

    tf is the raw count; df counts documents containing the token. A
    single-document corpus therefore weighs everything zero.
    """
    if len(corpus_tokens) == 0:
        raise EmbeddingError("compute_tfidf needs at least one document")
    n_docs = len(corpus_tokens)
    df: dict[str, int] = {}
    for tokens in corpus_tokens:
        for token in set(tokens):
            df[token] = df.get(token, 0) + 1
    weights: list[dict[str, float]] = []
    for tokens in corpus_tokens:
        counts: dict[str, int] = {}
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        weights.append(
            {t: c * float(np.log(n_docs / df[t])) for t, c in counts.items()}
        )
    return weights


def embed_tfidf(
    doc_tokens: Sequence[str], weights: dict[str, float], table: WordVectorTable
) -> tuple[np.ndarray, bool]:
    """Weight-sum-normalized aggregation of the document's word vectors.

    Returns (vector, flagged); flagged documents got the zero vector, either
    because no usable token carried weight or by exact cancellation.
    """
    total = 0.0
    acc = np.zeros(table.dims, dtype=np.float64)
    for token in set(doc_tokens):
        vec = table.get(token)
        if vec is None:
            continue
        w = weights.get(token, 0.0)
        total += w
        acc += w * vec
    if total == 0.0:
        return np.zeros(table.dims, dtype=np.float64), True
    out = acc / total
    return out, bool(not out.any())


def embed_corpus_tfidf(
    corpus_tokens: Sequence[Sequence[str]], table: WordVectorTable
) -> tuple[np.ndarray, list[int]]:
    """TF-IDF document vectors for the whole corpus; returns (matrix, flagged rows)."""
    weights = compute_tfidf(corpus_tokens)
    matrix = np.zeros((len(corpus_tokens), table.dims), dtype=np.float64)
    flagged: list[int] = []
    for i, tokens in enumerate(corpus_tokens):
        vec, flag = embed_tfidf(tokens, weights[i], table)
        matrix[i] = vec
        if flag:
            flagged.append(i)
    return matrix, flagged


# ---------------------------------------------------------------------------
# SIF aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmbedConfig:
    sif_a: float = 1e-3

    def __post_init__(self):
        if self.sif_a <= 0:
            raise ValueError("sif_a must be > 0")


@dataclass
class SifModel:
    """SIF corpus embedding plus the statistics needed to embed new text."""

    vectors: np.ndarray
    component: np.ndarray
    token_probs: dict[str, float]
    a: float
    flagged: list[int] = field(default_factory=list)


def _sif_raw_vector(
    tokens: Sequence[str], table: WordVectorTable, probs: dict[str, float], a: float
) -> np.ndarray:
    acc = np.zeros(table.dims, dtype=np.float64)
    for token in tokens:
        vec = table.get(token)
        if vec is None:
            continue
        acc += (a / (a + probs.get(token, 0.0))) * vec
    if tokens:
        acc /= len(tokens)
    return acc


def first_principal_component(matrix: np.ndarray) -> np.ndarray:
    """First right-singular vector, sign-fixed so its largest-magnitude
    entry is positive (SVD sign ambiguity must not break determinism)."""
    _, _, vt = np.linalg.svd(matrix, full_matrices=False)
    u = vt[0]
    if u[int(np.argmax(np.abs(u)))] < 0:
        u = -u
    return u


def embed_corpus_sif(
    corpus_tokens: Sequence[Sequence[str]],
    table: WordVectorTable,
    config: EmbedConfig = EmbedConfig(),
) -> SifModel:
    """SIF document vectors with first-principal-component removal.

    Per document: mean over tokens of a/(a+p(t)) * v_t, where p(t) is the
    token's corpus relative frequency; then each vector's projection onto
    the corpus's first right-singular direction is subtracted.
    """
    if len(corpus_tokens) < 2:
        raise EmbeddingError("SIF needs at least two documents")
    total_tokens = sum(len(tokens) for tokens in corpus_tokens)
    counts: dict[str, int] = {}
    for tokens in corpus_tokens:
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
    probs = {t: c / total_tokens for t, c in counts.items()} if total_tokens else {}

    matrix = np.zeros((len(corpus_tokens), table.dims), dtype=np.float64)
    flagged: list[int] = []
    for i, tokens in enumerate(corpus_tokens):
        matrix[i] = _sif_raw_vector(tokens, table, probs, config.sif_a)
        if not matrix[i].any():
            flagged.append(i)

    if not matrix.any():
        raise InsufficientRankError("all document vectors are zero")
    u = first_principal_component(matrix)
    matrix = matrix - np.outer(matrix @ u, u)
    return SifModel(
        vectors=matrix, component=u, token_probs=probs, a=config.sif_a, flagged=flagged
    )


def embed_text_sif(
    title: str, abstract: str, table: WordVectorTable, model: SifModel
) -> np.ndarray:
    """Embed unseen text with the frozen corpus statistics and component."""
    tokens = tokenize(title + " " + abstract)
    vec = _sif_raw_vector(tokens, table, model.token_probs, model.a)
    return vec - model.component * float(vec @ model.component)


@dataclass
class TfidfStats:
    """Frozen document frequencies for embedding unseen text."""

    n_docs: int
    df: dict[str, int]


def tfidf_stats(corpus_tokens: Sequence[Sequence[str]]) -> TfidfStats:
    df: dict[str, int] = {}
    for tokens in corpus_tokens:
        for token in set(tokens):
            df[token] = df.get(token, 0) + 1
    return TfidfStats(n_docs=len(corpus_tokens), df=df)


def embed_text_tfidf(
    title: str, abstract: str, table: WordVectorTable, stats: TfidfStats
) -> np.ndarray:
    """Embed unseen text against frozen corpus df counts.

    Tokens never seen in the corpus have no defined idf and are skipped.
    """
    tokens = tokenize(title + " " + abstract)
    counts: dict[str, int] = {}
    for token in tokens:
        counts[token] = counts.get(token, 0) + 1
    weights = {
        t: c * float(np.log(stats.n_docs / stats.df[t]))
        for t, c in counts.items()
        if t in stats.df
    }
    vec, _ = embed_tfidf(tokens, weights, table)
    return vec


def save_tfidf_stats(path: str | Path, stats: TfidfStats) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"method": "tfidf", "n_docs": stats.n_docs, "df": stats.df}, fh, sort_keys=True)
        fh.write("\n")


def load_tfidf_stats(path: str | Path) -> TfidfStats:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return TfidfStats(n_docs=int(obj["n_docs"]), df={k: int(v) for k, v in obj["df"].items()})


def save_sif_stats(path: str | Path, model: SifModel) -> None:
    payload = {
        "method": "sif",
        "a": model.a,
        "token_probs": model.token_probs,
        "component": [float(v) for v in model.component],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_sif_stats(path: str | Path) -> SifModel:
    """Reload the pieces of a SifModel needed to embed new text."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return SifModel(
        vectors=np.zeros((0, len(obj["component"]))),
        component=np.asarray(obj["component"], dtype=np.float64),
        token_probs={k: float(v) for k, v in obj["token_probs"].items()},
        a=float(obj["a"]),
    )


# ---------------------------------------------------------------------------
# Remote embedding client
# ---------------------------------------------------------------------------


def content_hash(title: str, abstract: str) -> str:
    """Stable key for one (title, abstract) pair."""
    payload = title.encode("utf-8") + b"\x1f" + abstract.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class EmbeddingFixtureStore:
    """Offline stand-in for the remote service: content hash -> vector."""

    def __init__(self, dims: int, entries: dict[str, list[float]] | None = None):
        self.dims = dims
        self.entries = entries or {}

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingFixtureStore":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(dims=int(obj["dims"]), entries=obj["entries"])

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"dims": self.dims, "entries": self.entries}, fh, sort_keys=True)
            fh.write("\n")

    def get(self, key: str) -> np.ndarray | None:
        values = self.entries.get(key)
        if values is None:
            return None
        return np.asarray(values, dtype=np.float64)

    def put(self, title: str, abstract: str, vector: Sequence[float]) -> None:
        self.entries[content_hash(title, abstract)] = [float(v) for v in vector]


def _default_post(url: str, payload: list[dict], timeout_s: float) -> list[dict]:
    try:
        resp = requests.post(url, json=payload, timeout=timeout_s)
        resp.raise_for_status()
        return resp.json()
    except requests.RequestException as exc:
        raise RemoteUnavailableError(str(exc)) from exc


class RemoteEmbeddingClient:
    """Batched client for an embedding HTTP service.

    POST body: [{paper_id, title, abstract}]; response: [{paper_id,
    embedding: [...]}]. Responses are cached by content hash, so repeated
    text costs one upstream call. With no endpoint configured the client
    runs offline against a fixture store only.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        batch_size: int = 16,
        expected_dims: int | None = None,
        fixture: EmbeddingFixtureStore | None = None,
        post_fn: Callable[[str, list[dict], float], list[dict]] | None = None,
        timeout_s: float = 30.0,
    ):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.endpoint = endpoint
        self.batch_size = batch_size
        self.expected_dims = expected_dims
        self.fixture = fixture
        self.post_fn = post_fn or _default_post
        self.timeout_s = timeout_s
        self.upstream_calls = 0
        self._cache: dict[str, np.ndarray] = {}

    def _check_dims(self, vector: np.ndarray) -> np.ndarray:
        if self.expected_dims is None:
            self.expected_dims = len(vector)
        elif len(vector) != self.expected_dims:
            raise DimensionMismatchError(self.expected_dims, len(vector))
        return vector

    def _lookup(self, key: str) -> np.ndarray | None:
        hit = self._cache.get(key)
        if hit is None and self.fixture is not None:
            hit = self.fixture.get(key)
            if hit is not None:
                self._cache[key] = hit
        return hit

    def embed(self, title: str, abstract: str) -> np.ndarray:
        vectors, errors = self.embed_batch([(0, title, abstract)])
        if 0 in errors:
            raise RemoteUnavailableError(errors[0])
        return vectors[0]

    def embed_batch(
        self, items: Sequence[tuple[int, str, str]]
    ) -> tuple[dict[int, np.ndarray], dict[int, str]]:
        """Embed many (paper_id, title, abstract) items.

        Per-item service failures land in the error map; they never abort
        the rest of the batch.
        """
        vectors: dict[int, np.ndarray] = {}
        errors: dict[int, str] = {}
        pending: list[tuple[int, str, str, str]] = []
        for paper_id, title, abstract in items:
            key = content_hash(title, abstract)
            hit = self._lookup(key)
            if hit is not None:
                vectors[paper_id] = self._check_dims(hit)
            else:
                pending.append((paper_id, title, abstract, key))

        if pending and self.endpoint is None:
            for paper_id, _, _, _ in pending:
                errors[paper_id] = "offline: not in fixture store"
            return vectors, errors

        for start in range(0, len(pending), self.batch_size):
            batch = pending[start : start + self.batch_size]
            payload = [
                {"paper_id": pid, "title": title, "abstract": abstract}
                for pid, title, abstract, _ in batch
            ]
            self.upstream_calls += 1
            response = self.post_fn(self.endpoint, payload, self.timeout_s)
            by_id = {entry.get("paper_id"): entry for entry in response}
            for pid, title, abstract, key in batch:
                entry = by_id.get(pid)
                if entry is None or "embedding" not in entry:
                    errors[pid] = (entry or {}).get("error", "no embedding returned")
                    continue
                vector = self._check_dims(np.asarray(entry["embedding"], dtype=np.float64))
                self._cache[key] = vector
                if self.fixture is not None:
                    self.fixture.entries[key] = [float(v) for v in vector]
                vectors[pid] = vector
        return vectors, errors


# ---------------------------------------------------------------------------
# Binary embedding store
# ---------------------------------------------------------------------------

_MAGIC = b"LSEM"
_VERSION = 1
_HEADER = struct.Struct("<4sHHIQ")  # magic, version, method length, dims, count


def store_embeddings(
    path: str | Path, ids: Sequence[int], matrix: np.ndarray, method: str
) -> None:
    """Write an embedding matrix: header, int64 ids, float32 LE row data."""
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise EmbeddingError("matrix must be 2-D (count x dims)")
    if len(ids) != matrix.shape[0]:
        raise CountMismatchError(f"{len(ids)} ids for {matrix.shape[0]} rows")
    method_bytes = method.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, len(method_bytes), matrix.shape[1], matrix.shape[0]))
        fh.write(method_bytes)
        fh.write(np.asarray(ids, dtype="<i8").tobytes())
        fh.write(matrix.tobytes())


def load_embeddings(path: str | Path) -> tuple[list[int], np.ndarray, str]:
    """Read an embedding file back; lossless for float32 inputs."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise CorruptHeaderError(f"{path}: truncated header")
    magic, version, method_len, dims, count = _HEADER.unpack_from(blob)
    if magic != _MAGIC or version != _VERSION:
        raise CorruptHeaderError(f"{path}: bad magic or version")
    offset = _HEADER.size
    if len(blob) < offset + method_len:
        raise CorruptHeaderError(f"{path}: truncated method tag")
    method = blob[offset : offset + method_len].decode("utf-8")
    offset += method_len
    expected = count * 8 + count * dims * 4
    if len(blob) - offset != expected:
        raise CountMismatchError(
            f"{path}: {len(blob) - offset} payload bytes, expected {expected}"
        )
    ids = np.frombuffer(blob, dtype="<i8", count=count, offset=offset)
    offset += count * 8
    matrix = np.frombuffer(blob, dtype="<f4", count=count * dims, offset=offset)
    return list(map(int, ids)), matrix.reshape(count, dims).copy(), method
