"""REST API over an immutable corpus snapshot.

All endpoints are read-only; session state (seed set, saved cart) lives
in the client and is passed back as query parameters where the response
depends on it (projection point states). One snapshot serves unlimited
concurrent readers; replacing it is an atomic attribute swap.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Callable, Literal

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import embed as embed_mod
from .facets import FilterSpec, MalformedFilterError, UnknownColumnError, apply_filters, summarize
from .projection import PlanarCoordinates, load_projection
from .records import PaperRecord, read_corpus_json, read_corpus_jsonl
from .simindex import (
    FlatIndex,
    PlanarIndex,
    SimIndexError,
    UnknownSeedIdError,
    build_flat_index,
    build_planar_index,
    search_by_seeds,
)

DEFAULT_K = 25

STATE_UNFILTERED = "unfiltered"
STATE_FILTERED = "filtered"
STATE_INPUT = "similarity_input"
STATE_OUTPUT = "similarity_output"
STATE_SAVED = "saved"

TextEmbedder = Callable[[str, str], np.ndarray]


class SnapshotError(Exception):
    pass


@dataclass
class CorpusSnapshot:
    """Everything the server reads: records, indexes, projection, embedders."""

    records: list[PaperRecord]
    flat_indexes: dict[str, FlatIndex] = dataclass_field(default_factory=dict)
    planar_index: PlanarIndex | None = None
    coords: PlanarCoordinates | None = None
    text_embedders: dict[str, TextEmbedder] = dataclass_field(default_factory=dict)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.id)
        self.by_id = {record.id: record for record in self.records}
        if len(self.by_id) != len(self.records):
            raise SnapshotError("duplicate record ids in corpus")
        for method, index in self.flat_indexes.items():
            missing = [r.id for r in self.records if r.id not in index]
            if missing:
                raise SnapshotError(
                    f"{len(missing)} record ids missing from {method} index: {missing[:5]}"
                )
        if self.planar_index is not None:
            missing = [r.id for r in self.records if r.id not in self.planar_index]
            if missing:
                raise SnapshotError(
                    f"{len(missing)} record ids missing from projection: {missing[:5]}"
                )

    @property
    def methods(self) -> list[str]:
        return sorted(self.flat_indexes)

    def default_method(self) -> str | None:
        return self.methods[0] if self.flat_indexes else None


def load_snapshot(
    corpus_path: str | Path,
    embedding_files: list[str | Path] = (),
    projection_path: str | Path | None = None,
    text_embedders: dict[str, TextEmbedder] | None = None,
) -> CorpusSnapshot:
    """Build a snapshot from pipeline artifacts on disk."""
    corpus_path = Path(corpus_path)
    if corpus_path.suffix == ".jsonl":
        records = list(read_corpus_jsonl(corpus_path))
    else:
        records = read_corpus_json(corpus_path)
    flat = {}
    for path in embedding_files:
        ids, matrix, method = embed_mod.load_embeddings(path)
        flat[method] = build_flat_index(ids, matrix.astype(np.float64))
    coords = None
    planar = None
    if projection_path is not None:
        coords = load_projection(projection_path, [record.id for record in records])
        planar = build_planar_index(coords)
    return CorpusSnapshot(
        records=records,
        flat_indexes=flat,
        planar_index=planar,
        coords=coords,
        text_embedders=text_embedders or {},
    )


def text_embedders_from_stats(
    stats_paths: dict[str, str | Path], table: embed_mod.WordVectorTable
) -> dict[str, TextEmbedder]:
    """Rebuild by-text embedding providers from the embed stage's sidecars."""
    providers: dict[str, TextEmbedder] = {}
    for method, path in stats_paths.items():
        if method == "tfidf":
            stats = embed_mod.load_tfidf_stats(path)
            providers["tfidf"] = (
                lambda title, abstract, _s=stats: embed_mod.embed_text_tfidf(title, abstract, table, _s)
            )
        elif method == "sif":
            model = embed_mod.load_sif_stats(path)
            providers["sif"] = (
                lambda title, abstract, _m=model: embed_mod.embed_text_sif(title, abstract, table, _m)
            )
    return providers


class SimilarityRequest(BaseModel):
    mode: Literal["by_papers", "by_text"]
    seed_ids: list[int] | None = None
    title: str | None = None
    abstract: str | None = None
    dims: Literal["planar", "full"] = "full"
    method: str | None = None
    k: int = Field(default=DEFAULT_K, ge=1)


_ERROR_NAMES = {
    400: "bad request",
    404: "not found",
    422: "unprocessable",
    503: "service unavailable",
}


def _record_json(record: PaperRecord) -> dict:
    return record.to_corpus_dict()


def _parse_id_list(raw: str | None, name: str) -> set[int]:
    if not raw:
        return set()
    try:
        return {int(piece) for piece in raw.split(",") if piece.strip()}
    except ValueError:
        raise HTTPException(status_code=400, detail=f"{name}: expected comma-separated ids") from None


def _filter_spec(filters: list[str], q: str | None) -> FilterSpec:
    try:
        return FilterSpec.parse(filters, query=q)
    except UnknownColumnError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    except MalformedFilterError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def create_app(snapshot: CorpusSnapshot, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="litscout", docs_url=None, redoc_url=None)
    app.state.snapshot = snapshot
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        details = "; ".join(
            f"{'.'.join(str(loc) for loc in err.get('loc', ()))}: {err.get('msg', '')}"
            for err in exc.errors()
        )
        return JSONResponse(status_code=400, content={"error": "bad request", "detail": details})

    @app.exception_handler(HTTPException)
    async def http_handler(request: Request, exc: HTTPException):
        name = _ERROR_NAMES.get(exc.status_code, "error")
        return JSONResponse(status_code=exc.status_code, content={"error": name, "detail": exc.detail})

    def snap() -> CorpusSnapshot:
        return app.state.snapshot

    @app.get("/api/health")
    def health():
        s = snap()
        return {"papers": len(s.records), "methods": s.methods, "projection": s.coords is not None}

    @app.get("/api/papers")
    def papers(
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=500),
        filters: list[str] = Query(default=[], alias="filter"),
        q: str | None = Query(default=None),
    ):
        s = snap()
        spec = _filter_spec(filters, q)
        ids = apply_filters(s.records, spec)
        page = ids[offset : offset + limit]
        return {
            "papers": [_record_json(s.by_id[pid]) for pid in page],
            "total": len(ids),
            "offset": offset,
            "limit": limit,
        }

    @app.get("/api/meta")
    def meta(
        filters: list[str] = Query(default=[], alias="filter"),
        q: str | None = Query(default=None),
    ):
        s = snap()
        spec = _filter_spec(filters, q)
        ids = apply_filters(s.records, spec)
        summaries = summarize(ids, s.by_id)
        return {facet: summary.to_json_dict() for facet, summary in summaries.items()}

    @app.post("/api/similarity")
    def similarity(req: SimilarityRequest):
        s = snap()
        if req.dims == "planar":
            if s.planar_index is None:
                raise HTTPException(status_code=503, detail="no projection loaded")
            index = s.planar_index
        else:
            method = req.method or s.default_method()
            if method is None or method not in s.flat_indexes:
                raise HTTPException(status_code=400, detail=f"unknown embedding method: {method!r}")
            index = s.flat_indexes[method]

        if req.mode == "by_papers":
            if not req.seed_ids or req.title is not None or req.abstract is not None:
                raise HTTPException(status_code=400, detail="by_papers mode takes seed_ids only")
            try:
                results = search_by_seeds(index, req.seed_ids, req.k)
            except UnknownSeedIdError as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from None
        else:
            if req.seed_ids is not None or (req.title is None and req.abstract is None):
                raise HTTPException(status_code=400, detail="by_text mode takes title/abstract only")
            if req.dims == "planar":
                raise HTTPException(
                    status_code=400, detail="by_text search works on full dims only"
                )
            provider = s.text_embedders.get(req.method or s.default_method() or "")
            if provider is None:
                raise HTTPException(status_code=503, detail="no embedding provider for this method")
            try:
                vector = provider(req.title or "", req.abstract or "")
            except embed_mod.EmbeddingError as exc:
                raise HTTPException(status_code=503, detail=str(exc)) from None
            try:
                results = index.knn(np.asarray(vector, dtype=np.float64), req.k)
            except SimIndexError as exc:
                raise HTTPException(status_code=503, detail=str(exc)) from None

        payload = []
        for result in results:
            record = s.by_id[result.paper_id]
            payload.append(
                {
                    "paper_id": result.paper_id,
                    "distance": result.distance,
                    "score": result.score,
                    "title": record.title,
                    "source": record.source,
                    "year": record.year,
                }
            )
        return payload

    @app.get("/api/projection")
    def projection(
        filters: list[str] = Query(default=[], alias="filter"),
        q: str | None = Query(default=None),
        seeds: str | None = Query(default=None),
        outputs: str | None = Query(default=None),
        saved: str | None = Query(default=None),
    ):
        s = snap()
        if s.coords is None:
            raise HTTPException(status_code=503, detail="no projection loaded")
        seed_ids = _parse_id_list(seeds, "seeds")
        output_ids = _parse_id_list(outputs, "outputs")
        saved_ids = _parse_id_list(saved, "saved")
        spec = _filter_spec(filters, q)
        visible = None if spec.is_empty() else set(apply_filters(s.records, spec))
        points = []
        for pid, (x, y) in zip(s.coords.ids, s.coords.xy):
            if pid in saved_ids:
                state = STATE_SAVED
            elif pid in seed_ids:
                state = STATE_INPUT
            elif pid in output_ids:
                state = STATE_OUTPUT
            elif visible is not None and pid not in visible:
                state = STATE_FILTERED
            else:
                state = STATE_UNFILTERED
            points.append({"paper_id": int(pid), "x": float(x), "y": float(y), "state": state})
        return points

    @app.post("/api/export")
    def export(ids: list[int] = Body(...)):
        s = snap()
        papers = []
        rejects = []
        for pid in ids:
            record = s.by_id.get(pid)
            if record is None:
                rejects.append(pid)
            else:
                papers.append(_record_json(record))
        return {"papers": papers, "rejects": rejects}

    return app


def replace_snapshot(app: FastAPI, snapshot: CorpusSnapshot) -> None:
    """Atomic swap; in-flight requests keep the snapshot they started with."""
    app.state.snapshot = snapshot
