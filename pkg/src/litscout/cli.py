"""Command-line orchestration of the pipeline stages and the API server.

Stages communicate through files under the config's build directory, so
any stage can be re-run in isolation and re-runs with unchanged inputs
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, embed as embed_mod
from .clean import clean_corpus
from .config import ConfigError, MissingInputError, PipelineConfig, load_config
from .ingest import (
    IngestError,
    Reject,
    VenueFilter,
    assign_ids,
    default_entity_table,
    filter_by_venue,
    load_entity_table,
    parse_bibliography,
)
from .projection import load_projection, pca_project_2d, save_projection_csv
from .records import (
    RawRecord,
    read_augmented_jsonl,
    read_corpus_jsonl,
    read_raw_jsonl,
    write_corpus_json,
    write_corpus_jsonl,
    write_jsonl,
)
from .scrape import (
    AugmentReport,
    Fetcher,
    FixtureTransport,
    HttpTransport,
    ProfileRegistry,
    augment_corpus,
)
from .server import create_app, load_snapshot, text_embedders_from_stats


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class Logger:
    def __init__(self, json_logs: bool = False):
        self.json_logs = json_logs

    def info(self, stage: str, message: str, **fields) -> None:
        if self.json_logs:
            print(json.dumps({"stage": stage, "msg": message, **fields}), file=sys.stderr)
        else:
            extras = " ".join(f"{k}={v}" for k, v in fields.items())
            print(f"[{stage}] {message}" + (f" ({extras})" if extras else ""), file=sys.stderr)


def _require(stage: str, path: Path | None, what: str) -> Path:
    if path is None:
        raise MissingInputError(stage, f"<{what} not configured>", what)
    if not path.exists():
        raise MissingInputError(stage, path, what)
    return path


def _ensure_parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def run_filter(cfg: PipelineConfig, log: Logger, dry_run: bool = False) -> dict:
    xml_path = _require("filter", cfg.dblp_xml, "bibliography xml")
    if not cfg.venues:
        raise StageError("filter", "no venues configured")
    entity_table = (
        load_entity_table(cfg.entity_table) if cfg.entity_table else default_entity_table()
    )
    if dry_run:
        log.info("filter", "dry-run ok", xml=str(xml_path), venues=len(cfg.venues))
        return {"dry_run": True}

    venue_filter = VenueFilter(tuple(cfg.venues), cfg.venue_match_mode)
    rejects: list[Reject] = []
    parsed = 0

    def records():
        nonlocal parsed
        for event in parse_bibliography(xml_path, entity_table):
            if isinstance(event, RawRecord):
                parsed += 1
                yield event
            else:
                rejects.append(event)

    _ensure_parent(cfg.records_path)
    with open(cfg.records_path, "w", encoding="utf-8") as out:
        kept = write_jsonl(assign_ids(filter_by_venue(records(), venue_filter)), out)
    _ensure_parent(cfg.rejects_path)
    with open(cfg.rejects_path, "w", encoding="utf-8") as out:
        for reject in rejects:
            out.write(json.dumps({"dblp_key": reject.dblp_key, "reason": reject.reason}) + "\n")
    log.info("filter", "parsed bibliography", parsed=parsed, rejected=len(rejects), kept=kept)
    return {"parsed": parsed, "rejected": len(rejects), "kept": kept}


def run_scrape(cfg: PipelineConfig, log: Logger, dry_run: bool = False) -> dict:
    records_path = _require("scrape", cfg.records_path, "records artifact (run filter first)")
    if cfg.scrape_offline:
        fixtures = _require("scrape", cfg.page_fixtures, "page fixture directory")
        transport = FixtureTransport(fixtures)
    else:
        transport = HttpTransport()
    registry = (
        ProfileRegistry.load_dir(cfg.publisher_profiles)
        if cfg.publisher_profiles
        else ProfileRegistry.load_dir(Path(__file__).parent / "data" / "profiles")
    )
    if dry_run:
        log.info("scrape", "dry-run ok", offline=cfg.scrape_offline, profiles=len(registry.profiles))
        return {"dry_run": True}

    fetcher = Fetcher(cfg.fetch, transport)
    report = AugmentReport()
    _ensure_parent(cfg.augmented_path)
    with open(cfg.augmented_path, "w", encoding="utf-8") as out:
        count = write_jsonl(
            augment_corpus(read_raw_jsonl(records_path), fetcher, registry, report), out
        )
    log.info("scrape", "augmented records", records=count, failures=report.failed)
    return {"records": count, "failures": report.failed}


def run_clean(cfg: PipelineConfig, log: Logger, dry_run: bool = False) -> dict:
    augmented_path = _require("clean", cfg.augmented_path, "augmented artifact (run scrape first)")
    cleaned, report = clean_corpus(read_augmented_jsonl(augmented_path), cfg.cleaning)
    if dry_run:
        log.info("clean", "dry-run report", **report.to_json_dict())
        return {"dry_run": True, "report": report.to_json_dict()}
    _ensure_parent(cfg.cleaned_path)
    with open(cfg.cleaned_path, "w", encoding="utf-8") as out:
        write_corpus_jsonl(cleaned, out)
    log.info("clean", "cleaned corpus", **report.to_json_dict())
    return {"report": report.to_json_dict()}


def _corpus_documents(cfg: PipelineConfig) -> tuple[list[int], list[list[str]], list]:
    cleaned_path = _require("embed", cfg.cleaned_path, "cleaned artifact (run clean first)")
    records = list(read_corpus_jsonl(cleaned_path))
    ids = [record.id for record in records]
    tokens = [embed_mod.tokenize(record.title + " " + record.abstract) for record in records]
    return ids, tokens, records


def run_embed(cfg: PipelineConfig, log: Logger, dry_run: bool = False) -> dict:
    needs_table = any(m in ("tfidf", "sif") for m in cfg.embed_methods)
    table = None
    if needs_table:
        table_path = _require("embed", cfg.word_vectors, "word-vector table")
        table = embed_mod.load_word_vectors(table_path)
    if "remote" in cfg.embed_methods and cfg.remote.endpoint is None and cfg.remote.fixture is None:
        raise MissingInputError("embed", "<remote endpoint or fixture>", "remote embedding source")
    if dry_run:
        log.info("embed", "dry-run ok", methods=",".join(cfg.embed_methods))
        return {"dry_run": True}

    ids, corpus_tokens, records = _corpus_documents(cfg)
    if not ids:
        raise StageError("embed", "cleaned corpus is empty")
    cfg.embeddings_dir.mkdir(parents=True, exist_ok=True)
    summary: dict[str, int] = {}
    for method in cfg.embed_methods:
        out_path = cfg.embedding_file(method)
        if method == "tfidf":
            matrix, flagged = embed_mod.embed_corpus_tfidf(corpus_tokens, table)
            embed_mod.store_embeddings(out_path, ids, matrix, "tfidf")
            embed_mod.save_tfidf_stats(cfg.stats_file("tfidf"), embed_mod.tfidf_stats(corpus_tokens))
            log.info("embed", "tfidf embeddings", count=len(ids), flagged=len(flagged))
        elif method == "sif":
            model = embed_mod.embed_corpus_sif(
                corpus_tokens, table, embed_mod.EmbedConfig(sif_a=cfg.sif_a)
            )
            embed_mod.store_embeddings(out_path, ids, model.vectors, "sif")
            embed_mod.save_sif_stats(cfg.stats_file("sif"), model)
            log.info("embed", "sif embeddings", count=len(ids), flagged=len(model.flagged))
        else:
            fixture = (
                embed_mod.EmbeddingFixtureStore.load(cfg.remote.fixture)
                if cfg.remote.fixture
                else None
            )
            client = embed_mod.RemoteEmbeddingClient(
                endpoint=cfg.remote.endpoint,
                batch_size=cfg.remote.batch_size,
                expected_dims=cfg.remote.dims,
                fixture=fixture,
            )
            items = [(record.id, record.title, record.abstract) for record in records]
            vectors, errors = client.embed_batch(items)
            if errors:
                sample = "; ".join(f"{pid}: {msg}" for pid, msg in list(errors.items())[:3])
                raise StageError("embed", f"remote embedding failed for {len(errors)} papers ({sample})")
            matrix = np.vstack([vectors[pid] for pid in ids])
            embed_mod.store_embeddings(out_path, ids, matrix, "remote")
            log.info("embed", "remote embeddings", count=len(ids), upstream_calls=client.upstream_calls)
        summary[method] = len(ids)
    return summary


def run_project(cfg: PipelineConfig, log: Logger, dry_run: bool = False) -> dict:
    cleaned_path = _require("project", cfg.cleaned_path, "cleaned artifact (run clean first)")
    ids = [record.id for record in read_corpus_jsonl(cleaned_path)]
    if cfg.external_projection is not None:
        source = _require("project", cfg.external_projection, "external projection file")
        if dry_run:
            log.info("project", "dry-run ok", source=str(source))
            return {"dry_run": True}
        coords = load_projection(source, ids)
        for warning in coords.warnings:
            log.info("project", f"warning: {warning}")
    else:
        method = cfg.projection_method
        emb_path = _require("project", cfg.embedding_file(method), f"{method} embeddings (run embed first)")
        if dry_run:
            log.info("project", "dry-run ok", method=method)
            return {"dry_run": True}
        emb_ids, matrix, _ = embed_mod.load_embeddings(emb_path)
        coords = pca_project_2d(emb_ids, matrix.astype(np.float64))
        for warning in coords.warnings:
            log.info("project", f"warning: {warning}")
    _ensure_parent(cfg.projection_path)
    save_projection_csv(coords, cfg.projection_path)
    log.info("project", "projection written", points=len(coords.ids), provenance=coords.provenance)
    return {"points": len(coords.ids), "provenance": coords.provenance}


def run_export(cfg: PipelineConfig, log: Logger, dry_run: bool = False) -> dict:
    cleaned_path = _require("export", cfg.cleaned_path, "cleaned artifact (run clean first)")
    if dry_run:
        log.info("export", "dry-run ok", source=str(cleaned_path))
        return {"dry_run": True}
    _ensure_parent(cfg.corpus_path)
    count = write_corpus_json(read_corpus_jsonl(cleaned_path), cfg.corpus_path)
    log.info("export", "consolidated corpus written", papers=count, path=str(cfg.corpus_path))
    return {"papers": count}


def build_snapshot_from_config(cfg: PipelineConfig):
    """Assemble the serving snapshot exactly as `litscout serve` does."""
    corpus_path = cfg.corpus_path if cfg.corpus_path.exists() else cfg.cleaned_path
    _require("serve", corpus_path, "corpus artifact (run export first)")
    embedding_files = [
        cfg.embedding_file(m) for m in cfg.embed_methods if cfg.embedding_file(m).exists()
    ]
    projection = cfg.projection_path if cfg.projection_path.exists() else None

    text_embedders = {}
    if cfg.word_vectors and cfg.word_vectors.exists():
        table = embed_mod.load_word_vectors(cfg.word_vectors)
        stats_paths = {
            m: cfg.stats_file(m)
            for m in ("tfidf", "sif")
            if m in cfg.embed_methods and cfg.stats_file(m).exists()
        }
        text_embedders.update(text_embedders_from_stats(stats_paths, table))
    if "remote" in cfg.embed_methods and (cfg.remote.endpoint or cfg.remote.fixture):
        fixture = (
            embed_mod.EmbeddingFixtureStore.load(cfg.remote.fixture) if cfg.remote.fixture else None
        )
        client = embed_mod.RemoteEmbeddingClient(
            endpoint=cfg.remote.endpoint,
            batch_size=cfg.remote.batch_size,
            expected_dims=cfg.remote.dims,
            fixture=fixture,
        )
        text_embedders["remote"] = client.embed
    return load_snapshot(corpus_path, embedding_files, projection, text_embedders)


def run_serve(cfg: PipelineConfig, log: Logger, dry_run: bool = False, ui_dir: str | None = None) -> dict:
    snapshot = build_snapshot_from_config(cfg)
    log.info(
        "serve",
        "snapshot loaded",
        papers=len(snapshot.records),
        methods=",".join(snapshot.methods),
        projection=snapshot.coords is not None,
    )
    if dry_run:
        return {"dry_run": True, "papers": len(snapshot.records)}
    app = create_app(snapshot, cors_origins=cfg.cors_origins)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    import uvicorn

    uvicorn.run(app, host=cfg.server_host, port=cfg.server_port, log_level="warning")
    return {}


STAGES = {
    "filter": run_filter,
    "scrape": run_scrape,
    "clean": run_clean,
    "embed": run_embed,
    "project": run_project,
    "export": run_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="litscout", description=__doc__)
    parser.add_argument("--version", action="version", version=f"litscout {__version__}")
    parser.add_argument("--config", required=True, help="pipeline config JSON")
    parser.add_argument("--json-logs", action="store_true", help="machine-readable stderr logs")
    sub = parser.add_subparsers(dest="stage", required=True)
    for name in STAGES:
        stage_parser = sub.add_parser(name, help=f"run the {name} stage")
        stage_parser.add_argument("--dry-run", action="store_true", help="validate without writing")
    serve_parser = sub.add_parser("serve", help="serve the REST API")
    serve_parser.add_argument("--dry-run", action="store_true", help="load the snapshot, then exit")
    serve_parser.add_argument("--host", default=None)
    serve_parser.add_argument("--port", type=int, default=None)
    serve_parser.add_argument("--ui-dir", default=None, help="static directory to mount at /")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    log = Logger(json_logs=args.json_logs)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        log.info("config", f"error: {exc}")
        return 2
    try:
        if args.stage == "serve":
            if args.host:
                cfg.server_host = args.host
            if args.port:
                cfg.server_port = args.port
            run_serve(cfg, log, dry_run=args.dry_run, ui_dir=args.ui_dir)
        else:
            STAGES[args.stage](cfg, log, dry_run=args.dry_run)
    except (MissingInputError, StageError, IngestError, ConfigError) as exc:
        log.info(args.stage, f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
