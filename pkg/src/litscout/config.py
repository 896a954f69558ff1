"""Pipeline configuration: one JSON file drives every stage."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .clean import CleaningConfig, config_from_dict
from .ingest import load_venue_config
from .scrape import FetchPolicy


class ConfigError(Exception):
    pass


def _shipped_json(name: str):
    return json.loads(resources.files("litscout.data").joinpath(name).read_text("utf-8"))


class MissingInputError(Exception):
    def __init__(self, stage: str, path: str | Path, what: str = "input"):
        super().__init__(f"[{stage}] missing {what}: {path}")
        self.stage = stage
        self.path = str(path)


@dataclass
class RemoteConfig:
    endpoint: str | None = None
    fixture: Path | None = None
    dims: int | None = None
    batch_size: int = 16


@dataclass
class PipelineConfig:
    base_dir: Path
    build_dir: Path
    dblp_xml: Path | None = None
    entity_table: Path | None = None
    page_fixtures: Path | None = None
    publisher_profiles: Path | None = None
    word_vectors: Path | None = None
    external_projection: Path | None = None
    venues: list[str] = field(default_factory=list)
    venue_match_mode: str = "prefix"
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    embed_methods: list[str] = field(default_factory=lambda: ["tfidf", "sif"])
    sif_a: float = 1e-3
    projection_method: str | None = None
    remote: RemoteConfig = field(default_factory=RemoteConfig)
    fetch: FetchPolicy = field(default_factory=FetchPolicy)
    scrape_offline: bool = True
    server_host: str = "127.0.0.1"
    server_port: int = 8807
    cors_origins: list[str] = field(default_factory=lambda: ["*"])

    # Stage artifacts, all under build_dir unless individually overridden.
    records_path: Path = None  # type: ignore[assignment]
    rejects_path: Path = None  # type: ignore[assignment]
    augmented_path: Path = None  # type: ignore[assignment]
    cleaned_path: Path = None  # type: ignore[assignment]
    embeddings_dir: Path = None  # type: ignore[assignment]
    projection_path: Path = None  # type: ignore[assignment]
    corpus_path: Path = None  # type: ignore[assignment]

    def embedding_file(self, method: str) -> Path:
        return self.embeddings_dir / f"embeddings.{method}.bin"

    def stats_file(self, method: str) -> Path:
        return self.embeddings_dir / f"stats.{method}.json"


def _resolve(base: Path, value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else base / path


def load_config(path: str | Path) -> PipelineConfig:
    """Read and validate the pipeline config JSON."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None

    base = path.parent.resolve()
    paths = obj.get("paths", {})
    build_dir = _resolve(base, paths.get("build_dir", "build"))

    venues = obj.get("venues")
    venue_config = _resolve(base, paths.get("venue_config"))
    if venue_config is not None:
        try:
            venues = load_venue_config(venue_config)
        except FileNotFoundError:
            raise ConfigError(f"venue config not found: {venue_config}") from None
    if venues is None:
        venues = _shipped_json("default_venues.json")
    if not isinstance(venues, list) or not all(isinstance(v, str) for v in venues):
        raise ConfigError("venues must be a list of descriptor strings")

    cleaning_obj = dict(obj.get("cleaning", {}))
    synonym_file = _resolve(base, cleaning_obj.pop("synonym_map_file", None))
    if synonym_file is not None:
        try:
            with open(synonym_file, encoding="utf-8") as fh:
                cleaning_obj["synonym_map"] = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"synonym map not found: {synonym_file}") from None
    elif "synonym_map" not in cleaning_obj:
        cleaning_obj["synonym_map"] = _shipped_json("default_synonyms.json")
    try:
        cleaning = config_from_dict(cleaning_obj)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad cleaning config: {exc}") from None

    embedding_obj = obj.get("embedding", {})
    methods = embedding_obj.get("methods", ["tfidf", "sif"])
    known = {"tfidf", "sif", "remote"}
    if not methods or not set(methods) <= known:
        raise ConfigError(f"embedding methods must be a non-empty subset of {sorted(known)}")
    remote_obj = embedding_obj.get("remote", {})
    remote = RemoteConfig(
        endpoint=remote_obj.get("endpoint"),
        fixture=_resolve(base, remote_obj.get("fixture")),
        dims=remote_obj.get("dims"),
        batch_size=remote_obj.get("batch_size", 16),
    )

    try:
        fetch = FetchPolicy(**obj.get("fetch", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad fetch policy: {exc}") from None

    server_obj = obj.get("server", {})
    artifacts = obj.get("artifacts", {})

    config = PipelineConfig(
        base_dir=base,
        build_dir=build_dir,
        dblp_xml=_resolve(base, paths.get("dblp_xml")),
        entity_table=_resolve(base, paths.get("entity_table")),
        page_fixtures=_resolve(base, paths.get("page_fixtures")),
        publisher_profiles=_resolve(base, paths.get("publisher_profiles")),
        word_vectors=_resolve(base, paths.get("word_vectors")),
        external_projection=_resolve(base, paths.get("external_projection")),
        venues=venues,
        venue_match_mode=obj.get("venue_match_mode", "prefix"),
        cleaning=cleaning,
        embed_methods=list(methods),
        sif_a=float(embedding_obj.get("sif_a", 1e-3)),
        projection_method=embedding_obj.get("projection_method"),
        remote=remote,
        fetch=fetch,
        scrape_offline=bool(obj.get("scrape_offline", True)),
        server_host=server_obj.get("host", "127.0.0.1"),
        server_port=int(server_obj.get("port", 8807)),
        cors_origins=list(server_obj.get("cors_origins", ["*"])),
        records_path=_resolve(base, artifacts.get("records")) or build_dir / "records.jsonl",
        rejects_path=_resolve(base, artifacts.get("rejects")) or build_dir / "rejects.jsonl",
        augmented_path=_resolve(base, artifacts.get("augmented")) or build_dir / "augmented.jsonl",
        cleaned_path=_resolve(base, artifacts.get("cleaned")) or build_dir / "cleaned.jsonl",
        embeddings_dir=_resolve(base, artifacts.get("embeddings_dir")) or build_dir / "embeddings",
        projection_path=_resolve(base, artifacts.get("projection")) or build_dir / "projection.csv",
        corpus_path=_resolve(base, artifacts.get("corpus")) or build_dir / "corpus.json",
    )
    if config.venue_match_mode not in ("exact", "prefix"):
        raise ConfigError(f"venue_match_mode must be exact or prefix, got {config.venue_match_mode!r}")
    if config.projection_method is None:
        config.projection_method = config.embed_methods[0]
    return config
