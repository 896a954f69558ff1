"""Shared fixtures: paths, a small deterministic corpus, pipeline config."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from litscout.records import PaperRecord

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def parse_manifest() -> list[dict]:
    with open(FIXTURES / "dblp_small_manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def pages_manifest() -> dict:
    with open(FIXTURES / "pages_manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


def make_corpus() -> list[PaperRecord]:
    """Six-paper corpus with known facet structure for filter/meta tests."""
    rows = [
        (0, "Graph Layout at Scale.", ["Ada Adams", "Boris Blue"], "TVCG", 2012,
         "Scalable layout of large graphs with bundling for analysis.", ["graphs", "layout"], 40),
        (1, "Uncertainty in Maps.", ["Ada Adams"], "CHI", 2015,
         "How map readers interpret uncertain data in visual form.", ["uncertainty", "maps"], 25),
        (2, "Brushing Linked Views.", ["Claire Dubois", "Ada Adams"], "VAST", 2015,
         "Linked brushing across coordinated views for exploration.", ["brushing", "layout"], 10),
        (3, "Color for Fields.", ["Wei Li"], "TVCG", 2018,
         "Color map design for scalar fields and dense data reading.", ["color", "maps"], 7),
        (4, "Event Sequence Cohorts.", ["Claire Dubois"], "VAST", 2020,
         "Comparing event sequences over cohorts of hospital records.", ["events"], 3),
        (5, "Calm Home Displays.", ["Lars Svensson", "Boris Blue"], "CHI", 2020,
         "Ambient energy displays deployed in households over weeks.", ["ambient", "maps"], 1),
    ]
    return [
        PaperRecord(id=i, title=t, authors=a, source=s, year=y,
                    url=f"https://dl.example.org/paper/{i}", abstract=ab,
                    keywords=k, citation_count=c)
        for i, t, a, s, y, ab, k, c in rows
    ]


@pytest.fixture
def small_corpus() -> list[PaperRecord]:
    return make_corpus()


def write_pipeline_config(tmp_path: Path, **overrides) -> Path:
    """Write a config JSON wired to the offline fixture inputs."""
    cfg = {
        "paths": {
            "dblp_xml": str(FIXTURES / "dblp_small.xml"),
            "page_fixtures": str(FIXTURES / "pages"),
            "publisher_profiles": str(FIXTURES / "profiles"),
            "word_vectors": str(FIXTURES / "wordvecs_4d.txt"),
            "build_dir": str(tmp_path / "build"),
        },
        "venues": ["TVCG", "VAST", "CHI"],
        "venue_match_mode": "exact",
        "cleaning": {
            "synonym_map": {
                "Human-Computer Interaction": ["HCI"],
                "Visualization": ["Visualisation"],
            }
        },
        "embedding": {"methods": ["tfidf", "sif"], "sif_a": 0.001, "projection_method": "tfidf"},
        "fetch": {"min_interval_ms": 0, "max_retries": 1, "timeout_ms": 5000},
        "scrape_offline": True,
        "server": {"host": "127.0.0.1", "port": 8807},
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    tmp_path.mkdir(parents=True, exist_ok=True)
    path = tmp_path / "pipeline.json"
    path.write_text(json.dumps(cfg, indent=1))
    return path
