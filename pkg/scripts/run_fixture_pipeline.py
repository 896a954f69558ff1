#!/usr/bin/env python3
"""Build the offline demo corpus from the test fixtures and serve it.

Runs every pipeline stage (filter, scrape, clean, embed, project, export)
into ./demo_build using the fixture bibliography, saved publisher pages,
and the small word-vector table, then starts the API server.

Usage:
    python scripts/run_fixture_pipeline.py [--port 8807] [--no-serve]
"""

import argparse
import json
import sys
from pathlib import Path

from litscout.cli import main as litscout_main

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"


def write_config(build_dir: Path, port: int) -> Path:
    config = {
        "paths": {
            "dblp_xml": str(FIXTURES / "dblp_small.xml"),
            "page_fixtures": str(FIXTURES / "pages"),
            "publisher_profiles": str(FIXTURES / "profiles"),
            "word_vectors": str(FIXTURES / "wordvecs_4d.txt"),
            "build_dir": str(build_dir),
        },
        "venues": ["TVCG", "VAST", "CHI"],
        "venue_match_mode": "exact",
        "cleaning": {
            "synonym_map": {
                "Human-Computer Interaction": ["HCI"],
                "Visualization": ["Visualisation"],
            }
        },
        "embedding": {"methods": ["tfidf", "sif"], "projection_method": "tfidf"},
        "scrape_offline": True,
        "server": {"host": "127.0.0.1", "port": port},
    }
    path = build_dir / "pipeline.json"
    build_dir.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config, indent=1))
    return path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--build-dir", default=str(ROOT / "demo_build"))
    parser.add_argument("--port", type=int, default=8807)
    parser.add_argument("--ui-dir", default=None, help="built frontend to mount at /")
    parser.add_argument("--no-serve", action="store_true", help="build artifacts only")
    args = parser.parse_args()

    config_path = write_config(Path(args.build_dir), args.port)
    for stage in ["filter", "scrape", "clean", "embed", "project", "export"]:
        code = litscout_main(["--config", str(config_path), stage])
        if code != 0:
            return code
    if args.no_serve:
        print(f"artifacts in {args.build_dir}", file=sys.stderr)
        return 0
    serve_args = ["--config", str(config_path), "serve"]
    if args.ui_dir:
        serve_args += ["--ui-dir", args.ui_dir]
    return litscout_main(serve_args)


if __name__ == "__main__":
    sys.exit(main())
