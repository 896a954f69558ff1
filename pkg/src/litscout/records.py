"""Record types shared across the pipeline, plus their JSON file schemas.

Two on-disk schemas exist:

* the raw/augmented JSON-lines schema with lowercase keys
  (``{id, dblp_key, title, authors, source, year, url}`` plus, after the
  scrape stage, ``{abstract, keywords, citation_count, fetched_at}``), and
* the consolidated corpus schema with the dataset's published attribute
  names (``ID, Title, Authors, Source, Year, URL, Abstract, Keywords``
  plus ``CitationCounts``), used by the clean/export stages and the API.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Iterator


@dataclass
class RawRecord:
    """One publication as parsed from the bibliography XML.

    ``id`` is None until assign_ids() runs; author-name disambiguation
    suffixes ("J. Thompson 001") are preserved verbatim.
    """

    dblp_key: str
    title: str
    authors: list[str]
    source: str
    year: int
    url: str
    id: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "dblp_key": self.dblp_key,
            "title": self.title,
            "authors": list(self.authors),
            "source": self.source,
            "year": self.year,
            "url": self.url,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "RawRecord":
        return cls(
            dblp_key=obj["dblp_key"],
            title=obj["title"],
            authors=list(obj["authors"]),
            source=obj["source"],
            year=int(obj["year"]),
            url=obj["url"],
            id=obj.get("id"),
        )


@dataclass
class AugmentedRecord:
    """A raw record extended with scraped publisher-page metadata.

    Absent metadata stays None (never empty string), so downstream
    retention rules can distinguish "missing" from "empty".
    """

    raw: RawRecord
    abstract: str | None = None
    keywords: list[str] | None = None
    citation_count: int | None = None
    fetched_at: str | None = None

    def to_json_dict(self) -> dict:
        d = self.raw.to_json_dict()
        d["abstract"] = self.abstract
        d["keywords"] = self.keywords
        d["citation_count"] = self.citation_count
        d["fetched_at"] = self.fetched_at
        return d

    @classmethod
    def from_json_dict(cls, obj: dict) -> "AugmentedRecord":
        return cls(
            raw=RawRecord.from_json_dict(obj),
            abstract=obj.get("abstract"),
            keywords=list(obj["keywords"]) if obj.get("keywords") is not None else None,
            citation_count=obj.get("citation_count"),
            fetched_at=obj.get("fetched_at"),
        )


@dataclass
class PaperRecord:
    """One cleaned publication: the eight dataset attributes plus citation count."""

    id: int
    title: str
    authors: list[str]
    source: str
    year: int
    url: str
    abstract: str
    keywords: list[str] = field(default_factory=list)
    citation_count: int | None = None

    def to_corpus_dict(self) -> dict:
        return {
            "ID": self.id,
            "Title": self.title,
            "Authors": list(self.authors),
            "Source": self.source,
            "Year": self.year,
            "URL": self.url,
            "Abstract": self.abstract,
            "Keywords": list(self.keywords),
            "CitationCounts": self.citation_count,
        }

    @classmethod
    def from_corpus_dict(cls, obj: dict) -> "PaperRecord":
        return cls(
            id=int(obj["ID"]),
            title=obj["Title"],
            authors=list(obj["Authors"]),
            source=obj["Source"],
            year=int(obj["Year"]),
            url=obj["URL"],
            abstract=obj["Abstract"],
            keywords=list(obj.get("Keywords") or []),
            citation_count=obj.get("CitationCounts"),
        )

    def copy(self) -> "PaperRecord":
        return replace(self, authors=list(self.authors), keywords=list(self.keywords))


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=True, separators=(",", ":"))


def write_jsonl(records: Iterable, out: IO[str]) -> int:
    """Write records (anything with to_json_dict) one JSON object per line."""
    n = 0
    for rec in records:
        out.write(_dump_line(rec.to_json_dict()) + "\n")
        n += 1
    return n


def read_raw_jsonl(path: str | Path) -> Iterator[RawRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield RawRecord.from_json_dict(json.loads(line))


def read_augmented_jsonl(path: str | Path) -> Iterator[AugmentedRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield AugmentedRecord.from_json_dict(json.loads(line))


def write_corpus_jsonl(records: Iterable[PaperRecord], out: IO[str]) -> int:
    n = 0
    for rec in records:
        out.write(_dump_line(rec.to_corpus_dict()) + "\n")
        n += 1
    return n


def read_corpus_jsonl(path: str | Path) -> Iterator[PaperRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield PaperRecord.from_corpus_dict(json.loads(line))


def write_corpus_json(records: Iterable[PaperRecord], path: str | Path) -> int:
    """Write the consolidated corpus as one JSON array (the export artifact)."""
    items = [rec.to_corpus_dict() for rec in records]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(items, fh, ensure_ascii=True, indent=1)
        fh.write("\n")
    return len(items)


def read_corpus_json(path: str | Path) -> list[PaperRecord]:
    with open(path, encoding="utf-8") as fh:
        items = json.load(fh)
    return [PaperRecord.from_corpus_dict(obj) for obj in items]
