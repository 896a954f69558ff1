"""Cleaning rules: ASCII normalization, keyword merging, record retention.

Order matters and mirrors the pipeline: text is ASCII-normalized first,
keywords are merged/de-duplicated, and only then are the length bounds
checked (so "characters" means ASCII bytes after normalization).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable

from .records import AugmentedRecord, PaperRecord

# Characters NFKD decomposition cannot reduce to ASCII but that have a
# conventional transliteration; applied before the NFKD pass.
TRANSLITERATIONS = {
    "ß": "ss",
    "ẞ": "SS",
    "æ": "ae",
    "Æ": "AE",
    "œ": "oe",
    "Œ": "OE",
    "ø": "o",
    "Ø": "O",
    "đ": "d",
    "Đ": "D",
    "ð": "d",
    "Ð": "D",
    "þ": "th",
    "Þ": "Th",
    "ł": "l",
    "Ł": "L",
    "ı": "i",
    "İ": "I",
    "ħ": "h",
    "Ħ": "H",
    "–": "-",
    "—": "-",
    "‘": "'",
    "’": "'",
    "“": '"',
    "”": '"',
    " ": " ",
}

_TRANSLIT_TABLE = str.maketrans(TRANSLITERATIONS)

DROP_NULL = "null"
DROP_LENGTH = "length"


def normalize_ascii(text: str) -> str:
    """Force text to ASCII: transliterate what we can, drop the rest."""
    decomposed = unicodedata.normalize("NFKD", text.translate(_TRANSLIT_TABLE))
    return decomposed.encode("ascii", "ignore").decode("ascii")


@dataclass(frozen=True)
class CleaningConfig:
    title_len_min: int = 5
    title_len_max: int = 250
    abstract_len_min: int = 50
    abstract_len_max: int = 2500
    synonym_map: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for lo, hi, name in (
            (self.title_len_min, self.title_len_max, "title"),
            (self.abstract_len_min, self.abstract_len_max, "abstract"),
        ):
            if lo <= 0 or hi <= 0 or lo >= hi:
                raise ValueError(f"{name} length bounds must be positive with min < max")
        seen_variants: set[str] = set()
        canonical_lower = {c.lower() for c in self.synonym_map}
        for canonical, variants in self.synonym_map.items():
            for variant in variants:
                lower = variant.lower()
                if lower in seen_variants:
                    raise ValueError(f"synonym variant {variant!r} appears in multiple entries")
                seen_variants.add(lower)
                # A canonical that is itself a variant of another entry would
                # make merging non-idempotent (A -> B -> C on re-clean).
                if lower in canonical_lower and lower != canonical.lower():
                    raise ValueError(
                        f"{variant!r} is both a canonical keyword and a variant of {canonical!r}"
                    )

    def variant_lookup(self) -> dict[str, str]:
        """lowercase variant -> canonical form."""
        lookup: dict[str, str] = {}
        for canonical, variants in self.synonym_map.items():
            for variant in variants:
                lookup[variant.lower()] = canonical
        return lookup


def config_from_dict(obj: dict) -> CleaningConfig:
    synonyms = {k: tuple(v) for k, v in (obj.get("synonym_map") or {}).items()}
    return CleaningConfig(
        title_len_min=obj.get("title_len_min", 5),
        title_len_max=obj.get("title_len_max", 250),
        abstract_len_min=obj.get("abstract_len_min", 50),
        abstract_len_max=obj.get("abstract_len_max", 2500),
        synonym_map=synonyms,
    )


def dedupe_and_merge_keywords(
    keywords: Iterable[str], synonym_lookup: dict[str, str]
) -> list[str]:
    """Replace synonym variants by their canonical form, then de-duplicate
    by lowercase form, keeping first-occurrence order."""
    out: list[str] = []
    seen: set[str] = set()
    for keyword in keywords:
        canonical = synonym_lookup.get(keyword.lower(), keyword)
        lower = canonical.lower()
        if lower not in seen:
            seen.add(lower)
            out.append(canonical)
    return out


def retention_decision(
    title: str | None,
    authors: list[str] | None,
    abstract: str | None,
    config: CleaningConfig,
) -> tuple[str, str] | None:
    """None to keep, else (category, field) explaining the drop.

    Length bounds are strict on the drop side: lengths exactly at the
    configured min/max are retained.
    """
    if not title:
        return (DROP_NULL, "title")
    if not authors:
        return (DROP_NULL, "authors")
    if abstract is None or abstract == "":
        return (DROP_NULL, "abstract")
    if len(title) < config.title_len_min or len(title) > config.title_len_max:
        return (DROP_LENGTH, "title")
    if len(abstract) < config.abstract_len_min or len(abstract) > config.abstract_len_max:
        return (DROP_LENGTH, "abstract")
    return None


@dataclass
class CleanReport:
    input_count: int = 0
    output_count: int = 0
    dropped_null: int = 0
    dropped_length: int = 0
    keywords_merged: int = 0

    def to_json_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "output_count": self.output_count,
            "dropped_null": self.dropped_null,
            "dropped_length": self.dropped_length,
            "keywords_merged": self.keywords_merged,
        }


def clean_corpus(
    records: Iterable[AugmentedRecord], config: CleaningConfig
) -> tuple[list[PaperRecord], CleanReport]:
    """Normalize, merge keywords, and apply retention over a record stream."""
    lookup = config.variant_lookup()
    report = CleanReport()
    kept: list[PaperRecord] = []
    for record in records:
        report.input_count += 1
        raw = record.raw
        title = normalize_ascii(raw.title) if raw.title is not None else None
        authors = [a for a in (normalize_ascii(name) for name in raw.authors or []) if a]
        source = normalize_ascii(raw.source)
        abstract = normalize_ascii(record.abstract) if record.abstract is not None else None
        keywords_in = [
            k for k in (normalize_ascii(kw) for kw in record.keywords or []) if k
        ]
        keywords = dedupe_and_merge_keywords(keywords_in, lookup)

        decision = retention_decision(title, authors, abstract, config)
        if decision is not None:
            category, _field = decision
            if category == DROP_NULL:
                report.dropped_null += 1
            else:
                report.dropped_length += 1
            continue

        report.keywords_merged += len(keywords_in) - len(keywords)
        report.output_count += 1
        kept.append(
            PaperRecord(
                id=raw.id if raw.id is not None else report.input_count - 1,
                title=title or "",
                authors=authors,
                source=source,
                year=raw.year,
                url=raw.url,
                abstract=abstract if abstract is not None else "",
                keywords=keywords,
                citation_count=record.citation_count,
            )
        )
    assert report.input_count == report.output_count + report.dropped_null + report.dropped_length
    return kept, report
