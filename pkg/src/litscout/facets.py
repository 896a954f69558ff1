"""Corpus filtering and facet summaries for the meta view.

Filters are conjunctive: a record passes only if it passes every
predicate. Facet summaries are multiset counts over the filtered subset,
sorted by (count desc, value asc) so responses are deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .records import PaperRecord

QUANTITATIVE_COLUMNS = ("year", "citation_count")
NOMINAL_COLUMNS = ("source", "authors", "keywords")
FACETS = ("keywords", "authors", "source", "year")


class FilterError(Exception):
    pass


class UnknownColumnError(FilterError):
    def __init__(self, name: str):
        super().__init__(f"unknown filter column: {name!r}")
        self.name = name


class MalformedFilterError(FilterError):
    pass


@dataclass
class FilterSpec:
    """Conjunctive per-column predicates plus a global substring search."""

    ranges: dict[str, tuple[float | None, float | None]] = field(default_factory=dict)
    values: dict[str, set[str]] = field(default_factory=dict)
    query: str | None = None

    def is_empty(self) -> bool:
        return not self.ranges and not self.values and not self.query

    @classmethod
    def parse(cls, filters: Sequence[str], query: str | None = None) -> "FilterSpec":
        """Parse ``column:spec`` filter expressions.

        Quantitative columns take an inclusive range "lo..hi" (either side
        may be empty); nominal columns take a "v1|v2|..." value set.
        Repeated filters on one column intersect.
        """
        spec = cls(query=query if query else None)
        for expression in filters:
            if ":" not in expression:
                raise MalformedFilterError(f"expected 'column:spec', got {expression!r}")
            column, _, body = expression.partition(":")
            column = column.strip().lower()
            if column in QUANTITATIVE_COLUMNS:
                if ".." not in body:
                    raise MalformedFilterError(f"{column}: expected 'lo..hi', got {body!r}")
                lo_text, _, hi_text = body.partition("..")
                try:
                    lo = float(lo_text) if lo_text.strip() else None
                    hi = float(hi_text) if hi_text.strip() else None
                except ValueError:
                    raise MalformedFilterError(f"{column}: non-numeric bound in {body!r}") from None
                prev = spec.ranges.get(column, (None, None))
                lo = prev[0] if lo is None else (lo if prev[0] is None else max(prev[0], lo))
                hi = prev[1] if hi is None else (hi if prev[1] is None else min(prev[1], hi))
                spec.ranges[column] = (lo, hi)
            elif column in NOMINAL_COLUMNS:
                values = {v for v in (piece.strip() for piece in body.split("|")) if v}
                if not values:
                    raise MalformedFilterError(f"{column}: empty value set")
                if column in spec.values:
                    spec.values[column] &= values
                else:
                    spec.values[column] = values
            else:
                raise UnknownColumnError(column)
        return spec

    def matches(self, record: PaperRecord) -> bool:
        for column, (lo, hi) in self.ranges.items():
            value = record.year if column == "year" else record.citation_count
            if value is None:
                return False
            if lo is not None and value < lo:
                return False
            if hi is not None and value > hi:
                return False
        for column, wanted in self.values.items():
            if column == "source":
                if record.source not in wanted:
                    return False
            elif column == "authors":
                if not wanted.intersection(record.authors):
                    return False
            else:
                if not wanted.intersection(record.keywords):
                    return False
        if self.query:
            needle = self.query.lower()
            haystack = "\x1f".join(
                [record.title, record.abstract, *record.authors, *record.keywords]
            ).lower()
            if needle not in haystack:
                return False
        return True


def apply_filters(corpus: Iterable[PaperRecord], spec: FilterSpec) -> list[int]:
    """Ids of records passing every predicate, ascending. Empty spec keeps all."""
    return sorted(record.id for record in corpus if spec.matches(record))


@dataclass
class FacetSummary:
    facet: str
    entries: list[tuple[str | int, int]]
    distinct_count: int

    def to_json_dict(self) -> dict:
        return {
            "facet": self.facet,
            "entries": [[value, count] for value, count in self.entries],
            "distinct_count": self.distinct_count,
        }


def _sorted_entries(counter: Counter) -> list[tuple[str | int, int]]:
    return sorted(counter.items(), key=lambda item: (-item[1], item[0]))


def summarize(
    subset_ids: Iterable[int], corpus_by_id: dict[int, PaperRecord]
) -> dict[str, FacetSummary]:
    """Keyword/author/source/year count summaries over a corpus subset.

    List-valued facets count each distinct value once per record.
    """
    keywords: Counter = Counter()
    authors: Counter = Counter()
    sources: Counter = Counter()
    years: Counter = Counter()
    for paper_id in subset_ids:
        record = corpus_by_id[paper_id]
        keywords.update(set(record.keywords))
        authors.update(set(record.authors))
        sources[record.source] += 1
        years[record.year] += 1
    counters = {"keywords": keywords, "authors": authors, "source": sources, "year": years}
    return {
        facet: FacetSummary(
            facet=facet,
            entries=_sorted_entries(counter),
            distinct_count=len(counter),
        )
        for facet, counter in counters.items()
    }
