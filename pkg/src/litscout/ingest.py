"""Streaming bibliography ingest: XML parse, venue filter, id assignment.

The parser handles DBLP-style XML: a flat root whose children are
publication elements (article, inproceedings, ...) that lean heavily on
named character entities declared in an external DTD. Entities are
resolved from a local table (see ``data/dblp_entities.json``) so parsing
never needs the DTD fetched from anywhere.
"""

from __future__ import annotations

import gzip
import json
import xml.etree.ElementTree as ET
import xml.parsers.expat
from collections import deque
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .records import RawRecord

# Publication kinds that carry a per-paper venue; everything else
# (www, phdthesis, proceedings volumes, ...) is rejected, not dropped.
ACCEPTED_KINDS = frozenset({"article", "inproceedings", "incollection"})

_VENUE_TAG = {"article": "journal", "inproceedings": "booktitle", "incollection": "booktitle"}

_READ_CHUNK = 1 << 16


class IngestError(Exception):
    pass


class MalformedXmlError(IngestError):
    """XML well-formedness failure; aborts the stream."""

    def __init__(self, message: str, position: tuple[int, int], emitted: int, rejected: int):
        super().__init__(f"{message} (after {emitted} records, {rejected} rejects)")
        self.position = position
        self.emitted = emitted
        self.rejected = rejected


class UnresolvableEntityError(IngestError):
    """Entity reference not covered by the entity table; aborts the stream."""

    def __init__(self, name: str, position: tuple[int, int], emitted: int, rejected: int):
        super().__init__(
            f"unresolvable entity &{name}; (after {emitted} records, {rejected} rejects)"
        )
        self.name = name
        self.position = position
        self.emitted = emitted
        self.rejected = rejected


class DuplicateKeyError(IngestError):
    def __init__(self, dblp_key: str):
        super().__init__(f"duplicate dblp_key: {dblp_key!r}")
        self.dblp_key = dblp_key


@dataclass(frozen=True)
class Reject:
    """A publication element that could not become a record."""

    dblp_key: str
    reason: str


ParseEvent = Union[RawRecord, Reject]


def default_entity_table() -> dict[str, str]:
    """Named-entity replacements shipped with the package."""
    text = resources.files("litscout.data").joinpath("dblp_entities.json").read_text("utf-8")
    return json.loads(text)


def load_entity_table(path: str | Path) -> dict[str, str]:
    """Load an override entity table: JSON object of name -> replacement text."""
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    if not isinstance(table, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in table.items()
    ):
        raise IngestError(f"entity table {path}: expected a JSON object of string -> string")
    return table


class _StreamTarget:
    """Parser target that builds one depth-1 subtree at a time.

    Completed publication elements queue in ``completed``; the root element
    itself is never materialized, keeping memory constant in corpus size.
    """

    def __init__(self) -> None:
        self.depth = 0
        self.completed: deque[ET.Element] = deque()
        self._builder: ET.TreeBuilder | None = None

    def start(self, tag: str, attrib: dict) -> None:
        if self.depth == 1:
            self._builder = ET.TreeBuilder()
        if self._builder is not None:
            self._builder.start(tag, attrib)
        self.depth += 1

    def end(self, tag: str) -> None:
        self.depth -= 1
        if self._builder is None:
            return
        elem = self._builder.end(tag)
        if self.depth == 1:
            self.completed.append(elem)
            self._builder = None

    def data(self, text: str) -> None:
        if self._builder is not None:
            self._builder.data(text)

    def close(self) -> None:
        return None


def _open_source(source) -> IO[bytes]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.suffix == ".gz":
            return gzip.open(path, "rb")
        return open(path, "rb")
    return source


def _element_text(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return "".join(elem.itertext()).strip()


def _event_from_element(elem: ET.Element) -> ParseEvent:
    key = (elem.get("key") or "").strip()
    if not key:
        return Reject(dblp_key="", reason="missing key")
    if elem.tag not in ACCEPTED_KINDS:
        return Reject(dblp_key=key, reason="non-article kind")

    title = _element_text(elem.find("title"))
    if not title:
        return Reject(dblp_key=key, reason="missing title")

    source = _element_text(elem.find(_VENUE_TAG[elem.tag]))
    if not source:
        return Reject(dblp_key=key, reason="missing venue")

    year_text = _element_text(elem.find("year"))
    if not year_text:
        return Reject(dblp_key=key, reason="missing year")
    try:
        year = int(year_text)
    except ValueError:
        return Reject(dblp_key=key, reason="invalid year")

    authors = [name for name in (_element_text(a) for a in elem.findall("author")) if name]
    url = _element_text(elem.find("ee"))
    return RawRecord(dblp_key=key, title=title, authors=authors, source=source, year=year, url=url)


class _EntityMiss(Exception):
    def __init__(self, name: str):
        self.name = name


def parse_bibliography(
    source, entity_table: dict[str, str] | None = None
) -> Iterator[ParseEvent]:
    """Stream-parse DBLP-format XML into records and rejects.

    Yields one event per publication element: a RawRecord, or a Reject
    with the reason it was unusable. Raises MalformedXmlError /
    UnresolvableEntityError on fatal input problems, reporting how much
    output was produced before the abort.

    ``source`` is a path (gzip detected by .gz suffix) or a binary
    file-like object.
    """
    table = default_entity_table() if entity_table is None else entity_table
    target = _StreamTarget()
    parser = xml.parsers.expat.ParserCreate()
    parser.buffer_text = True
    # Pretend an external DTD exists so undefined entities are "skipped"
    # (routed to our table) instead of hard errors inside expat.
    parser.UseForeignDTD(True)

    def skipped_entity(name: str, is_parameter_entity: bool) -> None:
        replacement = table.get(name)
        if replacement is None:
            raise _EntityMiss(name)
        target.data(replacement)

    parser.StartElementHandler = target.start
    parser.EndElementHandler = target.end
    parser.CharacterDataHandler = target.data
    parser.SkippedEntityHandler = skipped_entity

    emitted = 0
    rejected = 0
    stream = _open_source(source)
    close_stream = isinstance(source, (str, Path))
    try:
        while True:
            chunk = stream.read(_READ_CHUNK)
            failure: tuple[str, str, tuple[int, int]] | None = None
            try:
                parser.Parse(chunk, not chunk)
            except _EntityMiss as exc:
                position = (parser.CurrentLineNumber, parser.CurrentColumnNumber)
                failure = ("entity", exc.name, position)
            except xml.parsers.expat.ExpatError as exc:
                failure = ("xml", str(exc), (exc.lineno, exc.offset))
            # Deliver whatever completed before any abort, so the error's
            # partial-output count matches what the consumer saw.
            while target.completed:
                event = _event_from_element(target.completed.popleft())
                if isinstance(event, RawRecord):
                    emitted += 1
                else:
                    rejected += 1
                yield event
            if failure is not None:
                kind, detail, position = failure
                if kind == "entity":
                    raise UnresolvableEntityError(detail, position, emitted, rejected)
                raise MalformedXmlError(detail, position, emitted, rejected)
            if not chunk:
                break
    finally:
        if close_stream:
            stream.close()


def records_only(events: Iterable[ParseEvent]) -> Iterator[RawRecord]:
    for event in events:
        if isinstance(event, RawRecord):
            yield event


@dataclass(frozen=True)
class VenueFilter:
    """Which venue descriptors to keep.

    prefix mode captures DBLP's track variants ("Interact (1)", "Interact
    (2)", ...) from one base descriptor, so it is the default.
    """

    descriptors: tuple[str, ...]
    match_mode: str = "prefix"

    def __post_init__(self):
        if not self.descriptors:
            raise ValueError("VenueFilter needs at least one descriptor")
        if self.match_mode not in ("exact", "prefix"):
            raise ValueError(f"unknown match_mode: {self.match_mode!r}")

    def matches(self, source: str) -> bool:
        if self.match_mode == "exact":
            return source in self.descriptors
        return any(source.startswith(d) for d in self.descriptors)


def filter_by_venue(records: Iterable[RawRecord], venue_filter: VenueFilter) -> Iterator[RawRecord]:
    """Keep records whose source matches the filter; order preserved."""
    for record in records:
        if venue_filter.matches(record.source):
            yield record


def assign_ids(records: Iterable[RawRecord]) -> Iterator[RawRecord]:
    """Assign dense ids 0,1,2,... in emission order; dblp_key must be unique."""
    seen: set[str] = set()
    next_id = 0
    for record in records:
        if record.dblp_key in seen:
            raise DuplicateKeyError(record.dblp_key)
        seen.add(record.dblp_key)
        yield replace(record, id=next_id)
        next_id += 1


def load_venue_config(path: str | Path) -> list[str]:
    """Venue config file: a JSON array of descriptor strings."""
    with open(path, encoding="utf-8") as fh:
        venues = json.load(fh)
    if not isinstance(venues, list) or not all(isinstance(v, str) for v in venues):
        raise IngestError(f"venue config {path}: expected a JSON array of strings")
    return venues
