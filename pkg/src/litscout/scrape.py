"""Publisher-page metadata scraping: abstracts, keywords, citation counts.

The network is behind a transport abstraction. FixtureTransport serves
saved pages from a directory keyed by URL hash and never touches a
socket, so the whole pipeline runs offline and deterministically;
HttpTransport is the live path. Extraction rules are per-publisher data
files (regex profiles), not code.
"""

from __future__ import annotations

import hashlib
import html
import json
import re
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Iterator
from urllib.parse import urlsplit

import requests

from .records import AugmentedRecord, RawRecord


class ScrapeError(Exception):
    pass


class FixtureMissError(ScrapeError):
    def __init__(self, url: str):
        super().__init__(f"no fixture page for {url}")
        self.url = url


class FetchTimeoutError(ScrapeError):
    def __init__(self, url: str, attempts: int):
        super().__init__(f"timeout fetching {url} after {attempts} attempts")
        self.url = url


class HttpStatusError(ScrapeError):
    def __init__(self, url: str, status: int):
        super().__init__(f"HTTP {status} for {url}")
        self.url = url
        self.status = status


class UnknownPublisherError(ScrapeError):
    def __init__(self, host: str):
        super().__init__(f"no extraction profile for host {host!r}")
        self.host = host


class ExtractionFailedError(ScrapeError):
    def __init__(self, field_name: str):
        super().__init__(f"required field {field_name!r} matched nothing")
        self.field = field_name


@dataclass(frozen=True)
class FetchPolicy:
    min_interval_ms: int = 1000
    max_retries: int = 3
    timeout_ms: int = 10_000
    user_agent: str = "litscout/0.1 (corpus curation)"

    def __post_init__(self):
        if self.min_interval_ms < 0 or self.max_retries < 0 or self.timeout_ms <= 0:
            raise ValueError("invalid fetch policy")


@dataclass
class TransportResponse:
    status: int
    body: bytes


class TransportTimeout(Exception):
    pass


def url_key(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()


class FixtureTransport:
    """Serve saved pages from a directory: index.json maps URL -> file name.

    The index's created_at timestamp doubles as the deterministic
    fetched_at value for offline runs.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        with open(self.root / "index.json", encoding="utf-8") as fh:
            index = json.load(fh)
        self.entries: dict[str, str] = index["entries"]
        self.fixed_time: str | None = index.get("created_at")

    def get(self, url: str, timeout_s: float, headers: dict[str, str]) -> TransportResponse:
        name = self.entries.get(url)
        if name is None:
            raise FixtureMissError(url)
        body = (self.root / name).read_bytes()
        return TransportResponse(status=200, body=body)

    @staticmethod
    def write_store(root: str | Path, pages: dict[str, bytes], created_at: str) -> None:
        """Build a fixture directory from url -> page bytes."""
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        entries: dict[str, str] = {}
        for url, body in pages.items():
            name = url_key(url) + ".html"
            (root / name).write_bytes(body)
            entries[url] = name
        with open(root / "index.json", "w", encoding="utf-8") as fh:
            json.dump({"created_at": created_at, "entries": entries}, fh, indent=1, sort_keys=True)
            fh.write("\n")


class HttpTransport:
    """Live transport over requests; one session, no implicit retries."""

    def __init__(self):
        self.session = requests.Session()
        self.fixed_time: str | None = None

    def get(self, url: str, timeout_s: float, headers: dict[str, str]) -> TransportResponse:
        try:
            resp = self.session.get(url, timeout=timeout_s, headers=headers)
        except requests.Timeout as exc:
            raise TransportTimeout(str(exc)) from exc
        return TransportResponse(status=resp.status_code, body=resp.content)


_RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


class Fetcher:
    """Rate-limited, retrying page fetcher over an injected transport.

    Consecutive requests to one host are spaced >= min_interval_ms apart
    (retries included). The clock and sleep functions are injectable so
    tests can assert timing without waiting.
    """

    def __init__(
        self,
        policy: FetchPolicy,
        transport,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.policy = policy
        self.transport = transport
        self.clock = clock
        self.sleep = sleep
        self.latencies: list[tuple[str, float]] = []
        self._last_request: dict[str, float] = {}

    def _wait_for_host(self, host: str) -> None:
        interval = self.policy.min_interval_ms / 1000.0
        last = self._last_request.get(host)
        if last is not None:
            remaining = last + interval - self.clock()
            if remaining > 0:
                self.sleep(remaining)
        self._last_request[host] = self.clock()

    def fetch(self, url: str) -> bytes:
        parts = urlsplit(url)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise ScrapeError(f"not an absolute http(s) url: {url!r}")
        host = parts.netloc
        headers = {"User-Agent": self.policy.user_agent}
        timeout_s = self.policy.timeout_ms / 1000.0
        attempts = self.policy.max_retries + 1
        last_status: int | None = None
        timed_out = False
        for _ in range(attempts):
            self._wait_for_host(host)
            started = self.clock()
            try:
                resp = self.transport.get(url, timeout_s, headers)
            except TransportTimeout:
                timed_out = True
                continue
            finally:
                self.latencies.append((url, self.clock() - started))
            if 200 <= resp.status < 300:
                return resp.body
            last_status = resp.status
            if resp.status not in _RETRYABLE_STATUSES:
                break
        if timed_out and last_status is None:
            raise FetchTimeoutError(url, attempts)
        raise HttpStatusError(url, last_status if last_status is not None else 0)


# ---------------------------------------------------------------------------
# Declarative extraction profiles
# ---------------------------------------------------------------------------

_TAG_RE = re.compile(r"<[^>]+>")
_WS_RE = re.compile(r"\s+")


def _clean_fragment(fragment: str) -> str:
    """HTML fragment -> plain text: drop tags, unescape, collapse whitespace."""
    return _WS_RE.sub(" ", html.unescape(_TAG_RE.sub(" ", fragment))).strip()


@dataclass
class PageMetadata:
    abstract: str | None = None
    keywords: list[str] | None = None
    citation_count: int | None = None

    def all_absent(self) -> bool:
        return self.abstract is None and self.keywords is None and self.citation_count is None


@dataclass
class PublisherProfile:
    """Regex extraction rules for one publisher's page markup."""

    name: str
    hosts: tuple[str, ...]
    abstract_patterns: tuple[str, ...] = ()
    keyword_region: str | None = None
    keyword_item: str | None = None
    citation_patterns: tuple[str, ...] = ()
    required: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, obj: dict) -> "PublisherProfile":
        fields = obj.get("fields", {})
        abstract = fields.get("abstract", {})
        keywords = fields.get("keywords", {})
        citations = fields.get("citation_count", {})
        return cls(
            name=obj["name"],
            hosts=tuple(obj["hosts"]),
            abstract_patterns=tuple(abstract.get("patterns", ())),
            keyword_region=keywords.get("region"),
            keyword_item=keywords.get("item"),
            citation_patterns=tuple(citations.get("patterns", ())),
            required=tuple(obj.get("required", ())),
        )

    def matches_host(self, host: str) -> bool:
        host = host.lower()
        return any(host == h or host.endswith("." + h) for h in self.hosts)


def _first_match(patterns: Iterable[str], text: str) -> str | None:
    for pattern in patterns:
        m = re.search(pattern, text, re.IGNORECASE | re.DOTALL)
        if m:
            return m.group(1)
    return None


def extract_metadata(html_bytes: bytes, profile: PublisherProfile) -> PageMetadata:
    """Pure extraction of abstract/keywords/citation count per profile rules.

    Fields whose rules match nothing come back absent (None), never as
    empty strings; fields listed in the profile's ``required`` raise.
    """
    text = html_bytes.decode("utf-8", errors="replace")
    meta = PageMetadata()

    raw_abstract = _first_match(profile.abstract_patterns, text)
    if raw_abstract is not None:
        cleaned = _clean_fragment(raw_abstract)
        meta.abstract = cleaned if cleaned else None

    if profile.keyword_item:
        region = text
        if profile.keyword_region:
            m = re.search(profile.keyword_region, text, re.IGNORECASE | re.DOTALL)
            region = m.group(1) if m else ""
        items = [
            _clean_fragment(frag)
            for frag in re.findall(profile.keyword_item, region, re.IGNORECASE | re.DOTALL)
        ]
        items = [k for k in items if k]
        meta.keywords = items if items else None

    raw_count = _first_match(profile.citation_patterns, text)
    if raw_count is not None:
        digits = re.sub(r"[^\d]", "", raw_count)
        if digits:
            count = int(digits)
            if count >= 0:
                meta.citation_count = count

    for field_name in profile.required:
        if getattr(meta, field_name) is None:
            raise ExtractionFailedError(field_name)
    return meta


class ProfileRegistry:
    """Profiles loaded from a config directory, selected by URL host."""

    def __init__(self, profiles: list[PublisherProfile]):
        self.profiles = profiles

    @classmethod
    def load_dir(cls, directory: str | Path) -> "ProfileRegistry":
        profiles = []
        for path in sorted(Path(directory).glob("*.json")):
            with open(path, encoding="utf-8") as fh:
                profiles.append(PublisherProfile.from_dict(json.load(fh)))
        return cls(profiles)

    def for_url(self, url: str) -> PublisherProfile:
        host = urlsplit(url).netloc.lower()
        for profile in self.profiles:
            if profile.matches_host(host):
                return profile
        raise UnknownPublisherError(host)


# ---------------------------------------------------------------------------
# Corpus augmentation
# ---------------------------------------------------------------------------


@dataclass
class AugmentReport:
    attempted: int = 0
    failed: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)

    def record_failure(self, key: str, reason: str) -> None:
        self.failed += 1
        self.failures.append((key, reason))


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def augment_corpus(
    records: Iterable[RawRecord],
    fetcher: Fetcher,
    registry: ProfileRegistry,
    report: AugmentReport | None = None,
    now_fn: Callable[[], str] | None = None,
) -> Iterator[AugmentedRecord]:
    """Fetch and extract page metadata for every record.

    Every input record appears exactly once in the output; per-record
    failures leave the metadata absent and are tallied, never fatal.
    fetched_at comes from the transport's fixed time when it has one
    (fixture mode), so offline runs are byte-identical.
    """
    if report is None:
        report = AugmentReport()
    fixed_time = getattr(fetcher.transport, "fixed_time", None)
    stamp = now_fn or (lambda: fixed_time or _utc_now_iso())
    for record in records:
        report.attempted += 1
        meta = PageMetadata()
        fetched_at = None
        if not record.url:
            report.record_failure(record.dblp_key, "no url")
        else:
            try:
                profile = registry.for_url(record.url)
                body = fetcher.fetch(record.url)
                meta = extract_metadata(body, profile)
                fetched_at = stamp()
            except ScrapeError as exc:
                meta = PageMetadata()
                fetched_at = None
                report.record_failure(record.dblp_key, str(exc))
        yield AugmentedRecord(
            raw=record,
            abstract=meta.abstract,
            keywords=meta.keywords,
            citation_count=meta.citation_count,
            fetched_at=fetched_at,
        )
