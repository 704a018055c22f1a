"""Finding artifacts by tag and date, and the compact address grammar.

Tag patterns match by exact string equality on the full ``key:value`` text
(a trailing ``:*`` key wildcard exists as an extension for the UI). Date
patterns match artifacts whose ``date:`` tag falls inside an inclusive
calendar-day range. Patterns combine as intersection or union.
"""

from __future__ import annotations

import sqlite3
from dataclasses import dataclass
from datetime import date

from .envelope import ArtifactEnvelope
from .errors import MalformedAddress, NoDefaultRepo, NotFound
from .locate import default_local, default_remote, resolve_reader
from .remote import RemoteLocator, RemoteRepository, github_remote, url_remote

_HEX_CHARS = set("0123456789abcdef")


@dataclass(frozen=True)
class DateRange:
    """Inclusive [start, end] range of calendar days."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"date range start after end: {self.start} > {self.end}")

    @classmethod
    def parse(cls, start_text: str, end_text: str) -> "DateRange":
        return cls(date.fromisoformat(start_text), date.fromisoformat(end_text))


def _escape_like(text: str) -> str:
    return text.replace("\\", "\\\\").replace("%", "\\%").replace("_", "\\_")


def _matches_for(conn: sqlite3.Connection, pattern) -> set[str]:
    if isinstance(pattern, DateRange):
        low = f"{pattern.start.isoformat()} 00:00:00"
        high = f"{pattern.end.isoformat()} 23:59:59"
        rows = conn.execute(
            "SELECT DISTINCT artifact FROM tag WHERE tag >= 'date:' AND tag < 'date;' "
            "AND substr(tag, 6) BETWEEN ? AND ?",
            (low, high),
        ).fetchall()
        return {r[0] for r in rows}
    if not isinstance(pattern, str) or ":" not in pattern:
        raise ValueError(f"tag pattern must contain a colon: {pattern!r}")
    if pattern.endswith(":*"):
        key = pattern[:-2]
        rows = conn.execute(
            "SELECT DISTINCT artifact FROM tag WHERE tag LIKE ? ESCAPE '\\'",
            (_escape_like(key + ":") + "%",),
        ).fetchall()
        return {r[0] for r in rows}
    rows = conn.execute("SELECT DISTINCT artifact FROM tag WHERE tag = ?", (pattern,)).fetchall()
    return {r[0] for r in rows}


def search(locator=None, patterns=(), intersect: bool = True) -> list[str]:
    """Hashes of artifacts matching the patterns, sorted, no duplicates.

    ``intersect=True`` requires every pattern to match; ``False`` any.
    An empty pattern list is refused rather than matching the whole
    repository.
    """
    patterns = list(patterns) if not isinstance(patterns, (str, DateRange)) else [patterns]
    if not patterns:
        raise ValueError("search needs at least one pattern")
    reader = resolve_reader(locator)
    conn = sqlite3.connect(f"file:{reader.db_path}?mode=ro", uri=True, timeout=30)
    try:
        sets = [_matches_for(conn, p) for p in patterns]
    finally:
        conn.close()
    result = set.intersection(*sets) if intersect else set.union(*sets)
    return sorted(result)


def asearch(locator=None, patterns=()) -> dict[str, ArtifactEnvelope]:
    """Search with AND semantics and load every match, keyed by hash."""
    from .store import load_one

    reader = resolve_reader(locator)
    hashes = search(reader, patterns, intersect=True) if patterns else []
    if patterns and not hashes:
        return {}
    return {md5hash: load_one(reader, md5hash) for md5hash in hashes}


# --- compact addresses -------------------------------------------------------


@dataclass(frozen=True)
class Address:
    """Repository segments plus a hash prefix, as written in hooks."""

    repo_path: tuple[str, ...]
    hash_prefix: str
    url_base: str | None = None

    def render(self) -> str:
        if self.url_base is not None:
            return f"{self.url_base}/{self.hash_prefix}"
        return "/".join(self.repo_path + (self.hash_prefix,))


def _is_hash_prefix(segment: str) -> bool:
    return 0 < len(segment) <= 32 and set(segment) <= _HEX_CHARS


def parse_address(text: str) -> Address:
    """Split an address into repository segments and the trailing hash prefix."""
    if not text or not isinstance(text, str):
        raise MalformedAddress(f"empty address: {text!r}")
    if "://" in text:
        base, _, last = text.rpartition("/")
        if not _is_hash_prefix(last):
            raise MalformedAddress(f"address does not end in a hex segment: {text!r}")
        if "://" not in base:
            raise MalformedAddress(f"no path between host and hash: {text!r}")
        return Address(repo_path=(), hash_prefix=last, url_base=base)
    segments = [s for s in text.split("/") if s]
    if not segments:
        raise MalformedAddress(f"empty address: {text!r}")
    last = segments[-1]
    if not _is_hash_prefix(last):
        raise MalformedAddress(f"address does not end in a hex segment: {text!r}")
    return Address(repo_path=tuple(segments[:-1]), hash_prefix=last)


def locator_for_address(address: Address, branch: str | None = None) -> RemoteLocator:
    """Remote locator implied by an address with explicit repository segments."""
    if address.url_base is not None:
        return url_remote(address.url_base)
    segments = address.repo_path
    if len(segments) < 2:
        raise MalformedAddress(
            f"remote address needs user/repo segments: {'/'.join(segments) or '(none)'}"
        )
    user, repo = segments[0], segments[1]
    subdir = "/".join(segments[2:])
    kwargs = {"branch": branch} if branch else {}
    return github_remote(user, repo, subdir=subdir, **kwargs)


def aread(address_text: str, branch: str | None = None) -> list[ArtifactEnvelope]:
    """Read artifacts by compact address.

    Explicit segments name a remote repository; a bare prefix goes to the
    default local repository first, then the default remote.
    """
    from .store import load_artifact

    address = parse_address(address_text)
    if address.url_base is not None or address.repo_path:
        locator = locator_for_address(address, branch=branch)
        return load_artifact(RemoteRepository(locator), address.hash_prefix)
    local = default_local()
    if local is not None:
        try:
            return load_artifact(local, address.hash_prefix)
        except NotFound:
            pass
    remote = default_remote()
    if remote is not None:
        return load_artifact(RemoteRepository(remote), address.hash_prefix)
    if local is None:
        raise NoDefaultRepo("bare-prefix address needs a default repository")
    raise NotFound(f"not found: prefix {address.hash_prefix!r} matches nothing")
