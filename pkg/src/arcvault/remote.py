"""Read-only repositories behind static HTTP hosting.

A remote repository is any host that serves ``backpack.db`` and
``gallery/<file>`` as plain files over GET. URL construction goes through a
template with ``{path}`` plus arbitrary parameter placeholders, so adding a
new hosting provider means adding a template, nothing more.

The index is downloaded whole into a local cache (SQLite files cannot be
queried over plain GET) and refreshed when older than the TTL; blobs are
content-addressed, so once fetched they are cached for good. Nothing here
ever issues anything but GET.
"""

from __future__ import annotations

import re
import shutil
import sqlite3
import tempfile
import time
import urllib.error
import urllib.request
import zipfile
from dataclasses import dataclass
from pathlib import Path

from .envelope import compute_hash
from .errors import CorruptRemoteIndex, IoError, MalformedTemplate, RemoteUnavailable
from .repo import DB_NAME, GALLERY_DIR, IndexReader, Repository

DEFAULT_TTL_SECONDS = 300
DEFAULT_BRANCH = "master"

GITHUB_TEMPLATE = "https://raw.githubusercontent.com/{user}/{repo}/{branch}/{subdir}/{path}"
BITBUCKET_TEMPLATE = "https://bitbucket.org/{user}/{repo}/raw/{branch}/{subdir}/{path}"

_PLACEHOLDER_RE = re.compile(r"\{([a-zA-Z_][a-zA-Z0-9_]*)\}")

_HTTP_TIMEOUT = 30


def default_cache_root() -> Path:
    import os

    override = os.environ.get("ARCVAULT_CACHE")
    if override:
        return Path(override)
    return Path.home() / ".cache" / "arcvault"


@dataclass(frozen=True)
class RemoteLocator:
    """Address of a static-file remote plus its cache policy.

    ``address_segments`` is the compact spelling used in hooks and ``aread``
    addresses (e.g. ``user/repo`` or ``user/repo/subdir``; a bare base URL
    for raw hosts).
    """

    template: str
    params: tuple[tuple[str, str], ...] = ()
    address_segments: tuple[str, ...] = ()
    cache_dir: Path | None = None
    cache_ttl_seconds: int = DEFAULT_TTL_SECONDS

    def hook_url(self, relpath: str) -> str:
        return remote_hook(self, relpath)

    def cache_key(self) -> str:
        return compute_hash(self.hook_url("").encode("utf-8"))[:16]


def github_remote(
    user: str,
    repo: str,
    branch: str = DEFAULT_BRANCH,
    subdir: str = "",
    **kwargs,
) -> RemoteLocator:
    segments = (user, repo) + ((subdir,) if subdir else ())
    return RemoteLocator(
        template=GITHUB_TEMPLATE,
        params=(("user", user), ("repo", repo), ("branch", branch), ("subdir", subdir)),
        address_segments=segments,
        **kwargs,
    )


def bitbucket_remote(
    user: str,
    repo: str,
    branch: str = DEFAULT_BRANCH,
    subdir: str = "",
    **kwargs,
) -> RemoteLocator:
    segments = (user, repo) + ((subdir,) if subdir else ())
    return RemoteLocator(
        template=BITBUCKET_TEMPLATE,
        params=(("user", user), ("repo", repo), ("branch", branch), ("subdir", subdir)),
        address_segments=segments,
        **kwargs,
    )


def url_remote(base: str, **kwargs) -> RemoteLocator:
    base = base.rstrip("/")
    return RemoteLocator(
        template=base + "/{path}",
        params=(),
        address_segments=(base,),
        **kwargs,
    )


def remote_hook(locator: RemoteLocator, relpath: str) -> str:
    """Render the fetchable URL for a repository-relative path. No network."""
    values = dict(locator.params)
    values["path"] = relpath
    if "{path}" not in locator.template:
        raise MalformedTemplate(f"template lacks a {{path}} placeholder: {locator.template}")
    missing = [name for name in _PLACEHOLDER_RE.findall(locator.template) if name not in values]
    if missing:
        raise MalformedTemplate(f"template parameters without values: {', '.join(missing)}")
    url = locator.template.format(**values)
    scheme, sep, rest = url.partition("://")
    if not sep:
        raise MalformedTemplate(f"rendered URL has no scheme: {url}")
    while "//" in rest:
        rest = rest.replace("//", "/")  # collapse empty segments (e.g. blank subdir)
    return scheme + sep + rest.rstrip("/") if not relpath else scheme + sep + rest


def _http_get(url: str) -> bytes:
    request = urllib.request.Request(url, headers={"User-Agent": "arcvault/0.1"}, method="GET")
    try:
        with urllib.request.urlopen(request, timeout=_HTTP_TIMEOUT) as response:
            return response.read()
    except urllib.error.HTTPError as exc:
        raise RemoteUnavailable(f"GET {url} -> HTTP {exc.code}") from exc
    except urllib.error.URLError as exc:
        raise RemoteUnavailable(f"GET {url} failed: {exc.reason}") from exc


def _atomic_write(target: Path, data: bytes) -> None:
    target.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=target.parent, delete=False) as handle:
        handle.write(data)
        tmp = handle.name
    Path(tmp).replace(target)


class RemoteRepository(IndexReader):
    """Read-only view of a remote repository, backed by the local cache."""

    is_local = False

    def __init__(self, locator: RemoteLocator):
        self.locator = locator
        cache_root = locator.cache_dir or default_cache_root()
        self.cache_root = Path(cache_root) / locator.cache_key()

    @property
    def db_path(self) -> Path:
        self.refresh_index()
        return self.cache_root / DB_NAME

    def describe(self) -> str:
        return "/".join(self.locator.address_segments) or self.locator.template

    def refresh_index(self, force: bool = False) -> Path:
        """Download ``backpack.db`` unless the cached copy is younger than the TTL."""
        cached = self.cache_root / DB_NAME
        if not force and cached.is_file():
            age = time.time() - cached.stat().st_mtime
            if age < self.locator.cache_ttl_seconds:
                return cached
        data = _http_get(remote_hook(self.locator, DB_NAME))
        if not _looks_like_index(data):
            raise CorruptRemoteIndex(f"{self.describe()}: fetched index is not a repository index")
        _atomic_write(cached, data)
        return cached

    def blob_path(self, filename: str) -> Path:
        cached = self.cache_root / GALLERY_DIR / filename
        if cached.is_file():
            return cached
        data = _http_get(remote_hook(self.locator, f"{GALLERY_DIR}/{filename}"))
        _atomic_write(cached, data)
        return cached


def _looks_like_index(data: bytes) -> bool:
    if not data.startswith(b"SQLite format 3\x00"):
        return False
    with tempfile.NamedTemporaryFile(suffix=".db", delete=False) as handle:
        handle.write(data)
        tmp = Path(handle.name)
    try:
        conn = sqlite3.connect(f"file:{tmp}?mode=ro", uri=True)
        try:
            names = {
                row[0]
                for row in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")
            }
        finally:
            conn.close()
    except sqlite3.DatabaseError:
        return False
    finally:
        tmp.unlink(missing_ok=True)
    return {"artifact", "tag"} <= names


def fetch_remote_index(locator: RemoteLocator) -> RemoteRepository:
    """Materialize a queryable read-only view; downloads the index if stale."""
    view = RemoteRepository(locator)
    view.refresh_index()
    return view


@dataclass(frozen=True)
class CopyResult:
    copied: tuple[str, ...]
    missing: tuple[str, ...]

    @property
    def count(self) -> int:
        return len(self.copied)


def copy_artifacts(source, dest: Repository, md5hashes) -> CopyResult:
    """Copy blobs and ALL their index rows (timestamps preserved) into ``dest``.

    Session manifests linked from any copied artifact come along
    transitively. Unknown hashes are reported, not fatal.
    """
    from .locate import resolve_reader

    reader = resolve_reader(source)
    requested = list(md5hashes)
    missing = [h for h in requested if not reader.has_artifact(h)]
    queue = [h for h in requested if reader.has_artifact(h)]
    to_copy: list[str] = []
    while queue:
        md5hash = queue.pop(0)
        if md5hash in to_copy:
            continue
        to_copy.append(md5hash)
        for record in reader.tags_for(md5hash):
            key, _, value = record.tag.partition(":")
            if key == "session_info" and reader.has_artifact(value) and value not in to_copy:
                queue.append(value)

    if not to_copy:
        return CopyResult(copied=(), missing=tuple(missing))

    with dest.write_lock():
        for md5hash in to_copy:
            for fmt in reader.formats_for(md5hash):
                filename = f"{md5hash}.{fmt}"
                target = dest.gallery / filename
                if target.exists():
                    continue
                dest.write_blob(filename, reader.blob_path(filename).read_bytes())
        conn = dest._connect_rw()
        try:
            conn.execute("BEGIN")
            for md5hash in to_copy:
                have_rows = {
                    (r["md5hash"], r["name"], r["createdDate"])
                    for r in conn.execute(
                        "SELECT md5hash, name, createdDate FROM artifact WHERE md5hash = ?",
                        (md5hash,),
                    )
                }
                have_tags = {
                    (r["artifact"], r["tag"], r["createdDate"])
                    for r in conn.execute(
                        "SELECT artifact, tag, createdDate FROM tag WHERE artifact = ?",
                        (md5hash,),
                    )
                }
                with reader._connect_ro() as src_conn:
                    src_rows = src_conn.execute(
                        "SELECT md5hash, name, createdDate FROM artifact "
                        "WHERE md5hash = ? ORDER BY rowid",
                        (md5hash,),
                    ).fetchall()
                    src_tags = src_conn.execute(
                        "SELECT artifact, tag, createdDate FROM tag "
                        "WHERE artifact = ? ORDER BY rowid",
                        (md5hash,),
                    ).fetchall()
                for row in src_rows:
                    key = (row["md5hash"], row["name"], row["createdDate"])
                    if key not in have_rows:
                        dest.insert_artifact_row(conn, *key)
                for row in src_tags:
                    key = (row["artifact"], row["tag"], row["createdDate"])
                    if key not in have_tags:
                        dest.insert_tag_row(conn, key[0], key[1], key[2])
            conn.commit()
        finally:
            conn.close()
    copied = [h for h in requested if h in to_copy]
    return CopyResult(copied=tuple(copied), missing=tuple(missing))


def zip_repo(locator, dest: str | Path) -> None:
    """Bundle index plus gallery into a zip; works for local and remote sources."""
    from .locate import resolve_reader

    reader = resolve_reader(locator)
    dest = Path(dest)
    try:
        with zipfile.ZipFile(dest, "w", compression=zipfile.ZIP_DEFLATED) as archive:
            archive.write(reader.db_path, DB_NAME)
            archive.writestr(zipfile.ZipInfo(f"{GALLERY_DIR}/"), b"")
            if isinstance(reader, Repository):
                for path in sorted(reader.gallery.iterdir()):
                    archive.write(path, f"{GALLERY_DIR}/{path.name}")
            else:
                for md5hash in reader.artifact_hashes():
                    for fmt in reader.formats_for(md5hash):
                        filename = f"{md5hash}.{fmt}"
                        archive.write(reader.blob_path(filename), f"{GALLERY_DIR}/{filename}")
    except OSError as exc:
        dest.unlink(missing_ok=True)
        raise IoError(f"cannot write zip archive {dest}: {exc}") from exc


def unzip_repo(archive_path: str | Path, dest_dir: str | Path) -> Repository:
    """Extract a zip produced by zip_repo into a directory and open it."""
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(archive_path) as archive:
        archive.extractall(dest_dir)
    (dest_dir / GALLERY_DIR).mkdir(exist_ok=True)
    return Repository(dest_dir)


def mirror_to_directory(reader: IndexReader, dest_dir: str | Path) -> Repository:
    """Materialize any reader as a plain local repository tree."""
    dest_dir = Path(dest_dir)
    (dest_dir / GALLERY_DIR).mkdir(parents=True, exist_ok=True)
    shutil.copyfile(reader.db_path, dest_dir / DB_NAME)
    if isinstance(reader, Repository):
        for path in sorted(reader.gallery.iterdir()):
            shutil.copyfile(path, dest_dir / GALLERY_DIR / path.name)
    else:
        for md5hash in reader.artifact_hashes():
            for fmt in reader.formats_for(md5hash):
                filename = f"{md5hash}.{fmt}"
                shutil.copyfile(reader.blob_path(filename), dest_dir / GALLERY_DIR / filename)
    return Repository(dest_dir)
