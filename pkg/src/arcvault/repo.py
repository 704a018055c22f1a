"""Repository layout and the relational index.

A repository is a directory holding exactly two kinds of state:

    <root>/backpack.db        SQLite index, tables `artifact` and `tag`
    <root>/gallery/<hash>.*   blob and miniature files

Both tables keep one row per archiving attempt, so a hash may appear with
several time points. All reads work the same against a local root or a
cached remote index; writes exist only on local repositories and go through
a repository-wide advisory writer lock.
"""

from __future__ import annotations

import fcntl
import os
import shutil
import sqlite3
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import Busy, IoError, NotARepo, NotFound, RepoConflict
from .envelope import HEX_HASH_RE
from .tags import is_well_formed, parse_ts

DB_NAME = "backpack.db"
GALLERY_DIR = "gallery"

_SCHEMA = (
    "CREATE TABLE IF NOT EXISTS artifact (md5hash TEXT, name TEXT, createdDate TEXT)",
    "CREATE TABLE IF NOT EXISTS tag (artifact TEXT, tag TEXT, createdDate TEXT)",
    "CREATE INDEX IF NOT EXISTS idx_artifact_hash ON artifact (md5hash)",
    "CREATE INDEX IF NOT EXISTS idx_tag_artifact ON tag (artifact)",
    "CREATE INDEX IF NOT EXISTS idx_tag_tag ON tag (tag)",
)

_LOCK_POLL_SECONDS = 0.05


@dataclass(frozen=True)
class ArtifactRow:
    md5hash: str
    name: str
    created_date: str


@dataclass(frozen=True)
class TagRecord:
    artifact: str
    tag: str
    created_date: str


@dataclass(frozen=True)
class RepoSummary:
    artifact_count: int
    dataset_count: int
    counts_by_class: dict[str, int]
    saves_per_day: dict[str, int]

    def to_json_obj(self) -> dict:
        return {
            "artifactCount": self.artifact_count,
            "datasetCount": self.dataset_count,
            "countsByClass": dict(self.counts_by_class),
            "savesPerDay": dict(self.saves_per_day),
        }


@dataclass(frozen=True)
class IntegrityReport:
    orphan_files: tuple[str, ...]
    dangling_blobs: tuple[tuple[str, str], ...]  # (hash, expected filename)
    orphan_tags: tuple[TagRecord, ...]
    malformed_tags: tuple[TagRecord, ...]

    @property
    def is_clean(self) -> bool:
        return not (
            self.orphan_files or self.dangling_blobs or self.orphan_tags or self.malformed_tags
        )

    def to_json_obj(self) -> dict:
        return {
            "orphanFiles": list(self.orphan_files),
            "danglingBlobs": [list(item) for item in self.dangling_blobs],
            "orphanTags": [[t.artifact, t.tag, t.created_date] for t in self.orphan_tags],
            "malformedTags": [[t.artifact, t.tag, t.created_date] for t in self.malformed_tags],
            "clean": self.is_clean,
        }


class IndexReader:
    """Read-side API shared by local repositories and cached remote views."""

    is_local = False

    @property
    def db_path(self) -> Path:
        raise NotImplementedError

    def blob_path(self, filename: str) -> Path:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def _connect_ro(self) -> sqlite3.Connection:
        conn = sqlite3.connect(f"file:{self.db_path}?mode=ro", uri=True, timeout=30)
        conn.row_factory = sqlite3.Row
        return conn

    def artifact_rows(self) -> list[ArtifactRow]:
        with self._connect_ro() as conn:
            rows = conn.execute(
                "SELECT md5hash, name, createdDate FROM artifact ORDER BY createdDate, rowid"
            ).fetchall()
        return [ArtifactRow(r["md5hash"], r["name"], r["createdDate"]) for r in rows]

    def tag_rows(self) -> list[TagRecord]:
        with self._connect_ro() as conn:
            rows = conn.execute(
                "SELECT artifact, tag, createdDate FROM tag ORDER BY createdDate, rowid"
            ).fetchall()
        return [TagRecord(r["artifact"], r["tag"], r["createdDate"]) for r in rows]

    def tags_for(self, md5hash: str) -> list[TagRecord]:
        with self._connect_ro() as conn:
            rows = conn.execute(
                "SELECT artifact, tag, createdDate FROM tag WHERE artifact = ? "
                "ORDER BY createdDate, rowid",
                (md5hash,),
            ).fetchall()
        return [TagRecord(r["artifact"], r["tag"], r["createdDate"]) for r in rows]

    def has_artifact(self, md5hash: str) -> bool:
        with self._connect_ro() as conn:
            row = conn.execute(
                "SELECT 1 FROM artifact WHERE md5hash = ? LIMIT 1", (md5hash,)
            ).fetchone()
        return row is not None

    def artifact_hashes(self) -> list[str]:
        """Distinct hashes in first-save order."""
        with self._connect_ro() as conn:
            rows = conn.execute(
                "SELECT md5hash FROM artifact GROUP BY md5hash ORDER BY MIN(rowid)"
            ).fetchall()
        return [r["md5hash"] for r in rows]

    def hashes_with_prefix(self, prefix: str) -> list[str]:
        with self._connect_ro() as conn:
            rows = conn.execute(
                "SELECT DISTINCT md5hash FROM artifact "
                "WHERE md5hash >= ? AND md5hash < ? ORDER BY md5hash",
                (prefix, prefix + "g"),  # 'g' sorts just past 'f' in hex
            ).fetchall()
        return [r["md5hash"] for r in rows]

    def formats_for(self, md5hash: str) -> list[str]:
        seen: list[str] = []
        for record in self.tags_for(md5hash):
            key, _, value = record.tag.partition(":")
            if key == "format" and value not in seen:
                seen.append(value)
        return seen

    def name_for(self, md5hash: str) -> str | None:
        names = [t.tag.partition(":")[2] for t in self.tags_for(md5hash) if t.tag.startswith("name:")]
        return names[-1] if names else None

    def latest_save_date(self, md5hash: str) -> str | None:
        with self._connect_ro() as conn:
            row = conn.execute(
                "SELECT MAX(createdDate) AS d FROM artifact WHERE md5hash = ?", (md5hash,)
            ).fetchone()
        return row["d"] if row else None


class Repository(IndexReader):
    """Local read-write repository rooted at a directory."""

    is_local = True

    def __init__(self, root: str | Path):
        self.root = Path(root).resolve()
        self._db_path = self.root / DB_NAME
        self.gallery = self.root / GALLERY_DIR
        if not self._db_path.is_file() or not self.gallery.is_dir():
            raise NotARepo(f"not a repository: {self.root}")
        if not _has_schema(self._db_path):
            raise NotARepo(f"index file lacks the repository schema: {self._db_path}")

    @property
    def db_path(self) -> Path:
        return self._db_path

    def describe(self) -> str:
        return str(self.root)

    def blob_path(self, filename: str) -> Path:
        path = self.gallery / filename
        if not path.is_file():
            raise NotFound(f"no such gallery file: {filename}")
        return path

    def gallery_files(self, md5hash: str) -> list[Path]:
        return sorted(self.gallery.glob(f"{md5hash}.*"))

    # -- writing ------------------------------------------------------------

    def write_lock(self, timeout: float = 10.0):
        return _WriterLock(self._db_path, timeout)

    def _connect_rw(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self._db_path, timeout=30)
        conn.row_factory = sqlite3.Row
        return conn

    def write_blob(self, filename: str, data: bytes, overwrite: bool = False) -> Path:
        """Atomically place a fully-written, fsynced file into the gallery."""
        target = self.gallery / filename
        if target.exists() and not overwrite:
            return target
        fd, tmp = tempfile.mkstemp(prefix=".blob-", dir=self.root)
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        dir_fd = os.open(self.gallery, os.O_RDONLY)
        try:
            os.fsync(dir_fd)
        finally:
            os.close(dir_fd)
        return target

    @staticmethod
    def insert_artifact_row(conn: sqlite3.Connection, md5hash: str, name: str, ts: str) -> None:
        conn.execute(
            "INSERT INTO artifact (md5hash, name, createdDate) VALUES (?, ?, ?)",
            (md5hash, name, ts),
        )

    @staticmethod
    def insert_tag_row(conn: sqlite3.Connection, md5hash: str, tag: str, ts: str) -> None:
        conn.execute(
            "INSERT INTO tag (artifact, tag, createdDate) VALUES (?, ?, ?)",
            (md5hash, tag, ts),
        )

    def delete_hash_rows(self, conn: sqlite3.Connection, md5hash: str) -> None:
        conn.execute("DELETE FROM tag WHERE artifact = ?", (md5hash,))
        conn.execute("DELETE FROM artifact WHERE md5hash = ?", (md5hash,))

    def delete_gallery_files(self, md5hash: str) -> None:
        for path in self.gallery_files(md5hash):
            path.unlink()


class _WriterLock:
    """Advisory flock on the index file; at most one writer per repository."""

    def __init__(self, db_path: Path, timeout: float):
        self._db_path = db_path
        self._timeout = timeout
        self._handle = None

    def __enter__(self):
        deadline = time.monotonic() + self._timeout
        handle = open(self._db_path, "rb")
        while True:
            try:
                fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
                break
            except OSError:
                if time.monotonic() >= deadline:
                    handle.close()
                    raise Busy(f"writer lock busy: {self._db_path.parent}") from None
                time.sleep(_LOCK_POLL_SECONDS)
        self._handle = handle
        return self

    def __exit__(self, *exc):
        fcntl.flock(self._handle.fileno(), fcntl.LOCK_UN)
        self._handle.close()
        self._handle = None
        return False


def _has_schema(db_path: Path) -> bool:
    try:
        conn = sqlite3.connect(f"file:{db_path}?mode=ro", uri=True)
        try:
            names = {
                row[0]
                for row in conn.execute(
                    "SELECT name FROM sqlite_master WHERE type = 'table'"
                ).fetchall()
            }
        finally:
            conn.close()
    except sqlite3.DatabaseError:
        return False
    return {"artifact", "tag"} <= names


def create_repo(path: str | Path, default: bool = False) -> Repository:
    """Create (or reopen) a repository at ``path``.

    Creating over an existing repository is a no-op; anything else already
    occupying the path is refused rather than clobbered.
    """
    root = Path(path)
    db_path = root / DB_NAME
    gallery = root / GALLERY_DIR
    if root.exists():
        if not root.is_dir():
            raise RepoConflict(f"path exists and is not a directory: {root}")
        if db_path.exists():
            if not _has_schema(db_path):
                raise RepoConflict(f"existing {DB_NAME} is not a repository index: {root}")
        else:
            entries = {p.name for p in root.iterdir()}
            if entries and entries != {GALLERY_DIR}:
                raise RepoConflict(f"directory is not empty and not a repository: {root}")
            if GALLERY_DIR in entries:
                if not gallery.is_dir():
                    raise RepoConflict(f"{GALLERY_DIR!r} exists but is not a directory: {root}")
                if any(gallery.iterdir()):
                    raise RepoConflict(f"stray gallery content without an index: {root}")
    try:
        gallery.mkdir(parents=True, exist_ok=True)
        conn = sqlite3.connect(db_path)
        try:
            for statement in _SCHEMA:
                conn.execute(statement)
            conn.commit()
        finally:
            conn.close()
    except OSError as exc:
        raise IoError(f"cannot create repository at {root}: {exc}") from exc
    repo = Repository(root)
    if default:
        from . import locate

        locate.set_local_default(repo)
    return repo


def open_repo(path: str | Path) -> Repository:
    return Repository(path)


def delete_repo(path: str | Path) -> None:
    """Remove a repository directory entirely. Refuses non-repositories."""
    repo = Repository(path)  # raises NotARepo
    shutil.rmtree(repo.root)


def show_repo(locator=None, view: str = "artifacts") -> list:
    """All index rows: ``view="artifacts"`` or ``view="tags"``."""
    from .locate import resolve_reader

    reader = resolve_reader(locator)
    if view == "artifacts":
        return reader.artifact_rows()
    if view == "tags":
        return reader.tag_rows()
    raise ValueError(f"unknown view: {view!r} (expected 'artifacts' or 'tags')")


def summarize_repo(locator=None) -> RepoSummary:
    """Counts by class and saves per day, as printed by the summary command."""
    from .locate import resolve_reader

    reader = resolve_reader(locator)
    artifact_count = len(reader.artifact_hashes())
    class_members: dict[str, set[str]] = {}
    saves_per_day: dict[str, int] = {}
    for record in reader.tag_rows():
        key, _, value = record.tag.partition(":")
        if key == "class":
            class_members.setdefault(value, set()).add(record.artifact)
        elif key == "date":
            day = value[:10]
            saves_per_day[day] = saves_per_day.get(day, 0) + 1
    counts_by_class = {cls: len(members) for cls, members in class_members.items()}
    dataset_count = len(class_members.get("dataset", ()))
    return RepoSummary(
        artifact_count=artifact_count,
        dataset_count=dataset_count,
        counts_by_class=counts_by_class,
        saves_per_day=dict(sorted(saves_per_day.items())),
    )


def check_integrity(repo: Repository) -> IntegrityReport:
    """Cross-check gallery files against index rows. Report-only."""
    artifact_hashes = set()
    with repo._connect_ro() as conn:
        for row in conn.execute("SELECT DISTINCT md5hash FROM artifact"):
            artifact_hashes.add(row[0])

    files_by_hash: dict[str, set[str]] = {}
    orphan_files = []
    for path in sorted(repo.gallery.iterdir()):
        stem, _, ext = path.name.partition(".")
        if not ext or not HEX_HASH_RE.match(stem) or stem not in artifact_hashes:
            orphan_files.append(path.name)
            continue
        files_by_hash.setdefault(stem, set()).add(ext)

    dangling = []
    tag_records = repo.tag_rows()
    formats: dict[str, list[str]] = {}
    for record in tag_records:
        key, _, value = record.tag.partition(":")
        if key == "format" and record.artifact in artifact_hashes:
            formats.setdefault(record.artifact, [])
            if value not in formats[record.artifact]:
                formats[record.artifact].append(value)
    for md5hash in sorted(artifact_hashes):
        present = files_by_hash.get(md5hash, set())
        if not present:
            dangling.append((md5hash, f"{md5hash}.*"))
            continue
        for fmt in formats.get(md5hash, []):
            if fmt not in present:
                dangling.append((md5hash, f"{md5hash}.{fmt}"))

    orphan_tags = tuple(t for t in tag_records if t.artifact not in artifact_hashes)
    malformed = tuple(t for t in tag_records if not is_well_formed(t.tag))
    return IntegrityReport(
        orphan_files=tuple(orphan_files),
        dangling_blobs=tuple(dangling),
        orphan_tags=orphan_tags,
        malformed_tags=malformed,
    )


def validate_created_date(text: str) -> bool:
    try:
        parse_ts(text)
        return True
    except ValueError:
        return False


__all__ = [
    "ArtifactRow",
    "TagRecord",
    "RepoSummary",
    "IntegrityReport",
    "IndexReader",
    "Repository",
    "create_repo",
    "open_repo",
    "delete_repo",
    "show_repo",
    "summarize_repo",
    "check_integrity",
    "DB_NAME",
    "GALLERY_DIR",
]
