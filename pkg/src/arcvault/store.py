"""Saving, loading and removing artifacts.

The save chain runs in a fixed order: derive the name tag, hash the
canonical bytes and write the blob, archive dependent data (tagging the
DATA row with ``relationWith:<artifact>``), archive the session manifest
when asked, write automatic tags, then user tags verbatim, and finally the
miniature plus its format tag. Blob files hit disk (fsynced) before any
index row commits, so a crash can leave an orphan gallery file but never a
dangling index row.
"""

from __future__ import annotations

import json
from datetime import datetime
from typing import NamedTuple

from .envelope import (
    DATASET,
    GENERIC,
    LINEAR_MODEL,
    PLOT_SPEC,
    ArtifactEnvelope,
    DatasetPayload,
    LinearModelPayload,
    PlotSpecPayload,
    compute_hash,
    make_miniature,
)
from .errors import HashMismatch, InvalidPayload, NotFound
from .locate import resolve_local, resolve_reader
from .repo import IndexReader, Repository
from .tags import extract_tags, format_ts


class SaveResult(NamedTuple):
    md5hash: str
    data_md5hash: str | None = None


class _PendingArtifact(NamedTuple):
    envelope: ArtifactEnvelope
    md5hash: str
    blob: bytes
    extra_tags: tuple[str, ...]


def save_artifact(
    repo,
    envelope: ArtifactEnvelope,
    user_tags=(),
    *,
    archive_data: bool = True,
    archive_session: bool = False,
    clock: datetime | str | None = None,
    session_probe=None,
    lock_timeout: float = 10.0,
) -> SaveResult:
    """Run the save chain; returns the artifact hash and, when dependent
    data was archived, the dataset hash."""
    repo = resolve_local(repo)
    envelope.validate()
    ts = format_ts(clock)

    pending: list[_PendingArtifact] = []
    data_hash: str | None = None

    env = envelope
    if env.kind == PLOT_SPEC:
        data_env = env.data
        if data_env is not None and archive_data:
            data_blob = data_env.canonical_bytes()
            data_hash = compute_hash(data_blob)
            if env.payload.data_ref is None:
                env = env.with_data_ref(data_hash)
            elif env.payload.data_ref != data_hash:
                raise InvalidPayload(
                    "plot data_ref does not match the attached dataset "
                    f"({env.payload.data_ref} != {data_hash})"
                )
        elif env.payload.data_ref is not None and not repo.has_artifact(env.payload.data_ref):
            raise InvalidPayload(f"data_ref not present in repository: {env.payload.data_ref}")

    main_blob = env.canonical_bytes()
    main_hash = compute_hash(main_blob)

    if data_hash is not None:
        pending.append(
            _PendingArtifact(env.data, data_hash, env.data.canonical_bytes(), (f"relationWith:{main_hash}",))
        )
    pending.append(_PendingArtifact(env, main_hash, main_blob, tuple(user_tags)))

    if archive_session:
        from .provenance import capture_session_manifest, manifest_envelope

        manifest = capture_session_manifest(session_probe)
        m_env = manifest_envelope(manifest)
        m_blob = m_env.canonical_bytes()
        m_hash = compute_hash(m_blob)
        pending.insert(0, _PendingArtifact(m_env, m_hash, m_blob, ()))
        pending = [
            item
            if item.md5hash == m_hash
            else item._replace(extra_tags=item.extra_tags + (f"session_info:{m_hash}",))
            for item in pending
        ]

    with repo.write_lock(timeout=lock_timeout):
        planned: list[tuple[str, str, list[str]]] = []
        for item in pending:
            miniature = make_miniature(item.envelope)
            repo.write_blob(f"{item.md5hash}.{item.envelope.primary_format}", item.blob)
            repo.write_blob(f"{item.md5hash}.{miniature.format}", miniature.data)
            tag_list = extract_tags(item.envelope, ts)
            tag_list += [t for t in item.extra_tags]
            miniature_tag = f"format:{miniature.format}"
            if miniature_tag not in tag_list:
                tag_list.append(miniature_tag)
            deduped = list(dict.fromkeys(tag_list))
            planned.append((item.md5hash, item.envelope.name, deduped))
        conn = repo._connect_rw()
        try:
            conn.execute("BEGIN")
            for md5hash, name, tag_list in planned:
                repo.insert_artifact_row(conn, md5hash, name, ts)
                for tag in tag_list:
                    repo.insert_tag_row(conn, md5hash, tag, ts)
            conn.commit()
        finally:
            conn.close()
    return SaveResult(main_hash, data_hash)


_PRIMARY_EXTS = ("csv", "json", "bin")


def _primary_format(reader: IndexReader, md5hash: str) -> str:
    formats = reader.formats_for(md5hash)
    for fmt in formats:
        if fmt in _PRIMARY_EXTS:
            return fmt
    raise NotFound(f"no primary-format blob recorded for {md5hash}")


def _detect_json_payload(obj):
    if isinstance(obj, dict):
        if {"formula", "coefficients", "rank", "dfResidual"} <= set(obj):
            return LinearModelPayload(
                formula=obj["formula"],
                coefficients=tuple(obj["coefficients"].items()),
                rank=obj["rank"],
                df_residual=obj["dfResidual"],
            )
        if {"geometry", "labelX", "labelY"} <= set(obj):
            return PlotSpecPayload(
                geometry=obj["geometry"],
                label_x=obj.get("labelX"),
                label_y=obj.get("labelY"),
                data_ref=obj.get("dataRef"),
            )
    return None


def _envelope_from_blob(reader: IndexReader, md5hash: str, blob: bytes, fmt: str) -> ArtifactEnvelope:
    records = reader.tags_for(md5hash)
    classes = []
    for record in records:
        key, _, value = record.tag.partition(":")
        if key == "class" and value not in classes:
            classes.append(value)
    name = reader.name_for(md5hash) or md5hash
    image = None
    if "png" in reader.formats_for(md5hash):
        image = reader.blob_path(f"{md5hash}.png").read_bytes()

    if fmt == "csv":
        import csv
        import io

        rows = list(csv.reader(io.StringIO(blob.decode("utf-8"), newline="")))
        if not rows:
            raise InvalidPayload(f"stored csv blob for {md5hash} has no header row")
        header, body = rows[0], rows[1:]
        columns = tuple(
            (col, tuple(row[i] for row in body)) for i, col in enumerate(header)
        )
        payload = DatasetPayload(columns)
        kind = DATASET
    elif fmt == "json":
        payload = _detect_json_payload(json.loads(blob.decode("utf-8")))
        if payload is None:
            payload, kind = blob, GENERIC
        else:
            kind = LINEAR_MODEL if isinstance(payload, LinearModelPayload) else PLOT_SPEC
            image = image if kind == PLOT_SPEC else None
    else:
        payload, kind = blob, GENERIC

    class_names = tuple(classes) if classes and tuple(classes) != (kind,) else None
    if kind != PLOT_SPEC:
        image = None
    return ArtifactEnvelope(kind, name, payload, class_names=class_names, image=image)


def load_artifact(locator, hash_prefix: str) -> list[ArtifactEnvelope]:
    """All artifacts whose hash starts with the prefix, hash-ordered.

    Every blob is re-digested against its filename stem before it is
    returned.
    """
    if not (1 <= len(hash_prefix) <= 32) or any(c not in "0123456789abcdef" for c in hash_prefix):
        raise ValueError(f"hash prefix must be 1-32 lowercase hex chars: {hash_prefix!r}")
    reader = resolve_reader(locator)
    matches = reader.hashes_with_prefix(hash_prefix)
    if not matches:
        raise NotFound(f"not found: prefix {hash_prefix!r} matches nothing in {reader.describe()}")
    envelopes = []
    for md5hash in matches:
        fmt = _primary_format(reader, md5hash)
        blob = reader.blob_path(f"{md5hash}.{fmt}").read_bytes()
        digest = compute_hash(blob)
        if digest != md5hash:
            raise HashMismatch(f"blob {md5hash}.{fmt} digests to {digest}")
        envelopes.append(_envelope_from_blob(reader, md5hash, blob, fmt))
    return envelopes


def load_one(locator, hash_prefix: str) -> ArtifactEnvelope:
    return load_artifact(locator, hash_prefix)[0]


class RemovalResult(NamedTuple):
    removed: tuple[str, ...]
    skipped: tuple[str, ...]

    @property
    def count(self) -> int:
        return len(self.removed)


def remove_artifacts(
    repo,
    md5hashes,
    *,
    remove_orphaned_data: bool = False,
    lock_timeout: float = 10.0,
) -> RemovalResult:
    """Remove index rows, tags, blobs and miniatures for each hash.

    Unknown hashes are skipped and reported. With ``remove_orphaned_data``,
    datasets whose every ``relationWith:`` consumer disappeared go too.
    """
    repo = resolve_local(repo)
    requested = list(dict.fromkeys(md5hashes))
    with repo.write_lock(timeout=lock_timeout):
        known = [h for h in requested if repo.has_artifact(h)]
        skipped = tuple(h for h in requested if h not in known)
        doomed = list(known)
        if remove_orphaned_data:
            doomed += _orphaned_datasets(repo, set(known))
        conn = repo._connect_rw()
        try:
            conn.execute("BEGIN")
            for md5hash in doomed:
                repo.delete_hash_rows(conn, md5hash)
            conn.commit()
        finally:
            conn.close()
        for md5hash in doomed:
            repo.delete_gallery_files(md5hash)
    return RemovalResult(removed=tuple(doomed), skipped=skipped)


def _orphaned_datasets(repo: Repository, being_removed: set[str]) -> list[str]:
    """Datasets whose every data consumer sits in ``being_removed``.

    A relation tag paired with a ``call:`` tag from the same save event is a
    pipeline backlink, not a data dependency, and never marks its artifact
    as dependent data.
    """
    dataset_hashes = set()
    events: dict[tuple[str, str], dict[str, list]] = {}
    for record in repo.tag_rows():
        key, _, value = record.tag.partition(":")
        if key == "class" and value == DATASET:
            dataset_hashes.add(record.artifact)
        elif key in ("relationWith", "call"):
            event = events.setdefault((record.artifact, record.created_date), {"rel": [], "call": False})
            if key == "call":
                event["call"] = True
            else:
                event["rel"].append(value)
    consumers: dict[str, set[str]] = {}
    for (artifact, _), event in events.items():
        if event["call"] or not event["rel"]:
            continue
        consumers.setdefault(artifact, set()).update(event["rel"])
    orphans = []
    for md5hash in sorted(dataset_hashes - being_removed):
        linked = consumers.get(md5hash)
        if not linked:
            continue
        if all(c in being_removed or not repo.has_artifact(c) for c in linked):
            orphans.append(md5hash)
    return orphans
