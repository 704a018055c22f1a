"""Hooks for embedding in reports, and the markdown gallery."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import IoError, NotFound
from .locate import resolve_reader
from .remote import RemoteRepository, remote_hook
from .search import Address

GALLERY_TITLE = "# Artifact gallery"


@dataclass(frozen=True)
class Hook:
    """One-line retrieval instruction, plus a clickable blob URL when remote."""

    address: str
    url: str | None = None

    @property
    def command(self) -> str:
        return f"arcvault read {self.address}"


def _primary_blob_name(reader, md5hash: str) -> str | None:
    for fmt in reader.formats_for(md5hash):
        if fmt in ("csv", "json", "bin"):
            return f"{md5hash}.{fmt}"
    return None


def render_hook(locator, md5hash: str) -> Hook:
    """Hook text for one artifact: bare hash locally, segments/hash remotely."""
    reader = resolve_reader(locator)
    if not reader.has_artifact(md5hash):
        raise NotFound(f"no artifact {md5hash} in {reader.describe()}")
    if isinstance(reader, RemoteRepository):
        segments = reader.locator.address_segments
        if len(segments) == 1 and "://" in segments[0]:
            address = Address(repo_path=(), hash_prefix=md5hash, url_base=segments[0])
        else:
            address = Address(repo_path=segments, hash_prefix=md5hash)
        url = None
        blob = _primary_blob_name(reader, md5hash)
        if blob is not None:
            url = remote_hook(reader.locator, f"gallery/{blob}")
        return Hook(address=address.render(), url=url)
    return Hook(address=md5hash)


def _miniature_block(reader, md5hash: str, out_dir: Path) -> list[str]:
    formats = reader.formats_for(md5hash)
    if "png" in formats:
        if isinstance(reader, RemoteRepository):
            target = remote_hook(reader.locator, f"gallery/{md5hash}.png")
        else:
            target = os.path.relpath(reader.blob_path(f"{md5hash}.png"), out_dir)
        return [f"![miniature of {md5hash}]({target})", ""]
    if "txt" in formats:
        try:
            text = reader.blob_path(f"{md5hash}.txt").read_text(encoding="utf-8")
        except (NotFound, OSError):
            return []
        return ["```", text.rstrip("\n"), "```", ""]
    return []


def create_md_gallery(
    locator,
    out: str | Path,
    add_miniature: bool = True,
    add_tags: bool = True,
) -> None:
    """One markdown section per distinct artifact, newest first."""
    reader = resolve_reader(locator)
    out = Path(out)
    hashes = reader.artifact_hashes()
    hashes.sort(key=lambda h: (reader.latest_save_date(h) or "", h), reverse=True)
    lines = [GALLERY_TITLE, ""]
    for md5hash in hashes:
        hook = render_hook(reader, md5hash)
        lines.append(f"## {md5hash}")
        lines.append("")
        lines.append(f"`{hook.command}`")
        if hook.url:
            lines.append("")
            lines.append(f"[blob]({hook.url})")
        lines.append("")
        if add_miniature:
            lines += _miniature_block(reader, md5hash, out.parent.resolve())
        if add_tags:
            seen = []
            for record in reader.tags_for(md5hash):
                if record.tag not in seen:
                    seen.append(record.tag)
            lines += [f"- `{tag}`" for tag in seen]
            lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    try:
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write gallery {out}: {exc}") from exc
