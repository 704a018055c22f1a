"""Pipeline recording, pedigree reconstruction and session manifests.

A recorded step saves its output and tags it with ``relationWith:<input>``
plus ``call:<text>`` in the same save event. Walking those pairs backwards
rebuilds the chain of calls that produced an artifact. Relation tags
without a call companion are data-dependency links and terminate the walk.
"""

from __future__ import annotations

import platform
import sqlite3
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .envelope import GENERIC, ArtifactEnvelope
from .errors import (
    ArcvaultError,
    CyclicProvenance,
    IoError,
    NoSessionRecorded,
    NotFound,
    UnknownInput,
)
from .locate import resolve_local, resolve_reader
from .store import SaveResult, load_one, save_artifact

LOCKFILE_HEADER = "# arcvault-lock v1"

MANIFEST_CLASS = "session_info"


@dataclass(frozen=True)
class ProvenanceStep:
    call: str
    md5hash: str


@dataclass(frozen=True)
class Pedigree:
    steps: tuple[ProvenanceStep, ...]  # root first

    def render(self) -> str:
        width = max(len(s.call) for s in self.steps)
        lines = []
        for i, step in enumerate(self.steps):
            arrow = "   " if i == 0 else "-> "
            lines.append(f"{arrow}{step.call.ljust(width)}  [{step.md5hash}]")
        return "\n".join(lines)

    def to_json_obj(self) -> list[dict]:
        return [{"call": s.call, "md5hash": s.md5hash} for s in self.steps]


def record_step(
    repo,
    input_hash: str | None,
    call: str,
    output: ArtifactEnvelope,
    user_tags=(),
    **save_kwargs,
) -> SaveResult:
    """Save ``output`` and link it to its input; the analog of a piped call.

    Chains compose by feeding the returned hash into the next step's
    ``input_hash``. A None input records a root artifact.
    """
    repo = resolve_local(repo)
    extra = tuple(user_tags)
    if input_hash is not None:
        if not repo.has_artifact(input_hash):
            raise UnknownInput(f"input hash not in repository: {input_hash}")
        extra = (f"relationWith:{input_hash}", f"call:{call}") + extra
    return save_artifact(repo, output, user_tags=extra, **save_kwargs)


def _step_sources(reader, md5hash: str) -> tuple[str, str] | None:
    """Latest (call, input) pair recorded for one artifact, if any."""
    events: dict[str, dict[str, str]] = {}
    for record in reader.tags_for(md5hash):
        key, _, value = record.tag.partition(":")
        if key in ("call", "relationWith"):
            events.setdefault(record.created_date, {})[key] = value
    paired = [
        (ts, fields) for ts, fields in events.items() if "call" in fields and "relationWith" in fields
    ]
    if not paired:
        return None
    _, fields = max(paired, key=lambda item: item[0])
    return fields["call"], fields["relationWith"]


def history(locator, md5hash: str) -> Pedigree:
    """Chain of calls leading to an artifact, root first.

    Artifacts saved outside a pipeline yield a single-entry pedigree whose
    descriptor is their name.
    """
    reader = resolve_reader(locator)
    if not reader.has_artifact(md5hash):
        raise NotFound(f"no artifact {md5hash} in {reader.describe()}")
    chain: list[ProvenanceStep] = []
    visited: set[str] = set()
    current = md5hash
    while True:
        if current in visited:
            raise CyclicProvenance(f"relation tags form a cycle at {current}")
        visited.add(current)
        source = _step_sources(reader, current)
        if source is None:
            chain.append(ProvenanceStep(reader.name_for(current) or current, current))
            break
        call, input_hash = source
        chain.append(ProvenanceStep(call, current))
        current = input_hash
    chain.reverse()
    return Pedigree(tuple(chain))


# --- session manifests ------------------------------------------------------


@dataclass(frozen=True)
class Component:
    name: str
    version: str
    date: str = ""
    source: str = ""


@dataclass(frozen=True)
class SessionManifest:
    """Environment snapshot stored as a content-addressed artifact."""

    tool_name: str
    tool_version: str
    platform: str
    components: tuple[Component, ...] = ()

    def to_json_obj(self) -> dict:
        return {
            "toolName": self.tool_name,
            "toolVersion": self.tool_version,
            "platform": self.platform,
            "components": {
                c.name: {"version": c.version, "date": c.date, "source": c.source}
                for c in self.components
            },
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SessionManifest":
        components = tuple(
            Component(name, entry.get("version", ""), entry.get("date", ""), entry.get("source", ""))
            for name, entry in sorted(obj.get("components", {}).items())
        )
        return cls(
            tool_name=obj.get("toolName", ""),
            tool_version=obj.get("toolVersion", ""),
            platform=obj.get("platform", ""),
            components=components,
        )


def default_probe() -> SessionManifest:
    """Snapshot of the running interpreter and its core components."""
    return SessionManifest(
        tool_name="arcvault",
        tool_version=__version__,
        platform=f"{platform.machine()}, {platform.system().lower()}{platform.release()}",
        components=(
            Component("python", platform.python_version(), source="builtin"),
            Component("sqlite", sqlite3.sqlite_version, source="builtin"),
        ),
    )


def capture_session_manifest(probe=None) -> SessionManifest:
    """Resolve the environment probe; deterministic for a fixed probe."""
    if probe is None:
        return default_probe()
    if isinstance(probe, SessionManifest):
        return probe
    return probe()


def manifest_envelope(manifest: SessionManifest) -> ArtifactEnvelope:
    import json

    payload = json.dumps(
        manifest.to_json_obj(), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")
    return ArtifactEnvelope(
        GENERIC, "session-manifest", payload, class_names=(MANIFEST_CLASS,)
    )


def get_session(locator, md5hash: str) -> SessionManifest:
    """Load the manifest linked from an artifact's ``session_info:`` tag."""
    import json

    reader = resolve_reader(locator)
    if not reader.has_artifact(md5hash):
        raise NotFound(f"no artifact {md5hash} in {reader.describe()}")
    links = [
        t.tag.partition(":")[2] for t in reader.tags_for(md5hash) if t.tag.startswith("session_info:")
    ]
    if not links:
        raise NoSessionRecorded(f"artifact {md5hash} carries no session_info tag")
    manifest_env = load_one(reader, links[-1])
    try:
        obj = json.loads(bytes(manifest_env.payload).decode("utf-8"))
    except (ValueError, TypeError) as exc:
        raise ArcvaultError(f"stored manifest {links[-1]} is not valid JSON") from exc
    return SessionManifest.from_json_obj(obj)


def emit_lockfile(manifest: SessionManifest, out: str | Path) -> None:
    """Write ``name==version  # source`` lines for external tooling."""
    lines = [LOCKFILE_HEADER]
    for component in manifest.components:
        line = f"{component.name}=={component.version}"
        if component.source:
            line += f"  # {component.source}"
        lines.append(line)
    try:
        Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write lockfile {out}: {exc}") from exc


def get_formats(locator, md5hash: str) -> list[str]:
    """Values of all ``format:`` tags on an artifact."""
    reader = resolve_reader(locator)
    if not reader.has_artifact(md5hash):
        raise NotFound(f"no artifact {md5hash} in {reader.describe()}")
    return reader.formats_for(md5hash)
