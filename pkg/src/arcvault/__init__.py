"""arcvault: a content-addressed artifact repository.

Save typed artifacts with automatically extracted tags, search them by tag
and date, rebuild their provenance chains, and read them back from local
directories or static-HTTP remotes.
"""

__version__ = "0.1.0"

from .envelope import (
    ArtifactEnvelope,
    DatasetPayload,
    LinearModelPayload,
    Miniature,
    PlotSpecPayload,
    canonicalize,
    compute_hash,
    make_miniature,
)
from .errors import (
    ArcvaultError,
    Busy,
    CorruptRemoteIndex,
    CyclicProvenance,
    HashMismatch,
    InvalidPayload,
    IoError,
    MalformedAddress,
    MalformedTemplate,
    NoDefaultRepo,
    NoSessionRecorded,
    NotARepo,
    NotFound,
    RemoteUnavailable,
    RepoConflict,
    UnknownInput,
)
from .locate import (
    clear_defaults,
    default_local,
    default_remote,
    set_default_repo,
    set_local_default,
    set_remote_default,
)
from .provenance import (
    Component,
    Pedigree,
    ProvenanceStep,
    SessionManifest,
    capture_session_manifest,
    emit_lockfile,
    get_formats,
    get_session,
    history,
    record_step,
)
from .publish import Hook, create_md_gallery, render_hook
from .remote import (
    RemoteLocator,
    RemoteRepository,
    bitbucket_remote,
    copy_artifacts,
    fetch_remote_index,
    github_remote,
    remote_hook,
    url_remote,
    zip_repo,
)
from .repo import (
    ArtifactRow,
    IntegrityReport,
    Repository,
    RepoSummary,
    TagRecord,
    check_integrity,
    create_repo,
    delete_repo,
    open_repo,
    show_repo,
    summarize_repo,
)
from .search import Address, DateRange, aread, asearch, parse_address, search
from .store import (
    RemovalResult,
    SaveResult,
    load_artifact,
    load_one,
    remove_artifacts,
    save_artifact,
)
from .tags import extract_tags, register_extractor, split_tag

__all__ = [
    "__version__",
    "Address",
    "ArcvaultError",
    "ArtifactEnvelope",
    "ArtifactRow",
    "Busy",
    "Component",
    "CorruptRemoteIndex",
    "CyclicProvenance",
    "DatasetPayload",
    "DateRange",
    "HashMismatch",
    "Hook",
    "IntegrityReport",
    "InvalidPayload",
    "IoError",
    "LinearModelPayload",
    "MalformedAddress",
    "MalformedTemplate",
    "Miniature",
    "NoDefaultRepo",
    "NoSessionRecorded",
    "NotARepo",
    "NotFound",
    "Pedigree",
    "PlotSpecPayload",
    "ProvenanceStep",
    "RemovalResult",
    "RemoteLocator",
    "RemoteRepository",
    "RemoteUnavailable",
    "RepoConflict",
    "RepoSummary",
    "Repository",
    "SaveResult",
    "SessionManifest",
    "TagRecord",
    "UnknownInput",
    "aread",
    "asearch",
    "bitbucket_remote",
    "canonicalize",
    "capture_session_manifest",
    "check_integrity",
    "clear_defaults",
    "compute_hash",
    "copy_artifacts",
    "create_md_gallery",
    "create_repo",
    "default_local",
    "default_remote",
    "delete_repo",
    "emit_lockfile",
    "extract_tags",
    "fetch_remote_index",
    "get_formats",
    "get_session",
    "github_remote",
    "history",
    "load_artifact",
    "load_one",
    "make_miniature",
    "open_repo",
    "parse_address",
    "record_step",
    "register_extractor",
    "remote_hook",
    "remove_artifacts",
    "render_hook",
    "save_artifact",
    "search",
    "set_default_repo",
    "set_local_default",
    "set_remote_default",
    "show_repo",
    "split_tag",
    "summarize_repo",
    "url_remote",
    "zip_repo",
]
