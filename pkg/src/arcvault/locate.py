"""Process-level default repositories and locator resolution.

Local and remote defaults are held separately, as with the set-local /
set-remote pair they replace. Defaults are process state only; nothing is
ever written into a repository to mark it as default.
"""

from __future__ import annotations

import os
from pathlib import Path

from .errors import NoDefaultRepo, NotARepo
from .remote import RemoteLocator, RemoteRepository
from .repo import IndexReader, Repository

REPO_ENV = "ARCVAULT_REPO"

_default_local: Repository | None = None
_default_remote: RemoteLocator | None = None


def set_local_default(repo: Repository | str | Path | None) -> None:
    global _default_local
    if repo is None:
        _default_local = None
        return
    if not isinstance(repo, Repository):
        repo = Repository(repo)  # raises NotARepo for missing paths
    _default_local = repo


def set_remote_default(locator: RemoteLocator | None) -> None:
    global _default_remote
    _default_remote = locator


def set_default_repo(locator) -> None:
    """Route a locator to the matching default slot (local path or remote)."""
    if isinstance(locator, RemoteLocator):
        set_remote_default(locator)
    else:
        set_local_default(locator)


def default_local() -> Repository | None:
    if _default_local is not None:
        return _default_local
    env = os.environ.get(REPO_ENV)
    if env:
        return Repository(env)
    return None


def default_remote() -> RemoteLocator | None:
    return _default_remote


def clear_defaults() -> None:
    global _default_local, _default_remote
    _default_local = None
    _default_remote = None


def resolve_reader(locator=None) -> IndexReader:
    """Turn any locator spelling into something queryable.

    Accepts an open Repository / RemoteRepository, a RemoteLocator, a local
    path, or None (default local first, then default remote).
    """
    if locator is None:
        local = default_local()
        if local is not None:
            return local
        remote = default_remote()
        if remote is not None:
            return RemoteRepository(remote)
        raise NoDefaultRepo("no locator given and no default repository set")
    if isinstance(locator, IndexReader):
        return locator
    if isinstance(locator, RemoteLocator):
        return RemoteRepository(locator)
    if isinstance(locator, (str, Path)):
        return Repository(locator)
    raise TypeError(f"cannot resolve locator: {locator!r}")


def resolve_local(locator=None) -> Repository:
    """Like resolve_reader but must land on a writable local repository."""
    reader = resolve_reader(locator)
    if not isinstance(reader, Repository):
        raise NotARepo(f"operation needs a local repository, got remote: {reader.describe()}")
    return reader
