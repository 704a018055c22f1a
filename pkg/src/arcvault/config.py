"""Per-user CLI configuration: persisted default repositories and options.

A CLI has no session, so defaults live in a JSON file at the standard
per-user config location (overridable via ARCVAULT_CONFIG). The
ARCVAULT_REPO environment variable beats the configured local default.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from . import locate
from .remote import (
    DEFAULT_BRANCH,
    RemoteLocator,
    bitbucket_remote,
    github_remote,
    url_remote,
)

CONFIG_ENV = "ARCVAULT_CONFIG"


def config_path() -> Path:
    override = os.environ.get(CONFIG_ENV)
    if override:
        return Path(override)
    base = os.environ.get("XDG_CONFIG_HOME") or str(Path.home() / ".config")
    return Path(base) / "arcvault" / "config.json"


def load_config() -> dict:
    path = config_path()
    if not path.is_file():
        return {}
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except ValueError:
        return {}


def save_config(config: dict) -> None:
    path = config_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def remote_from_spec(spec: str, branch: str | None = None, ttl: int | None = None) -> RemoteLocator:
    """Build a remote locator from a CLI spelling.

    ``https://host/base`` is a raw static host; ``user/repo[/subdir...]``
    defaults to GitHub; ``bitbucket:user/repo[/subdir]`` picks Bitbucket.
    """
    kwargs = {}
    if ttl is not None:
        kwargs["cache_ttl_seconds"] = ttl
    if "://" in spec:
        return url_remote(spec, **kwargs)
    factory = github_remote
    if spec.startswith("bitbucket:"):
        factory = bitbucket_remote
        spec = spec[len("bitbucket:"):]
    elif spec.startswith("github:"):
        spec = spec[len("github:"):]
    segments = [s for s in spec.split("/") if s]
    if len(segments) < 2:
        raise ValueError(f"remote spec needs user/repo segments: {spec!r}")
    return factory(
        segments[0],
        segments[1],
        branch=branch or DEFAULT_BRANCH,
        subdir="/".join(segments[2:]),
        **kwargs,
    )


def remote_to_spec(locator: RemoteLocator) -> str:
    return "/".join(locator.address_segments)


def apply_config_defaults() -> None:
    """Load persisted defaults into the process-level default slots."""
    config = load_config()
    options = config.get("options", {})
    env_repo = os.environ.get(locate.REPO_ENV)
    local = env_repo or config.get("defaultLocalRepo")
    if local and Path(local, "backpack.db").is_file():
        locate.set_local_default(local)
    remote_spec = config.get("defaultRemote")
    if remote_spec:
        try:
            locate.set_remote_default(
                remote_from_spec(
                    remote_spec,
                    branch=options.get("branch"),
                    ttl=options.get("cacheTtlSeconds"),
                )
            )
        except ValueError:
            pass
