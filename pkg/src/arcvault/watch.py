"""Directory-watch auto-archiver.

Polls a directory and archives every new or modified file whose name
matches a rule, tagging the save with ``source:watch``. Identical content
re-dropped under any name dedupes to the same blob; only a fresh ``date:``
tag marks the new attempt.
"""

from __future__ import annotations

import fnmatch
import logging
import time
from pathlib import Path

from .errors import ArcvaultError
from .ingest import envelope_from_file
from .locate import resolve_local
from .store import save_artifact

logger = logging.getLogger(__name__)

DEFAULT_RULES = {"*.csv": "dataset", "*.json": "generic"}

WATCH_TAG = "source:watch"


def _kind_for(filename: str, rules: dict[str, str]) -> str | None:
    for pattern, kind in rules.items():
        if fnmatch.fnmatch(filename, pattern):
            return kind
    return None


def scan_once(
    repo,
    directory: str | Path,
    rules: dict[str, str] | None = None,
    state: dict[str, tuple[float, int]] | None = None,
) -> list[str]:
    """Archive matching files that are new or changed since ``state``.

    ``state`` is mutated in place so callers can loop. Returns the hashes
    saved in this pass.
    """
    repo = resolve_local(repo)
    directory = Path(directory)
    rules = DEFAULT_RULES if rules is None else rules
    state = {} if state is None else state
    saved = []
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        kind = _kind_for(path.name, rules)
        if kind is None:
            continue
        stat = path.stat()
        signature = (stat.st_mtime, stat.st_size)
        if state.get(str(path)) == signature:
            continue
        try:
            envelope = envelope_from_file(path, kind=kind)
            result = save_artifact(repo, envelope, user_tags=(WATCH_TAG,))
        except (ArcvaultError, OSError) as exc:
            logger.warning("watch: skipping %s: %s", path.name, exc)
            state[str(path)] = signature
            continue
        state[str(path)] = signature
        saved.append(result.md5hash)
        logger.info("watch: archived %s as %s", path.name, result.md5hash)
    return saved


def watch_loop(
    repo,
    directory: str | Path,
    rules: dict[str, str] | None = None,
    interval: float = 1.0,
    stop=None,
) -> None:
    """Poll until ``stop`` (a callable or threading.Event) says otherwise."""
    state: dict[str, tuple[float, int]] = {}
    while True:
        scan_once(repo, directory, rules, state)
        if stop is not None and (stop() if callable(stop) else stop.is_set()):
            return
        time.sleep(interval)
