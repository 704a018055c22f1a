"""Read-only HTTP JSON API plus static hosting for the web UI.

All endpoints are GETs over one repository; there are no mutation routes.
Search results can be presentation-sorted by a tag key (``sort=key``);
values compare numerically when every present value parses as a number,
lexicographically otherwise. ``sort=createdDate`` orders by save time.
"""

from __future__ import annotations

import json
import logging
import re
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import ArcvaultError, NotFound
from .locate import resolve_reader
from .provenance import history
from .repo import summarize_repo
from .search import DateRange, search

logger = logging.getLogger(__name__)

_HASH_RE = re.compile(r"^[0-9a-f]{32}$")

_CONTENT_TYPES = {
    "csv": "text/csv; charset=utf-8",
    "json": "application/json; charset=utf-8",
    "txt": "text/plain; charset=utf-8",
    "png": "image/png",
    "bin": "application/octet-stream",
}


def default_ui_dir() -> Path | None:
    import os

    override = os.environ.get("ARCVAULT_UI_DIR")
    if override:
        return Path(override)
    for candidate in (
        Path(__file__).resolve().parent / "webui",
        Path.cwd() / "frontend" / "dist",
    ):
        if (candidate / "index.html").is_file():
            return candidate
    return None


def tag_value_sort_key(values: dict[str, str], hashes: list[str]):
    """Sort key factory: numeric when every present value parses, else text."""
    present = [values[h] for h in hashes if h in values]
    numeric = bool(present)
    parsed: dict[str, float] = {}
    for text in present:
        try:
            parsed[text] = float(text)
        except ValueError:
            numeric = False
            break

    def key(md5hash: str):
        if md5hash not in values:
            return (1, 0, "", md5hash)
        value = values[md5hash]
        if numeric:
            return (0, parsed[value], "", md5hash)
        return (0, 0, value, md5hash)

    return key


def sort_hashes(reader, hashes: list[str], sort_key: str) -> list[str]:
    if sort_key == "createdDate":
        values = {}
        for row in reader.artifact_rows():
            values.setdefault(row.md5hash, row.created_date)
        return sorted(hashes, key=lambda h: (values.get(h, ""), h))
    values = {}
    prefix = sort_key + ":"
    for record in reader.tag_rows():
        if record.tag.startswith(prefix) and record.artifact not in values:
            values[record.artifact] = record.tag[len(prefix):]
    return sorted(hashes, key=tag_value_sort_key(values, hashes))


class _Handler(BaseHTTPRequestHandler):
    server_version = "arcvault/0.1"

    @property
    def reader(self):
        return self.server.reader

    def log_message(self, format, *args):  # noqa: A002 (stdlib signature)
        logger.debug("%s - %s", self.address_string(), format % args)

    def _send_json(self, obj, status: int = 200) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, data: bytes, content_type: str, status: int = 200) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status=status)

    def do_GET(self):  # noqa: N802 (stdlib naming)
        parsed = urllib.parse.urlparse(self.path)
        route = parsed.path
        query = urllib.parse.parse_qs(parsed.query)
        try:
            if route.startswith("/api/"):
                self._api(route, query)
            else:
                self._static(route)
        except NotFound as exc:
            self._error(404, str(exc))
        except (ArcvaultError, ValueError) as exc:
            self._error(400, str(exc))
        except BrokenPipeError:
            pass
        except Exception as exc:  # pragma: no cover - defensive
            logger.exception("request failed: %s", self.path)
            self._error(500, str(exc))

    # -- API routes ----------------------------------------------------------

    def _api(self, route: str, query: dict) -> None:
        reader = self.reader
        if route == "/api/artifacts":
            rows = [
                {"md5hash": r.md5hash, "name": r.name, "createdDate": r.created_date}
                for r in reader.artifact_rows()
            ]
            self._send_json(rows)
            return
        if route == "/api/summary":
            self._send_json(summarize_repo(reader).to_json_obj())
            return
        if route == "/api/search":
            self._search(query)
            return
        match = re.match(r"^/api/(tags|history|miniature|blob)/([0-9a-f]{32})$", route)
        if not match:
            self._error(404, f"no such route: {route}")
            return
        action, md5hash = match.groups()
        if action == "tags":
            rows = [
                {"artifact": t.artifact, "tag": t.tag, "createdDate": t.created_date}
                for t in reader.tags_for(md5hash)
            ]
            self._send_json(rows)
            return
        if action == "history":
            self._send_json(history(reader, md5hash).to_json_obj())
            return
        if not reader.has_artifact(md5hash):
            raise NotFound(f"no artifact {md5hash}")
        formats = reader.formats_for(md5hash)
        if action == "miniature":
            fmt = "png" if "png" in formats else "txt"
            if fmt not in formats:
                raise NotFound(f"no miniature for {md5hash}")
            data = reader.blob_path(f"{md5hash}.{fmt}").read_bytes()
            self._send_bytes(data, _CONTENT_TYPES[fmt])
            return
        for fmt in ("csv", "json", "bin"):
            if fmt in formats:
                data = reader.blob_path(f"{md5hash}.{fmt}").read_bytes()
                self._send_bytes(data, _CONTENT_TYPES[fmt])
                return
        raise NotFound(f"no blob for {md5hash}")

    def _search(self, query: dict) -> None:
        patterns: list = list(query.get("tag", []))
        date_from = query.get("from", [None])[0]
        date_to = query.get("to", [None])[0]
        if date_from or date_to:
            patterns.append(DateRange.parse(date_from or "0001-01-01", date_to or "9999-12-31"))
        if not patterns:
            self._send_json([])
            return
        mode = query.get("mode", ["all"])[0]
        if mode not in ("all", "any"):
            raise ValueError(f"mode must be 'all' or 'any', got {mode!r}")
        hashes = search(self.reader, patterns, intersect=(mode == "all"))
        sort_key = query.get("sort", [None])[0]
        if sort_key:
            hashes = sort_hashes(self.reader, hashes, sort_key)
        self._send_json(hashes)

    # -- static UI -----------------------------------------------------------

    def _static(self, route: str) -> None:
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            if route in ("/", "/index.html"):
                body = (
                    "<!doctype html><title>arcvault</title>"
                    "<h1>arcvault</h1><p>JSON API under <code>/api/</code>; "
                    "no web UI bundle is installed.</p>"
                ).encode("utf-8")
                self._send_bytes(body, "text/html; charset=utf-8")
                return
            raise NotFound(f"no such path: {route}")
        name = route.lstrip("/") or "index.html"
        target = (ui_dir / name).resolve()
        if not target.is_relative_to(ui_dir.resolve()) or not target.is_file():
            raise NotFound(f"no such path: {route}")
        suffix = target.suffix.lstrip(".")
        content_type = {
            "html": "text/html; charset=utf-8",
            "js": "text/javascript; charset=utf-8",
            "css": "text/css; charset=utf-8",
            "map": "application/json",
            "svg": "image/svg+xml",
        }.get(suffix, "application/octet-stream")
        self._send_bytes(target.read_bytes(), content_type)


class ArcvaultServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bind: tuple[str, int], locator=None, ui_dir: Path | None = None):
        self.reader = resolve_reader(locator)
        self.ui_dir = ui_dir if ui_dir is not None else default_ui_dir()
        super().__init__(bind, _Handler)


def serve(locator=None, host: str = "127.0.0.1", port: int = 8973, ui_dir=None) -> None:
    """Serve the JSON API (and UI bundle, when present) until interrupted."""
    server = ArcvaultServer((host, port), locator, ui_dir=Path(ui_dir) if ui_dir else None)
    logger.info("serving on http://%s:%d/", host, server.server_address[1])
    try:
        server.serve_forever()
    finally:
        server.server_close()
