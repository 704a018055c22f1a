"""Shared fixtures: repositories, envelope builders, a counting HTTP server."""

from __future__ import annotations

import random
import threading
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from arcvault import (
    ArtifactEnvelope,
    DatasetPayload,
    LinearModelPayload,
    PlotSpecPayload,
    clear_defaults,
    create_repo,
)


@pytest.fixture(autouse=True)
def _isolated_process_state(monkeypatch, tmp_path):
    monkeypatch.delenv("ARCVAULT_REPO", raising=False)
    monkeypatch.setenv("ARCVAULT_CONFIG", str(tmp_path / "config" / "config.json"))
    monkeypatch.setenv("ARCVAULT_CACHE", str(tmp_path / "http-cache"))
    clear_defaults()
    yield
    clear_defaults()


@pytest.fixture
def repo(tmp_path):
    return create_repo(tmp_path / "arepo")


@pytest.fixture
def second_repo(tmp_path):
    return create_repo(tmp_path / "brepo")


# --- envelope builders -------------------------------------------------------


def iris_dataset(name="iris") -> ArtifactEnvelope:
    payload = DatasetPayload.from_dict(
        {
            "Sepal.Length": [5.1, 4.9, 4.7, 4.6, 5.0, 5.4, 4.6],
            "Petal.Length": [1.4, 1.4, 1.3, 1.5, 1.4, 1.7, 1.4],
            "Species": ["setosa"] * 7,
        }
    )
    return ArtifactEnvelope("dataset", name, payload)


def model_envelope(name="fit", coefficients=None, formula="Petal.Length ~ Sepal.Length", **kwargs):
    coefficients = coefficients or {"(Intercept)": -7.101443, "Sepal.Length": 1.858433}
    payload = LinearModelPayload(
        formula=formula, coefficients=coefficients, rank=len(coefficients), df_residual=148
    )
    return ArtifactEnvelope("linear-model", name, payload, **kwargs)


def plot_envelope(name="pl", label_x="Sepal.Length", label_y="Petal.Length", **kwargs):
    payload = PlotSpecPayload(geometry="point", label_x=label_x, label_y=label_y)
    return ArtifactEnvelope("plot-spec", name, payload, **kwargs)


def generic_envelope(name="raw", data=b"\x00\x01\x02"):
    return ArtifactEnvelope("generic", name, data)


def random_envelope(rng: random.Random, kind: str | None = None) -> ArtifactEnvelope:
    kind = kind or rng.choice(["dataset", "linear-model", "plot-spec", "generic"])
    name = f"{kind.replace('-', '_')}_{rng.randrange(10**9)}"
    if kind == "dataset":
        n_cols = rng.randint(1, 4)
        n_rows = rng.randint(0, 6)
        columns = []
        for i in range(n_cols):
            values = []
            for _ in range(n_rows):
                values.append(
                    rng.choice(
                        [
                            rng.randint(-100, 100),
                            round(rng.uniform(-10, 10), 3),
                            f"s{rng.randrange(100)}",
                            'quoted,"cell"' if rng.random() < 0.1 else "plain",
                        ]
                    )
                )
            columns.append((f"col{i}", tuple(values)))
        return ArtifactEnvelope(kind, name, DatasetPayload(tuple(columns)))
    if kind == "linear-model":
        n = rng.randint(1, 4)
        coefficients = {f"x{i}": round(rng.uniform(-5, 5), 4) for i in range(n)}
        payload = LinearModelPayload(
            formula=f"y ~ {' + '.join(coefficients)}",
            coefficients=coefficients,
            rank=rng.randint(0, n),
            df_residual=rng.randint(0, 200),
        )
        return ArtifactEnvelope(kind, name, payload)
    if kind == "plot-spec":
        payload = PlotSpecPayload(
            geometry=rng.choice(["point", "line", "bar"]),
            label_x=rng.choice([None, f"x{rng.randrange(10)}"]),
            label_y=rng.choice([None, f"y{rng.randrange(10)}"]),
        )
        image = bytes([137, 80, 78, 71]) + rng.randbytes(8) if rng.random() < 0.3 else None
        return ArtifactEnvelope(kind, name, payload, image=image)
    return ArtifactEnvelope(kind, name, rng.randbytes(rng.randint(0, 64)))


# --- static HTTP fixture server ----------------------------------------------


class _CountingHandler(SimpleHTTPRequestHandler):
    def __init__(self, *args, counters=None, **kwargs):
        self._counters = counters
        super().__init__(*args, **kwargs)

    def log_message(self, *args):
        pass

    def _count(self, method):
        self._counters[method] = self._counters.get(method, 0) + 1

    def do_GET(self):
        self._count("GET")
        super().do_GET()

    def do_HEAD(self):
        self._count("HEAD")
        super().do_HEAD()

    def do_POST(self):
        self._count("POST")
        self.send_error(405)

    def do_PUT(self):
        self._count("PUT")
        self.send_error(405)

    def do_DELETE(self):
        self._count("DELETE")
        self.send_error(405)


class StaticServer:
    """Serves a directory over HTTP and counts requests by method."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.counters: dict[str, int] = {}
        handler = partial(_CountingHandler, directory=str(directory), counters=self.counters)
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self._thread = threading.Thread(
            target=lambda: self._httpd.serve_forever(poll_interval=0.05), daemon=True
        )

    def start(self) -> "StaticServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    @property
    def request_count(self) -> int:
        return sum(self.counters.values())

    @property
    def non_get_count(self) -> int:
        return sum(count for method, count in self.counters.items() if method != "GET")


@pytest.fixture
def static_server(tmp_path):
    (tmp_path / "served").mkdir(exist_ok=True)
    server = StaticServer(tmp_path / "served").start()
    yield server
    server.stop()
