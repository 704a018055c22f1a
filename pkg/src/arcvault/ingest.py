"""Building envelopes from plain files (CLI save, directory watcher)."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .envelope import (
    DATASET,
    GENERIC,
    KINDS,
    LINEAR_MODEL,
    PLOT_SPEC,
    ArtifactEnvelope,
    DatasetPayload,
    LinearModelPayload,
    PlotSpecPayload,
)
from .errors import InvalidPayload

KIND_BY_EXTENSION = {".csv": DATASET, ".json": GENERIC, ".bin": GENERIC, ".txt": GENERIC}


def dataset_from_csv_bytes(data: bytes) -> DatasetPayload:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidPayload(f"csv bytes are not UTF-8: {exc}") from exc
    try:
        rows = list(csv.reader(io.StringIO(text, newline="")))
    except csv.Error as exc:
        raise InvalidPayload(f"unparseable csv: {exc}") from exc
    if not rows:
        raise InvalidPayload("csv file has no header row")
    header, body = rows[0], rows[1:]
    if any(len(row) != len(header) for row in body):
        raise InvalidPayload("csv rows have inconsistent lengths")
    columns = tuple((col, tuple(row[i] for row in body)) for i, col in enumerate(header))
    return DatasetPayload(columns)


def model_from_json_obj(obj: dict) -> LinearModelPayload:
    try:
        return LinearModelPayload(
            formula=obj["formula"],
            coefficients=tuple(obj["coefficients"].items()),
            rank=obj["rank"],
            df_residual=obj["dfResidual"],
        )
    except (KeyError, AttributeError, TypeError) as exc:
        raise InvalidPayload(f"not a linear-model document: {exc}") from exc


def plot_from_json_obj(obj: dict) -> PlotSpecPayload:
    try:
        return PlotSpecPayload(
            geometry=obj["geometry"],
            label_x=obj.get("labelX"),
            label_y=obj.get("labelY"),
            data_ref=obj.get("dataRef"),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidPayload(f"not a plot-spec document: {exc}") from exc


def envelope_from_file(
    path: str | Path,
    kind: str | None = None,
    name: str | None = None,
    image: bytes | None = None,
) -> ArtifactEnvelope:
    """Wrap a file's content in an envelope; kind defaults by extension."""
    path = Path(path)
    if kind is None:
        kind = KIND_BY_EXTENSION.get(path.suffix.lower(), GENERIC)
    if kind not in KINDS:
        raise InvalidPayload(f"unknown kind: {kind!r}")
    data = path.read_bytes()
    name = name or path.stem
    if kind == DATASET:
        payload = dataset_from_csv_bytes(data)
    elif kind == LINEAR_MODEL:
        payload = model_from_json_obj(_load_json(data, path))
    elif kind == PLOT_SPEC:
        payload = plot_from_json_obj(_load_json(data, path))
    else:
        payload = data
    envelope = ArtifactEnvelope(kind, name, payload, image=image)
    envelope.validate()
    return envelope


def _load_json(data: bytes, path: Path) -> dict:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise InvalidPayload(f"{path.name}: not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidPayload(f"{path.name}: expected a JSON object")
    return obj
