"""Artifact envelopes: typed payloads plus their canonical byte form.

An artifact is identified by the MD5 digest of its canonical primary-format
bytes. Kind fixes the primary format:

    dataset      -> csv   (RFC 4180, LF line endings, header row)
    linear-model -> json  (UTF-8, sorted keys, no insignificant whitespace)
    plot-spec    -> json
    generic      -> bin   (bytes pass through untouched)

Secondary files (miniatures, pre-rendered images) never contribute to the
hash: one identity per artifact regardless of how many formats sit next to
the blob.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, replace
from typing import Union

from .errors import InvalidPayload

DATASET = "dataset"
LINEAR_MODEL = "linear-model"
PLOT_SPEC = "plot-spec"
GENERIC = "generic"

KINDS = (DATASET, LINEAR_MODEL, PLOT_SPEC, GENERIC)

PRIMARY_FORMAT = {
    DATASET: "csv",
    LINEAR_MODEL: "json",
    PLOT_SPEC: "json",
    GENERIC: "bin",
}

# Generic envelopes may carry a registered class name that stores under a
# different extension (session manifests are generic payloads kept as json).
FORMAT_BY_CLASS: dict[str, str] = {"session_info": "json"}

HEX_HASH_RE = re.compile(r"^[0-9a-f]{32}$")

Cell = Union[str, int, float]


def compute_hash(data: bytes) -> str:
    """MD5 digest of ``data`` as 32 lowercase hex characters."""
    return hashlib.md5(data).hexdigest()


def is_full_hash(text: str) -> bool:
    return bool(HEX_HASH_RE.match(text))


def _cell_text(cell: Cell) -> str:
    if isinstance(cell, bool) or not isinstance(cell, (str, int, float)):
        raise InvalidPayload(f"unsupported cell value: {cell!r}")
    if isinstance(cell, str):
        # Bare CR slips past minimal quoting and breaks read-back; NUL cannot
        # be written by the csv module at all.
        if "\r" in cell or "\x00" in cell:
            raise InvalidPayload(f"cell text may not contain CR or NUL: {cell!r}")
        return cell
    return repr(cell) if isinstance(cell, float) else str(cell)


def _json_bytes(obj) -> bytes:
    try:
        text = json.dumps(
            obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
        )
    except ValueError as exc:
        raise InvalidPayload(str(exc)) from exc
    return text.encode("utf-8")


@dataclass(frozen=True)
class DatasetPayload:
    """Columnar data: ordered (name, values) pairs, all columns equal length."""

    columns: tuple[tuple[str, tuple[Cell, ...]], ...]

    def __init__(self, columns):
        normalized = tuple((str(name), tuple(values)) for name, values in columns)
        object.__setattr__(self, "columns", normalized)

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetPayload":
        return cls(tuple(data.items()))

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.columns)

    @property
    def row_count(self) -> int:
        return len(self.columns[0][1]) if self.columns else 0

    def rows(self) -> list[tuple[Cell, ...]]:
        return list(zip(*(values for _, values in self.columns)))

    def validate(self) -> None:
        if not self.columns:
            raise InvalidPayload("dataset needs at least one column")
        names = self.column_names
        if len(set(names)) != len(names):
            raise InvalidPayload("dataset column names must be unique")
        if any(not name for name in names):
            raise InvalidPayload("dataset column names must be non-empty")
        for name in names:
            _cell_text(name)
        lengths = {len(values) for _, values in self.columns}
        if len(lengths) > 1:
            raise InvalidPayload("dataset columns must all have the same length")
        for _, values in self.columns:
            for cell in values:
                _cell_text(cell)

    def canonical_bytes(self) -> bytes:
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.column_names)
        for row in self.rows():
            writer.writerow(_cell_text(cell) for cell in row)
        return buf.getvalue().encode("utf-8")


@dataclass(frozen=True)
class LinearModelPayload:
    """Fitted linear model summary: formula, named coefficients, rank, df."""

    formula: str
    coefficients: tuple[tuple[str, float], ...]
    rank: int
    df_residual: int

    def __init__(self, formula, coefficients, rank, df_residual):
        if isinstance(coefficients, dict):
            coefficients = tuple(coefficients.items())
        object.__setattr__(self, "formula", str(formula))
        object.__setattr__(self, "coefficients", tuple((str(k), v) for k, v in coefficients))
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "df_residual", df_residual)

    @property
    def coefficient_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.coefficients)

    def validate(self) -> None:
        names = self.coefficient_names
        if len(set(names)) != len(names):
            raise InvalidPayload("coefficient names must be unique")
        for _, value in self.coefficients:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidPayload(f"coefficient value must be numeric: {value!r}")
        if not isinstance(self.rank, int) or isinstance(self.rank, bool):
            raise InvalidPayload("rank must be an integer")
        if not isinstance(self.df_residual, int) or isinstance(self.df_residual, bool):
            raise InvalidPayload("df_residual must be an integer")
        if self.rank > len(self.coefficients):
            raise InvalidPayload("rank cannot exceed the number of coefficients")
        if self.df_residual < 0:
            raise InvalidPayload("df_residual cannot be negative")

    def canonical_bytes(self) -> bytes:
        return _json_bytes(
            {
                "formula": self.formula,
                "coefficients": dict(self.coefficients),
                "rank": self.rank,
                "dfResidual": self.df_residual,
            }
        )


@dataclass(frozen=True)
class PlotSpecPayload:
    """Declarative plot description; rendering stays out of scope."""

    geometry: str
    label_x: str | None = None
    label_y: str | None = None
    data_ref: str | None = None

    def validate(self) -> None:
        if not self.geometry or not isinstance(self.geometry, str):
            raise InvalidPayload("plot-spec geometry must be a non-empty string")
        for label in (self.label_x, self.label_y):
            if label is not None and (not isinstance(label, str) or not label):
                raise InvalidPayload("plot labels must be non-empty when set")
        if self.data_ref is not None and not is_full_hash(self.data_ref):
            raise InvalidPayload(f"data_ref is not a 32-hex hash: {self.data_ref!r}")

    def canonical_bytes(self) -> bytes:
        return _json_bytes(
            {
                "geometry": self.geometry,
                "labelX": self.label_x,
                "labelY": self.label_y,
                "dataRef": self.data_ref,
            }
        )


Payload = Union[DatasetPayload, LinearModelPayload, PlotSpecPayload, bytes]

_PAYLOAD_TYPE = {
    DATASET: DatasetPayload,
    LINEAR_MODEL: LinearModelPayload,
    PLOT_SPEC: PlotSpecPayload,
    GENERIC: bytes,
}


@dataclass(frozen=True)
class ArtifactEnvelope:
    """A typed payload plus the metadata needed to archive it.

    ``class_names`` feeds the tag extractor registry and defaults to the
    kind; multi-class artifacts (or registered specializations such as
    session manifests) override it. ``image`` carries a pre-rendered raster
    preview for plot specs. ``data`` attaches the dependent dataset that the
    save chain archives alongside a plot.
    """

    kind: str
    name: str
    payload: Payload
    class_names: tuple[str, ...] | None = None
    image: bytes | None = None
    data: "ArtifactEnvelope | None" = None

    def __init__(self, kind, name, payload, class_names=None, image=None, data=None):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "payload", payload)
        if class_names is not None:
            class_names = (class_names,) if isinstance(class_names, str) else tuple(class_names)
        object.__setattr__(self, "class_names", class_names)
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "data", data)

    @property
    def classes(self) -> tuple[str, ...]:
        return self.class_names if self.class_names is not None else (self.kind,)

    @property
    def primary_format(self) -> str:
        for cls in self.classes:
            if cls in FORMAT_BY_CLASS:
                return FORMAT_BY_CLASS[cls]
        return PRIMARY_FORMAT[self.kind]

    @property
    def formats(self) -> tuple[str, ...]:
        """Storage formats present on the envelope itself (miniatures excluded)."""
        return (self.primary_format,) + (("png",) if self.image is not None else ())

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidPayload(f"unknown kind: {self.kind!r}")
        if not self.name or not isinstance(self.name, str):
            raise InvalidPayload("artifact name must be a non-empty string")
        expected = _PAYLOAD_TYPE[self.kind]
        if not isinstance(self.payload, expected):
            raise InvalidPayload(
                f"{self.kind} payload must be {expected.__name__}, got {type(self.payload).__name__}"
            )
        if not isinstance(self.payload, bytes):
            self.payload.validate()
        if any(not cls for cls in self.classes):
            raise InvalidPayload("class names must be non-empty")
        if self.image is not None:
            if self.kind != PLOT_SPEC:
                raise InvalidPayload("pre-rendered images are only allowed on plot specs")
            if not isinstance(self.image, bytes):
                raise InvalidPayload("image must be bytes")
        if self.data is not None:
            if self.kind != PLOT_SPEC:
                raise InvalidPayload("dependent data is only allowed on plot specs")
            if self.data.kind != DATASET:
                raise InvalidPayload("dependent data must be a dataset envelope")
            self.data.validate()

    def canonical_bytes(self) -> bytes:
        return canonicalize(self.payload, self.kind)

    def content_hash(self) -> str:
        return compute_hash(self.canonical_bytes())

    def with_data_ref(self, data_ref: str) -> "ArtifactEnvelope":
        payload = replace(self.payload, data_ref=data_ref)
        return ArtifactEnvelope(
            self.kind, self.name, payload, self.class_names, self.image, self.data
        )


def canonicalize(payload: Payload, kind: str) -> bytes:
    """Deterministic byte form of ``payload``; the hash input."""
    if kind not in KINDS:
        raise InvalidPayload(f"unknown kind: {kind!r}")
    if kind == GENERIC:
        if not isinstance(payload, bytes):
            raise InvalidPayload("generic payload must be bytes")
        return payload
    if not isinstance(payload, _PAYLOAD_TYPE[kind]):
        raise InvalidPayload(f"payload does not match kind {kind!r}")
    payload.validate()
    return payload.canonical_bytes()


# --- miniatures ------------------------------------------------------------

MINIATURE_ROWS = 6

_HEX_PREVIEW_BYTES = 64


@dataclass(frozen=True)
class Miniature:
    format: str  # "txt" | "png"
    data: bytes

    @property
    def text(self) -> str:
        return self.data.decode("utf-8")


def _aligned(rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def make_miniature(envelope: ArtifactEnvelope, rows: int = MINIATURE_ROWS) -> Miniature:
    """Small human-readable preview stored next to the blob."""
    envelope.validate()
    if envelope.kind == DATASET:
        payload = envelope.payload
        table = [payload.column_names]
        table += [tuple(_cell_text(c) for c in r) for r in payload.rows()[:rows]]
        return Miniature("txt", _aligned(table).encode("utf-8"))
    if envelope.kind == LINEAR_MODEL:
        payload = envelope.payload
        lines = [f"formula: {payload.formula}", "coefficients:"]
        if payload.coefficients:
            width = max(len(n) for n in payload.coefficient_names)
            lines += [f"  {n.ljust(width)}  {_cell_text(v)}" for n, v in payload.coefficients]
        lines.append(f"rank: {payload.rank}  df.residual: {payload.df_residual}")
        return Miniature("txt", ("\n".join(lines) + "\n").encode("utf-8"))
    if envelope.kind == PLOT_SPEC:
        if envelope.image is not None:
            return Miniature("png", envelope.image)
        payload = envelope.payload
        lines = [f"plot: {envelope.name}", f"geometry: {payload.geometry}"]
        if payload.label_x:
            lines.append(f"x: {payload.label_x}")
        if payload.label_y:
            lines.append(f"y: {payload.label_y}")
        if payload.data_ref:
            lines.append(f"data: {payload.data_ref}")
        return Miniature("txt", ("\n".join(lines) + "\n").encode("utf-8"))
    blob = envelope.payload
    preview = blob[:_HEX_PREVIEW_BYTES].hex(" ")
    text = f"{len(blob)} bytes\n{preview}\n" if preview else f"{len(blob)} bytes\n"
    return Miniature("txt", text.encode("utf-8"))
