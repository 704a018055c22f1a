"""Tag grammar and the automatic tag extractor registry.

A tag is a ``key:value`` string, split at the FIRST colon (values may
contain colons). Every save writes the defaults ``name:``, ``class:``,
``date:`` and ``format:`` tags; class-specific extractors add the rest.
Registering an extractor for a new class name needs no changes here.
"""

from __future__ import annotations

from datetime import date, datetime, timezone
from typing import Callable

from .envelope import (
    DATASET,
    GENERIC,
    LINEAR_MODEL,
    PLOT_SPEC,
    ArtifactEnvelope,
)

TS_FORMAT = "%Y-%m-%d %H:%M:%S"


def format_ts(clock: datetime | str | None = None) -> str:
    """UTC timestamp text ``YYYY-MM-DD HH:MM:SS``; now() when clock is None."""
    if clock is None:
        clock = datetime.now(timezone.utc)
    if isinstance(clock, str):
        parse_ts(clock)  # validate
        return clock
    if clock.tzinfo is not None:
        clock = clock.astimezone(timezone.utc)
    return clock.strftime(TS_FORMAT)


def parse_ts(text: str) -> datetime:
    return datetime.strptime(text, TS_FORMAT)


def split_tag(tag: str) -> tuple[str, str]:
    """Split ``key:value`` at the first colon. Raises ValueError if malformed."""
    key, sep, value = tag.partition(":")
    if not sep:
        raise ValueError(f"malformed tag (no colon): {tag!r}")
    return key, value


def tag_key(tag: str) -> str:
    return split_tag(tag)[0]


def tag_value(tag: str) -> str:
    return split_tag(tag)[1]


def is_well_formed(tag: str) -> bool:
    return ":" in tag


Extractor = Callable[[ArtifactEnvelope], "list[str]"]

_EXTRACTORS: dict[str, Extractor] = {}


def register_extractor(class_name: str, extractor: Extractor) -> None:
    """Register class-specific tags for artifacts whose first class matches."""
    _EXTRACTORS[class_name] = extractor


def _dataset_tags(envelope: ArtifactEnvelope) -> list[str]:
    return [f"varname:{name}" for name in envelope.payload.column_names]


def _linear_model_tags(envelope: ArtifactEnvelope) -> list[str]:
    payload = envelope.payload
    tags = [f"coefname:{name}" for name in payload.coefficient_names]
    tags.append(f"rank:{payload.rank}")
    tags.append(f"df.residual:{payload.df_residual}")
    return tags


def _plot_spec_tags(envelope: ArtifactEnvelope) -> list[str]:
    payload = envelope.payload
    tags = []
    if payload.label_x is not None:
        tags.append(f"labelx:{payload.label_x}")
    if payload.label_y is not None:
        tags.append(f"labely:{payload.label_y}")
    return tags


register_extractor(DATASET, _dataset_tags)
register_extractor(LINEAR_MODEL, _linear_model_tags)
register_extractor(PLOT_SPEC, _plot_spec_tags)
register_extractor(GENERIC, lambda envelope: [])
register_extractor("session_info", lambda envelope: [])


def extract_tags(envelope: ArtifactEnvelope, clock: datetime | str | None = None) -> list[str]:
    """Automatic tags for one save event.

    Always: name, class (one per class name), date, format per stored format.
    Class-specific tags come from the registry: the first registered class
    name wins, falling back to the envelope kind's extractor.
    """
    envelope.validate()
    ts = format_ts(clock)
    tags = [f"name:{envelope.name}"]
    tags += [f"class:{cls}" for cls in envelope.classes]
    extractor = None
    for cls in envelope.classes:
        if cls in _EXTRACTORS:
            extractor = _EXTRACTORS[cls]
            break
    if extractor is None:
        extractor = _EXTRACTORS[envelope.kind]  # payload structure is still known
    tags += extractor(envelope)
    tags.append(f"date:{ts}")
    tags += [f"format:{fmt}" for fmt in envelope.formats]
    return tags


def day_of(ts_text: str) -> date:
    return parse_ts(ts_text).date()
