"""Parse JSON-Lines audit logs into entity and event records.

Each line is one JSON object carrying a ``record_type`` discriminator::

    {"record_type": "entity", "entity_id": "p1", "entity_type": "SUBJECT_PROCESS",
     "attrs": [["name", "nginx"]]}
    {"record_type": "event", "event_id": "e1", "subject": "p1", "object": "f1",
     "ts": 1000, "op": "EVENT_READ"}

Unknown extra fields are ignored.
"""
from __future__ import annotations

import gzip
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Union

from .errors import ConflictingEntity, IngestError, MalformedLine, MissingField, UnknownRecordType

logger = logging.getLogger(__name__)

Attrs = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    entity_type: str
    attrs: Attrs = ()

    def to_json(self) -> dict:
        return {
            "record_type": "entity",
            "entity_id": self.entity_id,
            "entity_type": self.entity_type,
            "attrs": [list(kv) for kv in self.attrs],
        }


@dataclass(frozen=True)
class EventRecord:
    event_id: str
    subject_id: str
    object_id: str
    timestamp_ns: int
    operation: str
    attrs: Attrs = ()

    def to_json(self) -> dict:
        return {
            "record_type": "event",
            "event_id": self.event_id,
            "subject": self.subject_id,
            "object": self.object_id,
            "ts": self.timestamp_ns,
            "op": self.operation,
            "attrs": [list(kv) for kv in self.attrs],
        }


LogRecord = Union[EntityRecord, EventRecord]


class LineError(NamedTuple):
    line: int
    reason: str
    detail: str


@dataclass
class IngestResult:
    entities: dict[str, EntityRecord] = field(default_factory=dict)
    events: list[EventRecord] = field(default_factory=list)
    errors: list[LineError] = field(default_factory=list)
    duplicate_entities: int = 0

    @property
    def n_lines(self) -> int:
        return len(self.entities) + self.duplicate_entities + len(self.events) + len(self.errors)


def dumps(record: LogRecord) -> str:
    """Serialize a record as one compact JSON line (no trailing newline)."""
    return json.dumps(record.to_json(), separators=(",", ":"), ensure_ascii=False)


def _require_str(obj: dict, key: str) -> str:
    value = obj.get(key)
    if value is None or value == "":
        raise MissingField(key)
    if not isinstance(value, str):
        raise MalformedLine(f"field {key!r} must be a string")
    return value


def _parse_attrs(raw) -> Attrs:
    if raw is None:
        return ()
    if isinstance(raw, dict):
        raw = list(raw.items())
    if not isinstance(raw, list):
        raise MalformedLine("attrs must be a list of [key, value] pairs")
    out = []
    for pair in raw:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise MalformedLine("attrs must be a list of [key, value] pairs")
        k, v = pair
        if not isinstance(k, str) or not isinstance(v, str):
            raise MalformedLine("attr keys and values must be strings")
        out.append((k, v))
    return tuple(out)


def parse_log_line(line: str) -> LogRecord:
    """Parse one JSON-Lines record.

    Raises:
        MalformedLine: the line is not a JSON object or a field has the wrong type.
        MissingField: a mandatory field is absent or empty.
        UnknownRecordType: ``record_type`` is neither ``entity`` nor ``event``.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedLine("line is not a JSON object")

    rtype = obj.get("record_type")
    if rtype is None:
        raise MissingField("record_type")
    if rtype == "entity":
        return EntityRecord(
            entity_id=_require_str(obj, "entity_id"),
            entity_type=_require_str(obj, "entity_type"),
            attrs=_parse_attrs(obj.get("attrs")),
        )
    if rtype == "event":
        event_id = _require_str(obj, "event_id")
        subject = _require_str(obj, "subject")
        obj_id = _require_str(obj, "object")
        if "ts" not in obj or obj["ts"] is None:
            raise MissingField("ts")
        ts = obj["ts"]
        if isinstance(ts, bool) or not isinstance(ts, int):
            raise MalformedLine("field 'ts' must be an integer")
        if ts < 0:
            raise MalformedLine("field 'ts' must be non-negative")
        op = _require_str(obj, "op")
        return EventRecord(event_id, subject, obj_id, ts, op, _parse_attrs(obj.get("attrs")))
    raise UnknownRecordType(f"unknown record_type {rtype!r}")


def ingest_stream(lines: Iterable[str]) -> IngestResult:
    """Parse a sequence of lines, collecting per-line failures instead of raising.

    Identical re-sent entity lines are merged; events are kept verbatim and in
    order. A second entity line that reuses an id with different content
    aborts the run with :class:`ConflictingEntity`.
    """
    result = IngestResult()
    for lineno, line in enumerate(lines, start=1):
        try:
            record = parse_log_line(line)
        except IngestError as exc:
            result.errors.append(LineError(lineno, type(exc).__name__, str(exc)))
            continue
        if isinstance(record, EntityRecord):
            prev = result.entities.get(record.entity_id)
            if prev is None:
                result.entities[record.entity_id] = record
            elif prev == record:
                result.duplicate_entities += 1
            else:
                raise ConflictingEntity(
                    f"line {lineno}: entity {record.entity_id!r} redeclared with different content"
                )
        else:
            result.events.append(record)
    for err in result.errors:
        logger.warning("line %d: %s: %s", err.line, err.reason, err.detail)
    return result


def open_log(path) -> io.TextIOBase:
    """Open a log file for reading; ``.gz`` files are decompressed transparently."""
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8")


def _iter_lines(fh) -> Iterator[str]:
    for line in fh:
        yield line.rstrip("\n").rstrip("\r")


def ingest_file(path) -> IngestResult:
    with open_log(path) as fh:
        return ingest_stream(_iter_lines(fh))


def write_ingest(result: IngestResult, directory) -> dict[str, Path]:
    """Write ``entities.jsonl``, ``events.jsonl`` and ``errors.jsonl`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "entities": directory / "entities.jsonl",
        "events": directory / "events.jsonl",
        "errors": directory / "errors.jsonl",
    }
    with open(paths["entities"], "w", encoding="utf-8", newline="\n") as fh:
        for rec in result.entities.values():
            fh.write(dumps(rec) + "\n")
    with open(paths["events"], "w", encoding="utf-8", newline="\n") as fh:
        for rec in result.events:
            fh.write(dumps(rec) + "\n")
    with open(paths["errors"], "w", encoding="utf-8", newline="\n") as fh:
        for err in result.errors:
            fh.write(json.dumps({"line": err.line, "reason": err.reason, "detail": err.detail}) + "\n")
    return paths


def read_ingest(directory) -> IngestResult:
    directory = Path(directory)
    result = IngestResult()
    with open(directory / "entities.jsonl", encoding="utf-8") as fh:
        for line in _iter_lines(fh):
            rec = parse_log_line(line)
            result.entities[rec.entity_id] = rec
    with open(directory / "events.jsonl", encoding="utf-8") as fh:
        result.events = [parse_log_line(line) for line in _iter_lines(fh)]
    errors_path = directory / "errors.jsonl"
    if errors_path.exists():
        with open(errors_path, encoding="utf-8") as fh:
            for line in _iter_lines(fh):
                obj = json.loads(line)
                result.errors.append(LineError(obj["line"], obj["reason"], obj["detail"]))
    return result


def report_errors(result: IngestResult, stream=None) -> None:
    stream = stream or sys.stderr
    for err in result.errors:
        print(f"line {err.line}: {err.reason}: {err.detail}", file=stream)
