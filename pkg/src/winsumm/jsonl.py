"""Line-delimited JSON records.

This is the one structured-text family shared by corpus files, dataset
exports, chains files, traces, and reports: UTF-8, one JSON object per line,
each object carrying a `kind` field. Files written by the CLI start with a
`kind: "run_config"` record echoing the invocation; readers skip it.

Serialization is pinned (sorted keys, compact separators, no ASCII escaping)
so identical data always produces identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import CorpusLoadError

RUN_CONFIG_KIND = "run_config"


def dump_record(obj: dict[str, Any]) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def read_records(path) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield (line_number, record) pairs, skipping blank lines and run_config headers."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusLoadError(f"cannot read file: {exc}", path=path) from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusLoadError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from exc
        if not isinstance(obj, dict):
            raise CorpusLoadError("record is not an object", path=path, line=lineno)
        if obj.get("kind") == RUN_CONFIG_KIND:
            continue
        yield lineno, obj


def write_records(path, records: Iterable[dict[str, Any]], header: dict[str, Any] | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(dump_record({"kind": RUN_CONFIG_KIND, **header}) + "\n")
        for rec in records:
            fh.write(dump_record(rec) + "\n")


def require(record: dict, key: str, types, *, path, line: int):
    """Fetch a typed field from a record or raise a located load error."""
    if key not in record:
        raise CorpusLoadError(f"missing field '{key}'", path=path, line=line)
    value = record[key]
    if not isinstance(value, types):
        raise CorpusLoadError(f"field '{key}' has wrong type", path=path, line=line)
    return value
