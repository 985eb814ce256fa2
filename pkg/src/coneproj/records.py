"""Serialized run records: JSON and a two-column ``field,value`` CSV.

Floats are written with Python's shortest round-trip repr, so parsing an
emitted record gives back the same numbers bit for bit.  In the CSV form
nested fields become dotted paths and list items get ``[i]`` suffixes
(``trace[0].b[2]``).  Value cells hold JSON scalars; strings are written
bare unless they would read back as JSON, and empty containers appear as
``[]`` or ``{}``.
"""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field

SCHEMA_VERSION = 1
TIMING_FIELD = "timing_us"


@dataclass
class RunRecord:
    """Everything a ``project`` run reports."""

    x: list
    phi: list
    config: dict
    status: str
    y: list
    rho: list
    J: list
    s: float
    iterations: int
    diagnostics: dict
    version: str
    timing_us: int = 0
    trace: list | None = None
    certificate: dict | None = None
    oracle_max_abs_diff: float | None = None
    spec: int = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    _ORDER = (
        "spec", "version", "x", "phi", "config", "status", "y", "rho", "J", "s",
        "iterations", "diagnostics", "trace", "certificate", "oracle_max_abs_diff", TIMING_FIELD,
    )

    def to_dict(self):
        d = {k: getattr(self, k) for k in self._ORDER}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {k: d.pop(k) for k in cls._ORDER if k in d}
        return cls(**known, extra=d)

    def to_json(self):
        return dumps_json(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self):
        return dumps_flat_csv(self.to_dict())

    @classmethod
    def from_csv(cls, text):
        return cls.from_dict(loads_flat_csv(text))


def dumps_json(obj):
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _flatten(obj, path, out):
    if isinstance(obj, dict):
        if not obj:
            out.append((path, "{}"))
        for k, v in obj.items():
            _flatten(v, f"{path}.{k}" if path else k, out)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append((path, "[]"))
        for i, v in enumerate(obj):
            _flatten(v, f"{path}[{i}]", out)
    elif isinstance(obj, str) and not _is_json(obj) and obj not in ("[]", "{}"):
        out.append((path, obj))
    else:
        out.append((path, json.dumps(obj)))


def _is_json(text):
    try:
        json.loads(text)
    except ValueError:
        return False
    return True


def dumps_flat_csv(obj):
    rows = []
    _flatten(obj, "", rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    w.writerows(rows)
    return buf.getvalue()


_TOKEN = re.compile(r"\.?([^.\[\]]+)|\[(\d+)\]")


def _split_path(path):
    return [int(idx) if idx else key for key, idx in _TOKEN.findall(path)]


def _insert(root, keys, value):
    node = root
    for key, nxt in zip(keys, keys[1:]):
        child = [] if isinstance(nxt, int) else {}
        if isinstance(key, int):
            if key == len(node):
                node.append(child)
            node = node[key]
        else:
            node = node.setdefault(key, child)
    last = keys[-1]
    if isinstance(last, int):
        if last != len(node):
            raise ValueError(f"list items out of order at index {last}")
        node.append(value)
    else:
        node[last] = value


def loads_flat_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["field", "value"]:
        raise ValueError("expected a 'field,value' header")
    root = {}
    for path, cell in rows[1:]:
        if cell == "[]":
            value = []
        elif cell == "{}":
            value = {}
        else:
            value = json.loads(cell) if _is_json(cell) else cell
        _insert(root, _split_path(path), value)
    return root
