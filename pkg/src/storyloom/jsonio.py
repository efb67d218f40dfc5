"""Canonical JSON writing shared by every file the CLI produces.

Keys are sorted and floats keep Python's shortest round-trip repr, so
identical inputs always serialize to identical bytes and every value
reloads exactly.  (Fixed-width decimal output was rejected: rounding
world values can flip a cell across a feature-band edge, breaking the
tags-match-values invariant on reload.)
"""

from __future__ import annotations

import json

from .errors import StoryloomError


class DocumentError(StoryloomError):
    """A JSON document could not be read or failed schema validation."""


def canonical_dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise DocumentError(f"{path}: invalid JSON at line {e.lineno}") from e
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: expected a JSON object")
    return doc


def dump_json(doc, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(canonical_dumps(doc))
