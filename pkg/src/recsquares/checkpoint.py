"""Checkpoint file for resumable searches.

One JSON document, rewritten atomically (write to a temp file, then
``os.replace``) after every completed work unit:

    {"format": "recsquares-checkpoint", "version": 1,
     "b": ..., "options_digest": ..., "completed": {"<uid>": <unit result>},
     "checksum": "<sha256 of the canonical JSON of every other field>"}

A file whose checksum, version, b or option digest does not match is
refused rather than silently restarted.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any

FORMAT = "recsquares-checkpoint"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def _canonical(doc: dict[str, Any]) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def _checksum(doc: dict[str, Any]) -> str:
    body = {k: v for k, v in doc.items() if k != "checksum"}
    return hashlib.sha256(_canonical(body)).hexdigest()


def save(path: str | Path, b: int, digest: str, completed: dict[int, dict]) -> None:
    path = Path(path)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "b": b,
        "options_digest": digest,
        "completed": {str(k): completed[k] for k in sorted(completed)},
    }
    doc["checksum"] = _checksum(doc)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_canonical(doc))
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load(path: str | Path, b: int, digest: str) -> dict[int, dict]:
    try:
        with open(path, "rb") as fh:
            doc = json.loads(fh.read())
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CheckpointError(f"{path} is not a checkpoint file")
    if doc.get("checksum") != _checksum(doc):
        raise CheckpointError(f"checkpoint {path} failed its integrity check; refusing to resume")
    if doc.get("version") != VERSION:
        raise CheckpointError(f"checkpoint version {doc.get('version')} is not supported")
    if doc.get("b") != b or doc.get("options_digest") != digest:
        raise CheckpointError("checkpoint was written for a different b or different search options")
    return {int(k): v for k, v in doc["completed"].items()}
