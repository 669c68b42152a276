"""Append-only, hash-chained event log backing each audit session.

One JSON object per line. Every record carries `seq`, `prev` (the previous
record's digest, GENESIS for the first) and `digest`, the SHA-256 of
`<prev>\\n<canonical json of the record without prev/digest>`. Rewriting,
dropping or reordering any record breaks the chain for everything after it.
"""
from __future__ import annotations

import hashlib
import json
import os
from typing import Iterator

GENESIS = "0" * 64


class LogIntegrityError(Exception):
    pass


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def chain_digest(prev: str, payload: dict) -> str:
    return hashlib.sha256(f"{prev}\n{_canonical(payload)}".encode("utf-8")).hexdigest()


class EventLog:
    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._last_digest = GENESIS
        self._count = 0
        if os.path.exists(self.path):
            for record in self.read_all():
                self._last_digest = record["digest"]
                self._count += 1

    def append(self, payload: dict) -> dict:
        """Append one event; returns the full record as written."""
        record = dict(payload)
        record["seq"] = self._count
        record["prev"] = self._last_digest
        body = {k: v for k, v in record.items() if k not in ("prev", "digest")}
        record["digest"] = chain_digest(self._last_digest, body)
        with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(_canonical(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._last_digest = record["digest"]
        self._count += 1
        return record

    def read_all(self) -> list[dict]:
        return list(verify_log_lines(self._iter_lines()))

    def _iter_lines(self) -> Iterator[str]:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield line


def verify_log_lines(lines: Iterator[str]) -> Iterator[dict]:
    """Parse and verify a chain, yielding records; raises on any break."""
    prev = GENESIS
    for seq, line in enumerate(lines):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogIntegrityError(f"record {seq}: invalid JSON: {exc}") from exc
        if record.get("seq") != seq:
            raise LogIntegrityError(f"record {seq}: sequence number {record.get('seq')}")
        if record.get("prev") != prev:
            raise LogIntegrityError(f"record {seq}: broken chain (prev mismatch)")
        body = {k: v for k, v in record.items() if k not in ("prev", "digest")}
        expected = chain_digest(prev, body)
        if record.get("digest") != expected:
            raise LogIntegrityError(f"record {seq}: digest mismatch")
        prev = record["digest"]
        yield record
