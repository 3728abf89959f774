"""Record/replay of raw HTTP responses.

A fixture file is one JSON header line followed by the verbatim response
bytes::

    {"format": "nftappraise-fixture/1", "spec": {...}, "fetched_at": "...", "length": 123}
    <response bytes>
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
from pathlib import Path

from ..errors import NoFixtureError, SchemaError
from .records import FetchSpec

FORMAT = "nftappraise-fixture/1"


def fixture_name(spec):
    digest = hashlib.sha256(spec.key().encode()).hexdigest()[:20]
    return f"{spec.source}-{digest}.fixture"


class FixtureStore:
    def __init__(self, root):
        self.root = Path(root)

    @classmethod
    def from_env(cls):
        root = os.environ.get("APPRAISE_FIXTURE_DIR")
        return cls(root) if root else None

    def path(self, spec):
        return self.root / fixture_name(spec)

    def record(self, spec, body, fetched_at=None):
        if fetched_at is None:
            fetched_at = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
        header = {"format": FORMAT, "spec": spec.to_dict(), "fetched_at": fetched_at,
                  "length": len(body)}
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.path(spec)
        path.write_bytes(json.dumps(header, sort_keys=True).encode() + b"\n" + bytes(body))
        return path

    def replay(self, spec):
        path = self.path(spec)
        if not path.is_file():
            raise NoFixtureError(f"no fixture for {spec.key()} (expected {path})")
        raw = path.read_bytes()
        head, sep, body = raw.partition(b"\n")
        try:
            header = json.loads(head)
        except ValueError:
            raise SchemaError(f"{path}: unreadable fixture header") from None
        if not sep or header.get("format") != FORMAT:
            raise SchemaError(f"{path}: not a {FORMAT} file")
        if FetchSpec.from_dict(header["spec"]) != spec:
            raise SchemaError(f"{path}: fixture was recorded for {header['spec']}, not {spec.to_dict()}")
        if len(body) != header["length"]:
            raise SchemaError(f"{path}: body is {len(body)} bytes, header says {header['length']}")
        return body
