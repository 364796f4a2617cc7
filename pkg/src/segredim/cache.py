"""Append-only verdict cache, one JSON record per line.

Records are keyed by canonical statement text plus a digest of the run
configuration, so results from a different seed or budget never alias.
The file is human-diffable and safe to truncate; unreadable lines are
skipped on load.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

from .config import TOOL_VERSION
from .formats import Statement


@dataclass(frozen=True)
class CacheRecord:
    statement: str
    verdict: bool
    cert_sha256: str
    tool_version: str
    timestamp: str
    config_digest: str

    def to_json(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_json(data: dict) -> "CacheRecord":
        return CacheRecord(
            statement=str(data["statement"]),
            verdict=bool(data["verdict"]),
            cert_sha256=str(data["cert_sha256"]),
            tool_version=str(data.get("tool_version", "")),
            timestamp=str(data.get("timestamp", "")),
            config_digest=str(data["config_digest"]),
        )


def _key_text(statement: Union[Statement, str]) -> str:
    if isinstance(statement, Statement):
        return str(statement.canonical())
    return statement


class VerdictCache:
    """Loads the whole file once; put() appends and flushes immediately."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._records: dict[tuple[str, str], CacheRecord] = {}
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = CacheRecord.from_json(json.loads(line))
                except (ValueError, KeyError, TypeError):
                    continue
                self._records[(rec.statement, rec.config_digest)] = rec

    def __len__(self) -> int:
        return len(self._records)

    def get(self, statement: Union[Statement, str],
            config_digest: str) -> Optional[CacheRecord]:
        return self._records.get((_key_text(statement), config_digest))

    def put(self, statement: Union[Statement, str], verdict: bool,
            certificate, config_digest: str) -> CacheRecord:
        text = _key_text(statement)
        cert_sha = ""
        if certificate is not None:
            cert_sha = hashlib.sha256(certificate.dumps().encode()).hexdigest()
        rec = CacheRecord(
            statement=text,
            verdict=bool(verdict),
            cert_sha256=cert_sha,
            tool_version=TOOL_VERSION,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            config_digest=config_digest,
        )
        existing = self._records.get((text, config_digest))
        if existing is not None and existing.verdict != rec.verdict:
            raise RuntimeError(
                f"cache conflict for {text}: stored {existing.verdict}, "
                f"new {rec.verdict}")
        self._records[(text, config_digest)] = rec
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
            fh.flush()
        return rec
