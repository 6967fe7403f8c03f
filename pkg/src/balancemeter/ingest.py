"""Parsing, serialization and batch ingest of the canonical log line format.

One UTF-8 JSON object per line, unknown fields rejected. The same codec
is used by files, the HTTP service and the store (no second format).
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import BalanceError, InvariantViolation, MalformedRecord, SchemaViolation
from .model import CombatLog, PlayerRecord

log = logging.getLogger(__name__)

_LOG_FIELDS = (
    "log_id",
    "encounter_id",
    "patch_era",
    "timestamp_utc",
    "success",
    "duration_s",
    "players",
)
_PLAYER_FIELDS = (
    "account_hash",
    "profession",
    "specialization",
    "dps",
    "power_dps",
    "condition_dps",
    "healing_ps",
    "boon_ps",
)
_PLAYER_RATE_FIELDS = ("dps", "power_dps", "condition_dps", "healing_ps", "boon_ps")


def _require_str(obj: dict, key: str, path: str) -> str:
    value = obj[key]
    if not isinstance(value, str) or not value:
        raise SchemaViolation(path, f"expected non-empty string, got {value!r}")
    return value


def _require_number(obj: dict, key: str, path: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected number, got {value!r}")
    return float(value)


def _check_fields(obj: dict, expected: tuple[str, ...], path: str) -> None:
    missing = [k for k in expected if k not in obj]
    if missing:
        raise SchemaViolation(f"{path}{missing[0]}", "missing field")
    unknown = [k for k in obj if k not in expected]
    if unknown:
        raise SchemaViolation(f"{path}{unknown[0]}", "unknown field")


def _parse_player(obj: object, path: str) -> PlayerRecord:
    if not isinstance(obj, dict):
        raise SchemaViolation(path, f"expected object, got {type(obj).__name__}")
    _check_fields(obj, _PLAYER_FIELDS, path + ".")
    spec = obj["specialization"]
    if spec is not None and not isinstance(spec, str):
        raise SchemaViolation(f"{path}.specialization", f"expected string or null, got {spec!r}")
    rates = {k: _require_number(obj, k, f"{path}.{k}") for k in _PLAYER_RATE_FIELDS}
    try:
        return PlayerRecord(
            account_hash=_require_str(obj, "account_hash", f"{path}.account_hash"),
            profession=_require_str(obj, "profession", f"{path}.profession"),
            specialization=spec,
            **rates,
        )
    except InvariantViolation as exc:
        raise InvariantViolation(f"{path}.{exc.field_path}", exc.message) from exc


def parse_log_line(line: bytes | str) -> CombatLog:
    """Parse and fully validate one canonical log line.

    Raises MalformedRecord on syntax problems, SchemaViolation on
    missing/ill-typed/unknown fields, InvariantViolation when a core
    invariant fails; each carries the offending field path.
    """
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRecord("line", f"not valid UTF-8: {exc}") from exc
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord("line", f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaViolation("line", f"expected object, got {type(obj).__name__}")
    _check_fields(obj, _LOG_FIELDS, "")

    success = obj["success"]
    if not isinstance(success, bool):
        raise SchemaViolation("success", f"expected boolean, got {success!r}")
    timestamp = obj["timestamp_utc"]
    if isinstance(timestamp, bool) or not isinstance(timestamp, int):
        raise SchemaViolation("timestamp_utc", f"expected integer, got {timestamp!r}")
    players_raw = obj["players"]
    if not isinstance(players_raw, list):
        raise SchemaViolation("players", f"expected array, got {players_raw!r}")
    players = [_parse_player(p, f"players[{i}]") for i, p in enumerate(players_raw)]
    return CombatLog(
        log_id=_require_str(obj, "log_id", "log_id"),
        encounter_id=_require_str(obj, "encounter_id", "encounter_id"),
        patch_era=_require_str(obj, "patch_era", "patch_era"),
        timestamp_utc=timestamp,
        success=success,
        duration_s=_require_number(obj, "duration_s", "duration_s"),
        players=tuple(players),
    )


def log_to_dict(combat_log: CombatLog) -> dict:
    """Canonical dict form (fixed field order) of one log."""
    return {
        "log_id": combat_log.log_id,
        "encounter_id": combat_log.encounter_id,
        "patch_era": combat_log.patch_era,
        "timestamp_utc": combat_log.timestamp_utc,
        "success": combat_log.success,
        "duration_s": combat_log.duration_s,
        "players": [
            {
                "account_hash": p.account_hash,
                "profession": p.profession,
                "specialization": p.specialization,
                "dps": p.dps,
                "power_dps": p.power_dps,
                "condition_dps": p.condition_dps,
                "healing_ps": p.healing_ps,
                "boon_ps": p.boon_ps,
            }
            for p in combat_log.players
        ],
    }


def serialize_log(combat_log: CombatLog) -> str:
    """Render a log as its canonical line (no trailing newline).

    serialize -> parse is the identity; parse -> serialize is idempotent
    on accepted lines.
    """
    return json.dumps(log_to_dict(combat_log), separators=(",", ":"), ensure_ascii=False)


@dataclass
class IngestReport:
    """Outcome of one ingest pass; totals reconcile with lines processed."""

    accepted: int = 0
    rejected: int = 0
    duplicate: int = 0
    rejection_reasons: Counter = field(default_factory=Counter)
    io_errors: list[str] = field(default_factory=list)

    @property
    def processed(self) -> int:
        return self.accepted + self.rejected + self.duplicate

    def merge(self, other: "IngestReport") -> "IngestReport":
        self.accepted += other.accepted
        self.rejected += other.rejected
        self.duplicate += other.duplicate
        self.rejection_reasons.update(other.rejection_reasons)
        self.io_errors.extend(other.io_errors)
        return self

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "duplicate": self.duplicate,
            "rejection_reasons": {k: self.rejection_reasons[k] for k in sorted(self.rejection_reasons)},
            "io_errors": list(self.io_errors),
        }


def ingest_lines(lines: Iterable[str], store) -> IngestReport:
    """Validate and append lines to the store; blank lines are skipped.

    Never raises on malformed input: every rejected line is counted under
    its error code. Duplicates (same log_id) are counted, first wins.
    """
    report = IngestReport()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            combat_log = parse_log_line(line)
        except BalanceError as exc:
            report.rejected += 1
            report.rejection_reasons[exc.code] += 1
            log.debug("rejected line %d: %s", lineno, exc)
            continue
        try:
            stored = store.append(combat_log)
        except BalanceError as exc:
            report.rejected += 1
            report.rejection_reasons[exc.code] += 1
            log.debug("rejected line %d at store: %s", lineno, exc)
            continue
        if stored:
            report.accepted += 1
        else:
            report.duplicate += 1
    return report


def _iter_lines(handle: IO[bytes]) -> Iterator[str]:
    for raw in handle:
        yield raw.decode("utf-8", errors="surrogateescape")


def ingest_files(paths: Iterable[str | Path], store) -> IngestReport:
    """Ingest each file in order; unreadable paths are recorded and skipped."""
    report = IngestReport()
    for path in paths:
        try:
            with open(path, "rb") as handle:
                report.merge(ingest_lines(_iter_lines(handle), store))
        except OSError as exc:
            report.io_errors.append(f"{path}: {exc.strerror or exc}")
            log.warning("skipping unreadable file %s: %s", path, exc)
    store.flush()
    return report
