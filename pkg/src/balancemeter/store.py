"""Append-only log store partitioned by (patch era, encounter).

Layout under the root directory:

    eras                    era registry, one ``label,start_utc,end_utc`` per line
    index                   per-partition record counts (regenerable by rescan)
    {era_label}/{encounter_id}.log   one canonical log line per record

Era labels and encounter ids are percent-encoded in file names so that
arbitrary encounter strings stay path-safe. Single writer, multiple
readers: a record is visible once its complete line is written; readers
ignore a trailing partial line.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import IO, Iterator
from urllib.parse import quote, unquote

from .errors import EraUnknown, InvariantViolation, StoreError
from .ingest import parse_log_line, serialize_log
from .model import CombatLog, EraId

_ERAS_FILE = "eras"
_INDEX_FILE = "index"


def _partition_name(encounter_id: str) -> str:
    return quote(encounter_id, safe="") + ".log"


def _era_dirname(label: str) -> str:
    return quote(label, safe="")


class LogStore:
    """Filesystem-backed store of validated combat logs."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._eras: dict[str, EraId] = {}
        self._counts: dict[tuple[str, str], int] = {}
        self._known_ids: set[str] = set()
        self._handles: dict[tuple[str, str], IO[str]] = {}
        self._dirty = False

    # -- lifecycle -----------------------------------------------------------

    @classmethod
    def create(cls, root: str | Path, eras: list[EraId] | None = None) -> "LogStore":
        """Initialise a store directory (idempotent) and register eras."""
        store = cls(root)
        store.root.mkdir(parents=True, exist_ok=True)
        eras_path = store.root / _ERAS_FILE
        if eras_path.exists():
            store._load_eras()
        for era in eras or []:
            store.register_era(era)
        store._write_eras()
        store._rebuild_from_partitions()
        return store

    @classmethod
    def open(cls, root: str | Path) -> "LogStore":
        """Open an existing store; the index is rebuilt by rescan."""
        store = cls(root)
        if not (store.root / _ERAS_FILE).exists():
            raise StoreError(f"not a log store (no era registry): {store.root}")
        store._load_eras()
        store._rebuild_from_partitions()
        return store

    def close(self) -> None:
        self.flush()
        for handle in self._handles.values():
            handle.close()
        self._handles.clear()

    def __enter__(self) -> "LogStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- era registry ----------------------------------------------------------

    def register_era(self, era: EraId) -> None:
        existing = self._eras.get(era.label)
        if existing is not None:
            if existing != era:
                raise InvariantViolation("era", f"label {era.label!r} already registered with different bounds")
            return
        for other in self._eras.values():
            if era.overlaps(other):
                raise InvariantViolation(
                    "era", f"{era.label!r} overlaps registered era {other.label!r}"
                )
        self._eras[era.label] = era
        self._dirty = True

    def eras(self) -> list[EraId]:
        return sorted(self._eras.values(), key=lambda e: (e.start_utc, e.label))

    def era(self, label: str) -> EraId:
        try:
            return self._eras[label]
        except KeyError:
            raise EraUnknown(f"era label not registered: {label!r}") from None

    def era_registry_text(self) -> str:
        return "".join(f"{e.label},{e.start_utc},{e.end_utc}\n" for e in self.eras())

    # -- writes ----------------------------------------------------------------

    def append(self, combat_log: CombatLog) -> bool:
        """Persist a log in its (era, encounter) partition.

        Returns True if newly stored, False for a duplicate log_id.
        Raises EraUnknown when the log's era label is not registered.
        """
        if combat_log.patch_era not in self._eras:
            raise EraUnknown(f"era label not registered: {combat_log.patch_era!r}")
        if combat_log.log_id in self._known_ids:
            return False
        part = (combat_log.patch_era, combat_log.encounter_id)
        handle = self._handles.get(part)
        if handle is None:
            era_dir = self.root / _era_dirname(combat_log.patch_era)
            era_dir.mkdir(parents=True, exist_ok=True)
            handle = open(era_dir / _partition_name(combat_log.encounter_id), "a", encoding="utf-8")
            self._handles[part] = handle
        handle.write(serialize_log(combat_log))
        handle.write("\n")
        self._known_ids.add(combat_log.log_id)
        self._counts[part] = self._counts.get(part, 0) + 1
        self._dirty = True
        return True

    def flush(self) -> None:
        """Flush partition handles to disk and persist the index."""
        for handle in self._handles.values():
            handle.flush()
            os.fsync(handle.fileno())
        if self._dirty:
            self._write_eras()
            self._write_index()
            self._dirty = False

    # -- reads -------------------------------------------------------------------

    def scan(self, era: EraId | None = None, encounter: str | None = None) -> Iterator[CombatLog]:
        """Yield matching logs ordered by (timestamp_utc, log_id) ascending."""
        self.flush()
        if era is not None and era.label not in self._eras:
            raise EraUnknown(f"era label not registered: {era.label!r}")
        matches: list[CombatLog] = []
        for part_era, part_enc in sorted(self._counts):
            if era is not None and part_era != era.label:
                continue
            if encounter is not None and part_enc != encounter:
                continue
            matches.extend(self._read_partition(part_era, part_enc))
        matches.sort(key=lambda l: (l.timestamp_utc, l.log_id))
        yield from matches

    def count(self, era: EraId | None = None, encounter: str | None = None) -> int:
        total = 0
        for (part_era, part_enc), n in self._counts.items():
            if era is not None and part_era != era.label:
                continue
            if encounter is not None and part_enc != encounter:
                continue
            total += n
        return total

    def encounters(self, era: EraId | None = None) -> list[str]:
        found = {enc for (lbl, enc) in self._counts if era is None or lbl == era.label}
        return sorted(found)

    # -- internals ----------------------------------------------------------------

    def _read_partition(self, era_label: str, encounter_id: str) -> list[CombatLog]:
        path = self.root / _era_dirname(era_label) / _partition_name(encounter_id)
        logs = []
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.endswith("\n"):
                    break  # torn trailing write; a later reader will see it completed
                logs.append(parse_log_line(line))
        return logs

    def _load_eras(self) -> None:
        for line in (self.root / _ERAS_FILE).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            try:
                label, start, end = line.rsplit(",", 2)
                era = EraId(label, int(start), int(end))
            except (ValueError, InvariantViolation) as exc:
                raise StoreError(f"corrupt era registry line {line!r}: {exc}") from exc
            self._eras[era.label] = era

    def _write_eras(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / _ERAS_FILE).write_text(self.era_registry_text(), encoding="utf-8")

    def _write_index(self) -> None:
        lines = [
            f"{_era_dirname(lbl)}\t{quote(enc, safe='')}\t{n}\n"
            for (lbl, enc), n in sorted(self._counts.items())
        ]
        (self.root / _INDEX_FILE).write_text("".join(lines), encoding="utf-8")

    def _rebuild_from_partitions(self) -> None:
        self._counts.clear()
        self._known_ids.clear()
        for era_dir in sorted(self.root.iterdir()) if self.root.exists() else []:
            if not era_dir.is_dir():
                continue
            label = unquote(era_dir.name)
            if label not in self._eras:
                continue
            for part in sorted(era_dir.glob("*.log")):
                encounter_id = unquote(part.name[: -len(".log")])
                n = 0
                with open(part, "r", encoding="utf-8") as handle:
                    for line in handle:
                        if not line.endswith("\n") or not line.strip():
                            continue
                        try:
                            log_id = _extract_log_id(line)
                        except StoreError:
                            raise StoreError(f"corrupt partition {part}: bad line")
                        self._known_ids.add(log_id)
                        n += 1
                if n:
                    self._counts[(label, encounter_id)] = n
        self._write_index()


def _extract_log_id(line: str) -> str:
    try:
        obj = json.loads(line)
        log_id = obj["log_id"]
    except Exception as exc:
        raise StoreError(str(exc)) from exc
    if not isinstance(log_id, str):
        raise StoreError("log_id is not a string")
    return log_id
