"""Shared domain types: build identity, player records, combat logs, eras.

Everything here is immutable after construction and safe to share across
threads. No I/O and no statistics live in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import total_ordering

from .errors import EmptyProfession, InvariantViolation

# Relative tolerance (with absolute floor) for the dps decomposition check;
# community-recorded logs carry rounding noise.
DPS_DECOMPOSITION_REL_TOL = 1e-3
DPS_DECOMPOSITION_ABS_FLOOR = 1e-6

MAX_PLAYERS_PER_LOG = 10


class RoleBucket(Enum):
    """The four coarse functions a build serves in a group."""

    FULL_SUPPORT = "full_support"
    OFFENSIVE_SUPPORT = "offensive_support"
    DIRECT_DAMAGE = "direct_damage"
    DAMAGE_OVER_TIME = "damage_over_time"

    @property
    def order(self) -> int:
        return _ROLE_ORDER[self]

    @property
    def is_support(self) -> bool:
        return self in (RoleBucket.FULL_SUPPORT, RoleBucket.OFFENSIVE_SUPPORT)


_ROLE_ORDER = {role: i for i, role in enumerate(RoleBucket)}


def _normalize_identifier(value: str, what: str) -> str:
    value = value.strip().lower()
    if "/" in value or "\n" in value:
        raise InvariantViolation(what, "must not contain '/' or newlines")
    return value


@total_ordering
@dataclass(frozen=True)
class BuildKey:
    """Identity under which performances are aggregated.

    Ordering is lexicographic on (profession, specialization-or-empty,
    role declaration order) -- a total, stable order used for every
    tie-break in reports.
    """

    profession: str
    specialization: str | None
    role: RoleBucket

    def sort_key(self) -> tuple[str, str, int]:
        return (self.profession, self.specialization or "", self.role.order)

    def __lt__(self, other: "BuildKey") -> bool:
        if not isinstance(other, BuildKey):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.profession}/{self.specialization or ''}/{self.role.value}"

    @classmethod
    def from_string(cls, text: str) -> "BuildKey":
        parts = text.strip().split("/")
        if len(parts) != 3:
            raise InvariantViolation("build", f"not a canonical build string: {text!r}")
        profession, specialization, role_name = parts
        try:
            role = RoleBucket(role_name.strip().lower())
        except ValueError:
            raise InvariantViolation("build.role", f"unknown role {role_name!r}") from None
        return make_build_key(profession, specialization or None, role)


def make_build_key(profession: str, specialization: str | None, role: RoleBucket) -> BuildKey:
    """Build a normalized (lowercased, trimmed) BuildKey.

    Raises EmptyProfession if the profession is blank after trimming.
    """
    if not isinstance(role, RoleBucket):
        raise InvariantViolation("role", f"expected RoleBucket, got {role!r}")
    profession = _normalize_identifier(profession, "profession")
    if not profession:
        raise EmptyProfession("profession must be non-empty")
    if specialization is not None:
        specialization = _normalize_identifier(specialization, "specialization") or None
    return BuildKey(profession, specialization, role)


def _check_rate(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvariantViolation(name, f"must be finite, got {value!r}")
    if value < 0:
        raise InvariantViolation(name, f"must be non-negative, got {value!r}")
    return value


@dataclass(frozen=True)
class PlayerRecord:
    """One player slot in one encounter attempt, as per-second rates."""

    account_hash: str
    profession: str
    specialization: str | None
    dps: float
    power_dps: float
    condition_dps: float
    healing_ps: float
    boon_ps: float

    def __post_init__(self):
        for name in ("dps", "power_dps", "condition_dps", "healing_ps", "boon_ps"):
            object.__setattr__(self, name, _check_rate(name, getattr(self, name)))
        residual = abs(self.dps - (self.power_dps + self.condition_dps))
        tolerance = max(DPS_DECOMPOSITION_ABS_FLOOR, DPS_DECOMPOSITION_REL_TOL * self.dps)
        if residual > tolerance:
            raise InvariantViolation(
                "dps",
                f"power_dps + condition_dps = {self.power_dps + self.condition_dps!r} "
                f"deviates from dps = {self.dps!r} by more than {tolerance!r}",
            )


@dataclass(frozen=True)
class EraId:
    """A patch era: the interval between two balance updates."""

    label: str
    start_utc: int
    end_utc: int

    def __post_init__(self):
        if not self.label or self.label != self.label.strip():
            raise InvariantViolation("era.label", f"blank or untrimmed label {self.label!r}")
        if "," in self.label or "\n" in self.label:
            raise InvariantViolation("era.label", "must not contain ',' or newlines")
        if not (isinstance(self.start_utc, int) and isinstance(self.end_utc, int)):
            raise InvariantViolation("era", "start_utc/end_utc must be integers")
        if self.start_utc >= self.end_utc:
            raise InvariantViolation(
                "era", f"start_utc {self.start_utc} must precede end_utc {self.end_utc}"
            )

    def contains(self, timestamp_utc: int) -> bool:
        return self.start_utc <= timestamp_utc < self.end_utc

    def overlaps(self, other: "EraId") -> bool:
        return self.start_utc < other.end_utc and other.start_utc < self.end_utc


@dataclass(frozen=True)
class CombatLog:
    """One recorded encounter attempt.

    ``patch_era`` holds the era *label*; interval bounds live in the
    store's era registry (the wire format carries only the label).
    """

    log_id: str
    encounter_id: str
    patch_era: str
    timestamp_utc: int
    success: bool
    duration_s: float
    players: tuple[PlayerRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.log_id:
            raise InvariantViolation("log_id", "must be non-empty")
        if not self.encounter_id:
            raise InvariantViolation("encounter_id", "must be non-empty")
        if not self.patch_era:
            raise InvariantViolation("patch_era", "must be non-empty")
        if not isinstance(self.timestamp_utc, int) or isinstance(self.timestamp_utc, bool):
            raise InvariantViolation("timestamp_utc", "must be an integer")
        object.__setattr__(self, "duration_s", float(self.duration_s))
        if not math.isfinite(self.duration_s) or self.duration_s <= 0:
            raise InvariantViolation("duration_s", f"must be > 0, got {self.duration_s!r}")
        object.__setattr__(self, "players", tuple(self.players))
        if not 1 <= len(self.players) <= MAX_PLAYERS_PER_LOG:
            raise InvariantViolation(
                "players", f"must hold 1-{MAX_PLAYERS_PER_LOG} records, got {len(self.players)}"
            )
