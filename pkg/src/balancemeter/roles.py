"""Role bucketing of player records.

The rule is a fixed decision ladder over rates relative to the
encounter's median dps, so one procedure classifies across encounters
whose dps scales differ by multiples. Threshold values are engine
configuration, not established facts, and are echoed in every report.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation, NonPositiveBaseline
from .model import PlayerRecord, RoleBucket

_EPSILON = 1e-9


@dataclass(frozen=True)
class RoleThresholds:
    """Knobs of the classification ladder (see classify)."""

    heal_ratio_min: float = 0.5
    boon_ratio_min: float = 0.15
    condition_share_min: float = 0.5

    def __post_init__(self):
        if self.heal_ratio_min < 0:
            raise InvariantViolation("heal_ratio_min", "must be >= 0")
        for name in ("boon_ratio_min", "condition_share_min"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise InvariantViolation(name, f"must be in [0, 1], got {value!r}")

    def to_dict(self) -> dict:
        return {
            "heal_ratio_min": self.heal_ratio_min,
            "boon_ratio_min": self.boon_ratio_min,
            "condition_share_min": self.condition_share_min,
        }


def classify(
    record: PlayerRecord,
    encounter_median_dps: float,
    thresholds: RoleThresholds = RoleThresholds(),
) -> RoleBucket:
    """Assign exactly one role bucket to a player record.

    Ladder, first match wins:
      1. full support      healing_ps >= heal_ratio_min * encounter median dps
      2. offensive support boon_ps >= boon_ratio_min * encounter median dps
      3. damage over time  condition_dps / max(dps, eps) >= condition_share_min
      4. direct damage     otherwise

    Support checks come first: support builds are damage builds that give
    up output for utility, so utility signals are role-defining. The rule
    is scale-covariant: multiplying all rates and the baseline by the same
    positive constant leaves the bucket unchanged.
    """
    if encounter_median_dps <= 0:
        raise NonPositiveBaseline(
            f"encounter median dps must be > 0, got {encounter_median_dps!r}"
        )
    if record.healing_ps >= thresholds.heal_ratio_min * encounter_median_dps:
        return RoleBucket.FULL_SUPPORT
    if record.boon_ps >= thresholds.boon_ratio_min * encounter_median_dps:
        return RoleBucket.OFFENSIVE_SUPPORT
    if record.condition_dps / max(record.dps, _EPSILON) >= thresholds.condition_share_min:
        return RoleBucket.DAMAGE_OVER_TIME
    return RoleBucket.DIRECT_DAMAGE
