"""Exception hierarchy for the whole engine.

Every domain error derives from BalanceError so callers (CLI, service)
can separate data problems from genuine bugs. ``code`` is the stable
machine-readable identifier surfaced in reports and HTTP responses.
"""

from __future__ import annotations


class BalanceError(Exception):
    """Base class for all expected, data-dependent failures."""

    @property
    def code(self) -> str:
        return type(self).__name__


class FieldError(BalanceError):
    """Error tied to a specific field path (e.g. ``players[2].dps``)."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        self.message = message
        super().__init__(f"{field_path}: {message}")


# -- core model -------------------------------------------------------------

class EmptyProfession(BalanceError):
    pass


class InvariantViolation(FieldError):
    pass


# -- ingest -----------------------------------------------------------------

class MalformedRecord(FieldError):
    pass


class SchemaViolation(FieldError):
    pass


class InvalidSpec(BalanceError):
    pass


class NetworkError(BalanceError):
    pass


class AuthError(BalanceError):
    pass


# -- store ------------------------------------------------------------------

class EraUnknown(BalanceError):
    pass


class StoreError(BalanceError):
    pass


# -- roles ------------------------------------------------------------------

class NonPositiveBaseline(BalanceError):
    pass


# -- distributions ----------------------------------------------------------

class EmptyDistribution(BalanceError):
    pass


class QOutOfRange(BalanceError):
    pass


class BadQuantileRange(BalanceError):
    pass


# -- balance metrics --------------------------------------------------------

class TooFewBuilds(BalanceError):
    pass


class InsufficientSamples(BalanceError):
    def __init__(self, message: str, keys: list | None = None):
        self.keys = list(keys) if keys else []
        super().__init__(message)


class MismatchedContext(BalanceError):
    pass


class ZeroMedian(BalanceError):
    pass


class NoQualifyingPairs(BalanceError):
    pass


class EmptyEra(BalanceError):
    pass


# -- survey -----------------------------------------------------------------

class OutOfRange(BalanceError):
    pass


class TooFewResponses(BalanceError):
    pass


class DegenerateColumn(BalanceError):
    pass


class TooFewParticipants(BalanceError):
    pass


class IncompleteMatrix(BalanceError):
    pass


class DegenerateAgreement(BalanceError):
    pass


class EmptyDataset(BalanceError):
    pass


# -- reconcile --------------------------------------------------------------

class LengthMismatch(BalanceError):
    pass


class TooShort(BalanceError):
    pass


class DegenerateRanks(BalanceError):
    pass


class InsufficientOverlap(BalanceError):
    pass


# -- reports ----------------------------------------------------------------

class ReportFormatError(BalanceError):
    pass
