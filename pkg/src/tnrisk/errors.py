"""Exception hierarchy shared by all tnrisk modules."""

from __future__ import annotations


class ModelError(Exception):
    """Base class for all domain errors raised by tnrisk."""


# --- dataset -----------------------------------------------------------------

class MalformedRow(ModelError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateCode(ModelError):
    def __init__(self, code: str):
        super().__init__(f"duplicate country code {code!r}")
        self.code = code


class AsymmetricDistance(ModelError):
    def __init__(self, origin: str, dest: str):
        super().__init__(f"distance {origin}-{dest} given in both directions with different values")
        self.pair = (origin, dest)


class NegativeValue(ModelError):
    pass


class MissingFile(ModelError):
    pass


class CodeMismatch(ModelError):
    pass


# --- estimation --------------------------------------------------------------

class DegenerateSpread(ModelError):
    """Median equals minimum: min-median normalization would divide by zero."""


class MissingImputation(ModelError):
    def __init__(self, code: str):
        super().__init__(f"country {code!r} has no survey data and no regional mean")
        self.code = code


class EmptyRegion(ModelError):
    def __init__(self, region: str):
        super().__init__(f"region {region!r} has no surveyed country to impute from")
        self.region = region


# --- network -----------------------------------------------------------------

class EmptyTargets(ModelError):
    pass


class NegativeCycle(ModelError):
    pass


class NotAPath(ModelError):
    pass


class BlockedEdgeOnPath(ModelError):
    pass


# --- evader ------------------------------------------------------------------

class DeadSource(ModelError):
    pass


class SupplyMismatch(ModelError):
    pass


# --- scenario ----------------------------------------------------------------

class UnknownCode(ModelError):
    def __init__(self, code: str):
        super().__init__(f"unknown country code {code!r}")
        self.code = code


class IndexMismatch(ModelError):
    pass


class ThresholdOutOfRange(ModelError):
    pass
