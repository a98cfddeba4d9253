"""Exception hierarchy shared by all czkit modules."""


class CzkitError(Exception):
    """Base class for every error raised by this package."""


class EmptyMeasure(CzkitError):
    pass


class DimensionMismatch(CzkitError):
    pass


class InvalidParams(CzkitError):
    pass


class SchemaError(CzkitError):
    """Malformed measure/function file or JSON payload."""


class NotNested(CzkitError):
    pass


class NotInSupport(CzkitError):
    pass


class NotReachable(CzkitError):
    """A delta-targeted cube search whose hypothesis delta(x, 2R0) > alpha fails
    (or whose doubling ancestor escapes the reference cube 2R0)."""


class ZeroSideCube(CzkitError):
    pass


class ZeroMassCube(CzkitError):
    pass


class EmptyFamily(CzkitError):
    pass


class NotMeanZero(CzkitError):
    pass


class LambdaNonpositive(CzkitError):
    pass


class NotEnoughScales(CzkitError):
    pass


class OmegaIsEverything(CzkitError):
    pass


class LPInfeasible(CzkitError):
    pass


class LPNotConverged(CzkitError):
    def __init__(self, message, tolerance_report=None):
        super().__init__(message)
        self.tolerance_report = tolerance_report or {}


class AdmissibilityViolation(CzkitError):
    pass


class ConditionViolated(CzkitError):
    """A kernel construction condition failed; carries which condition and where."""

    def __init__(self, which, where, detail=""):
        super().__init__(f"kernel condition {which} violated at {where}: {detail}")
        self.which = which
        self.where = where


class NestingViolation(CzkitError):
    """Companion-cube nesting chain broke; parameters are too small."""


class ParamsInfeasible(CzkitError):
    pass


class PropertyViolated(CzkitError):
    """A constructed object failed one of its guaranteed properties.

    ``tag`` names the property ('a'..'h', claim name, or invariant label) and
    ``location`` describes where it failed.
    """

    def __init__(self, tag, location="", detail=""):
        super().__init__(f"property {tag} violated{' at ' + location if location else ''}"
                         f"{': ' + detail if detail else ''}")
        self.tag = tag
        self.location = location
