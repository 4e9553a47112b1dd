"""Exception hierarchy shared by every module.

``ForgeError`` covers domain errors (bad input, violated preconditions).
Budget exhaustion is *not* an exception; searches return an ``Exhausted``
value instead.
"""


class ForgeError(ValueError):
    """Base class for domain errors raised by the library."""

    def to_json(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class MalformedMetricError(ForgeError):
    """The distance matrix does not match the point list."""


class MetricAxiomError(ForgeError):
    """A constructed or supplied space violates a metric axiom."""

    def __init__(self, message: str, violation=None):
        super().__init__(message)
        self.violation = violation

    def to_json(self) -> dict:
        out = super().to_json()
        if self.violation is not None:
            out["violation"] = self.violation.to_json()
        return out


class UnknownPointError(ForgeError):
    """A point id was referenced that is not in the space."""


class KatetovError(ForgeError):
    """A prescribed distance function is not an admissible one-point extension."""


class NotAPartialIsometryError(ForgeError):
    """A map claimed to be a partial isometry does not preserve distances."""


class SaturationError(ForgeError):
    """Saturation could not be reached or used."""

    def __init__(self, message: str, missing: int = 0):
        super().__init__(message)
        self.missing = missing

    def to_json(self) -> dict:
        out = super().to_json()
        out["missing"] = self.missing
        return out


class GroupError(ForgeError):
    """Invalid group data or a word that does not belong to the group."""


class ActionError(ForgeError):
    """An action is invalid or incompatible with the requested construction."""


class PreconditionError(ForgeError):
    """A documented precondition of an operation does not hold."""
