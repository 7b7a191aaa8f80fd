from __future__ import annotations

import json

from pydantic import BaseModel, Field


class ErrorMeta(type):
    """Registers every error class by name so `BaseError.decode` can rebuild it."""

    registry = {}

    def __new__(mcls, name, bases, namespace, /, **kwargs):
        cls = super().__new__(mcls, name, bases, namespace, **kwargs)
        mcls.registry[cls.__name__] = cls
        return cls


class RawError(BaseModel):
    code: str = Field(..., description="Error code")
    message: str = Field(..., description="Error message")


class BaseError(Exception, metaclass=ErrorMeta):
    def encode(self, mode: str = "python") -> dict:
        error = RawError(code=self.__class__.__name__, message=str(self))
        return error.model_dump(mode=mode)

    @classmethod
    def decode(cls, data: dict) -> BaseError:
        error = RawError.model_validate(data)
        error_class = cls.registry.get(error.code)
        if not error_class:
            raise ValueError(f"Unknown error code {error.code}")
        return error_class(error.message)

    def encode_json(self) -> str:
        data = self.encode(mode="json")
        return json.dumps(data)

    @classmethod
    def decode_json(cls, json_data: str | bytes) -> BaseError:
        try:
            data = json.loads(json_data)
        except json.JSONDecodeError:
            raise ValueError("Invalid JSON data")
        return cls.decode(data)


class InputError(BaseError):
    """Raised when an instance, flag or config value cannot be parsed."""


class NoConwayPolynomial(InputError):
    """Raised when (p, m) is outside the shipped Conway polynomial table."""


class PrecisionTooSmall(InputError):
    """Raised when a field context is requested with fewer than 4 p-digits."""


class DivisionByZero(BaseError):
    """Raised when dividing by an exact zero."""


class PrecisionExhausted(BaseError):
    """Raised when a result is not determined at the working precision."""


class IncompatibleTower(InputError):
    """Raised when extending to a field that does not contain the source field."""


class SlopeNotIntegral(BaseError):
    """Raised when slope factorization meets a non-integral Newton slope."""


class InvalidMultiplicity(InputError):
    """Raised when a slope multiplicity is not a multiple of the slope denominator."""


class DecompositionUnverified(BaseError):
    """Raised when an isocline block fails its F-stability check."""


class DenominatorCapExceeded(BaseError):
    """Raised when exponent denominators exceed the configured cap."""


class InvalidParams(InputError):
    """Raised when Min-point or sampler parameters do not fit the isocrystal."""


class EmptySample(InputError):
    """Raised when a scan is requested with no samples."""


class NotInJ(BaseError):
    """Raised when a candidate fails g·b = b·σ(g)."""


class NotInMin(BaseError):
    """Raised when a norm is required to lie in Min(F) but does not."""


class BallNotCrystal(BaseError):
    """Raised when the ball of a Min point fails F- or V-stability at working precision."""


class SlopeRange(BaseError):
    """Raised when crystals are requested for slopes outside [0, 1]."""


class ScaleTooLarge(InputError):
    """Raised when an enumeration exceeds the desk-scale limits."""


class UnknownSuite(InputError):
    """Raised when the requested verification suite does not exist."""
