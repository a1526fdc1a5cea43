from typing import Any, Optional


class VersorEngineError(Exception):
    """Base class for every domain error raised by the engine"""

    def __init__(self, message: str, witnesses: Optional[Any] = None):
        super().__init__(message)
        self.witnesses = witnesses


class SignatureError(VersorEngineError):
    """Signature outside p, q >= 0 and p + q <= 5"""


class SignatureMismatchError(VersorEngineError):
    """Operands live in different algebras"""


class NullVectorError(VersorEngineError):
    """A mirror or reflection vector squares to zero"""


class NonUnitVersorError(VersorEngineError):
    """Versor does not satisfy A * reverse(A) = +-1"""


class ParityError(VersorEngineError):
    """Multivector mixes even and odd grades where a single parity is required"""


class UnknownGroupError(VersorEngineError):
    """Group id not in the catalog"""


class ClosureOverflowError(VersorEngineError):
    """Closure grew past the configured limit; the input is not a finite group"""


class InductionError(VersorEngineError):
    """Induced 4D vector set failed a root system check"""


class CoxeterError(VersorEngineError):
    """Coxeter number, plane or exponents could not be determined"""


class PointAtInfinityError(VersorEngineError):
    """Conformal point has X . n = 0"""


class ParseError(VersorEngineError):
    """Malformed vector literal or group selector"""
