"""Exception hierarchy shared across the pipeline.

Every domain failure derives from :class:`OrcoError` so callers (CLI,
service) can map the whole family onto exit codes / HTTP envelopes in one
place.  The ``code`` attribute is the stable machine-readable identifier
used in the JSON error envelope.
"""


class OrcoError(Exception):
    """Base class for all domain errors."""

    code = "OrcoError"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message


# --- TLE parsing / catalog ---------------------------------------------------

class TleError(OrcoError):
    code = "TleError"


class LineLengthError(TleError):
    code = "LineLength"

    def __init__(self, line_no, length):
        super().__init__(f"line {line_no} has {length} characters, expected 69")
        self.line_no = line_no
        self.length = length


class ChecksumError(TleError):
    code = "ChecksumMismatch"

    def __init__(self, line_no, computed, stored):
        super().__init__(
            f"line {line_no} checksum mismatch: computed {computed}, stored {stored!r}"
        )
        self.line_no = line_no
        self.computed = computed
        self.stored = stored


class FieldSyntaxError(TleError):
    code = "FieldSyntax"

    def __init__(self, line_no, col_start, col_end, text, reason=""):
        detail = f": {reason}" if reason else ""
        super().__init__(
            f"line {line_no} cols {col_start}-{col_end}: bad field {text!r}{detail}"
        )
        self.line_no = line_no
        self.col_start = col_start
        self.col_end = col_end
        self.text = text


class IdMismatchError(TleError):
    code = "IdMismatch"

    def __init__(self, id1, id2):
        super().__init__(f"catalog number differs between lines: {id1} vs {id2}")
        self.id1 = id1
        self.id2 = id2


class IoFailure(OrcoError):
    code = "IoFailure"


class AuthFailure(OrcoError):
    code = "AuthFailure"


class RateLimited(OrcoError):
    code = "RateLimited"

    def __init__(self, message="rate limited", retry_after=None):
        super().__init__(message)
        self.retry_after = retry_after


class InvalidRange(OrcoError):
    code = "InvalidRange"


# --- propagation -------------------------------------------------------------

class PropagationError(OrcoError):
    code = "PropagationError"


class DeepSpaceUnsupported(PropagationError):
    code = "DeepSpaceUnsupported"


class DecayedOrbit(PropagationError):
    code = "DecayedOrbit"


class HorizonExceeded(PropagationError):
    code = "HorizonExceeded"


class EmptyWindow(OrcoError):
    code = "EmptyWindow"


# --- uncertainty -------------------------------------------------------------

class CholeskyFailure(OrcoError):
    code = "CholeskyFailure"


class DegenerateCloud(OrcoError):
    code = "DegenerateCloud"


class SegmentUnderflow(OrcoError):
    code = "SegmentUnderflow"


class FitFailure(OrcoError):
    """Differential correction of mean elements did not converge."""

    code = "FitFailure"


# --- conjunction / probability -----------------------------------------------

class DegenerateEncounter(OrcoError):
    code = "DegenerateEncounter"


class SingularCovariance(OrcoError):
    code = "SingularCovariance"


class ContourNotClosed(OrcoError):
    code = "ContourNotClosed"
