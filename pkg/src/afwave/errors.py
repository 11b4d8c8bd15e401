"""Exception types shared across the pipeline stages."""


class AfwaveError(Exception):
    """Base class for all library errors."""


class InsufficientLength(AfwaveError):
    """Signal too short for the requested segmentation."""


class UnsupportedRate(AfwaveError):
    """Sampling rate incompatible with the requested decomposition."""


class NoBeatsFound(AfwaveError):
    """No R peaks detected in a signal long enough to contain beats."""


class TooFewBeats(AfwaveError):
    """Fewer beats than required for template cancellation."""


class DegenerateSet(AfwaveError):
    """Template construction received an all-zero window stack."""


class TooShort(AfwaveError):
    """Input shorter than the minimum the operation supports."""


class ZeroEnergy(AfwaveError):
    """Wavelet detail energy is zero, relative energies undefined."""


class ZeroRPeak(AfwaveError):
    """Mean R-peak magnitude is zero, normalization undefined."""


class SingleClass(AfwaveError):
    """Operation requires both outcome classes to be present."""


class TooFewPerClass(AfwaveError):
    """A class has fewer members than the number of folds."""


class InvalidSpec(AfwaveError):
    """Synthetic generator specification violates its invariants."""


class DataError(AfwaveError):
    """Malformed or inconsistent file content."""


class StageError(AfwaveError):
    """Pipeline failure wrapped with the stage that produced it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
