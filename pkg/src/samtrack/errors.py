"""Exception types shared across the samtrack package."""


class SamTrackError(Exception):
    """Base class for all samtrack errors."""

    code = "error"


class DimensionMismatch(SamTrackError):
    code = "dimension_mismatch"


class EmptyMask(SamTrackError):
    code = "empty_mask"


class MalformedRuns(SamTrackError):
    code = "malformed_runs"


class LabelSpaceMismatch(SamTrackError):
    code = "label_space_mismatch"


class IdSpaceExhausted(SamTrackError):
    code = "id_space_exhausted"


class NoPrompt(SamTrackError):
    code = "no_prompt"


class OutOfBounds(SamTrackError):
    code = "out_of_bounds"


class BackendUnavailable(SamTrackError):
    """A model backend could not serve the request (network, protocol, or server error)."""

    code = "backend_unavailable"


class EmptyMemory(SamTrackError):
    code = "empty_memory"


class AlreadyCommitted(SamTrackError):
    code = "already_committed"


class EmptyReference(SamTrackError):
    code = "empty_reference"


class NotCommitted(SamTrackError):
    code = "not_committed"


class StepFailed(SamTrackError):
    """A tracking step aborted; carries the frame index that failed."""

    code = "step_failed"

    def __init__(self, frame_index, cause):
        super().__init__(f"step failed at frame {frame_index}: {cause}")
        self.frame_index = frame_index
        self.cause = cause


class MissingFrame(SamTrackError):
    code = "missing_frame"


class PaletteMismatch(SamTrackError):
    code = "palette_mismatch"


class EmptySequence(SamTrackError):
    code = "empty_sequence"


class LengthMismatch(SamTrackError):
    code = "length_mismatch"


class InvalidScenario(SamTrackError):
    code = "invalid_scenario"
