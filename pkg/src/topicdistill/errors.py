"""Exception hierarchy with process exit codes used by the CLI."""


class EngineError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ValidationError(EngineError):
    """Invalid inputs, malformed files, or a broken invariant."""

    exit_code = 1


class TeacherError(EngineError):
    """Teacher transport or protocol failure (retries exhausted, bad payload)."""

    exit_code = 2


class IncompleteRunError(EngineError):
    """A run directory is missing stages required by the requested command."""

    exit_code = 3


class StageFailure(EngineError):
    """A pipeline stage failed part-way through a run.

    Carries the failing stage name and the artifact paths of the stages that
    completed before it, so the run can be resumed.
    """

    def __init__(self, stage, cause, completed_artifacts):
        self.stage = stage
        self.cause = cause
        self.completed_artifacts = list(completed_artifacts)
        done = ", ".join(self.completed_artifacts) or "none"
        super().__init__(f"stage '{stage}' failed: {cause} (completed artifacts: {done})")

    @property
    def exit_code(self):  # type: ignore[override]
        return getattr(self.cause, "exit_code", 1)
