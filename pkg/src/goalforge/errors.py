"""Exception types shared across the pipeline."""

from __future__ import annotations


class GoalforgeError(Exception):
    """Base for all pipeline errors."""


class ParseError(GoalforgeError):
    """A source document failed to parse; carries location context."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        suffix = f" ({', '.join(loc)})" if loc else ""
        super().__init__(message + suffix)
        self.line = line
        self.field = field


class MissingGoal(GoalforgeError):
    """Catalog source does not cover one of the 17 goals."""

    def __init__(self, number: int):
        super().__init__(f"goal {number} missing from catalog source")
        self.number = number


class MissingSlot(GoalforgeError):
    def __init__(self, name: str):
        super().__init__(f"template slot {name!r} was not provided")
        self.name = name


class UnknownSlot(GoalforgeError):
    def __init__(self, name: str):
        super().__init__(f"slot {name!r} is not declared by the template")
        self.name = name


class ProviderError(GoalforgeError):
    """Text/embedding provider failed after exhausting retries."""


class TransientProviderError(ProviderError):
    """Retryable provider failure (network, 5xx, quota)."""


class NetworkError(TransientProviderError):
    pass


class QuotaExceeded(TransientProviderError):
    def __init__(self, message: str = "provider quota exceeded", *, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class AuthError(GoalforgeError):
    pass


class SafetyBlocked(ProviderError):
    """Provider refused the request on safety grounds; never retried."""


class SchemaViolation(GoalforgeError):
    """Structured output violates the expected document schema."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class Unparseable(GoalforgeError):
    """No structured document could be recovered from provider output."""


class AnnotationFailed(GoalforgeError):
    def __init__(self, video_id: str, reason: str):
        super().__init__(f"annotation failed for {video_id}: {reason}")
        self.video_id = video_id
        self.reason = reason


class ExtractionFailed(GoalforgeError):
    def __init__(self, goal: int, reason: str):
        super().__init__(f"graph extraction failed for goal {goal}: {reason}")
        self.goal = goal
        self.reason = reason


class SynthesisFailed(GoalforgeError):
    pass


class EmptyDataset(GoalforgeError):
    pass


class EmptyGraph(GoalforgeError):
    pass


class NoCandidates(GoalforgeError):
    def __init__(self, goal: int):
        super().__init__(f"no talks tagged with goal {goal}")
        self.goal = goal


class IncompleteDataset(GoalforgeError):
    pass


class IncompatibleVersion(GoalforgeError):
    def __init__(self, found: int, supported: int):
        super().__init__(f"store schema version {found} not supported (binary supports {supported})")
        self.found = found
        self.supported = supported


class StagePrerequisiteMissing(GoalforgeError):
    def __init__(self, stage: str, missing: str):
        super().__init__(f"stage {stage!r} prerequisite missing: {missing}")
        self.stage = stage
        self.missing = missing
