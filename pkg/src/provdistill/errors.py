"""Exception hierarchy shared by every stage of the pipeline."""


class ProvDistillError(Exception):
    """Base class for domain errors (CLI maps these to exit code 1)."""


class IngestError(ProvDistillError):
    pass


class MalformedLine(IngestError):
    pass


class MissingField(IngestError):
    def __init__(self, field):
        super().__init__(f"missing field {field!r}")
        self.field = field


class UnknownRecordType(IngestError):
    pass


class ConflictingEntity(IngestError):
    pass


class EmptyGraph(ProvDistillError):
    pass


class EmptyCorpus(ProvDistillError):
    pass


class OddDimension(ProvDistillError):
    pass


class ShapeMismatch(ProvDistillError):
    pass


class AllClassesRemoved(ProvDistillError):
    pass


class NonFiniteLoss(ProvDistillError):
    pass


class SingleClass(ProvDistillError):
    pass


class StrategyNotImplemented(ProvDistillError):
    def __init__(self, method):
        super().__init__(f"strategy not implemented: {method}")
        self.method = method


class InvalidConfig(ProvDistillError):
    pass


class BoundaryOutOfRange(ProvDistillError):
    pass


class EmptyEvaluation(ProvDistillError):
    pass


class MissingArtifact(ProvDistillError):
    pass


class ChecksumMismatch(ProvDistillError):
    pass


class FormatError(ProvDistillError):
    """A binary artifact has a bad magic number or truncated payload."""
