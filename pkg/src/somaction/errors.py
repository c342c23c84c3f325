"""Exception hierarchy for the somaction package."""


class SomActionError(Exception):
    """Base class for all somaction errors."""


# dataset
class MalformedFile(SomActionError):
    pass


class EmptyFile(SomActionError):
    pass


class DegenerateSplit(SomActionError):
    pass


class InvalidSpec(SomActionError):
    pass


# preprocessing
class DegenerateBasis(SomActionError):
    pass


class ZeroReference(SomActionError):
    pass


class UnknownClass(SomActionError):
    pass


class TooShort(SomActionError):
    pass


class ChannelMismatch(SomActionError):
    pass


# maps and classifier
class DimensionMismatch(SomActionError):
    pass


class EmptyInput(SomActionError):
    pass


class EmptyTrace(SomActionError):
    pass


class EmptySet(SomActionError):
    pass


class ZeroVector(SomActionError):
    pass


# pipeline / persistence
class ConfigMismatch(SomActionError):
    pass


class EmptyCorpus(SomActionError):
    pass


class VersionMismatch(SomActionError):
    pass


class CorruptFile(SomActionError):
    pass
