"""Exception types shared across the package."""


class QbnetError(Exception):
    """Base class for domain errors raised by this package."""


class CapacityError(QbnetError):
    """A dense tensor would exceed the configured size cap."""


class ZeroProbabilityError(QbnetError):
    """Conditioning on an event of probability zero."""


class ImpossibleEvidenceError(ZeroProbabilityError):
    """The observed evidence has probability zero under the model."""


class InvalidStateError(QbnetError):
    """A matrix fails the density-matrix requirements (Hermitian, PSD, trace one)."""


class NotReducibleError(QbnetError):
    """A net does not satisfy the independence condition the composite-node reduction needs."""


class StructureError(QbnetError):
    """The graph shape does not meet an algorithm's structural requirement."""


class SchedulingError(QbnetError):
    """A message-passing step ran before all of its input messages were available."""


class ConvergenceError(QbnetError):
    """Belief extraction was attempted on messages that are not a fixed point."""
