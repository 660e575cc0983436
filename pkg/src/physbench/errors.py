"""Exception types shared across the package."""


class PhysbenchError(Exception):
    """Base class for all package-specific failures."""


class InvalidRange(PhysbenchError):
    """An interval, seed block, or configuration value is out of order."""


class NotSPD(PhysbenchError):
    """Cholesky factorization hit a non-positive pivot."""


class NonFinite(PhysbenchError):
    """A state, gradient, or prediction produced NaN or infinity."""


class EventStorm(PhysbenchError):
    """More than the allowed number of collision events fired in one step."""


class ActionOutOfRange(PhysbenchError):
    """An action component left the [-1, 1] box."""


class FormatError(PhysbenchError):
    """An episode, prediction, or model file failed validation."""


class ShapeMismatch(PhysbenchError):
    """A prediction grid does not match the episode it claims to cover."""


class JoinError(PhysbenchError):
    """Prediction records could not be joined to the evaluation set."""


class ZeroReference(PhysbenchError):
    """The radar reference predictor scored exactly zero on some task."""


class ConfigError(PhysbenchError):
    """A run configuration was rejected before any work started."""
