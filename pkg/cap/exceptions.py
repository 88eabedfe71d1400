class CapError(Exception):
    """Base class of every error raised by the cap app."""


class DimensionMismatch(CapError, ValueError):
    pass


class InvalidParameter(CapError, ValueError):
    pass


class StepSequenceError(InvalidParameter):
    pass


class DomainError(CapError, ValueError):
    """A point was handed to a mapping outside of the mapping's domain."""

    def __init__(self, domain, point):
        self.domain = domain
        self.point = point
        super().__init__(f"point {point.to_json()} is outside of domain {domain.describe()}")


class FixedPointError(CapError):
    """A point expected to be a common fixed point is not one within tolerance."""

    def __init__(self, message, point, residual_s, residual_t):
        self.point = point
        self.residual_s = residual_s
        self.residual_t = residual_t
        super().__init__(f"{message} (residual S: {residual_s!r}, residual T: {residual_t!r})")


class ProjectionNotConverged(CapError):
    """Dykstra's iteration hit its cap. The best iterate is kept so callers may still use it."""

    def __init__(self, point, residual, iterations):
        self.point = point
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"projection did not reach the residual target after {iterations} sweeps "
                         f"(residual {residual!r})")


class SchemeError(CapError):
    def __init__(self, message, step):
        self.step = step
        super().__init__(f"step {step}: {message}")


class ScenarioError(CapError):
    """A scenario file failed validation. ``errors`` maps field names to messages."""

    def __init__(self, path, errors):
        self.path = path
        self.errors = errors
        details = '; '.join(f"{field}: {' '.join(messages)}" for field, messages in errors.items())
        super().__init__(f"{path}: {details}")


class PhaseError(CapError):
    def __init__(self, phase, scenario, cause):
        self.phase = phase
        self.scenario = scenario
        super().__init__(f"scenario {scenario!r}, phase {phase!r}: {cause}")
