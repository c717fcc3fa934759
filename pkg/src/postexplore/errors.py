class GenerationError(RuntimeError):
    """A procedural generator could not produce a valid map within its attempt bound."""


class EmptyGoalSpaceError(LookupError):
    """Sampling was requested from a goal space that holds no goals."""


class ConfigError(ValueError):
    """Invalid run or sweep configuration, or incompatible run logs."""
