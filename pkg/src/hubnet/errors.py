"""Exception types shared across hubnet.

Each class carries the process exit code the command line maps it to.
"""


class HubnetError(Exception):
    exit_code = 1


class InputError(HubnetError):
    """Malformed input files, config or instance data."""

    exit_code = 2


class ValidationError(InputError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"{len(self.violations)} validation violation(s):\n{lines}")


class GeoDomainError(InputError, ValueError):
    pass


class ConfigError(InputError, ValueError):
    pass


class InfeasibleError(HubnetError):
    """Constraints admit no design (or contradict each other)."""

    exit_code = 3


class GuardRefusal(HubnetError):
    """Instance too large for exhaustive enumeration."""

    exit_code = 4
