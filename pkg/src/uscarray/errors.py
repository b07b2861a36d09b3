"""Exception types shared across the package.

CLI exit-code mapping: ConfigError and BracketError are input problems
(exit 2); ConvergenceError and StepSizeError are numerical-resolution
problems (exit 3); I/O failures surface as OSError (exit 4).
"""


class ConfigError(ValueError):
    """Invalid configuration; carries a list of (field_path, message) pairs."""

    def __init__(self, issues):
        if isinstance(issues, str):
            issues = [("", issues)]
        self.issues = list(issues)
        lines = [f"{path}: {msg}" if path else msg for path, msg in self.issues]
        super().__init__("; ".join(lines))


class BracketError(ValueError):
    """Gap-search bracket does not isolate exactly one local minimum."""


class ConvergenceError(RuntimeError):
    """Truncation ladder exhausted without meeting the drift tolerance."""


class StepSizeError(RuntimeError):
    """Integrator norm drift exceeded its bound; retry with a smaller step."""

    def __init__(self, message, dt):
        super().__init__(message)
        self.dt = dt
