"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a configuration file or parameter bundle is invalid.

    Distinct from plain ValueError so the CLI can map configuration
    mistakes to exit code 1 and everything else to exit code 2.
    """
