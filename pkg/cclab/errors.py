"""Exception hierarchy shared by the library and the CLI."""


class CclabError(Exception):
    """Base class; exit_code is what the CLI returns when it escapes."""

    exit_code = 1


class InvalidArgumentError(CclabError, ValueError):
    """Inputs outside an operation's domain."""

    exit_code = 2


class ConfigError(InvalidArgumentError):
    """Unparseable flags, config files or constellation files."""


class InternalError(CclabError, RuntimeError):
    """The numeric engine produced something it never should."""

    exit_code = 3


class OutputError(CclabError, OSError):
    """Artifacts could not be written."""

    exit_code = 4
