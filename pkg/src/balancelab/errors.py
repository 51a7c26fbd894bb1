"""Exception hierarchy shared across the library and the command line tool.

The three leaf classes partition failures the way the CLI reports them:
configuration problems (exit code 2), malformed or inconsistent input data
(exit code 3), and numerical breakdowns such as eigensolver failures or
insufficient series truncation (exit code 4).
"""


class BalancelabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(BalancelabError):
    """Invalid configuration: bad parameter values, missing paths, bad flags."""


class DataError(BalancelabError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericalError(BalancelabError):
    """A numerical computation failed or cannot meet its accuracy contract."""
