"""Exception hierarchy shared by the library and the command line front end."""


class FermatCheckError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 4


class DomainError(FermatCheckError, ValueError):
    """An operation was called outside its mathematical domain."""

    exit_code = 2


class ConfigurationError(FermatCheckError):
    """The field or modulus is outside what the implementation supports."""

    exit_code = 2


class IndexObstructionError(ConfigurationError):
    """The prime divides the index [O_K : Z[alpha]], so Dedekind's criterion is unusable."""


class ParseError(FermatCheckError, ValueError):
    """A data file or payload does not match the expected schema."""

    exit_code = 2


class DataGapError(FermatCheckError):
    """Required data (a fixture, an eigenvalue) is not available."""

    exit_code = 3


class InconsistencyError(FermatCheckError):
    """An internal cross-check failed; the inputs contradict each other."""

    exit_code = 4
