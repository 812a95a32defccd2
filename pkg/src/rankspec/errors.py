"""Exception types shared across the package."""


class RankSpecError(Exception):
    """Base class for all rankspec errors."""


class DataError(RankSpecError):
    """Invalid input data: bad counts, duplicate labels, malformed records."""


class ParseError(DataError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PinyinError(DataError):
    """A token is not a valid toned pinyin syllable."""


class FixtureError(DataError):
    """The requested synthetic dataset is infeasible under its constraints."""


class FitError(RankSpecError):
    """A numerical fitting routine could not produce a finite result."""


class PerfectFitError(RankSpecError):
    """SSE is exactly zero, so log-based information criteria are undefined."""
