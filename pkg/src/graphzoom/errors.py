"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class ParseError(ValueError):
    """A text input could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    path : str, optional
        Source file, when known.
    line : int, optional
        1-based line number of the offending line.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f"{':' if where else 'line '}{line}"
        super().__init__(f"{where}: {message}" if where else message)


class DegenerateNodeError(ValueError):
    """A node has zero degree where a normalization needs a positive one."""
