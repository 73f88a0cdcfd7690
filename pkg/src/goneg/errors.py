"""Exception hierarchy shared by all modules."""


class GonegError(Exception):
    """Base class for all errors raised by goneg."""


class ParseError(GonegError, ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class StructureError(GonegError, ValueError):
    """The ontology graph violates a structural invariant (cycle, dangling edge)."""


class UnknownTermError(GonegError, KeyError):
    """A term accession is not present in the ontology."""

    def __str__(self) -> str:
        return f"unknown term: {self.args[0]}" if self.args else "unknown term"


class DomainError(GonegError, ValueError):
    """An operation was called outside its domain (precondition violated)."""


class EmptyReleaseWarning(UserWarning):
    """An annotation file produced no usable annotations."""
