"""
errors.py - Exception hierarchy shared by every engine.

Library code raises these; only the CLI turns them into exit codes.
"""


class CompositionError(Exception):
    """Base exception for composer errors."""
    pass


class InstanceError(CompositionError, ValueError):
    """Malformed instance, composition or event-stream input."""
    pass


class DuplicateServiceError(InstanceError):
    """Two services share a name inside one repository."""
    pass


class TaxonomyError(InstanceError):
    """Cyclic forest, undeclared concept/instance, or multiple inheritance."""
    pass


class UnknownServiceError(CompositionError, KeyError):
    """A composition or operation names a service the repository does not hold."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"Unknown service: {self.name}"


class InvalidCompositionError(CompositionError, ValueError):
    """An operation that needs a valid composition received an invalid one."""
    pass


class UnknownQueryError(CompositionError, KeyError):
    """An online operation names a query id that was never registered."""

    def __init__(self, query_id: str):
        super().__init__(query_id)
        self.query_id = query_id

    def __str__(self) -> str:
        return f"Unknown query: {self.query_id}"
