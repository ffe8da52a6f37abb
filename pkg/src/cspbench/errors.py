"""Exception types shared across the workbench."""


class StructuralError(ValueError):
    """A malformed model: dangling ids, bad bounds, overflow, unbound variables.

    Distinct from an unsatisfiable problem, which is reported as an outcome.
    """


class SearchTimeout(RuntimeError):
    """Raised when a cooperative deadline expires inside a search loop.

    ``partial`` carries whatever the search had produced so far (solutions
    found, or the best incumbent for optimization).
    """

    def __init__(self, message="search budget exhausted", partial=None):
        super().__init__(message)
        self.partial = partial
