"""Exception hierarchy shared by all solver stages."""


class SolverError(Exception):
    """Base class for every error raised by fpcontrol."""


class SingularMatrix(SolverError):
    pass


class ZeroDiagonal(SolverError):
    """A diagonal entry of A vanishes, so the Jacobi splitting does not exist."""

    def __init__(self, index):
        super().__init__(f"diagonal entry a[{index},{index}] is zero; Jacobi splitting inapplicable")
        self.index = index


class NotControllable(SolverError):
    pass


class DegenerateBackTransform(SolverError):
    pass


class IterationOverflow(SolverError):
    """Iterates left the representable range; carries the step index and partial trace."""

    def __init__(self, step, trace=None, limit=1e150):
        super().__init__(f"iterate magnitude exceeded {limit:g} at step {step}")
        self.step = step
        self.trace = trace


class ParseError(SolverError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path


class DimensionMismatch(SolverError):
    pass
