"""Exception hierarchy shared by all modules."""


class BottError(ValueError):
    """Base class for invalid-input conditions (CLI exit code 2)."""


class UnboundedPolytope(BottError):
    pass


class EmptyPolytope(BottError):
    pass


class DegeneratePolytope(BottError):
    """Polytope is not full-dimensional where full dimension is required."""


class DegenerateSlice(BottError):
    pass


class NotKahlerClass(BottError):
    def __init__(self, msg="not a Kähler class"):
        super().__init__(msg)


class NotAmple(BottError):
    def __init__(self, msg="not ample"):
        super().__init__(msg)


class NotNef(BottError):
    def __init__(self, msg="not nef"):
        super().__init__(msg)


class NotBottMatrix(BottError):
    pass


class BudgetExceeded(BottError):
    pass


class InvariantViolation(RuntimeError):
    """An identity that must hold by construction failed (a bug; CLI exit code 3)."""
