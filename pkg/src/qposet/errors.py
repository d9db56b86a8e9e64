"""Exception hierarchy shared by every layer of the package."""


class QposetError(Exception):
    """Base class for all errors raised by qposet."""


class ShapeError(QposetError, ValueError):
    """Matrix or subspace shapes do not line up."""


class ObjectMismatch(QposetError, ValueError):
    """Relations do not share the quantum sets an operation needs."""


class NotAFunction(QposetError, ValueError):
    """A relation fails F^dag F >= I or F F^dag <= I."""


class NotAnOrder(QposetError, ValueError):
    """A relation fails one of the preorder/order/equivalence axioms."""


class EquivalenceViolation(QposetError, AssertionError):
    """Conditions that must be equivalent disagreed on an instance.

    This signals either a bug or a numerical breakdown; it is never an
    ordinary "false" answer.
    """


class SamplingError(QposetError, RuntimeError):
    """A random generator exhausted its retry budget."""


class SchemaError(QposetError, ValueError):
    """A serialized document is malformed.

    ``pointer`` is the JSON pointer of the offending location.
    """

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
