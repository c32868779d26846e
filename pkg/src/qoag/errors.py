"""Exception hierarchy shared by every qoag module."""


class QoagError(Exception):
    """Base class; the CLI maps these to exit code 2 unless noted."""


class SpecError(QoagError):
    """Malformed or inconsistent group specification."""


class CoordinateMismatch(SpecError):
    pass


class UnsupportedSpec(QoagError):
    pass


class StructureViolation(QoagError):
    """A structural property failed on the window; carries the witness."""

    def __init__(self, message, clause=None, witness=()):
        super().__init__(message)
        self.clause = clause
        self.witness = tuple(witness)


class NotASubgroup(QoagError):
    pass


class QuotientConditionViolated(QoagError):
    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class ComponentNotOrdered(QoagError):
    pass


class ComponentNotValuational(QoagError):
    pass


class ComponentNotCompatible(QoagError):
    pass


class NotProductForm(QoagError):
    pass


class FormulaSyntaxError(QoagError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnboundVariable(QoagError):
    pass


class NotOrderFragment(QoagError):
    pass


class NoMinimum(QoagError):
    pass


class NotRepresentable(QoagError):
    pass
