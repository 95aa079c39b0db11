"""Exception hierarchy.

``DataError`` covers anything wrong with inputs (files, values, attribute
names); ``NumericalError`` covers solver failures. The CLI maps the two
families onto exit codes 2 and 3.
"""


class RegrkitError(Exception):
    pass


class DataError(RegrkitError, ValueError):
    pass


class NumericalError(RegrkitError, ArithmeticError):
    pass


# --- dataset construction and lookup -------------------------------------

class WidthMismatchError(DataError):
    def __init__(self, row_index, width, expected):
        super().__init__(
            f"row {row_index} has {width} values, expected {expected}")
        self.row_index = row_index


class NonFiniteValueError(DataError):
    pass


class DuplicateAttributeError(DataError):
    pass


class UnknownAttributeError(DataError, KeyError):
    def __init__(self, name):
        super().__init__(f"unknown attribute {name!r}")
        self.name = name

    def __str__(self):
        return self.args[0]


class LabelAttributeError(DataError):
    pass


class EmptyDatasetError(DataError):
    pass


class ConstantColumnError(DataError):
    def __init__(self, name, detail=""):
        msg = f"attribute {name!r} is constant"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.name = name


class AttributeMismatchError(DataError):
    pass


# --- parsing ---------------------------------------------------------------

class MalformedQuantityError(DataError):
    def __init__(self, token, row=None, column=None):
        where = ""
        if row is not None:
            where = f" at row {row}, column {column!r}"
        super().__init__(f"malformed quantity {token!r}{where}")
        self.token = token
        self.row = row
        self.column = column


class HeaderError(DataError):
    pass


class ArffSyntaxError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingValueError(ArffSyntaxError):
    pass


class ArityError(ArffSyntaxError):
    pass


class UnsupportedTypeError(ArffSyntaxError):
    pass


class ModelFormatError(DataError):
    pass


# --- modelling and reporting -------------------------------------------------

class GuardExceededError(DataError):
    pass


class ZeroActualError(DataError):
    pass


class BaselineError(DataError):
    pass


class NegativeCostError(DataError):
    pass


class DegenerateSystemError(NumericalError):
    pass


class NonConvergenceError(NumericalError):
    def __init__(self, updates, violation):
        super().__init__(
            f"SMO did not converge after {updates} updates "
            f"(max KKT violation {violation:.6g})")
        self.updates = updates
        self.violation = violation


class MonotonicityError(NumericalError):
    pass
