"""Exception hierarchy shared by all optf modules."""


class OptfError(Exception):
    """Base class for every error raised by optf."""


class ParseError(OptfError):
    """Raised when CSV input cannot be turned into a return matrix."""


class EmptyInput(ParseError):
    pass


class RaggedRows(ParseError):
    def __init__(self, row: int, expected: int, found: int):
        self.row = row
        self.expected = expected
        self.found = found
        super().__init__(f"row {row}: expected {expected} fields, found {found}")


class NonNumericCell(ParseError):
    def __init__(self, row: int, column: int, text: str):
        self.row = row
        self.column = column
        self.text = text
        super().__init__(f"row {row}, column {column}: {text!r} is not a number")


class NonFiniteValue(ParseError):
    def __init__(self, row: int, column: int, text: str):
        self.row = row
        self.column = column
        self.text = text
        super().__init__(f"row {row}, column {column}: {text!r} is not finite")


class NoLossInColumn(OptfError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"system {column} has no strictly negative return")


class SimplexCycle(OptfError):
    """Phase-1 simplex hit its iteration cap."""


class RuinDomain(OptfError):
    """The point has a holding period return <= 0, where log TWR is undefined."""


class NoLossDirection(OptfError):
    """No period loses money along the direction, so the ruin boundary is never hit."""


class AssumptionViolation(OptfError):
    def __init__(self, report):
        self.report = report
        super().__init__("return matrix fails the admissibility checks")


class UnboundedAscent(OptfError):
    pass


class LastSystem(OptfError):
    pass


class InconsistentReduction(OptfError):
    pass


class TooManySystems(OptfError):
    pass


class BadSlice(OptfError):
    pass
