class DehnFillError(Exception):
    pass


class ParseError(DehnFillError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class UndeclaredGenerator(DehnFillError):
    pass


class ArityMismatch(DehnFillError):
    pass


class InvalidMove(DehnFillError):
    pass


class BudgetExceeded(DehnFillError):
    """Raised when a bounded search runs past its configured limit."""

    def __init__(self, what, limit):
        self.what = what
        self.limit = limit
        super().__init__(f"{what} exceeded budget {limit}")


class MissingPeripheralOrders(DehnFillError):
    pass
