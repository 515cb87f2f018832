"""
Exception hierarchy shared by the gpcf modules
"""
from typing import Optional, Tuple


class GpcfError(Exception):
    """Base class for every error raised by the library"""


class PcfSyntaxError(GpcfError, ValueError):
    """Surface syntax could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class PcfTypeError(GpcfError, ValueError):
    """A term failed to typecheck; `subterm` is the offending subterm as text"""

    def __init__(self, message: str, subterm: str = ""):
        self.subterm = subterm
        super().__init__(f"{message}: {subterm}" if subterm else message)


class GameMismatchError(GpcfError, ValueError):
    """A move path or strategy does not fit the game it is used with"""


class IllegalPositionError(GpcfError, AssertionError):
    """Raised by the position audit hook when a produced play breaks the rules"""

    def __init__(self, message: str, position: Tuple = ()):
        self.position = position
        super().__init__(message)


class StrategyCodeError(GpcfError, ValueError):
    """Malformed strategy code, or an explicit set that is not history-free"""

    def __init__(self, message: str, offending: Optional[Tuple] = None):
        self.offending = offending
        super().__init__(message)


class FETMismatchError(GpcfError, ValueError):
    """Evaluation trees compared or converted in incompatible contexts or types"""


class DecompositionError(GpcfError, ValueError):
    """A strategy does not live on a PCF type-in-context game, or played off-shape"""


class BudgetExhausted(GpcfError):
    """An interaction ran past its step budget; callers treat it as no response"""

    def __init__(self, steps: int):
        self.steps = steps
        super().__init__(f"Step budget exhausted after {steps} exchanges")
