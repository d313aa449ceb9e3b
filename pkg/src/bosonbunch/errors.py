"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`BosonBunchError`; the CLI maps :class:`ParseError` (and ``OSError``)
to exit code 2 and everything else to exit code 1.
"""


class BosonBunchError(Exception):
    code = "domain"


class ShapeError(BosonBunchError, ValueError):
    code = "shape"


class DimensionError(BosonBunchError, ValueError):
    code = "dimension"


class SizeLimitError(BosonBunchError, ValueError):
    code = "size-limit"


class DomainError(BosonBunchError, ValueError):
    code = "domain"


class FeasibilityError(BosonBunchError, ValueError):
    code = "feasibility"


class DegenerateError(BosonBunchError, ZeroDivisionError):
    code = "degenerate"


class UnsupportedError(BosonBunchError, NotImplementedError):
    code = "unsupported"


class ParseError(BosonBunchError, ValueError):
    code = "parse"
