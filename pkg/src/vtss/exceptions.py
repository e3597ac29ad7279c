"""Exception hierarchy.

Three branches matter for the CLI exit-code contract: usage problems are
handled by argparse itself (exit 2), ``DataError`` maps to exit 3, and
``NumericError`` maps to exit 4.
"""


class VtssError(Exception):
    """Base class for all library errors."""


class DataError(VtssError):
    """Malformed or insufficient input data."""


class NumericError(VtssError):
    """A numeric procedure cannot produce a valid result."""


# -- data ------------------------------------------------------------------

class DimensionMismatch(DataError):
    pass


class TooFewMinority(DataError):
    """Fewer minority samples than the procedure needs (e.g. n1 < K)."""


class TooFewSamples(DataError):
    pass


class MissingClass(DataError):
    """An evaluation set lacks one of the two classes."""


class InvalidRho(DataError):
    pass


class EmptyMinority(DataError):
    pass


class MissingFullData(DataError):
    """Generator kind needs the full labeled dataset, not just minority rows."""


class MissingModelHandle(DataError):
    """Oracle-style generator configured without a simulation model."""


class KTooLarge(DataError):
    pass


class CsvFormatError(DataError):
    """CSV violates the dataset format; message carries the line number."""


class NonPositiveInput(DataError):
    pass


class UnknownPreset(DataError):
    pass


# -- numerics ---------------------------------------------------------------

class SeparableWithoutRidge(NumericError):
    """Logistic ERM diverges on separable data when ridge = 0."""


class SingularNormalEquations(NumericError):
    pass


class SingularMatrix(NumericError):
    pass


class NotPositiveDefinite(NumericError):
    pass


class DegenerateDenominator(NumericError):
    pass


class ZeroPhi(NumericError):
    """Majority-minority gradient is zero; size formula divides by its norm."""


class ZeroVectorAngle(NumericError):
    """Angle with a zero vector is undefined."""


class DegenerateGenerator(NumericError):
    """Generator mean for which the mismatch gradient degenerates."""


class Unsupported(VtssError):
    pass
