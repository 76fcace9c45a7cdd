"""Exception hierarchy shared by every module of the package."""


class TensorLatticeError(ValueError):
    """Base class for all input and contract violations raised here."""


class RangeError(TensorLatticeError):
    """A value lies outside its admissible range."""


class OverlapError(TensorLatticeError):
    """A mode index appears in more than one block."""


class CoverageError(TensorLatticeError):
    """The blocks do not cover every mode index."""


class SizeError(TensorLatticeError):
    """A lattice enumeration was requested beyond the supported order."""


class MismatchError(TensorLatticeError):
    """Two operands disagree in order or dimensions."""


class ShapeError(TensorLatticeError):
    """Stored values do not match the declared dimensions."""


class NonFiniteError(TensorLatticeError):
    """A NaN or infinite scalar was supplied."""


class OrderError(TensorLatticeError):
    """A refinement relation required by the operation does not hold."""


class RankError(TensorLatticeError):
    """The requested number of terms cannot be realized orthogonally."""


class TopPartitionError(TensorLatticeError):
    """The operation is undefined at the single-block partition."""


class DimsError(TensorLatticeError):
    """An equal-dimensions statement was applied to unequal dimensions."""


class ParamError(TensorLatticeError):
    """Invalid command-line or generator parameters."""
