class RibnetError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes a command."""

    exit_code: int = 1


class InvalidDataError(RibnetError):
    """Raised when input data (dataset, flags, indices) is not admissible."""

    exit_code = 2


class DatasetFormatError(InvalidDataError):
    """Raised when a dataset file does not parse or does not follow the schema."""


class UnknownComponentError(InvalidDataError):
    """Raised when a point references a component id the curve does not have."""


class DimensionMismatch(InvalidDataError):
    """Raised when the Baker-Akhiezer system is not square (corrupted counts)."""


class IndexOutOfRange(InvalidDataError):
    """Raised for a normalization index outside 1..l."""


class PreconditionViolated(InvalidDataError):
    """Raised when an operation is called outside its stated preconditions."""


class CertificationFailure(RibnetError):
    """Raised when a proved identity fails its numerical certificate."""

    exit_code = 1


class OmegaNotFound(CertificationFailure):
    """Raised when no differential with the prescribed divisor exists for the data."""


class SingularSystem(CertificationFailure):
    """Raised when the Baker-Akhiezer system at a parameter point is (near) singular."""


class DegenerateGrid(CertificationFailure):
    """Raised when too many grid points are flagged degenerate to certify anything."""


class EvalAtPole(RibnetError):
    """Raised when psi is evaluated at a point of its pole divisor."""


class EvalAtEssentialSingularity(RibnetError):
    """Raised when psi is evaluated at one of the points P_j."""


class DegeneratePoint(RibnetError):
    """Raised when a pair identity is undefined at a parameter point (nets touch)."""


class CollinearTriple(RibnetError):
    """Raised when no circle passes through three (nearly) collinear points."""


class DatasetIOError(RibnetError):
    """Raised when a dataset or report file cannot be read or written."""

    exit_code = 3


class ExportError(DatasetIOError):
    """Raised for export/IO related failures."""
