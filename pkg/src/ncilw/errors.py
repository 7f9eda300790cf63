"""Exception hierarchy shared across the package."""


class NcilwError(Exception):
    """Base class for all package-specific errors."""


class PoleProximity(NcilwError):
    """Evaluation point too close to a singularity of the function."""


class NonConvergence(NcilwError):
    """A truncated series/product did not meet its tail bound."""


class OracleInconsistency(NcilwError):
    """Quadrature-fitted operator action is not diagonal in Fourier space."""


class GridMismatch(NcilwError):
    """Fields (or a field and an operator table) live on different grids."""


class NonZeroMean(NcilwError):
    """An operation requiring zero-mean input received a field with mean."""


class BlowUp(NcilwError):
    """Solution amplitude exceeded the blow-up guard during time stepping."""


class Collision(NcilwError):
    """Particles (or poles) approached closer than the allowed minimum gap."""


class RealAxisCrossing(NcilwError):
    """A pole trajectory reached the real axis."""


class PoleOnGrid(NcilwError):
    """A discretization node pair hit a singularity of the pair potential."""


class DimensionCap(NcilwError):
    """Requested dense operator exceeds the supported dimension."""


class SchemaError(NcilwError):
    """Configuration failed schema validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class IoError(NcilwError):
    """Configuration or output file could not be read/written."""
