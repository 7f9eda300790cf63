"""Numerical laboratory for elliptic soliton structures.

Modules:
    elliptic   periodized Weierstrass-type functions wp1 / zeta1
    spectral   periodic pseudospectral operators H, T, Ttilde, cal_t
    pde        ETDRK4 time integration of KdV / BO / ILW / ncILW
    cms        classical Calogero-Moser-Sutherland particle dynamics
    poles      pole-ansatz bridge between CMS and periodic BO
    quantum    small-N grid discretizations of the eCS Hamiltonians
    cli        command-line interface (`ncilw` entry point)
"""

from .elliptic import (
    EllipticParams,
    SeriesControl,
    c_const,
    g_const,
    hyperbolic_limit,
    trigonometric_limit,
    wp1,
    wp1_prime,
    wp1_shifted,
    zeta1,
)
from .errors import (
    BlowUp,
    Collision,
    DimensionCap,
    GridMismatch,
    IoError,
    NcilwError,
    NonConvergence,
    NonZeroMean,
    OracleInconsistency,
    PoleOnGrid,
    PoleProximity,
    RealAxisCrossing,
    SchemaError,
)
from .spectral import (
    Field,
    MultiplierTable,
    PeriodicGrid,
    Spectrum,
    build_multipliers,
    cal_t,
    deriv,
    dispersion_omega,
    from_spectrum,
    grid_integral,
    hilbert,
    pv_apply,
    pv_quadrature,
    t_op,
    to_spectrum,
    ttilde_op,
)
from .pde import (
    EquationSpec,
    SimState,
    SolverConfig,
    initial_field,
    invariants,
    kdv_soliton,
    rhs_chiral,
    rhs_ncilw,
    run,
    step,
)
from .cms import (
    CMSCase,
    PhaseState,
    alpha_kernel,
    cms_energy,
    cms_forces,
    leapfrog,
    potential,
    potential_prime,
)
from .poles import (
    PoleState,
    bo_residual,
    constrained_velocities,
    pole_evolve,
    pole_forces,
    pole_to_field,
)
from .quantum import (
    GridOperator,
    SectorSpec,
    build_ecs,
    build_generalized,
    coupling_constant,
    diagonalize,
    exchange_symmetry_check,
    richardson_ground_energy,
    swap_symmetry_check,
)

__version__ = "0.1.0"
