"""Small-N grid discretizations of the (generalized) eCS Hamiltonians.

The eCS Hamiltonian is

    H_{N;g} = -1/2 sum_j d^2/dx_j^2
              + g(g-1) sum_{j<k} wp1(x_j - x_k) + c_{N;g}

and the generalized four-species Hamiltonian assembles blocks for
particles labelled by (mass m, chirality r) with m in {1, -1/g},
r in {+, -}: species counts (N1, M1, N2, M2) for (1,+), (-1/g,+),
(1,-), (-1/g,-).  Every axis pair interacts with coefficient
g(m+m')(gmm'-1)/2; the kernel is the singular wp1(x) for equal
chirality and the pole-free wp1(x+i delta) for opposite chirality.
Kinetic terms carry 1/(2m), so negative-mass axes contribute with a
flipped sign; nothing here asserts positivity.

The tensor grid uses one uniform periodic axis per particle with a
distinct fractional offset per axis, so no node-pair difference ever
hits a wp1 pole; symmetry checks that permute particles therefore
permute the per-axis offsets along with the axes (the operator family
is covariant, not invariant, under bare index permutation).

For g > 1 the wp1 singularity on coincidence hyperplanes limits the
finite-difference accuracy; convergence RATE (second order in the
spacing, improved by Richardson extrapolation) is the meaningful
quantity, and the tests gate on stability of the extrapolated values.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import eigsh

from .elliptic import EllipticParams, c_const, wp1, wp1_shifted
from .errors import DimensionCap, PoleOnGrid, PoleProximity

#: largest dense operator dimension diagonalize will accept
DIMENSION_CAP = 10_000

#: most particles the dense tensor discretization supports
MAX_PARTICLES = 3


@dataclass(frozen=True)
class SectorSpec:
    """Four species counts, the coupling g >= 1, and the half-periods."""

    n1: int
    m1: int
    n2: int
    m2: int
    g: float
    params: EllipticParams

    def __post_init__(self):
        counts = (self.n1, self.m1, self.n2, self.m2)
        if any(c < 0 for c in counts):
            raise ValueError("species counts must be non-negative")
        if not 1 <= sum(counts) <= MAX_PARTICLES:
            raise ValueError(f"total particles must be 1..{MAX_PARTICLES}")
        if not self.g >= 1.0:
            raise ValueError("coupling g must be >= 1")

    def species_axes(self):
        """(mass, chirality) per axis, in block order x, x~, y, y~."""
        g = self.g
        axes = []
        axes += [(1.0, +1)] * self.n1
        axes += [(-1.0 / g, +1)] * self.m1
        axes += [(1.0, -1)] * self.n2
        axes += [(-1.0 / g, -1)] * self.m2
        return axes


@dataclass
class GridOperator:
    """Dense real symmetric-candidate matrix over the offset tensor grid."""

    matrix: np.ndarray
    n_points: int
    params: EllipticParams
    offsets: tuple

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("operator entries must be finite")

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def n_axes(self):
        return len(self.offsets)


def coupling_constant(m, mp, g):
    """Pair coupling g(m+m')(gmm'-1)/2 for species masses in {1, -1/g}."""
    return g * (m + mp) * (g * m * mp - 1.0) / 2.0


def default_offsets(n_axes):
    """Distinct fractional offsets (2a+1)/(2P): no pole on any pair diagonal."""
    return tuple((2 * a + 1) / (2.0 * n_axes) for a in range(n_axes))


def axis_nodes(n_points, params, offset):
    h = 2.0 * params.ell / n_points
    return -params.ell + (np.arange(n_points) + offset) * h


def _second_derivative(n_points, params, order):
    """Periodic central finite-difference d^2/dx^2 (order 2 or 4)."""
    h = 2.0 * params.ell / n_points
    mat = np.zeros((n_points, n_points))
    idx = np.arange(n_points)
    if order == 2:
        stencil = {0: -2.0, 1: 1.0, -1: 1.0}
        scale = 1.0 / h**2
    elif order == 4:
        stencil = {0: -30.0, 1: 16.0, -1: 16.0, 2: -1.0, -2: -1.0}
        scale = 1.0 / (12.0 * h**2)
    else:
        raise ValueError("finite-difference order must be 2 or 4")
    for off, w in stencil.items():
        mat[idx, (idx + off) % n_points] = w * scale
    return mat


def _pair_kernel(nodes_a, nodes_b, params, shifted):
    """wp1 (or wp1 shifted by i delta) on the node-difference lattice."""
    diff = nodes_a[:, None] - nodes_b[None, :]
    try:
        if shifted:
            return wp1_shifted(diff, params)
        return np.real(wp1(diff, params))
    except PoleProximity as exc:
        raise PoleOnGrid("node pair difference hits a wp1 singularity") from exc


def _assemble(axes, g, params, n_points, order, offsets, constant):
    n_axes = len(axes)
    if offsets is None:
        offsets = default_offsets(n_axes)
    if len(offsets) != n_axes:
        raise ValueError("one offset per axis required")
    dim = n_points**n_axes
    if dim > DIMENSION_CAP:
        raise DimensionCap(f"dense dimension {dim} exceeds {DIMENSION_CAP}")
    nodes = [axis_nodes(n_points, params, o) for o in offsets]
    d2 = _second_derivative(n_points, params, order)

    total = np.zeros((dim, dim))
    eye = np.eye(n_points)
    for a, (mass, _) in enumerate(axes):
        term = -0.5 / mass * d2
        full = np.array([[1.0]])
        for b in range(n_axes):
            full = np.kron(full, term if b == a else eye)
        total += full

    diag = np.full(dim, constant)
    shape = (n_points,) * n_axes
    for a in range(n_axes):
        for b in range(a + 1, n_axes):
            ma, ra = axes[a]
            mb, rb = axes[b]
            coeff = coupling_constant(ma, mb, g)
            if coeff == 0.0:
                continue
            kern = coeff * _pair_kernel(nodes[a], nodes[b], params, ra != rb)
            expand = [None] * n_axes
            expand[a] = slice(None)
            expand[b] = slice(None)
            diag += np.broadcast_to(
                kern[tuple(expand)], shape
            ).reshape(dim)
    total[np.arange(dim), np.arange(dim)] += diag
    return GridOperator(total, n_points, params, tuple(offsets))


def build_ecs(n_particles, g, params, n_points, order=2, offsets=None):
    """Discretize H_{N;g} on the offset tensor grid."""
    if n_particles < 1:
        raise ValueError("need at least one particle")
    axes = [(1.0, +1)] * n_particles
    const = c_const(n_particles, g, params)
    return _assemble(axes, g, params, n_points, order, offsets, const)


def build_generalized(sector, n_points, order=2, offsets=None):
    """Discretize the four-species Hamiltonian H_{N1,M1,N2,M2;g}."""
    g = sector.g
    p = sector.params
    const = (
        c_const(sector.n1, g, p)
        - g * c_const(sector.m1, 1.0 / g, p)
        + c_const(sector.n2, g, p)
        - g * c_const(sector.m2, 1.0 / g, p)
    )
    return _assemble(sector.species_axes(), g, p, n_points, order, offsets, const)


def _permute_axes(op, perm):
    """Conjugate the operator by the tensor-axis permutation perm."""
    n_axes = op.n_axes
    n = op.n_points
    shape = (n,) * (2 * n_axes)
    tensor = op.matrix.reshape(shape)
    axes_map = list(perm) + [n_axes + a for a in perm]
    return tensor.transpose(axes_map).reshape(op.matrix.shape)


def swap_symmetry_check(sector, n_points, order=2):
    """Exchange the '+' and '-' families and compare entry-wise.

    The swapped sector is built with the original per-axis offsets
    carried along the permutation, so exact equality (to rounding) is
    expected.  Returns a report dict with the max entry deviation.
    """
    a_op = build_generalized(sector, n_points, order)
    swapped = SectorSpec(
        sector.n2, sector.m2, sector.n1, sector.m1, sector.g, sector.params
    )
    # axis a of the original sector becomes axis perm[a] of the swapped one
    n_plus = sector.n1 + sector.m1
    n_minus = sector.n2 + sector.m2
    perm = [n_minus + a for a in range(n_plus)] + list(range(n_minus))
    offsets = [0.0] * (n_plus + n_minus)
    for a, o in zip(perm, a_op.offsets):
        offsets[a] = o
    b_op = build_generalized(swapped, n_points, order, offsets=tuple(offsets))
    back = _permute_axes(b_op, perm)
    dev = float(np.max(np.abs(a_op.matrix - back)))
    return {
        "sector": (sector.n1, sector.m1, sector.n2, sector.m2),
        "max_entry_deviation": dev,
        "passed": bool(dev < 1e-12 * max(1.0, float(np.max(np.abs(a_op.matrix))))),
    }


def exchange_symmetry_check(n_particles, g, params, n_points, order=2):
    """Within-species exchange of two axes (with their grids) for H_{N;g}."""
    if n_particles < 2:
        raise ValueError("need two particles to exchange")
    op = build_ecs(n_particles, g, params, n_points, order)
    perm = list(range(n_particles))
    perm[0], perm[1] = perm[1], perm[0]
    offsets = [op.offsets[perm.index(a)] for a in range(n_particles)]
    swapped = build_ecs(n_particles, g, params, n_points, order, offsets=tuple(offsets))
    back = _permute_axes(swapped, perm)
    dev = float(np.max(np.abs(op.matrix - back)))
    return {
        "max_entry_deviation": dev,
        "passed": bool(dev < 1e-12 * max(1.0, float(np.max(np.abs(op.matrix))))),
    }


def diagonalize(op, k=6):
    """Lowest k eigenvalues of the symmetric operator, with residual check."""
    dim = op.dimension
    if dim > DIMENSION_CAP:
        raise DimensionCap(f"dimension {dim} exceeds {DIMENSION_CAP}")
    sym = 0.5 * (op.matrix + op.matrix.T)
    k = min(k, dim)
    if k < dim - 1 and dim > 200:
        vals, vecs = eigsh(sym, k=k, which="SA")
    else:
        vals, vecs = np.linalg.eigh(sym)
        vals, vecs = vals[:k], vecs[:, :k]
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    for i in range(k):
        resid = np.linalg.norm(sym @ vecs[:, i] - vals[i] * vecs[:, i])
        scale = max(1.0, abs(vals[i])) * np.linalg.norm(vecs[:, i])
        if resid > 1e-8 * scale:
            raise ArithmeticError(f"eigenpair residual {resid:.3e} too large")
    return vals


def richardson_ground_energy(build, grids, order=2):
    """Ground eigenvalue extrapolated from a sequence of grid sizes.

    build(n_points) must return a GridOperator; for a second-order
    stencil E(h) = E* + C h^2, so successive pairs extrapolate as
    (r^2 E_fine - E_coarse)/(r^2 - 1) with r the refinement ratio.
    Returns (extrapolated values, raw values).
    """
    raw = [diagonalize(build(n), k=1)[0] for n in grids]
    extrap = []
    for n0, n1, e0, e1 in zip(grids, grids[1:], raw, raw[1:]):
        r2 = (n1 / n0) ** order
        extrap.append((r2 * e1 - e0) / (r2 - 1.0))
    return extrap, raw
