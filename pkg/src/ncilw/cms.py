"""Classical Calogero-Moser-Sutherland particle dynamics.

The four cases are distinguished by the two-body potential

    V(x) = 1/x^2                                 (rational)
           (pi/2ell)^2 / sin^2(pi x/2ell)        (trigonometric)
           (pi/2delta)^2 / sinh^2(pi x/2delta)   (hyperbolic)
           wp1(x)                                (elliptic)

together with the odd kernel functions

    alpha(x) = 1/x, (pi/2ell) cot(pi x/2ell),
               (pi/2delta) coth(pi x/2delta), zeta1(x)

related by V = -alpha'.  The Hamiltonian is
H = sum_j p_j^2/2 + g^2 sum_{j<k} V(x_j - x_k), integrated with
velocity-Verlet (leapfrog): symplectic, exactly time-reversible, and
momentum-conserving to rounding because the forces are pairwise
antisymmetric.

Near-collisions are a hard error, not a regularization: with repulsive
couplings real-initial-data collisions are non-generic, and a collision
signals integrator failure rather than physics.  Periodic cases run on
the universal cover; positions are reduced mod 2*ell only for reporting.
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import EXCLUSION_FACTOR, EllipticParams, wp1, wp1_prime, zeta1
from .errors import Collision, PoleProximity

CASE_TAGS = ("rational", "trigonometric", "hyperbolic", "elliptic")


@dataclass(frozen=True)
class CMSCase:
    """Potential family tag plus the length scales the case needs."""

    tag: str
    params: EllipticParams = None

    def __post_init__(self):
        if self.tag not in CASE_TAGS:
            raise ValueError(f"unknown CMS case {self.tag!r}")
        if self.tag != "rational" and self.params is None:
            raise ValueError(f"{self.tag} case requires elliptic params")

    def min_gap_scale(self):
        """Length scale used by the collision/pole-proximity guards."""
        if self.tag == "rational":
            return 1.0
        if self.tag == "trigonometric":
            return self.params.ell
        if self.tag == "hyperbolic":
            return self.params.delta
        return min(self.params.ell, self.params.delta)


@dataclass
class PhaseState:
    """Real phase-space point (x_1..x_N, p_1..p_N)."""

    positions: np.ndarray
    momenta: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.momenta = np.asarray(self.momenta, dtype=float)
        if self.positions.shape != self.momenta.shape or self.positions.ndim != 1:
            raise ValueError("positions and momenta must be equal-length vectors")

    @property
    def n_particles(self):
        return len(self.positions)

    def copy(self):
        return PhaseState(self.positions.copy(), self.momenta.copy())

    def reduced_positions(self, case):
        """Positions folded to [-ell, ell) for the periodic cases."""
        if case.tag in ("trigonometric", "elliptic"):
            ell = case.params.ell
            return np.mod(self.positions + ell, 2.0 * ell) - ell
        return self.positions.copy()


def _check_separation(case, x):
    x = np.asarray(x, dtype=float)
    if case.tag == "rational":
        dist = np.abs(x)
    elif case.tag == "trigonometric":
        ell = case.params.ell
        dist = np.abs(np.mod(x + ell, 2.0 * ell) - ell)
    elif case.tag == "hyperbolic":
        dist = np.abs(x)
    else:
        # real separations: the nearest lattice point lies on the real axis
        ell = case.params.ell
        dist = np.abs(np.mod(x + ell, 2.0 * ell) - ell)
    if np.any(dist < EXCLUSION_FACTOR * case.min_gap_scale()):
        raise PoleProximity(f"{case.tag} potential argument too close to a pole")


def potential(case, x):
    """Two-body potential V(x); even, with a double pole at x = 0."""
    _check_separation(case, x)
    xa = np.asarray(x, dtype=float)
    if case.tag == "rational":
        out = 1.0 / xa**2
    elif case.tag == "trigonometric":
        a = np.pi / (2.0 * case.params.ell)
        out = a**2 / np.sin(a * xa) ** 2
    elif case.tag == "hyperbolic":
        a = np.pi / (2.0 * case.params.delta)
        out = a**2 / np.sinh(a * xa) ** 2
    else:
        out = np.real(wp1(xa, case.params))
    return float(out) if np.ndim(x) == 0 else out


def alpha_kernel(case, x):
    """Odd kernel alpha(x) with V = -alpha'."""
    _check_separation(case, x)
    xa = np.asarray(x, dtype=float)
    if case.tag == "rational":
        out = 1.0 / xa
    elif case.tag == "trigonometric":
        a = np.pi / (2.0 * case.params.ell)
        out = a / np.tan(a * xa)
    elif case.tag == "hyperbolic":
        a = np.pi / (2.0 * case.params.delta)
        out = a / np.tanh(a * xa)
    else:
        out = np.real(zeta1(xa, case.params))
    return float(out) if np.ndim(x) == 0 else out


def potential_prime(case, x):
    """dV/dx, used for the analytic forces; odd."""
    _check_separation(case, x)
    xa = np.asarray(x, dtype=float)
    if case.tag == "rational":
        out = -2.0 / xa**3
    elif case.tag == "trigonometric":
        a = np.pi / (2.0 * case.params.ell)
        out = -2.0 * a**3 * np.cos(a * xa) / np.sin(a * xa) ** 3
    elif case.tag == "hyperbolic":
        a = np.pi / (2.0 * case.params.delta)
        out = -2.0 * a**3 * np.cosh(a * xa) / np.sinh(a * xa) ** 3
    else:
        out = np.real(wp1_prime(xa, case.params))
    return float(out) if np.ndim(x) == 0 else out


def _pair_differences(positions):
    return positions[:, None] - positions[None, :]


def cms_energy(state, case, g2):
    """H = sum p^2/2 + g^2 sum_{j<k} V(x_j - x_k)."""
    kin = 0.5 * float(np.dot(state.momenta, state.momenta))
    n = state.n_particles
    if n < 2:
        return kin
    diff = _pair_differences(state.positions)
    iu = np.triu_indices(n, k=1)
    return kin + g2 * float(np.sum(potential(case, diff[iu])))


def cms_forces(state, case, g2):
    """F_j = -g^2 sum_{k != j} V'(x_j - x_k); antisymmetric pair forces."""
    n = state.n_particles
    if n < 2 or g2 == 0.0:
        return np.zeros(n)
    diff = _pair_differences(state.positions)
    iu = np.triu_indices(n, k=1)
    vp = np.zeros((n, n))
    vp[iu] = potential_prime(case, diff[iu])
    vp = vp - vp.T  # V' is odd
    return -g2 * np.sum(vp, axis=1)


def _check_gaps(state, case):
    n = state.n_particles
    if n < 2:
        return
    diff = _pair_differences(state.positions)
    iu = np.triu_indices(n, k=1)
    try:
        _check_separation(case, diff[iu])
    except PoleProximity as exc:
        raise Collision("particle pair reached the minimum gap") from exc


def leapfrog(state, case, g2, dt, n_steps):
    """Velocity-Verlet integration of the CMS Hamiltonian flow."""
    if not dt != 0.0:
        raise ValueError("dt must be nonzero")
    cur = state.copy()
    _check_gaps(cur, case)
    force = cms_forces(cur, case, g2)
    for _ in range(n_steps):
        cur.momenta = cur.momenta + 0.5 * dt * force
        cur.positions = cur.positions + dt * cur.momenta
        _check_gaps(cur, case)
        force = cms_forces(cur, case, g2)
        cur.momenta = cur.momenta + 0.5 * dt * force
    return cur
