"""Pole-ansatz bridge between periodic BO and complexified trig CMS.

The BO field is represented by N poles a_j strictly inside one half of
the complex plane:

    u(x) = FIELD_SIGN * i * sum_j [alpha(x - a_j) - alpha(x - conj(a_j))]

with alpha(x) = (pi/2ell) cot(pi x/2ell); the conjugate poles make u
real.  The constants FIELD_SIGN and FORCE_G2 below are calibration
artifacts, fixed once against the PDE solver at N = 1 and frozen
(scripts/calibrate_pole_ansatz.py reproduces the calibration):

  * FIELD_SIGN = +1: only this branch (with poles in the lower
    half-plane) admits pole velocities that solve BO exactly; the LSQ
    residual for the opposite sign is O(1).
  * FORCE_G2 = 4: the numerically observed pole accelerations equal
    the complexified trigonometric CMS force -FORCE_G2 * sum V'(a_j-a_k)
    to ~1e-10 relative, with the fitted constant integer to the same
    accuracy.

`constrained_velocities` recovers the pole velocities from the pole
positions by least squares against the spectral BO right-hand side;
`pole_evolve` then integrates the Newtonian complexified CMS equations
with a complex velocity-Verlet scheme (time-reversible; forces depend
on positions only).
"""

from dataclasses import dataclass

import numpy as np

from .cms import CMSCase
from .elliptic import EXCLUSION_FACTOR
from .errors import Collision, OracleInconsistency, RealAxisCrossing
from .spectral import Field, deriv, hilbert

#: calibrated overall sign of the pole-ansatz field
FIELD_SIGN = 1.0

#: calibrated coupling g^2 of the Newtonian pole dynamics
FORCE_G2 = 4.0

#: acceptable relative LSQ residual when fitting pole velocities
VELOCITY_FIT_TOL = 1e-8


@dataclass
class PoleState:
    """Complex pole configuration with optional velocities.

    chirality is the sign of Im(a_j): the calibrated branch is -1
    (poles in the lower half-plane).
    """

    poles: np.ndarray
    velocities: np.ndarray = None
    chirality: int = -1

    def __post_init__(self):
        self.poles = np.asarray(self.poles, dtype=complex)
        if self.poles.ndim != 1 or len(self.poles) == 0:
            raise ValueError("poles must be a non-empty vector")
        if self.chirality not in (-1, 1):
            raise ValueError("chirality must be +-1")
        if np.any(self.chirality * self.poles.imag <= 0.0):
            raise ValueError("all poles must lie strictly in the chiral half-plane")
        if self.velocities is not None:
            self.velocities = np.asarray(self.velocities, dtype=complex)
            if self.velocities.shape != self.poles.shape:
                raise ValueError("velocities must match poles in length")

    @property
    def n_poles(self):
        return len(self.poles)

    def copy(self):
        v = None if self.velocities is None else self.velocities.copy()
        return PoleState(self.poles.copy(), v, self.chirality)


def _alpha(z, ell):
    c = np.pi / (2.0 * ell)
    return c / np.tan(c * z)


def _alpha_prime(z, ell):
    c = np.pi / (2.0 * ell)
    return -(c**2) / np.sin(c * z) ** 2


def pole_to_field(state, grid):
    """Evaluate the ansatz field on the grid nodes; real by conjugate pairing."""
    x = grid.nodes
    u = np.zeros(len(x), dtype=complex)
    for a in state.poles:
        u += FIELD_SIGN * 1j * (_alpha(x - a, grid.ell) - _alpha(x - np.conj(a), grid.ell))
    scale = max(1.0, np.max(np.abs(u)))
    if np.max(np.abs(u.imag)) > 1e-10 * scale:
        raise AssertionError("pole-ansatz field is not real within tolerance")
    return Field(grid, u.real)


def _bo_rhs(u, params):
    ux = deriv(u)
    return -2.0 * u.values * ux.values - hilbert(deriv(ux), params).values


def constrained_velocities(state, grid, params):
    """Pole velocities solving BO, fitted by least squares on the grid.

    Returns (new PoleState with velocities, max residual of the fit).
    Raises OracleInconsistency if the residual is not small: that means
    the configuration is off the ansatz manifold (e.g. wrong chirality).
    """
    x = grid.nodes
    cols = []
    for a in state.poles:
        base = -FIELD_SIGN * 1j * _alpha_prime(x - a, grid.ell)
        cols.append(2.0 * base.real)  # du/dt coefficient of Re(da/dt)
        cols.append(2.0 * (1j * base).real)  # ... of Im(da/dt)
    mat = np.stack(cols, axis=1)
    target = _bo_rhs(pole_to_field(state, grid), params)
    sol, *_ = np.linalg.lstsq(mat, target, rcond=None)
    resid = float(np.max(np.abs(mat @ sol - target)))
    scale = max(1.0, float(np.max(np.abs(target))))
    if resid > VELOCITY_FIT_TOL * scale:
        raise OracleInconsistency(
            f"pole velocity fit residual {resid:.3e} exceeds tolerance"
        )
    vel = sol[0::2] + 1j * sol[1::2]
    return PoleState(state.poles.copy(), vel, state.chirality), resid


def pole_forces(poles, ell):
    """Complexified trig CMS accelerations -FORCE_G2 * sum_k V'(a_j - a_k)."""
    n = len(poles)
    if n < 2:
        return np.zeros(n, dtype=complex)
    c = np.pi / (2.0 * ell)
    diff = poles[:, None] - poles[None, :]
    np.fill_diagonal(diff, 1.0)
    vp = -2.0 * c**3 * np.cos(c * diff) / np.sin(c * diff) ** 3
    np.fill_diagonal(vp, 0.0)
    return -FORCE_G2 * np.sum(vp, axis=1)


def _check_poles(poles, chirality, ell):
    if np.any(chirality * poles.imag <= EXCLUSION_FACTOR * ell):
        raise RealAxisCrossing("a pole reached the real axis")
    n = len(poles)
    if n < 2:
        return
    c = np.pi / (2.0 * ell)
    diff = poles[:, None] - poles[None, :]
    np.fill_diagonal(diff, 1.0 + 1.0j)
    gap = np.abs(np.sin(c * diff)) / c
    np.fill_diagonal(gap, np.inf)
    if np.min(gap) < EXCLUSION_FACTOR * ell:
        raise Collision("pole pair reached the minimum gap")


def pole_evolve(state, case, dt, n_steps):
    """Integrate the Newtonian pole dynamics (complex velocity-Verlet).

    The case must be the trigonometric CMS case; its ell sets the period.
    Velocities must be present (see constrained_velocities).
    """
    if not isinstance(case, CMSCase) or case.tag != "trigonometric":
        raise ValueError("pole dynamics is the trigonometric CMS case")
    if state.velocities is None:
        raise ValueError("pole_evolve requires velocities; fit them first")
    ell = case.params.ell
    cur = state.copy()
    _check_poles(cur.poles, cur.chirality, ell)
    force = pole_forces(cur.poles, ell)
    for _ in range(n_steps):
        cur.velocities = cur.velocities + 0.5 * dt * force
        cur.poles = cur.poles + dt * cur.velocities
        _check_poles(cur.poles, cur.chirality, ell)
        force = pole_forces(cur.poles, ell)
        cur.velocities = cur.velocities + 0.5 * dt * force
    return cur


def bo_residual(state, grid, params):
    """Max pointwise BO residual of the ansatz at this pole configuration.

    Uses the velocities carried by the state (e.g. after pole_evolve);
    if absent they are fitted first, which makes the residual a check of
    the ansatz manifold rather than of the dynamics.
    """
    if state.velocities is None:
        state, _ = constrained_velocities(state, grid, params)
    x = grid.nodes
    ut = np.zeros(len(x))
    for a, v in zip(state.poles, state.velocities):
        base = -FIELD_SIGN * 1j * _alpha_prime(x - a, grid.ell)
        ut += 2.0 * (base * v).real
    resid = ut - _bo_rhs(pole_to_field(state, grid), params)
    return float(np.max(np.abs(resid)))
