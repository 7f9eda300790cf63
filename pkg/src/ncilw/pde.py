"""Time integration of the chiral soliton family and the non-chiral system.

Chiral equations (2 ell-periodic, u real):

    u_t + 2 u u_x + (delta_K/3) u_xxx            = 0   (KdV)
    u_t + 2 u u_x + H u_xx                       = 0   (BO)
    u_t + 2 u u_x + (1/delta) u_x + T u_xx       = 0   (ILW)

Non-chiral system (u, v real, coupling normalized to 1):

    u_t + 2 u u_x + T u_xx + Tt v_xx = 0
    v_t - 2 v v_x - T v_xx - Tt u_xx = 0

which is invariant under (u(x), v(x)) -> (v(-x), u(-x)) and decouples
into two parity-related BO equations as delta -> infinity.

The integrator is an exponential 4th-order scheme (Cox-Matthews ETDRK4
with Kassam-Trefethen contour-quadrature coefficients): the linear part
is applied exactly in spectrum space, which is what makes the stiff
coth-type symbols tractable.  The quadratic nonlinearity is dealiased
with the two-thirds rule.  For the non-chiral system the per-wavenumber
2x2 linear block ik^2 [[tau, tt], [-tt, -tau]] squares to a multiple of
the identity, so it is diagonalized in closed form by the projections
(I +- M/mu)/2 and the same scalar ETDRK4 machinery applies.

Conserved functionals (energy/momentum) carry derived coefficients; the
derivation is reproduced by scripts/derive_invariants.py and their
conservation is part of the test suite.
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import EllipticParams
from .errors import BlowUp
from .spectral import (
    Field,
    deriv,
    get_multipliers,
    grid_integral,
    hilbert,
    t_op,
    ttilde_op,
)

CHIRAL_KINDS = ("KdV", "BO", "ILW")
ALL_KINDS = CHIRAL_KINDS + ("ncILW",)

#: documented guard: dt * max_k |linear symbol| must stay below this
CFL_BOUND = 100.0

#: blow-up guard factor relative to the initial amplitude
BLOWUP_FACTOR = 1e6


@dataclass(frozen=True)
class EquationSpec:
    kind: str
    params: EllipticParams = None
    kdv_delta: float = None
    coupling: float = 1.0  # (g-1)/2 coefficient of the non-chiral system

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown equation kind {self.kind!r}")
        if self.kind == "KdV" and self.kdv_delta is None:
            raise ValueError("KdV requires kdv_delta")
        if self.kind in ("BO", "ILW", "ncILW") and self.params is None:
            raise ValueError(f"{self.kind} requires elliptic params")


@dataclass
class SimState:
    t: float
    u: Field
    v: Field = None  # ignored for chiral kinds

    def copy(self):
        v = None if self.v is None else Field(self.v.grid, self.v.values.copy())
        return SimState(self.t, Field(self.u.grid, self.u.values.copy()), v)


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    n_steps: int
    dealias: bool = True
    invariant_every: int = 10
    snapshot_every: int = 0  # 0: only initial and final snapshot
    cfl_bound: float = CFL_BOUND

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")


def _phi_coefficients(z, n_points=32):
    """ETDRK4 stage coefficients phi(z) by contour quadrature around each z."""
    r = np.exp(2j * np.pi * (np.arange(n_points) + 0.5) / n_points)
    zz = z[..., None] + r
    ez = np.exp(zz)
    f0 = ((np.exp(zz / 2.0) - 1.0) / zz).mean(-1)
    f1 = ((-4.0 - zz + ez * (4.0 - 3.0 * zz + zz**2)) / zz**3).mean(-1)
    f2 = ((2.0 + zz + ez * (zz - 2.0)) / zz**3).mean(-1)
    f3 = ((-4.0 - 3.0 * zz - zz**2 + ez * (4.0 - zz)) / zz**3).mean(-1)
    return f0, f1, f2, f3


class _Etdrk4:
    """Scalar-symbol ETDRK4 on a stack of spectral components."""

    def __init__(self, symbol, dt, nonlinear):
        self.nonlinear = nonlinear
        self.e_full = np.exp(dt * symbol)
        self.e_half = np.exp(0.5 * dt * symbol)
        f0, f1, f2, f3 = _phi_coefficients(dt * symbol)
        self.f0 = dt * f0
        self.f1 = dt * f1
        self.f2 = dt * f2
        self.f3 = dt * f3

    def step(self, w):
        n0 = self.nonlinear(w)
        a = self.e_half * w + self.f0 * n0
        n1 = self.nonlinear(a)
        b = self.e_half * w + self.f0 * n1
        n2 = self.nonlinear(b)
        c = self.e_half * a + self.f0 * (2.0 * n2 - n0)
        n3 = self.nonlinear(c)
        return (
            self.e_full * w
            + self.f1 * n0
            + 2.0 * self.f2 * (n1 + n2)
            + self.f3 * n3
        )


def _dealias_mask(grid):
    n = np.abs(grid.mode_numbers)
    return (n <= grid.m_points // 3).astype(float)


class _Stepper:
    """Precomputed spectral machinery for one (spec, grid, config) triple."""

    def __init__(self, spec, grid, config):
        self.spec = spec
        self.grid = grid
        self.config = config
        self.phase = np.power(-1.0 + 0j, np.abs(grid.mode_numbers) % 2)
        k = grid.wavenumbers.copy()
        k[grid.m_points // 2] = 0.0
        self.ik = 1j * k
        self.mask = _dealias_mask(grid) if config.dealias else np.ones(grid.m_points)

        if spec.kind == "KdV":
            lam = 1j * (spec.kdv_delta / 3.0) * k**3
        elif spec.kind == "BO":
            lam = k**2 * get_multipliers("H", grid, spec.params).sigma
        elif spec.kind == "ILW":
            sig_t = get_multipliers("T", grid, spec.params).sigma
            lam = -1j * k / spec.params.delta + k**2 * sig_t
        else:  # ncILW: diagonalize the 2x2 block in closed form
            a = spec.coupling
            tau = a * get_multipliers("T", grid, spec.params).sigma.imag
            tt = a * get_multipliers("Ttilde", grid, spec.params).sigma.imag
            mu2 = tau**2 - tt**2
            mu = np.sqrt(np.maximum(mu2, 0.0))
            safe = np.where(mu > 0.0, mu, 1.0)
            self._tau, self._tt, self._mu = tau, tt, safe
            lam = np.stack([1j * k**2 * safe * (mu > 0), -1j * k**2 * safe * (mu > 0)])

        # the linear part is integrated exactly, so the step-size guard is
        # about resolving the nonlinear coupling: measure dt * |symbol| on
        # the modes retained after dealiasing
        guard = config.dt * np.max(np.abs(lam * self.mask))
        if guard >= config.cfl_bound:
            raise ValueError(
                f"dt * max|linear symbol| = {guard:.3g} on the retained band "
                f"exceeds bound {config.cfl_bound}"
            )
        self.symbol = lam
        nonlin = self._nonlinear_ncilw if spec.kind == "ncILW" else self._nonlinear
        self.engine = _Etdrk4(lam, config.dt, nonlin)

    # spectral helpers working on raw coefficient arrays (FFT order)
    def _to_phys(self, c):
        return (np.fft.ifft(c / self.phase) * self.grid.m_points).real

    def _to_spec(self, vals):
        return np.fft.fft(vals) / self.grid.m_points * self.phase

    def _quadratic(self, c):
        """Dealiased spectrum of (field)^2."""
        vals = self._to_phys(self.mask * c)
        return self.mask * self._to_spec(vals**2)

    def _nonlinear(self, c):
        return -self.ik * self._quadratic(c)

    def _project(self, zu, zv):
        mzu = self._tau * zu + self._tt * zv
        mzv = -self._tt * zu - self._tau * zv
        wp = 0.5 * (zu + mzu / self._mu), 0.5 * (zv + mzv / self._mu)
        wm = 0.5 * (zu - mzu / self._mu), 0.5 * (zv - mzv / self._mu)
        return np.stack([wp[0], wm[0]]), np.stack([wp[1], wm[1]])

    def to_diag(self, zu, zv):
        wu, wv = self._project(zu, zv)
        # stack layout: axis 0 = (+, -) eigencomponents, interleaved (u, v)
        return np.concatenate([wu, wv])

    def from_diag(self, w):
        zu = w[0] + w[1]
        zv = w[2] + w[3]
        return zu, zv

    def _nonlinear_ncilw(self, w):
        zu, zv = self.from_diag(w)
        nu = -self.ik * self._quadratic(zu)
        nv = self.ik * self._quadratic(zv)
        wu, wv = self._project(nu, nv)
        return np.concatenate([wu, wv])


def make_stepper(spec, grid, config):
    st = _Stepper(spec, grid, config)
    if spec.kind == "ncILW":
        # duplicate each eigen-symbol for the (u, v) interleaving
        st.engine = _Etdrk4(
            np.concatenate([st.symbol, st.symbol]), config.dt, st._nonlinear_ncilw
        )
    return st


def rhs_chiral(u, spec):
    """Right-hand side u_t for the chiral family (physical space)."""
    ux = deriv(u)
    nonlin = -2.0 * u.values * ux.values
    if spec.kind == "KdV":
        uxxx = deriv(deriv(ux))
        lin = -(spec.kdv_delta / 3.0) * uxxx.values
    elif spec.kind == "BO":
        lin = -hilbert(deriv(ux), spec.params).values
    elif spec.kind == "ILW":
        lin = (
            -ux.values / spec.params.delta
            - t_op(deriv(ux), spec.params).values
        )
    else:
        raise ValueError("rhs_chiral requires a chiral kind")
    return Field(u.grid, nonlin + lin)


def rhs_ncilw(u, v, spec):
    """Right-hand side (u_t, v_t) of the non-chiral system."""
    if u.grid != v.grid:
        raise ValueError("u and v must share one grid")
    p = spec.params
    a = spec.coupling
    uxx = deriv(deriv(u))
    vxx = deriv(deriv(v))
    ux = deriv(u)
    vx = deriv(v)
    du = -2.0 * u.values * ux.values - a * (
        t_op(uxx, p).values + ttilde_op(vxx, p).values
    )
    dv = 2.0 * v.values * vx.values + a * (
        t_op(vxx, p).values + ttilde_op(uxx, p).values
    )
    return Field(u.grid, du), Field(v.grid, dv)


def step(state, spec, config, stepper=None):
    """Advance one ETDRK4 step of size config.dt."""
    st = stepper or make_stepper(spec, state.u.grid, config)
    amp0 = max(np.max(np.abs(state.u.values)), 1e-12)
    if spec.kind == "ncILW":
        amp0 = max(amp0, np.max(np.abs(state.v.values)))
        w = st.to_diag(st._to_spec(state.u.values), st._to_spec(state.v.values))
        w = st.engine.step(w)
        zu, zv = st.from_diag(w)
        u = Field(state.u.grid, st._to_phys(zu))
        v = Field(state.u.grid, st._to_phys(zv))
        new = SimState(state.t + config.dt, u, v)
        amp = max(np.max(np.abs(u.values)), np.max(np.abs(v.values)))
    else:
        c = st.engine.step(st._to_spec(state.u.values))
        u = Field(state.u.grid, st._to_phys(c))
        new = SimState(state.t + config.dt, u)
        amp = np.max(np.abs(u.values))
    if amp > BLOWUP_FACTOR * amp0:
        raise BlowUp(f"amplitude {amp:.3g} exceeds {BLOWUP_FACTOR:.0e} x initial")
    return new


def invariants(state, spec):
    """Conserved-quantity record {mass_u, mass_v, momentum, energy}.

    The coefficients of the cubic-plus-quadratic energy functionals and
    the quadratic momentum are derived (see scripts/derive_invariants.py),
    not transcribed: energy for the non-chiral system is

        E = int (u^3 + v^3)
            + (3 a / 2) int (u T u_x + v T v_x + u Tt v_x + v Tt u_x)

    with a the coupling coefficient, and momentum is int (u^2 - v^2).
    """
    u = state.u
    rec = {"t": state.t, "mass_u": grid_integral(u)}
    if spec.kind == "ncILW":
        v = state.v
        p = spec.params
        a = spec.coupling
        ux, vx = deriv(u), deriv(v)
        cross = (
            u.values * t_op(ux, p).values
            + v.values * t_op(vx, p).values
            + u.values * ttilde_op(vx, p).values
            + v.values * ttilde_op(ux, p).values
        )
        energy = grid_integral(
            Field(u.grid, u.values**3 + v.values**3 + 1.5 * a * cross)
        )
        rec["mass_v"] = grid_integral(v)
        rec["momentum"] = grid_integral(Field(u.grid, u.values**2 - v.values**2))
        rec["energy"] = energy
        return rec

    rec["mass_v"] = 0.0
    rec["momentum"] = grid_integral(Field(u.grid, u.values**2))
    ux = deriv(u)
    if spec.kind == "KdV":
        dens = u.values**3 - 0.5 * spec.kdv_delta * ux.values**2
    elif spec.kind == "BO":
        dens = u.values**3 + 1.5 * u.values * hilbert(ux, spec.params).values
    else:  # ILW
        dens = (
            u.values**3
            + 1.5 * u.values * t_op(ux, spec.params).values
            + 1.5 / spec.params.delta * u.values**2
        )
    rec["energy"] = grid_integral(Field(u.grid, dens))
    return rec


def run(initial, spec, config):
    """Integrate n_steps; returns (snapshots, invariant_records)."""
    st = make_stepper(spec, initial.u.grid, config)
    state = initial.copy()
    snapshots = [state.copy()]
    records = [invariants(state, spec)]
    for i in range(1, config.n_steps + 1):
        state = step(state, spec, config, stepper=st)
        if config.invariant_every and i % config.invariant_every == 0:
            records.append(invariants(state, spec))
        if config.snapshot_every and i % config.snapshot_every == 0:
            snapshots.append(state.copy())
    if config.n_steps % max(config.snapshot_every, 1) != 0 or not config.snapshot_every:
        snapshots.append(state.copy())
    if records[-1]["t"] != state.t:
        records.append(invariants(state, spec))
    return snapshots, records


# ---------------------------------------------------------------------------
# initial-data presets
# ---------------------------------------------------------------------------


def kdv_soliton(grid, speed, kdv_delta, x0=0.0, n_images=3):
    """Periodized traveling-wave solution of the KdV display.

    Substituting A sech^2(B(x - c t)) gives A = 3c/2, B = sqrt(3c/(4 delta)).
    """
    amp = 1.5 * speed
    width = np.sqrt(3.0 * speed / (4.0 * kdv_delta))
    x = grid.nodes
    vals = np.zeros_like(x)
    for a in range(-n_images, n_images + 1):
        vals += amp / np.cosh(width * (x - x0 - 2.0 * a * grid.ell)) ** 2
    return Field(grid, vals)


def initial_field(preset, grid, amplitude=1.0, mode=1, width=None, x0=0.0, **kw):
    """Named initial-data presets for the CLI."""
    x = grid.nodes
    if preset == "single-mode":
        return Field(grid, amplitude * np.cos(mode * np.pi * x / grid.ell))
    if preset == "gaussian-bump":
        w = width if width is not None else grid.ell / 8.0
        vals = np.zeros_like(x)
        for a in range(-3, 4):
            vals += amplitude * np.exp(-((x - x0 - 2 * a * grid.ell) ** 2) / (2 * w**2))
        return Field(grid, vals)
    if preset == "soliton-approximant":
        return kdv_soliton(grid, kw.get("speed", 1.0), kw.get("kdv_delta", 1.0), x0)
    raise ValueError(f"unknown preset {preset!r}")
