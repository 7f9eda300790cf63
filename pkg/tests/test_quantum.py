"""Tests for the grid discretizations of the (generalized) eCS Hamiltonians.

In the trigonometric regime (delta/ell large) the N = 2 ground state is
known in closed form: psi = sin^g(pi (x1-x2)/2ell) with eigenvalue
g^2 (pi/2ell)^2 + c_{2;g}.  This gives an independent reference for the
finite-difference convergence checks (the elliptic correction at
delta/ell = 10 is of order the nome, ~1e-27).
"""

import numpy as np
import pytest

from ncilw.elliptic import EllipticParams, c_const
from ncilw.errors import DimensionCap, PoleOnGrid
from ncilw.quantum import (
    GridOperator,
    SectorSpec,
    axis_nodes,
    build_ecs,
    build_generalized,
    coupling_constant,
    default_offsets,
    diagonalize,
    exchange_symmetry_check,
    richardson_ground_energy,
    swap_symmetry_check,
)

TRIG = EllipticParams(np.pi, 10.0 * np.pi)
G = 2.0


def trig_ground_energy(g, params):
    return g**2 * (np.pi / (2.0 * params.ell)) ** 2 + c_const(2, g, params)


class TestCoupling:
    def test_same_species_plus(self):
        assert coupling_constant(1.0, 1.0, G) == G * (G - 1.0)

    def test_same_species_minus_mass(self):
        assert coupling_constant(-1.0 / G, -1.0 / G, G) == pytest.approx(1.0 - 1.0 / G)

    def test_cross_species(self):
        assert coupling_constant(1.0, -1.0 / G, G) == pytest.approx(1.0 - G)


class TestSectorSpec:
    def test_negative_count(self):
        with pytest.raises(ValueError):
            SectorSpec(-1, 0, 1, 0, G, TRIG)

    def test_too_many_particles(self):
        with pytest.raises(ValueError):
            SectorSpec(2, 1, 1, 0, G, TRIG)

    def test_coupling_below_one(self):
        with pytest.raises(ValueError):
            SectorSpec(1, 0, 1, 0, 0.5, TRIG)

    def test_species_axes(self):
        sec = SectorSpec(1, 1, 1, 0, G, TRIG)
        assert sec.species_axes() == [(1.0, 1), (-0.5, 1), (1.0, -1)]


class TestBuildEcs:
    def test_single_particle_free(self):
        op = build_ecs(1, G, TRIG, 32)
        c = c_const(1, G, TRIG)
        vals = diagonalize(op, k=5)
        # the constant mode of the periodic stencil is exact
        assert vals[0] == pytest.approx(c, abs=1e-10)
        # discrete Laplacian dispersion 2(1 - cos(k h))/(2 h^2), paired +-
        h = 2.0 * TRIG.ell / 32
        k1 = np.pi / TRIG.ell
        lam1 = (1.0 - np.cos(k1 * h)) / h**2
        assert vals[1] == pytest.approx(c + lam1, rel=1e-10)
        assert vals[2] == pytest.approx(vals[1], rel=1e-10)  # parity pair

    def test_matrix_symmetric(self):
        op = build_ecs(2, G, TRIG, 16)
        assert np.max(np.abs(op.matrix - op.matrix.T)) < 1e-12

    def test_pole_on_grid(self):
        with pytest.raises(PoleOnGrid):
            build_ecs(2, G, TRIG, 16, offsets=(0.5, 0.5))

    def test_offsets_distinct_by_default(self):
        assert default_offsets(3) == (1 / 6, 0.5, 5 / 6)

    def test_fourth_order_is_more_accurate(self):
        ref = trig_ground_energy(G, TRIG)
        e2 = diagonalize(build_ecs(2, G, TRIG, 32, order=2), k=1)[0]
        e4 = diagonalize(build_ecs(2, G, TRIG, 32, order=4), k=1)[0]
        assert abs(e4 - ref) < abs(e2 - ref)


class TestGeneralized:
    def test_reduction_to_ecs(self):
        sec = SectorSpec(2, 0, 0, 0, G, TRIG)
        a = build_generalized(sec, 16)
        b = build_ecs(2, G, TRIG, 16)
        assert np.max(np.abs(a.matrix - b.matrix)) == 0.0

    def test_negative_mass_block(self):
        # sector (0,M,0,0) equals -g H_{M;1/g} assembled with unit masses
        a = build_generalized(SectorSpec(0, 2, 0, 0, G, TRIG), 16)
        b = build_ecs(2, 1.0 / G, TRIG, 16)
        assert np.max(np.abs(a.matrix + G * b.matrix)) < 1e-12

    def test_cross_block_is_shifted_kernel(self):
        from ncilw.elliptic import wp1_shifted

        n = 12
        sec = SectorSpec(1, 0, 1, 0, G, TRIG)
        op = build_generalized(sec, n)
        xa = axis_nodes(n, TRIG, op.offsets[0])
        xb = axis_nodes(n, TRIG, op.offsets[1])
        expected = G * (G - 1.0) * wp1_shifted(
            xa[:, None] - xb[None, :], TRIG
        ).reshape(-1)
        diag = np.diag(op.matrix)
        # subtract the kinetic diagonal and the constant
        d2_diag = np.diag(build_generalized(
            SectorSpec(1, 0, 1, 0, 1.0, TRIG), n, offsets=op.offsets
        ).matrix)
        c0 = 2.0 * c_const(1, 1.0, TRIG)
        cg = 2.0 * c_const(1, G, TRIG)
        assert np.max(np.abs((diag - cg) - (d2_diag - c0) - expected)) < 1e-10

    def test_mixed_sector_symmetric_real(self):
        op = build_generalized(SectorSpec(1, 1, 1, 0, G, TRIG), 10)
        assert np.isrealobj(op.matrix)
        assert np.max(np.abs(op.matrix - op.matrix.T)) < 1e-12

    def test_swap_symmetric_sector(self):
        rep = swap_symmetry_check(SectorSpec(1, 0, 1, 0, G, TRIG), 20)
        assert rep["passed"] and rep["max_entry_deviation"] < 1e-12

    def test_swap_asymmetric_sector(self):
        rep = swap_symmetry_check(SectorSpec(2, 0, 1, 0, G, TRIG), 10)
        assert rep["passed"]

    def test_within_species_exchange(self):
        rep = exchange_symmetry_check(2, G, TRIG, 20)
        assert rep["passed"]


class TestDiagonalize:
    def test_dimension_cap(self):
        with pytest.raises(DimensionCap):
            build_ecs(3, G, TRIG, 22)  # 22^3 > 10^4

    def test_ground_energy_converges_to_trig_value(self):
        ref = trig_ground_energy(G, TRIG)
        extrap, raw = richardson_ground_energy(
            lambda n: build_ecs(2, G, TRIG, n), [16, 24, 32]
        )
        errs = [abs(r - ref) for r in raw]
        assert errs[0] > errs[1] > errs[2]  # monotone approach
        assert abs(extrap[-1] - ref) < 1e-5

    def test_sampled_eigenfunction_rayleigh_quotient(self):
        n = 32
        op = build_ecs(2, G, TRIG, n)
        x1 = axis_nodes(n, TRIG, op.offsets[0])
        x2 = axis_nodes(n, TRIG, op.offsets[1])
        c = np.pi / (2.0 * TRIG.ell)
        psi = np.sin(c * (x1[:, None] - x2[None, :])) ** G
        psi = psi.reshape(-1)
        rq = psi @ op.matrix @ psi / (psi @ psi)
        assert rq == pytest.approx(trig_ground_energy(G, TRIG), abs=5e-3)
