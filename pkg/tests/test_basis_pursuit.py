"""Null-space conditions vs dense-grid and basic-solution oracles."""

import numpy as np
import pytest

from greedycert import basis_pursuit as bp
from greedycert.dictionaries import from_matrix, gaussian
from greedycert.exceptions import (
    DimensionTooLargeError,
    InfeasibleError,
    TooLargeError,
)


def grid_value(linear, rows, coeffs, w_grid):
    return w_grid @ linear + np.abs(w_grid @ rows.T) @ coeffs


def grid_directions(d, count, seed):
    if d == 2:
        ang = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    w = np.random.default_rng(seed).standard_normal((count, d))
    return w / np.linalg.norm(w, axis=1, keepdims=True)


class TestSphereMax:
    @pytest.mark.parametrize("d", [2, 3])
    def test_never_beaten_by_grid(self, d):
        rng = np.random.default_rng(50 + d)
        for trial in range(30):
            p = int(rng.integers(1, 7))
            rows = rng.standard_normal((p, d))
            coeffs = rng.choice([-1.0, 1.0], p)
            linear = rng.standard_normal(d) if trial % 2 else np.zeros(d)
            value, w = bp._sphere_max(linear, rows, coeffs)
            assert abs(np.linalg.norm(w) - 1.0) < 1e-12
            got = grid_value(linear, rows, coeffs, w[None, :])[0]
            assert abs(got - value) < 1e-12
            grid = grid_value(linear, rows, coeffs, grid_directions(d, 200_000, trial))
            assert value >= grid.max() - 1e-9
            # closeness limited by grid spacing times the slope bound
            lip = np.linalg.norm(linear) + np.linalg.norm(rows, axis=1).sum()
            spacing = 1e-4 if d == 2 else 3e-2
            assert value - grid.max() < spacing * max(lip, 1.0)

    def test_degenerate_plane_maximum(self):
        # single absolute term in 3-D: the objective is 0 on a whole
        # circle and negative elsewhere; the supremum is exactly 0
        value, w = bp._sphere_max(np.zeros(3), np.eye(3)[2:], [-1.0])
        assert value == pytest.approx(0.0, abs=1e-15)
        assert abs(w[2]) < 1e-12

    def test_one_dimensional(self):
        value, w = bp._sphere_max(np.array([-2.0]), np.array([[1.0]]), np.array([1.0]))
        assert value == pytest.approx(3.0)
        assert w[0] == -1.0


class TestNullSpaceBasis:
    def test_generic_flat_matrix(self):
        ns = bp.null_space_basis(gaussian(3, 5, 0))
        assert ns.dim == 2
        assert np.allclose(ns.basis.T @ ns.basis, np.eye(2), atol=1e-12)
        assert np.abs(gaussian(3, 5, 0).matrix @ ns.basis).max() < 1e-12

    def test_full_rank_square(self):
        assert bp.null_space_basis(np.eye(4)).dim == 0


class TestNsp:
    def test_vacuous_for_injective_dictionary(self):
        report = bp.nsp_check(np.eye(4), (0, 1))
        assert report.verdict
        assert report.supremum is None

    def test_paired_identity_boundary(self):
        # x = e1 - e4 carries equal mass on and off the support: the
        # strict inequality fails exactly at the boundary
        a = np.hstack([np.eye(3), np.eye(3)])
        report = bp.nsp_check(a, (0,))
        assert not report.verdict
        assert report.indeterminate
        assert abs(report.supremum) <= 1e-10

    def test_holds_for_single_atom_generic(self):
        report = bp.nsp_check(gaussian(4, 5, 3), (2,))
        assert report.verdict
        assert report.supremum < -1e-6
        assert not report.indeterminate

    def test_witness_lies_in_null_space(self):
        d = gaussian(3, 5, 7)
        report = bp.nsp_check(d, (0, 1))
        assert np.abs(d.matrix @ report.witness).max() < 1e-10

    def test_dimension_guard(self):
        with pytest.raises(DimensionTooLargeError):
            bp.nsp_check(gaussian(2, 8, 0), (0,))


def coherent_pair_dictionary():
    """Two nearly parallel atoms plus their normalized sum/difference
    directions: no sign pattern on the pair survives l1 minimization."""
    t = 0.1
    a1 = np.array([np.cos(t), np.sin(t), 0.0])
    a2 = np.array([np.cos(t), -np.sin(t), 0.0])
    mid = (a1 + a2) / np.linalg.norm(a1 + a2)
    dif = (a1 - a2) / np.linalg.norm(a1 - a2)
    other = np.array([0.0, 0.0, 1.0])
    return from_matrix(np.column_stack([a1, a2, mid, dif, other]))


class TestBrcBp:
    def test_single_unit_atom_never_certified(self):
        # |x_i| <= off-support mass holds for every null vector of a
        # unit-norm dictionary, so the failure certificate cannot hold
        report = bp.brc_bp_check(gaussian(3, 5, 11), (2,))
        assert report.verdict is False

    def test_coherent_pair_certified(self):
        d = coherent_pair_dictionary()
        report = bp.brc_bp_check(d, (0, 1))
        assert report.verdict is True
        assert len(report.patterns) == 4
        for eps, sup, feas, x in report.patterns:
            assert feas is True
            assert sup > 1e-10
            assert np.abs(d.matrix @ x).max() < 1e-10

    def test_round_trip_with_l1_oracle(self):
        # certificate true -> every sign pattern fails the l1 oracle
        d = coherent_pair_dictionary()
        rng = np.random.default_rng(52)
        for eps in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
            for _ in range(5):
                x = np.zeros(5)
                x[[0, 1]] = np.array(eps) * rng.uniform(0.5, 2.0, 2)
                assert not bp.l1_recovers(d, x)

    def test_mirrored_patterns_share_suprema(self):
        report = bp.brc_bp_check(gaussian(3, 5, 13), (0, 3))
        by_eps = {eps: sup for eps, sup, _, _ in report.patterns}
        for eps, sup in by_eps.items():
            assert by_eps[tuple(-e for e in eps)] == sup


class TestL1Min:
    def test_tied_pair(self):
        a = np.hstack([np.eye(3), np.eye(3)])
        sols = bp.l1_min(a, np.eye(3)[:, 0])
        assert len(sols) == 2
        for x in sols:
            assert np.abs(x).sum() == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(a @ x, np.eye(3)[:, 0], atol=1e-12)

    def test_unique_orthonormal(self):
        sols = bp.l1_min(np.eye(4), np.array([0.0, 2.0, 0.0, 0.0]))
        assert len(sols) == 1
        assert np.allclose(sols[0], [0.0, 2.0, 0.0, 0.0], atol=1e-12)

    def test_zero_input(self):
        sols = bp.l1_min(gaussian(3, 5, 1), np.zeros(3))
        assert len(sols) == 1
        assert np.all(sols[0] == 0.0)

    def test_infeasible(self):
        a = np.eye(3)[:, :1]
        with pytest.raises(InfeasibleError):
            bp.l1_min(a, np.array([0.0, 1.0, 0.0]))

    def test_column_budget(self):
        with pytest.raises(TooLargeError):
            bp.l1_min(gaussian(3, 13, 0), np.zeros(3))

    def test_recovers_helpers(self):
        assert bp.l1_recovers(np.eye(3), np.array([0.0, 1.5, 0.0]))
        a = np.hstack([np.eye(3), np.eye(3)])
        assert not bp.l1_recovers(a, np.array([1.0, 0, 0, 0, 0, 0]))

    def test_nsp_implies_recovery_of_all_draws(self):
        # strict null-space verdict -> every vector on the support is
        # the unique minimizer, signs and amplitudes notwithstanding
        rng = np.random.default_rng(53)
        checked = 0
        for seed in range(40):
            d = gaussian(3, 5, seed)
            qstar = (0, 4)
            report = bp.nsp_check(d, qstar)
            if not report.verdict:
                continue
            checked += 1
            for _ in range(5):
                x = np.zeros(5)
                x[list(qstar)] = rng.uniform(0.3, 2.0, 2) * rng.choice([-1, 1], 2)
                assert bp.l1_recovers(d, x)
        assert checked >= 3
