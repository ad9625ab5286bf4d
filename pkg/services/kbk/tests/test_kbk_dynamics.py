"""Tests for the KBK right-hand side and its diagonalization."""

import numpy as np
import pytest

from services.kbk.core.exact_solutions import SolitonParams, good_soliton, rescaled_soliton
from services.kbk.core.kbk_dynamics import (
    DiagonalState,
    KBKModel,
    ModelParams,
    State,
    from_diagonal,
    linear_symbol,
    nonlinear_term,
    rhs_diagonal_physical,
    rhs_physical,
    to_diagonal,
)
from services.kbk.core.spectral_grid import build_grid, derivative


@pytest.fixture(scope="module")
def soliton():
    grid = build_grid(15.0, 1024)
    return good_soliton(SolitonParams(C=0.8), 0.0, grid)


class TestModelParams:
    def test_defaults(self):
        p = ModelParams()
        assert p.eps == 1.0
        assert p.dealias_fraction == 1.0

    @pytest.mark.parametrize("kwargs", [{"eps": 0.0}, {"eps": -1.0}, {"dealias_fraction": 1.5}])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)


class TestState:
    def test_shape_checked(self):
        grid = build_grid(1.0, 16)
        with pytest.raises(ValueError, match="shape"):
            State(grid, np.zeros(8), np.zeros(16))

    def test_non_finite_rejected(self):
        grid = build_grid(1.0, 16)
        v = np.zeros(16)
        v[3] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            State(grid, np.zeros(16), v)

    def test_depth(self):
        grid = build_grid(1.0, 8)
        state = State(grid, np.full(8, -0.25), np.zeros(8))
        assert np.allclose(state.depth, 0.75)


class TestLinearSymbol:
    def test_values(self):
        grid = build_grid(1.0, 16)
        plus = linear_symbol(grid, ModelParams(), "plus")
        minus = linear_symbol(grid, ModelParams(), "minus")
        assert plus[1] == pytest.approx(-1j * np.sqrt(2.0))
        assert minus[1] == pytest.approx(1j * np.sqrt(2.0))
        assert plus[0] == 0.0
        assert plus[grid.nyquist_index] == 0.0
        assert np.all(plus.real == 0.0)

    def test_eps_scaling(self):
        grid = build_grid(1.0, 16)
        plus = linear_symbol(grid, ModelParams(eps=0.5), "plus")
        assert plus[2] == pytest.approx(-2j * np.sqrt(2.0))

    def test_unknown_branch(self):
        grid = build_grid(1.0, 16)
        with pytest.raises(ValueError, match="Unknown branch"):
            linear_symbol(grid, ModelParams(), "both")


class TestDiagonalization:
    def test_round_trip(self, soliton):
        params = ModelParams()
        back = from_diagonal(to_diagonal(soliton, params), params, soliton.grid)
        assert np.max(np.abs(back.eta - soliton.eta)) <= 1e-13
        assert np.max(np.abs(back.v - soliton.v)) <= 1e-13

    def test_stack_round_trip(self):
        diag = DiagonalState(np.arange(4) + 0j, -np.arange(4) + 1j)
        again = DiagonalState.from_stack(diag.stack())
        assert np.array_equal(again.u_plus, diag.u_plus)
        assert np.array_equal(again.u_minus, diag.u_minus)

    def test_grid_mismatch(self, soliton):
        model = KBKModel(build_grid(15.0, 512))
        with pytest.raises(ValueError, match="does not match"):
            model.to_diagonal(soliton)


class TestRightHandSide:
    def test_zero_state_has_zero_nonlinearity(self):
        grid = build_grid(1.0, 16)
        zero = State(grid, np.zeros(16), np.zeros(16))
        n_plus, n_minus = nonlinear_term(to_diagonal(zero, ModelParams()), ModelParams(), grid)
        assert np.all(n_plus == 0) and np.all(n_minus == 0)

    def test_diagonal_and_physical_paths_agree(self, soliton):
        params = ModelParams()
        eta_a, v_a = rhs_physical(soliton, params)
        eta_b, v_b = rhs_diagonal_physical(soliton, params)
        assert np.max(np.abs(eta_a - eta_b)) <= 1e-8
        assert np.max(np.abs(v_a - v_b)) <= 1e-8

    def test_soliton_is_a_traveling_wave(self, soliton):
        eta_t, v_t = rhs_physical(soliton, ModelParams())
        grid = soliton.grid
        assert np.max(np.abs(eta_t + 0.8 * derivative(grid, soliton.eta))) <= 1e-9
        assert np.max(np.abs(v_t + 0.8 * derivative(grid, soliton.v))) <= 1e-9

    def test_rescaled_soliton_travels_in_rescaled_system(self):
        grid = build_grid(15.0, 2048)
        state = rescaled_soliton(0.5, 0.0, 0.5, 0.0, grid)
        eta_t, v_t = rhs_physical(state, ModelParams(eps=0.5))
        assert np.max(np.abs(eta_t + 0.5 * derivative(grid, state.eta))) <= 1e-8
        assert np.max(np.abs(v_t + 0.5 * derivative(grid, state.v))) <= 1e-8

    def test_dealiasing_toggle(self):
        grid = build_grid(1.0, 64)
        assert not KBKModel(grid, ModelParams()).dealias
        model = KBKModel(grid, ModelParams(dealias_fraction=2.0 / 3.0))
        assert model.dealias
        assert model.mask.sum() == 43
