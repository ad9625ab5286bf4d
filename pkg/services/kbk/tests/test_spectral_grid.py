"""Tests for the periodic Fourier grid and its spectral operations."""

import numpy as np
import pytest

from services.kbk.core.spectral_grid import (
    build_grid,
    dealias_mask,
    derivative,
    evaluate_at,
    even_part,
    forward,
    integrate,
    inverse,
    odd_part,
    parseval_sum,
    periodic_distance,
    reflect,
    spectral_derivative,
)


class TestBuildGrid:
    def test_nodes_and_wavenumbers(self):
        g = build_grid(1.0, 8)
        assert g.nodes[0] == pytest.approx(-np.pi)
        assert np.allclose(np.diff(g.nodes), 2 * np.pi / 8)
        assert g.quad_weight == pytest.approx(2 * np.pi / 8)
        assert list(g.mode_numbers) == [0, 1, 2, 3, -4, -3, -2, -1]
        assert g.odd_wavenumbers[g.nyquist_index] == 0.0
        assert g.wavenumbers[g.nyquist_index] == -4.0

    def test_wavenumbers_scale_with_L(self):
        g = build_grid(15.0, 16)
        assert g.wavenumbers[1] == pytest.approx(1 / 15)
        assert g.period == pytest.approx(30 * np.pi)

    def test_node_zero_is_origin(self):
        g = build_grid(30.0, 64)
        assert g.nodes[32] == 0.0

    def test_arrays_are_read_only(self):
        g = build_grid(1.0, 8)
        with pytest.raises(ValueError):
            g.nodes[0] = 1.0

    @pytest.mark.parametrize("N", [4, 12, 100, 0])
    def test_rejects_bad_N(self, N):
        with pytest.raises(ValueError, match="power of two"):
            build_grid(1.0, N)

    @pytest.mark.parametrize("L", [0.0, -1.0, float("nan")])
    def test_rejects_bad_L(self, L):
        with pytest.raises(ValueError, match="L must be positive"):
            build_grid(L, 16)

    def test_rejects_non_integer_N(self):
        with pytest.raises(ValueError, match="integer"):
            build_grid(1.0, 16.0)


class TestTransforms:
    def test_single_mode_modulus(self):
        g = build_grid(1.0, 16)
        spectrum = forward(g, np.cos(2 * g.nodes))
        assert abs(spectrum[2]) == pytest.approx(8.0)
        assert abs(spectrum[-2]) == pytest.approx(8.0)

    def test_inverse_recovers_field(self):
        g = build_grid(2.0, 32)
        f = np.exp(np.sin(g.nodes / 2.0))
        assert np.allclose(inverse(g, forward(g, f)), f, atol=1e-14)

    def test_length_mismatch(self):
        g = build_grid(1.0, 16)
        with pytest.raises(ValueError, match="does not match"):
            forward(g, np.zeros(8))


class TestDerivatives:
    def test_first_derivative(self):
        g = build_grid(1.0, 32)
        assert np.allclose(derivative(g, np.sin(3 * g.nodes)), 3 * np.cos(3 * g.nodes), atol=1e-12)

    def test_first_derivative_scaled_domain(self):
        g = build_grid(2.0, 32)
        d = derivative(g, np.sin(g.nodes / 2.0))
        assert np.allclose(d, 0.5 * np.cos(g.nodes / 2.0), atol=1e-13)

    def test_second_and_fourth_derivative(self):
        g = build_grid(1.0, 32)
        f = np.cos(2 * g.nodes)
        assert np.allclose(derivative(g, f, 2), -4 * f, atol=1e-11)
        assert np.allclose(derivative(g, f, 4), 16 * f, atol=1e-10)

    def test_nyquist_zeroed_for_odd_orders_only(self):
        g = build_grid(1.0, 8)
        f = np.cos(4 * g.nodes)
        assert np.allclose(derivative(g, f, 1), 0.0, atol=1e-14)
        assert np.allclose(derivative(g, f, 3), 0.0, atol=1e-12)
        assert np.allclose(derivative(g, f, 2), -16 * f, atol=1e-12)

    def test_unsupported_order(self):
        g = build_grid(1.0, 8)
        with pytest.raises(ValueError, match="Unsupported derivative order"):
            spectral_derivative(g, np.zeros(8), 5)

    def test_derivative_of_smooth_field_is_real(self):
        g = build_grid(1.0, 16)
        d = derivative(g, np.exp(np.cos(g.nodes)))
        assert d.dtype == np.float64


class TestQuadrature:
    def test_trapezoid_exact_for_trig_polynomials(self):
        g = build_grid(1.0, 16)
        assert integrate(g, np.cos(g.nodes) ** 2) == pytest.approx(np.pi, abs=1e-14)
        assert integrate(g, np.cos(g.nodes) ** 4) == pytest.approx(0.75 * np.pi, abs=1e-14)

    def test_parseval(self):
        g = build_grid(3.0, 64)
        f = np.exp(-g.nodes**2) + 0.1 * np.sin(g.nodes / 3.0)
        assert parseval_sum(g, forward(g, f)) == pytest.approx(integrate(g, f**2), rel=1e-13)


class TestDealiasMask:
    def test_two_thirds(self):
        g = build_grid(1.0, 64)
        mask = dealias_mask(g, 2.0 / 3.0)
        assert mask.sum() == 43
        assert mask[21] and not mask[22]

    def test_full_fraction_keeps_all(self):
        g = build_grid(1.0, 16)
        assert dealias_mask(g).all()

    def test_bad_fraction(self):
        g = build_grid(1.0, 16)
        with pytest.raises(ValueError, match="dealias fraction"):
            dealias_mask(g, 0.0)


class TestParityAndInterpolation:
    def test_reflect_maps_x_to_minus_x(self):
        g = build_grid(1.0, 32)
        assert np.allclose(reflect(g, np.sin(g.nodes)), -np.sin(g.nodes), atol=1e-14)

    def test_even_and_odd_parts(self):
        g = build_grid(1.0, 32)
        f = np.cos(g.nodes) + np.sin(2 * g.nodes)
        assert np.allclose(even_part(g, f), np.cos(g.nodes), atol=1e-14)
        assert np.allclose(odd_part(g, f), np.sin(2 * g.nodes), atol=1e-14)

    def test_evaluate_at_off_grid_point(self):
        g = build_grid(1.0, 16)
        value, first, second = evaluate_at(g, forward(g, np.sin(g.nodes)), 0.3)
        assert value == pytest.approx(np.sin(0.3), abs=1e-13)
        assert first == pytest.approx(np.cos(0.3), abs=1e-13)
        assert second == pytest.approx(-np.sin(0.3), abs=1e-13)

    def test_periodic_distance_wraps(self):
        g = build_grid(1.0, 16)
        assert periodic_distance(g, 3.0, -3.0) == pytest.approx(6.0 - 2 * np.pi)
        assert periodic_distance(g, 0.5, 0.25) == pytest.approx(0.25)
