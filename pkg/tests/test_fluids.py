"""Viscosity models, flux factors, and the structural condition checks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvbopt import (
    CustomFlux,
    ExponentialViscosity,
    KovalFlux,
    LinearViscosity,
    PowerCubicViscosity,
    TabulatedViscosity,
    ToddLongstaffFlux,
    concentration_at_viscosity,
    flux_derivative_at_one,
    flux_value,
    mean_mobility,
    mobility,
    naive_koval,
    validate_conditions,
    viscosity,
)

LIN = LinearViscosity(1.0, 9.0)
EXP = ExponentialViscosity(1.0, math.log(10.0))
CUBIC = PowerCubicViscosity(1.0, 1.5)


class TestViscosityModels:
    def test_linear_values(self):
        assert viscosity(LIN, 0.0) == 1.0
        assert viscosity(LIN, 1.0) == 10.0
        assert viscosity(LIN, 0.5) == pytest.approx(5.5)

    def test_exponential_values(self):
        assert viscosity(EXP, 0.0) == pytest.approx(1.0)
        assert viscosity(EXP, 1.0) == pytest.approx(10.0)
        assert viscosity(EXP, 0.5) == pytest.approx(math.sqrt(10.0))

    def test_power_cubic_values(self):
        assert viscosity(CUBIC, 0.0) == pytest.approx(1.0)
        assert viscosity(CUBIC, 1.0) == pytest.approx(2.0**1.5)

    def test_vector_evaluation(self):
        vals = viscosity(LIN, np.array([0.0, 0.5, 1.0]))
        assert np.allclose(vals, [1.0, 5.5, 10.0])

    def test_mobility_scales_with_permeability(self):
        scaled = LinearViscosity(1.0, 9.0, permeability=250.0)
        assert mobility(scaled, 0.25) == pytest.approx(250.0 / viscosity(LIN, 0.25))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            viscosity(LIN, 1.5)
        with pytest.raises(ValueError):
            viscosity(LIN, -0.2)

    def test_rejects_decreasing_curve(self):
        with pytest.raises(ValueError, match="slope"):
            LinearViscosity(1.0, -2.0)
        with pytest.raises(ValueError, match="rate_ln"):
            ExponentialViscosity(1.0, 0.0)

    def test_rejects_bad_range(self):
        with pytest.raises(ValueError, match="c_min"):
            LinearViscosity(1.0, 9.0, c_min=0.8, c_max=0.2)
        with pytest.raises(ValueError, match="permeability"):
            LinearViscosity(1.0, 9.0, permeability=0.0)

    def test_narrow_range(self):
        model = LinearViscosity(1.0, 9.0, c_min=0.2, c_max=0.7)
        assert viscosity(model, 0.2) == pytest.approx(2.8)
        with pytest.raises(ValueError):
            viscosity(model, 0.1)


class TestTabulated:
    def test_reproduces_linear_data_exactly(self):
        c = np.linspace(0.0, 1.0, 25)
        table = TabulatedViscosity(c, 1.0 + 9.0 * c)
        probe = np.linspace(0.0, 1.0, 301)
        assert np.allclose(table.viscosity(probe), 1.0 + 9.0 * probe, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="at least 4"):
            TabulatedViscosity((0.0, 0.5, 1.0), (1.0, 2.0, 3.0))
        with pytest.raises(ValueError, match="strictly increasing"):
            TabulatedViscosity((0.0, 0.5, 0.5, 1.0), (1.0, 2.0, 3.0, 4.0))
        with pytest.raises(ValueError):
            TabulatedViscosity((0.0, 0.3, 0.6, 1.0), (1.0, 3.0, 2.0, 4.0))
        with pytest.raises(ValueError, match="equal length"):
            TabulatedViscosity((0.0, 0.3, 0.6, 1.0), (1.0, 2.0, 3.0))

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "visc.csv"
        path.write_text("c,mu\n0.0,1.0\n0.3,2.5\n0.6,4.5\n1.0,9.0\n")
        table = TabulatedViscosity.from_csv(path)
        assert table.c_min == 0.0
        assert table.c_max == 1.0
        assert table.viscosity(0.3) == pytest.approx(2.5)

    def test_csv_header_enforced(self, tmp_path):
        path = tmp_path / "visc.csv"
        path.write_text("conc,visc\n0.0,1.0\n")
        with pytest.raises(ValueError, match="header"):
            TabulatedViscosity.from_csv(path)


class TestMeanMobility:
    def test_linear_closed_form(self):
        # mean of 1/(1+9c) over [a, b] is ln(mu(b)/mu(a)) / (9 (b-a))
        a, b = 0.1, 0.8
        expected = math.log(viscosity(LIN, b) / viscosity(LIN, a)) / (9.0 * (b - a))
        assert mean_mobility(LIN, a, b) == pytest.approx(expected, rel=1e-12)

    def test_exponential_closed_form(self):
        a, b = 0.0, 1.0
        r = math.log(10.0)
        expected = (math.exp(-r * a) - math.exp(-r * b)) / (r * (b - a))
        assert mean_mobility(EXP, a, b) == pytest.approx(expected, rel=1e-12)

    def test_symmetric_in_endpoints(self):
        assert mean_mobility(LIN, 0.2, 0.9) == mean_mobility(LIN, 0.9, 0.2)

    def test_degenerate_interval(self):
        with pytest.raises(ValueError, match="degenerate"):
            mean_mobility(LIN, 0.4, 0.4)

    def test_tabulated_matches_analytic(self):
        c = np.linspace(0.0, 1.0, 25)
        table = TabulatedViscosity(c, 1.0 + 9.0 * c)
        assert mean_mobility(table, 0.1, 0.9) == pytest.approx(
            mean_mobility(LIN, 0.1, 0.9), rel=1e-10
        )

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(0.0, 1.0, exclude_max=True),
        st.floats(1e-4, 1.0),
    )
    def test_between_endpoint_mobilities(self, a, width):
        b = min(1.0, a + width)
        if b - a < 1e-6:
            return
        mm = mean_mobility(EXP, a, b)
        assert mobility(EXP, b) < mm < mobility(EXP, a)


class TestInverse:
    def test_round_trip(self):
        for c in (0.0, 0.2, 0.77, 1.0):
            mu = viscosity(EXP, c)
            assert concentration_at_viscosity(EXP, mu) == pytest.approx(c, abs=1e-10)

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="outside"):
            concentration_at_viscosity(LIN, 11.0)


class TestFluxFactors:
    def test_koval_formula(self):
        f = KovalFlux(0.22)
        x = 4.0
        assert flux_value(f, x) == pytest.approx(
            (0.22 * x**0.25 + 0.78) ** -4, rel=1e-15
        )
        assert flux_value(f, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_power_law_formula(self):
        f = ToddLongstaffFlux(2.0 / 3.0)
        assert flux_value(f, 8.0) == pytest.approx(0.25)

    def test_naive_is_unit_exponent(self):
        f = naive_koval()
        assert f.omega == 1.0
        assert f.label == "naive"
        assert flux_value(f, 5.0) == pytest.approx(0.2)

    def test_domain(self):
        with pytest.raises(ValueError, match=">= 1"):
            flux_value(KovalFlux(), 0.5)

    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="alpha"):
            KovalFlux(0.0)
        with pytest.raises(ValueError, match="omega"):
            ToddLongstaffFlux(1.5)

    def test_derivatives_exact(self):
        assert flux_derivative_at_one(KovalFlux(0.22)) == -0.22
        assert flux_derivative_at_one(ToddLongstaffFlux(0.5)) == -0.5
        assert flux_derivative_at_one(naive_koval()) == -1.0

    def test_custom_requires_unit_value(self):
        with pytest.raises(ValueError, match="f\\(1\\) = 1"):
            CustomFlux(lambda x: 0.9 * x)

    def test_custom_derivative_numeric(self):
        f = CustomFlux(lambda x: x**-0.7)
        assert flux_derivative_at_one(f) == pytest.approx(-0.7, abs=1e-8)

    def test_custom_vector_evaluation(self):
        f = CustomFlux(lambda x: x**-0.5)
        out = f.value(np.array([1.0, 4.0, 9.0]))
        assert np.allclose(out, [1.0, 0.5, 1.0 / 3.0])

    @settings(max_examples=40, deadline=None)
    @given(st.floats(1.0, 50.0), st.floats(1.0, 50.0))
    def test_power_law_multiplicative(self, x, y):
        f = ToddLongstaffFlux(2.0 / 3.0)
        assert flux_value(f, x * y) == pytest.approx(
            flux_value(f, x) * flux_value(f, y), rel=1e-12
        )


class TestConditions:
    def test_koval_linear_all_hold(self):
        report = validate_conditions(KovalFlux(0.22), LIN)
        assert report.all_satisfied
        assert [c.name for c in report] == ["A", "B", "C", "D"]

    def test_power_law_exponential_all_hold(self):
        report = validate_conditions(ToddLongstaffFlux(2.0 / 3.0), EXP)
        assert report.all_satisfied

    def test_cubic_viscosity_breaks_convexity(self):
        report = validate_conditions(ToddLongstaffFlux(2.0 / 3.0), CUBIC)
        assert report["A"].satisfied
        assert report["B"].satisfied
        assert report["C"].satisfied
        assert not report["D"].satisfied
        assert report["D"].worst_violation > 1e-3
        assert len(report["D"].witness) == 3

    def test_increasing_flux_fails_monotone_check(self):
        bad = CustomFlux(lambda x: 1.0 + 0.1 * (x - 1.0))
        report = validate_conditions(bad, LIN)
        assert not report["B"].satisfied

    def test_grid_size_floor(self):
        with pytest.raises(ValueError, match="grid_size"):
            validate_conditions(KovalFlux(), LIN, grid_size=16)

    def test_summary_mentions_every_condition(self):
        text = validate_conditions(KovalFlux(), LIN).summary()
        for name in ("(A)", "(B)", "(C)", "(D)"):
            assert name in text
