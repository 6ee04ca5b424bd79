import numpy as np
import pytest

from src.almost_periodic import (
    TrigPolynomial,
    almost_periods,
    averaging_kernel,
    bohr_coefficient,
    convolution_fourier_coefficients,
    convolution_polynomial,
    direct_route_means,
    extrapolate_limit,
    grid_kernel_bound,
    mean_square,
    parseval_check,
    period_criterion,
)
from src.errors import ConfigurationError, ConvolutionMismatchError
from src.lattice import fourier_of_spec, realize_measure
from src.models import from_pair
from src.schwartz import PlateauBump

SQRT2 = np.sqrt(2.0)


@pytest.fixture
def two_tone():
    """D(x) = exp(2 pi i x) + 2 exp(2 pi i sqrt(2) x)."""
    return TrigPolynomial.from_terms(1, [([1.0], 1.0), ([SQRT2], 2.0)])


def test_averaging_kernels():
    assert averaging_kernel(0.0, 1) == pytest.approx(1.0)
    assert averaging_kernel(np.pi, 1) == pytest.approx(0.0, abs=1e-15)
    assert averaging_kernel(0.0, 2) == pytest.approx(1.0)
    # first zero of J_1
    assert averaging_kernel(3.8317059702075125, 2) == pytest.approx(0.0, abs=1e-12)
    assert averaging_kernel(1e-5, 3) == pytest.approx(1.0)


def test_polynomial_merges_equal_frequencies():
    D = TrigPolynomial.from_terms(1, [([0.5], 1.0), ([0.5], 2.0), ([1.5], 1.0), ([1.5], -1.0)])
    assert len(D) == 1
    assert D.coefficient_at([0.5]) == 3.0
    assert D.coefficient_at([1.5]) == 0j


def test_polynomial_rejects_near_duplicates():
    with pytest.raises(ConfigurationError):
        TrigPolynomial.from_terms(1, [([0.5], 1.0), ([0.5 + 1e-13], 1.0)])


def test_polynomial_dict_round_trip(two_tone):
    again = TrigPolynomial.from_dict(two_tone.to_dict())
    assert np.allclose(again.frequencies, two_tone.frequencies)
    assert np.allclose(again.coefficients, two_tone.coefficients)
    assert two_tone(0.0) == pytest.approx(3.0)
    assert two_tone.abs_sum == pytest.approx(3.0)
    assert two_tone.square_sum == pytest.approx(5.0)


def test_bohr_coefficient_closed_form(two_tone):
    estimate = bohr_coefficient(two_tone, [SQRT2], 1e4)
    assert estimate.method == "closed-form"
    assert abs(from_pair(estimate.value) - 2.0) <= estimate.error_bound
    assert estimate.error_bound < 1e-4

    missing = bohr_coefficient(two_tone, [0.7], 1e4)
    assert abs(from_pair(missing.value)) <= missing.error_bound


def test_bohr_coefficient_by_quadrature_matches_closed_form(two_tone):
    closed = bohr_coefficient(two_tone, [1.0], 5.0)
    numeric = bohr_coefficient(two_tone.evaluate, [1.0], 5.0)
    assert numeric.method == "quadrature"
    assert from_pair(numeric.value) == pytest.approx(from_pair(closed.value), abs=1e-8)


def test_bohr_coefficient_rejects_bad_radius(two_tone):
    with pytest.raises(ConfigurationError):
        bohr_coefficient(two_tone, [1.0], 0.0)


def test_extrapolate_limit():
    radii = [1.0, 2.0, 4.0, 8.0]
    assert extrapolate_limit(radii, [3 + 2 / r for r in radii]) == pytest.approx(3.0)
    assert extrapolate_limit([5.0], [1.25]) == 1.25


def test_mean_square_with_single_term():
    D = TrigPolynomial.from_terms(1, [([0.3], 2j)])
    value, bound = mean_square(D, 10.0, [0.0])
    assert value == pytest.approx(4.0)
    assert bound == 0.0


def test_parseval_converges(two_tone):
    report = parseval_check(two_tone, [1e2, 1e3, 1e4])
    assert report.limit == pytest.approx(5.0)
    assert report.within_bound
    assert report.points[-1].deviation < 5e-3
    assert report.extrapolated == pytest.approx(5.0, abs=1e-3)
    assert [p.deviation for p in report.points][-1] <= report.points[0].bound


def test_parseval_schedule_must_increase(two_tone):
    with pytest.raises(ConfigurationError):
        parseval_check(two_tone, [100.0, 10.0])


def test_period_criterion_bounds_the_shift():
    D = TrigPolynomial.from_terms(1, [([1.0], 1.0)])
    taus = np.array([[0.0], [0.25], [0.5]])
    assert np.allclose(period_criterion(D, taus), [0.0, np.sqrt(2), 2.0])


def test_almost_periods_of_a_single_exponential():
    D = TrigPolynomial.from_terms(1, [([1.0], 1.0)])
    report = almost_periods(D, 0.5, 5.0, 0.01)
    periods = np.array(report.periods).reshape(-1)
    assert len(periods) == 11
    assert np.allclose(periods, np.arange(-5, 6), atol=1e-6)
    assert report.inclusion_length == pytest.approx(0.5, abs=1e-5)


def assert_periods_hold(D, periods, epsilon, rng):
    x = rng.uniform(-1e3, 1e3, size=(1000, D.dim))
    base = D.evaluate(x)
    for tau in periods:
        shift = np.abs(D.evaluate(x + np.asarray(tau)) - base)
        assert shift.max() < epsilon, tau


def test_almost_periods_move_the_polynomial_little(two_tone, rng):
    report = almost_periods(two_tone, 1.0, 50.0, 1e-3)
    assert report.periods
    assert_periods_hold(two_tone, report.periods, 1.0, rng)


@pytest.mark.slow
def test_almost_periods_of_two_incommensurable_tones(rng):
    D = TrigPolynomial.from_terms(1, [([1.0], 1.0), ([SQRT2], 1.0)])
    report = almost_periods(D, 0.5, 100.0, 1e-3)
    periods = np.array(report.periods).reshape(-1)
    assert np.any(np.abs(periods) >= 1.0)
    # 70 sqrt(2) = 98.995
    assert np.any(np.abs(periods - 70.0) < 0.01)
    assert_periods_hold(D, report.periods, 0.5, rng)


def test_almost_periods_validates_inputs():
    D = TrigPolynomial.from_terms(1, [([1.0], 1.0)])
    with pytest.raises(ConfigurationError):
        almost_periods(D, 0.0, 5.0, 0.01)
    with pytest.raises(ConfigurationError):
        almost_periods(D, 0.5, 5.0, 0.0)


def test_convolution_polynomial_of_the_unit_comb(unit_comb):
    D = convolution_polynomial(fourier_of_spec(unit_comb, 5.0), PlateauBump(1.0, 2.0))
    assert np.allclose(np.sort(D.frequencies[:, 0]), [-1.0, 0.0, 1.0])
    assert D(0.25) == pytest.approx(1.0)


def test_grid_kernel_bound_majorizes_grid_means():
    pitch, n = 1.0 / 7.0, 140
    grid = pitch * np.arange(-n, n + 1)
    deltas = np.array([[0.5], [1.0], [1.5], [2.9], [0.01]])
    bounds = grid_kernel_bound(deltas, pitch, n)
    means = np.abs(np.exp(2j * np.pi * np.outer(deltas[:, 0], grid)).mean(axis=1))
    assert np.all(means <= bounds + 1e-15)
    assert bounds[0] == pytest.approx(7.0 / 281.0)
    assert grid_kernel_bound(np.array([[0.0, 1.0]]), pitch, n)[0] == pytest.approx(7.0 / 562.0)


@pytest.mark.slow
def test_direct_route_means_recover_the_comb_coefficients(unit_comb):
    # means of sum_n phi-hat(t - n) exp(-2 pi i t gamma); no spectrum involved
    frequencies = np.array([[0.0], [1.0], [0.5]])
    means, tail, pitch, n = direct_route_means(realize_measure(unit_comb), PlateauBump(1.0, 2.0), frequencies)
    assert pitch == pytest.approx(1.0 / 7.0)
    assert n == 140
    assert means[0] == pytest.approx(1.0, abs=0.02)
    assert means[1] == pytest.approx(1.0, abs=0.02)
    assert abs(means[2]) < 0.03
    assert tail >= 0.0


@pytest.mark.slow
def test_convolution_coefficients_agree(unit_comb):
    mu = realize_measure(unit_comb)
    mu_hat = fourier_of_spec(unit_comb, 5.0)
    report = convolution_fourier_coefficients(mu, mu_hat, PlateauBump(1.0, 2.0), [[0.0], [1.0], [0.5]], R=1e4)
    assert all(check.agrees for check in report.checks)
    assert from_pair(report.checks[0].expected) == pytest.approx(1.0)
    assert from_pair(report.checks[2].expected) == 0j
    assert from_pair(report.checks[0].bohr_value) == pytest.approx(1.0, abs=0.02)
    assert all(s.discrepancy <= report.route_tolerance + s.tail_bound for s in report.route_samples)


@pytest.mark.slow
def test_coefficients_come_from_the_direct_route(unit_comb):
    # doubled spectrum masses; the direct convolution does not see them
    mu = realize_measure(unit_comb)
    doubled = fourier_of_spec(unit_comb, 5.0).scaled(2.0)
    report = convolution_fourier_coefficients(mu, doubled, PlateauBump(1.0, 2.0), [[0.0]], route_points=np.zeros((0, 1)))
    check = report.checks[0]
    assert from_pair(check.expected) == pytest.approx(2.0)
    assert from_pair(check.bohr_value) == pytest.approx(1.0, abs=0.02)
    assert not check.agrees


@pytest.mark.slow
def test_convolution_routes_disagree_for_the_wrong_measure(unit_comb):
    mu = realize_measure(unit_comb.scaled(2.0))
    with pytest.raises(ConvolutionMismatchError):
        convolution_fourier_coefficients(mu, fourier_of_spec(unit_comb, 5.0), PlateauBump(1.0, 2.0), [[0.0]])
