import numpy as np
import pytest

from src.errors import ConfigurationError, NearDuplicateAtomError
from src.lattice import LatticeCombSpec, realize_measure
from src.measure import (
    AtomicMeasure,
    _sweep_1d,
    ball_sums,
    growth_constant,
    growth_exponent,
    is_translation_bounded,
    looks_translation_bounded,
    minimal_gap,
    partial_mass_bound_check,
    power_mass_measure,
    radial_profile,
    squared_mass_measure,
    translation_bound_estimate,
    variation_on_ball,
)


def comb(window=20.0, dim=1):
    return realize_measure(LatticeCombSpec.single(np.eye(dim), window=window, dim=dim))


def test_coincident_atoms_are_merged():
    mu = AtomicMeasure.from_atoms(1, [[0.0], [0.0], [1.0]], [1.0, 2.0, 3.0], 5.0)
    assert len(mu) == 2
    assert sorted(mu.masses.real) == [3.0, 3.0]


def test_cancelling_atoms_are_dropped():
    mu = AtomicMeasure.from_atoms(1, [[0.5], [0.5]], [1.0, -1.0], 5.0)
    assert len(mu) == 0


def test_near_duplicates_are_rejected():
    with pytest.raises(NearDuplicateAtomError):
        AtomicMeasure.from_atoms(1, [[0.0], [1e-13]], [1.0, 1.0], 5.0)


def test_atoms_must_lie_in_the_open_window():
    with pytest.raises(ConfigurationError):
        AtomicMeasure.from_atoms(1, [[5.0]], [1.0], 5.0)


def test_balls_are_open():
    mu = comb()
    assert variation_on_ball(mu, [0.0], 1.0).value == 1.0
    assert variation_on_ball(mu, [0.0], 1.0 + 1e-9).value == 3.0


def test_ball_leaving_the_window_is_flagged():
    mu = comb(window=10.0)
    assert variation_on_ball(mu, [9.5], 1.0).truncated
    assert not variation_on_ball(mu, [0.0], 1.0).truncated


def test_nonpositive_radius_is_rejected():
    with pytest.raises(ConfigurationError):
        variation_on_ball(comb(), [0.0], 0.0)


def test_ball_sums_match_single_queries():
    mu = comb()
    centers = np.array([[0.0], [0.5], [3.2]])
    expected = [variation_on_ball(mu, c, 1.5).value for c in centers]
    assert ball_sums(mu, centers, 1.5).tolist() == expected


def test_translation_bound_of_the_unit_comb():
    mu = comb()
    report = translation_bound_estimate(mu, 1.0)
    assert report.exact
    assert report.sup_estimate == 2.0
    assert translation_bound_estimate(mu, 0.5).sup_estimate == 1.0


def test_translation_bound_of_the_square_lattice():
    report = translation_bound_estimate(comb(window=20.0, dim=2), 1.0)
    assert not report.exact
    assert report.sup_estimate == 4.0


def test_translation_bound_needs_admissible_centers():
    with pytest.raises(ConfigurationError):
        translation_bound_estimate(comb(window=2.0), 2.0)


def test_translation_bound_of_the_empty_measure():
    assert translation_bound_estimate(AtomicMeasure.empty(1, 10.0), 1.0).sup_estimate == 0.0


def test_comb_growth_is_linear():
    report = growth_exponent(comb(window=101.0), np.geomspace(10, 100, 12))
    assert report.polynomial
    assert report.fitted_exponent == pytest.approx(1.0, abs=0.05)


def test_square_lattice_growth_is_quadratic():
    report = growth_exponent(comb(window=101.0, dim=2), np.geomspace(10, 100, 12))
    assert report.polynomial
    assert report.fitted_exponent == pytest.approx(2.0, abs=0.1)


def test_exponential_masses_are_not_polynomial(exponential_measure):
    report = growth_exponent(exponential_measure, [10, 15, 20, 25, 30, 35, 40])
    assert not report.polynomial
    assert report.fitted_exponent is None
    assert report.slope > 1


def test_growth_needs_three_radii_inside_the_window():
    mu = comb()
    with pytest.raises(ConfigurationError):
        growth_exponent(mu, [1.0, 2.0])
    with pytest.raises(ConfigurationError):
        growth_exponent(mu, [1.0, 2.0, 30.0])


def test_translation_bounded_gate(exponential_measure):
    mu = comb(window=60.0)
    assert is_translation_bounded(looks_translation_bounded(mu), 1)
    assert not is_translation_bounded(looks_translation_bounded(exponential_measure), 1)


def test_growth_constant_of_the_unit_comb():
    # B(0, 1.05) holds three atoms while max{1, 1}^1 = 1
    assert growth_constant(comb(window=30.0), [[0.0]]) == pytest.approx(3.0)


def test_squared_and_power_masses():
    mu = AtomicMeasure.from_atoms(1, [[0.0], [1.0]], [2.0, 1j * 3.0], 5.0)
    assert np.allclose(squared_mass_measure(mu).masses, [4.0, 9.0])
    assert np.allclose(power_mass_measure(mu, 1.5).masses, [2.0**1.5, 3.0**1.5])
    with pytest.raises(ConfigurationError):
        power_mass_measure(mu, 0.0)


def test_partial_mass_bound(rng):
    points = rng.uniform(-9, 9, size=(50, 1))
    masses = rng.normal(size=50) + 1j * rng.normal(size=50)
    mu = AtomicMeasure.from_atoms(1, points, masses, 10.0)
    for r in (1.0, 4.0, 9.5):
        check = partial_mass_bound_check(mu, r)
        assert check.holds
        assert check.lhs <= check.rhs + 1e-12


def test_minimal_gap():
    assert minimal_gap(comb()) == pytest.approx(1.0)
    assert minimal_gap(AtomicMeasure.empty(1, 5.0)) == float("inf")


def test_dict_round_trip():
    mu = AtomicMeasure.from_atoms(2, [[0.0, 1.0], [2.0, -1.0]], [1.0, 0.5 - 2j], 4.0, margin=0.5)
    back = AtomicMeasure.from_dict(mu.to_dict())
    assert np.array_equal(back.points, mu.points)
    assert np.array_equal(back.masses, mu.masses)
    assert back.margin == 0.5


def random_line_measure(rng, count=200, window=25.0):
    points = rng.uniform(-20.0, 20.0, size=(count, 1))
    masses = rng.normal(size=count) + 1j * rng.normal(size=count)
    return AtomicMeasure.from_atoms(1, points, masses, window)


def test_line_sweep_matches_brute_force(rng):
    mu = random_line_measure(rng)
    r, scan = 1.3, 25.0 - 1.3
    value, center, scanned = _sweep_1d(mu, r, scan)
    assert scanned > 1
    assert abs(center[0]) < scan
    assert ball_sums(mu, center.reshape(1, 1), r)[0] == pytest.approx(value)

    centers = rng.uniform(-scan, scan, size=(5000, 1))
    gaps = np.abs(mu.points[:, 0][None, :] - centers)
    brute = (mu.abs_masses[None, :] * (gaps < r)).sum(axis=1)
    assert np.allclose(brute, ball_sums(mu, centers, r))
    assert brute.max() <= value + 1e-9


@pytest.mark.parametrize("radius", [0.4, 1.3, 3.0])
def test_translation_bound_dominates_random_balls(rng, radius):
    mu = random_line_measure(rng)
    report = translation_bound_estimate(mu, radius)
    assert report.exact
    centers = rng.uniform(-report.scan_radius, report.scan_radius, size=(2000, 1))
    values = [variation_on_ball(mu, c, radius).value for c in centers]
    assert max(values) <= report.sup_estimate + 1e-9


def test_square_lattice_bound_dominates_random_balls(rng):
    mu = comb(window=20.0, dim=2)
    report = translation_bound_estimate(mu, 1.0)
    centers = rng.uniform(-report.scan_radius, report.scan_radius, size=(2000, 2)) / np.sqrt(2)
    assert ball_sums(mu, centers, 1.0).max() <= report.sup_estimate


def test_variation_is_additive_over_disjoint_balls(rng):
    mu = random_line_measure(rng)
    for _ in range(50):
        first, second = rng.uniform(-15.0, 15.0, size=2)
        r1, r2 = rng.uniform(0.1, 3.0, size=2)
        if abs(first - second) < r1 + r2:
            continue
        x = mu.points[:, 0]
        union = mu.abs_masses[(np.abs(x - first) < r1) | (np.abs(x - second) < r2)].sum()
        parts = variation_on_ball(mu, [first], r1).value + variation_on_ball(mu, [second], r2).value
        assert parts == pytest.approx(union)


def test_variation_is_monotone_in_the_radius(rng):
    mu = random_line_measure(rng)
    radii = np.linspace(0.05, 10.0, 200)
    for center in rng.uniform(-10.0, 10.0, size=(10, 1)):
        profile = radial_profile(mu, center, radii)
        assert np.all(np.diff(profile) >= 0)
        assert profile[-1] == pytest.approx(variation_on_ball(mu, center, radii[-1]).value)
