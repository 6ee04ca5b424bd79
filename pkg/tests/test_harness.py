import numpy as np
import pytest

from src import harness
from src.errors import ConfigurationError, NotTranslationBoundedError, PoissonGateError
from src.harness import (
    align_ball,
    ball_inventory,
    gate_functions,
    poisson_check,
    poisson_gate,
    theorem2_harness,
    theorem3_harness,
    translation_gate,
)
from src.lattice import LatticeCombSpec
from src.measure import AtomicMeasure
from src.models import PoissonReport, from_pair
from src.schwartz import PlateauBump, StandardBump

THETA_1 = 1.0864348112133080


def test_gate_functions():
    functions = gate_functions(2)
    assert [phi.scale for phi in functions] == [0.5, 1.0, 2.0]
    assert all(phi.dim == 2 for phi in functions)


def test_poisson_holds_on_the_corpus(corpus_spec):
    report = poisson_check(corpus_spec)
    assert report.passed, report.max_residual
    assert len(report.rows) == 3
    assert report.max_residual < 1e-8


def test_poisson_sides_of_the_unit_comb(unit_comb):
    report = poisson_check(unit_comb)
    unit_row = report.rows[1]
    assert from_pair(unit_row.lhs) == pytest.approx(THETA_1, abs=1e-12)
    assert from_pair(unit_row.rhs) == pytest.approx(THETA_1, abs=1e-12)


def test_poisson_on_the_empty_spec():
    report = poisson_check(LatticeCombSpec(1, (), 10.0, "empty"))
    assert report.passed
    assert all(from_pair(row.lhs) == 0 for row in report.rows)


def test_poisson_needs_gaussians(unit_comb):
    with pytest.raises(ConfigurationError):
        poisson_check(unit_comb, [StandardBump(1.0)])


def test_poisson_gate_raises_on_failure(unit_comb, monkeypatch):
    failing = PoissonReport(
        spec_id="broken", spatial_window=1.0, spectral_window=1.0, rows=[], max_residual=0.5, passed=False
    )
    monkeypatch.setattr(harness, "poisson_check", lambda spec: failing)
    with pytest.raises(PoissonGateError):
        poisson_gate(unit_comb)


def test_translation_gate(exponential_measure):
    with pytest.raises(NotTranslationBoundedError):
        translation_gate(exponential_measure)


def test_theorem2_on_the_unit_comb(unit_comb, rng):
    centers = rng.uniform(-30, 30, size=(50, 1))
    report = theorem2_harness(unit_comb, centers=centers)
    assert report.passed
    assert report.centers_checked == report.centers_passed == 50
    assert report.parseval_constant_origin == pytest.approx(3.0, abs=1e-6)
    assert report.max_chain_gap <= 0.05
    assert report.nu_translation_bound.sup_estimate == pytest.approx(2.0)
    assert report.tempered.holds
    for check in report.checks:
        assert check.nu_ball <= check.chain_middle + 1e-12
    assert report.direct_agrees
    assert report.direct_mean_square == pytest.approx(3.0, abs=0.05)


@pytest.mark.slow
def test_theorem2_on_the_corpus(corpus_spec):
    report = theorem2_harness(corpus_spec, seed=11)
    assert report.centers_checked == 1000
    assert report.passed, report.max_chain_gap
    assert report.centers_passed == 1000
    assert report.max_chain_gap <= 0.05
    assert report.direct_agrees
    for check in report.checks:
        assert check.nu_ball <= check.chain_middle + 1e-9


def test_theorem2_scales_with_the_square_of_the_masses(modulated_comb, rng):
    centers = rng.uniform(-30, 30, size=(20, 1))
    plain = theorem2_harness(modulated_comb, centers=centers)
    doubled = theorem2_harness(modulated_comb.scaled(2.0), centers=centers)
    assert plain.nu_translation_bound.sup_estimate == pytest.approx(2.0)
    assert doubled.nu_translation_bound.sup_estimate == pytest.approx(8.0)
    assert doubled.parseval_constant == pytest.approx(4 * plain.parseval_constant, rel=1e-6)


def test_theorem2_needs_a_plateau_covering_the_unit_ball(unit_comb):
    with pytest.raises(ConfigurationError):
        theorem2_harness(unit_comb, PlateauBump(0.5, 1.0), centers=[[0.0]])


def test_align_ball_at_the_origin():
    stuck = align_ball([[0.0]], [-1.0])
    assert stuck.status == "dependent"
    assert stuck.relations == [[1]]
    assert not stuck.aligned

    fine = align_ball([[0.0]], [2.0])
    assert fine.status == "independent"
    assert fine.aligned
    assert fine.aligned_sum == pytest.approx(2.0)


def test_align_ball_single_point():
    record = align_ball([[0.3]], [1j], seed=1)
    assert record.aligned
    assert record.aligned_sum == pytest.approx(1.0)


@pytest.mark.slow
def test_align_ball_with_independent_points(rng):
    points = [[5 + 0.01 * np.sqrt(p)] for p in (2, 3, 5)]
    masses = np.exp(2j * np.pi * rng.uniform(size=3))
    record = align_ball(points, masses, seed=2)
    assert record.status == "independent"
    assert record.aligned
    assert record.aligned_sum >= 0.5 * record.mass


@pytest.mark.slow
@pytest.mark.parametrize("trial", range(10))
def test_align_ball_with_five_frequencies(trial):
    rng = np.random.default_rng(100 + trial)
    primes = rng.choice([2, 3, 5, 7, 11, 13, 17, 19], size=5, replace=False)
    points = 0.02 * np.sqrt(primes.astype(float)).reshape(-1, 1)
    masses = np.exp(2j * np.pi * rng.uniform(size=5))
    assert np.ptp(points) < 0.1
    record = align_ball(points, masses, seed=trial)
    assert record.status == "independent"
    assert record.aligned
    x = np.asarray(record.x)
    phases = np.exp(2j * np.pi * points @ x) * masses / np.abs(masses)
    assert np.all(phases.real > 0.5)
    assert record.aligned_sum >= 0.5 * record.mass


@pytest.mark.slow
def test_align_ball_reports_violated_relations():
    record = align_ball([[1.0], [2.0]], [1.0, -1.0], seed=2)
    assert record.status == "dependent"
    assert record.relations == [[2, -1]]
    assert not record.aligned


def test_ball_inventory():
    mu_hat = AtomicMeasure.from_atoms(1, [[0.0], [0.1], [0.2], [1.0]], [1, 1, 1, 1], 5.0)
    balls = ball_inventory(mu_hat, 0.15)
    assert sorted(len(members) for _, members in balls) == [1, 1, 2]
    assert sum(len(members) for _, members in balls) == 4


def test_theorem3_needs_positive_eta(modulated_comb):
    with pytest.raises(ConfigurationError):
        theorem3_harness(modulated_comb, eta=0.0)


@pytest.mark.slow
def test_theorem3_on_the_modulated_comb(modulated_comb):
    report = theorem3_harness(modulated_comb, eta=0.4, seed=4)
    assert report.passed, report.conclusion
    assert len(report.balls) == 20
    assert all(ball.status == "independent" for ball in report.balls)
    assert report.max_half_mass == pytest.approx(0.5)
    assert report.max_half_mass <= report.prop3_ceiling
