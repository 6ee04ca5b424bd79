import math
from fractions import Fraction

import numpy as np
import pytest

from src.errors import ConfigurationError, ResourceLimitError
from src.kronecker import (
    KroneckerInstance,
    certificate_check,
    f_value,
    independent_instance,
    integer_kernel,
    lll_reduce,
    parse_number,
    power_expansion,
    relation_check,
    residuals,
    solve,
    sup_estimate,
)


def test_parse_number():
    assert parse_number(3) == (3.0, Fraction(3))
    assert parse_number(0.1) == (0.1, Fraction(1, 10))
    assert parse_number("1/3")[1] == Fraction(1, 3)
    value, exact = parse_number("sqrt(2)")
    assert value == pytest.approx(np.sqrt(2))
    assert exact is None
    assert parse_number(np.pi)[1] is None


@pytest.mark.parametrize("bad", [True, "hello", float("nan"), None])
def test_parse_number_rejects(bad):
    with pytest.raises(ConfigurationError):
        parse_number(bad)


def test_instance_validation():
    with pytest.raises(ConfigurationError):
        KroneckerInstance.create([[1.0]], [0.1, 0.2])
    with pytest.raises(ConfigurationError):
        KroneckerInstance.create([[1.0]], [0.1], eps=0.0)
    with pytest.raises(ConfigurationError):
        KroneckerInstance.create([[0.0]], [0.1])
    with pytest.raises(ConfigurationError):
        KroneckerInstance.from_dict({"targets": [0.1]})


def test_instance_keeps_symbolic_input():
    inst = KroneckerInstance.create([[1], ["sqrt(2)"]], [0.5, 0.5])
    assert not inst.is_rational
    assert inst.exact_targets == (Fraction(1, 2), Fraction(1, 2))
    assert inst.to_dict()["vectors"] == [[1], ["sqrt(2)"]]
    assert KroneckerInstance.from_dict(inst.to_dict()).n == 2


def test_f_value_and_residuals():
    inst = KroneckerInstance.create([[1], [2]], [0.25, 0.5])
    assert f_value(inst, [0.25]) == pytest.approx(3.0)
    p, res = residuals(inst, [1.25])
    assert p.tolist() == [1, 2]
    assert np.allclose(res, 0.0)


def test_exact_backend_for_independent_vectors():
    inst = KroneckerInstance.create([[2]], [0.3])
    solution = solve(inst)
    assert solution.backend == "exact"
    assert solution.success
    assert solution.t == pytest.approx([0.15])
    assert solution.max_residual == 0.0

    plane = KroneckerInstance.create([[1, 0], [1, 1]], [0.25, 0.75])
    solution = solve(plane)
    assert solution.backend == "exact"
    assert solution.t == pytest.approx([0.25, 0.5])


def test_exact_backend_with_irrational_vector():
    solution = solve(KroneckerInstance.create([["sqrt(2)"]], [0.5]))
    assert solution.backend == "exact"
    assert solution.max_residual < 1e-12


def test_search_backend_finds_a_solution():
    inst = KroneckerInstance.create([[1], ["sqrt(2)"]], [0.5, 0.5], eps=0.01)
    solution = solve(inst, seed=1)
    assert solution.backend == "search"
    assert solution.success
    assert solution.max_residual < 0.01
    assert solution.diagnosis is None


ROOTS = ["sqrt(2)", "sqrt(3)", "sqrt(5)", "sqrt(7)"]


@pytest.mark.slow
def test_search_solves_seeded_square_root_instances():
    rng = np.random.default_rng(20240817)
    for trial in range(20):
        n = int(rng.integers(2, 4))
        chosen = sorted(rng.choice(len(ROOTS), size=n, replace=False))
        targets = np.round(rng.uniform(0.0, 1.0, size=n), 3).tolist()
        inst = KroneckerInstance.create([[ROOTS[k]] for k in chosen], targets, eps=1e-2)
        solution = solve(inst, seed=trial)
        assert solution.success, (chosen, targets)
        x = np.sqrt([[2.0], [3.0], [5.0], [7.0]])[chosen]
        offsets = x @ np.asarray(solution.t) - np.asarray(targets)
        assert np.all(np.abs(offsets - np.round(offsets)) < 1e-2)


@pytest.mark.parametrize("vector, target", [([1], "1/3"), ([2], "0.25"), (["3/2"], "0.7"), ([5], "0")])
def test_exact_backend_has_zero_residuals(vector, target):
    solution = solve(KroneckerInstance.create([vector], [target]))
    assert solution.backend == "exact"
    assert solution.residuals == [0.0]
    assert solution.success


def test_integer_kernel():
    kernel = integer_kernel([[1, 1, 1]])
    assert len(kernel) == 2
    for vec in kernel:
        assert sum(vec) == 0
    assert integer_kernel([[1, 0], [0, 1]]) == []
    assert integer_kernel([[2, 3]]) in ([[-3, 2]], [[3, -2]])


def test_lll_reduce():
    assert lll_reduce([[1, 0], [100, 1]]) == [[1, 0], [0, 1]]


def test_relation_check_rational():
    check = relation_check(KroneckerInstance.create([[1], [2]], [0.25, 0.3]))
    assert check.mode == "exact"
    assert check.complete
    assert check.relations == [[2, -1]]
    assert check.violations == [[2, -1]]
    assert not check.solvable


def test_relation_check_heuristic():
    vectors = [[1], ["sqrt(2)"], ["1 + sqrt(2)"]]
    check = relation_check(KroneckerInstance.create(vectors, [0.1, 0.2, 0.3]))
    assert check.mode == "heuristic"
    assert not check.complete
    assert check.relations == [[1, 1, -1]]
    assert check.solvable

    broken = relation_check(KroneckerInstance.create(vectors, [0.1, 0.2, 0.4]))
    assert broken.violations == [[1, 1, -1]]


def test_relation_height_shrinks_for_many_vectors():
    check = relation_check(independent_instance(8), height=6)
    assert check.height == 2
    assert check.relations == []


@pytest.mark.slow
@pytest.mark.parametrize(
    "vectors, targets, solvable",
    [
        ([[1], [2]], [0.25, 0.5], True),
        ([[2], [3]], [0.1, 0.15], True),
        ([[1], [2]], [0.25, 0.3], False),
        ([[2], [3]], [0.1, 0.4], False),
        ([[1], [1]], [0, 0.5], False),
    ],
)
def test_solver_agrees_with_relation_criterion(vectors, targets, solvable):
    inst = KroneckerInstance.create(vectors, targets, eps=0.01)
    assert relation_check(inst).solvable is solvable
    solution = solve(inst, seed=3)
    assert solution.success is solvable
    if not solvable:
        assert solution.diagnosis is not None
        assert solution.diagnosis.violations


def test_certificate_for_independent_frequencies():
    expansion = power_expansion(independent_instance(3), 4)
    assert len(expansion.entries) == 35
    assert expansion.collisions == 0
    check = certificate_check(expansion, independent=True)
    assert check.sum_abs == "256"
    assert check.target == "256"
    assert check.deficit == "0"
    assert check.passes


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("q", range(7))
def test_certificate_grid(n, q):
    expansion = power_expansion(independent_instance(n), q)
    assert expansion.collisions == 0
    assert len(expansion.entries) == math.comb(q + n, n)
    check = certificate_check(expansion, independent=True)
    assert check.passes
    assert check.sum_abs == str((n + 1) ** q)
    squares = sum(
        (math.factorial(q) // math.prod(math.factorial(k) for k in ks)) ** 2 for ks in _compositions(q, n + 1)
    )
    assert sum(entry.multinomial**2 for entry in expansion.entries) == squares
    assert sum(re * re + im * im for re, im in (entry.coefficient for entry in expansion.entries)) == squares


def test_certificate_for_q_zero():
    check = certificate_check(power_expansion(independent_instance(2), 0), independent=True)
    assert check.sum_abs == "1"
    assert check.passes


def test_certificate_detects_cancellation():
    inst = KroneckerInstance.create([[1], [1]], [0, 0.5])
    expansion = power_expansion(inst, 3)
    assert expansion.collisions == 6
    check = certificate_check(expansion, independent=False)
    assert check.sum_abs == "1"
    assert check.target == "27"
    assert check.strict_deficit
    assert not check.passes


def test_power_expansion_limits():
    with pytest.raises(ConfigurationError):
        power_expansion(independent_instance(2), -1)
    with pytest.raises(ResourceLimitError):
        power_expansion(independent_instance(8), 9)


def test_sup_estimate_reaches_n_plus_one():
    value = sup_estimate(independent_instance(2), seed=5)
    assert 2.99 < value <= 3.0 + 1e-9
