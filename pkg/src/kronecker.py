"""
Inhomogeneous Kronecker approximation: find t with |<x_j, t> - theta_j - p_j| < eps.

Two backends. When the x_j are linearly independent and N <= d the system
<x_j, t> = theta_j is solved directly. Otherwise |f|^2 is maximized for

    f(t) = 1 + sum_j exp(2 pi i (<x_j, t> - theta_j)),

whose supremum is N + 1 exactly when the approximation problem is solvable.
The module also carries the integer-relation solvability criterion and the
exact power-expansion certificate sum |alpha_s| = (N+1)^q.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy import optimize

from .config import Config
from .errors import ConfigurationError, ResourceLimitError
from .models import (
    CertificateCheck,
    KroneckerSolution,
    MergedTerm,
    PowerEntry,
    PowerExpansionReport,
    RelationCheck,
    to_pair,
)
from .parallel import parallel_map

logger = logging.getLogger(__name__)

# floats with at most this many significant digits are read as exact decimals
_EXACT_DIGITS = 12


def parse_number(value) -> Tuple[float, Optional[Fraction]]:
    """(float value, exact rational or None).

    Accepts ints, Fractions, short decimal floats, "p/q" strings and symbolic
    strings such as "sqrt(2)"; irrational values carry no exact form.
    """
    if isinstance(value, bool):
        raise ConfigurationError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return float(value), value
    if isinstance(value, (int, np.integer)):
        return float(value), Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ConfigurationError("values must be finite")
        text = repr(float(value))
        digits = len(text.lower().split("e")[0].replace("-", "").replace(".", "").lstrip("0"))
        return float(value), Fraction(text) if digits <= _EXACT_DIGITS else None
    if isinstance(value, str):
        try:
            expr = sympy.sympify(value, rational=True)
            number = float(expr)
        except (sympy.SympifyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"cannot parse {value!r} as a real number") from exc
        if expr.is_Rational:
            return number, Fraction(int(expr.p), int(expr.q))
        return number, None
    raise ConfigurationError(f"unsupported number {value!r}")


@dataclass(frozen=True, eq=False)
class KroneckerInstance:
    """Vectors x_1..x_N in R^d, targets theta_j and tolerance eps."""

    dim: int
    vectors: np.ndarray
    targets: np.ndarray
    eps: float
    exact_vectors: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    exact_targets: Optional[Tuple[Fraction, ...]] = None
    raw: dict = field(default_factory=dict, compare=False)

    @classmethod
    def create(cls, vectors, targets, eps: float = 1e-2, dim: Optional[int] = None) -> "KroneckerInstance":
        rows = [list(v) if isinstance(v, (list, tuple, np.ndarray)) else [v] for v in vectors]
        if not rows:
            raise ConfigurationError("a Kronecker instance needs at least one vector")
        dim = dim or len(rows[0])
        if dim not in (1, 2, 3) or any(len(r) != dim for r in rows):
            raise ConfigurationError(f"all vectors must have dimension {dim} in {{1, 2, 3}}")
        if len(targets) != len(rows):
            raise ConfigurationError(f"{len(rows)} vectors but {len(targets)} targets")
        if not eps > 0:
            raise ConfigurationError("eps must be positive")
        parsed_vectors = [[parse_number(c) for c in r] for r in rows]
        parsed_targets = [parse_number(t) for t in targets]
        X = np.array([[v for v, _ in r] for r in parsed_vectors], dtype=float)
        if np.any(np.linalg.norm(X, axis=1) == 0):
            raise ConfigurationError("vectors must be nonzero")
        exact_vectors = None
        if all(e is not None for r in parsed_vectors for _, e in r):
            exact_vectors = tuple(tuple(e for _, e in r) for r in parsed_vectors)
        exact_targets = None
        if all(e is not None for _, e in parsed_targets):
            exact_targets = tuple(e for _, e in parsed_targets)
        raw = {
            "dim": dim,
            "vectors": [[_jsonable(c) for c in r] for r in rows],
            "targets": [_jsonable(t) for t in targets],
            "eps": float(eps),
        }
        return cls(
            dim,
            X,
            np.array([v for v, _ in parsed_targets], dtype=float),
            float(eps),
            exact_vectors,
            exact_targets,
            raw,
        )

    @classmethod
    def from_dict(cls, data: dict) -> "KroneckerInstance":
        try:
            return cls.create(data["vectors"], data["targets"], float(data.get("eps", 1e-2)), data.get("dim"))
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed Kronecker instance: {exc}") from exc

    def to_dict(self) -> dict:
        return dict(self.raw)

    @property
    def n(self) -> int:
        return len(self.targets)

    @property
    def is_rational(self) -> bool:
        return self.exact_vectors is not None


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer, np.floating)):
        return value.item()
    return value


def f_value(inst: KroneckerInstance, t) -> complex:
    """f(t) = 1 + sum_j exp(2 pi i (<x_j, t> - theta_j))."""
    t = np.asarray(t, dtype=float).reshape(-1)
    return complex(1 + np.sum(np.exp(2j * np.pi * (inst.vectors @ t - inst.targets))))


def residuals(inst: KroneckerInstance, t) -> Tuple[np.ndarray, np.ndarray]:
    """(p_j, |<x_j, t> - theta_j - p_j|) with p_j the nearest integers."""
    offsets = inst.vectors @ np.asarray(t, dtype=float).reshape(-1) - inst.targets
    p = np.round(offsets)
    return p.astype(int), np.abs(offsets - p)


def _max_residual(inst: KroneckerInstance, t) -> float:
    return float(residuals(inst, t)[1].max())


def _rank(inst: KroneckerInstance) -> int:
    singular = np.linalg.svd(inst.vectors, compute_uv=False)
    return int(np.sum(singular > Config.RANK_PIVOT_TOL * max(1.0, float(singular.max()))))


def _solution(inst, t, backend, exact_zero=False, diagnosis=None) -> KroneckerSolution:
    t = np.asarray(t, dtype=float).reshape(-1)
    p, res = residuals(inst, t)
    if exact_zero:
        res = np.zeros(inst.n)
    max_res = float(res.max())
    return KroneckerSolution(
        t=t.tolist(),
        p=p.tolist(),
        residuals=res.tolist(),
        max_residual=max_res,
        success=max_res < inst.eps,
        backend=backend,
        f_modulus=abs(f_value(inst, t)),
        t_norm=float(np.linalg.norm(t)),
        diagnosis=diagnosis,
    )


def _solve_exact(inst: KroneckerInstance) -> KroneckerSolution:
    """Minimal-norm solution of <x_j, t> = theta_j."""
    if inst.is_rational and inst.exact_targets is not None:
        A = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in inst.exact_vectors])
        theta = sympy.Matrix([sympy.Rational(c.numerator, c.denominator) for c in inst.exact_targets])
        t = A.T * (A * A.T).inv() * theta
        return _solution(inst, [float(v) for v in t], "exact", exact_zero=True)
    t, *_ = np.linalg.lstsq(inst.vectors, inst.targets, rcond=None)
    return _solution(inst, t, "exact")


def _objective(t: np.ndarray, inst: KroneckerInstance):
    """-|f|^2 and its gradient."""
    phases = np.exp(2j * np.pi * (inst.vectors @ t - inst.targets))
    f = 1 + phases.sum()
    df = (2j * np.pi * phases) @ inst.vectors
    return -abs(f) ** 2, -2 * np.real(np.conj(f) * df)


def _ascend(inst: KroneckerInstance, start: np.ndarray) -> np.ndarray:
    result = optimize.minimize(
        _objective, start, args=(inst,), jac=True, method="BFGS",
        options={"gtol": Config.GRADIENT_TOL, "maxiter": 200},
    )
    return np.asarray(result.x, dtype=float)


def _top(keys: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest keys."""
    if len(keys) <= k:
        return np.arange(len(keys))
    return np.argpartition(keys, k)[:k]


def _pool_candidates(inst: KroneckerInstance, rng: np.random.Generator, half_width: float, pool: int) -> np.ndarray:
    """Random t in [-T, T]^d; keeps the best starts by |f|^2 and by max residual."""
    k = Config.KRONECKER_STARTS
    kept = np.zeros((0, inst.dim))
    drawn = 0
    while drawn < pool:
        size = min(Config.KRONECKER_CHUNK, pool - drawn)
        t = rng.uniform(-half_width, half_width, size=(size, inst.dim))
        drawn += size
        offsets = t @ inst.vectors.T - inst.targets
        modulus = np.abs(1 + np.exp(2j * np.pi * offsets).sum(axis=1)) ** 2
        worst = np.abs(offsets - np.round(offsets)).max(axis=1)
        kept = np.vstack([kept, t[_top(-modulus, k)], t[_top(worst, k)]])
    offsets = kept @ inst.vectors.T - inst.targets
    modulus = np.abs(1 + np.exp(2j * np.pi * offsets).sum(axis=1)) ** 2
    return kept[_top(-modulus, k)]


def _key(inst: KroneckerInstance, t: np.ndarray):
    return (_max_residual(inst, t), tuple(np.round(t, 12)))


def _search(inst: KroneckerInstance, seed: Optional[int], pool_size: Optional[int]) -> np.ndarray:
    rng = np.random.default_rng(Config.DEFAULT_SEED if seed is None else seed)
    norms = np.linalg.norm(inst.vectors, axis=1)
    pitch = inst.eps / (2 * norms.max())
    expected_hits = (2 * inst.eps) ** inst.n
    pool = pool_size or int(np.clip(50 / expected_hits, Config.KRONECKER_MIN_POOL, Config.KRONECKER_MAX_POOL))
    half_width = max(0.5 * pitch * pool ** (1.0 / inst.dim), 50.0 / norms.min())
    best = None
    for round_index in range(Config.KRONECKER_ROUNDS):
        starts = _pool_candidates(inst, rng, half_width, pool)
        polished = parallel_map(lambda s: _ascend(inst, s), list(starts))
        candidates = list(starts) + polished
        round_best = min(candidates, key=lambda t: _key(inst, t))
        if best is None or _key(inst, round_best) < _key(inst, best):
            best = round_best
        logger.debug("search round %d: max residual %.3g at T=%.3g", round_index, _max_residual(inst, best), half_width)
        if _max_residual(inst, best) < inst.eps:
            break
        half_width *= 2
    return best


def solve(inst: KroneckerInstance, seed: Optional[int] = None, pool_size: Optional[int] = None) -> KroneckerSolution:
    """Find t with every residual below eps; a failed search returns the best effort."""
    if _rank(inst) == inst.n <= inst.dim:
        return _solve_exact(inst)
    solution = _solution(inst, _search(inst, seed, pool_size), "search")
    if not solution.success:
        logger.info("---KRONECKER SEARCH FAILED--- max residual %.3g >= eps %.3g", solution.max_residual, inst.eps)
        if inst.is_rational:
            solution.diagnosis = relation_check(inst)
    return solution


# Integer relations

def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """(x, y, g) with x a + y b = g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def integer_kernel(matrix: Sequence[Sequence[int]]) -> List[List[int]]:
    """Basis of {m in Z^N : A m = 0} by unimodular column reduction of the d x N matrix A."""
    rows = [list(map(int, r)) for r in matrix]
    n = len(rows[0])
    columns = [[rows[r][j] for r in range(len(rows))] for j in range(n)]
    transform = [[int(i == j) for i in range(n)] for j in range(n)]
    pivot = 0
    for r in range(len(rows)):
        if pivot == n:
            break
        for j in range(pivot + 1, n):
            b = columns[j][r]
            if b == 0:
                continue
            a = columns[pivot][r]
            x, y, g = _xgcd(a, b)
            pa, qb = a // g, b // g
            # [[x, -qb], [y, pa]] has determinant 1
            columns[pivot], columns[j] = (
                [x * u + y * v for u, v in zip(columns[pivot], columns[j])],
                [-qb * u + pa * v for u, v in zip(columns[pivot], columns[j])],
            )
            transform[pivot], transform[j] = (
                [x * u + y * v for u, v in zip(transform[pivot], transform[j])],
                [-qb * u + pa * v for u, v in zip(transform[pivot], transform[j])],
            )
        if columns[pivot][r] != 0:
            pivot += 1
    return [transform[j] for j in range(pivot, n)]


def _dot(u, v) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def _gram_schmidt(basis):
    ortho = []
    for vec in basis:
        vec = [Fraction(c) for c in vec]
        for u in ortho:
            uu = _dot(u, u)
            if uu:
                coef = _dot(vec, u) / uu
                vec = [a - coef * b for a, b in zip(vec, u)]
        ortho.append(vec)
    return ortho


def lll_reduce(basis: List[List[int]], delta: Fraction = Fraction(99, 100)) -> List[List[int]]:
    """LLL reduction in exact rational arithmetic."""
    basis = [list(v) for v in basis]
    n = len(basis)
    if n < 2:
        return basis
    ortho = _gram_schmidt(basis)
    mu = lambda i, j: _dot(basis[i], ortho[j]) / _dot(ortho[j], ortho[j])
    k = 1
    while k < n:
        for j in reversed(range(k)):
            coef = mu(k, j)
            if abs(coef) > Fraction(1, 2):
                r = round(coef)
                basis[k] = [a - r * b for a, b in zip(basis[k], basis[j])]
        if _dot(ortho[k], ortho[k]) >= (delta - mu(k, k - 1) ** 2) * _dot(ortho[k - 1], ortho[k - 1]):
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            ortho = _gram_schmidt(basis)
            k = max(k - 1, 1)
    return basis


def _canonical(vec: Sequence[int]) -> List[int]:
    vec = [int(v) for v in vec]
    divisor = 0
    for v in vec:
        divisor = gcd(divisor, abs(v))
    if divisor > 1:
        vec = [v // divisor for v in vec]
    first = next((v for v in vec if v), 0)
    return [-v for v in vec] if first < 0 else vec


def _exact_relations(inst: KroneckerInstance) -> List[List[int]]:
    # row r of A holds coordinate r of every x_j; clear denominators row by row
    matrix = []
    for r in range(inst.dim):
        row = [inst.exact_vectors[j][r] for j in range(inst.n)]
        scale = 1
        for c in row:
            scale = scale * c.denominator // gcd(scale, c.denominator)
        matrix.append([int(c * scale) for c in row])
    kernel = integer_kernel(matrix)
    return [_canonical(v) for v in lll_reduce(kernel)]


def _heuristic_relations(inst: KroneckerInstance, height: int) -> Tuple[List[List[int]], int]:
    n = inst.n
    while height > 1 and (2 * height + 1) ** n > Config.RELATION_MAX_CANDIDATES:
        height -= 1
    axis = np.arange(-height, height + 1)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    combos = grid @ inst.vectors
    scale = max(1.0, float(np.abs(inst.vectors).max()))
    hits = grid[np.linalg.norm(combos, axis=1) < Config.RELATION_TOL * scale]
    found: List[List[int]] = []
    seen = set()
    for vec in sorted((_canonical(h) for h in hits if np.any(h)), key=lambda v: (max(map(abs, v)), v)):
        if tuple(vec) in seen:
            continue
        seen.add(tuple(vec))
        if np.linalg.matrix_rank(np.array(found + [vec], dtype=float)) == len(found) + 1:
            found.append(vec)
    return found, height


def _in_integers(inst: KroneckerInstance, relation: Sequence[int]) -> bool:
    if inst.exact_targets is not None:
        return sum((m * t for m, t in zip(relation, inst.exact_targets)), Fraction(0)).denominator == 1
    s = float(np.dot(relation, inst.targets))
    return abs(s - round(s)) <= Config.RELATION_TOL


def relation_check(inst: KroneckerInstance, height: Optional[int] = None) -> RelationCheck:
    """Integer relations sum m_j x_j = 0 and the ones violating sum m_j theta_j in Z."""
    if inst.is_rational:
        relations, mode, used_height, complete = _exact_relations(inst), "exact", None, True
    else:
        requested = height or Config.RELATION_HEIGHT
        relations, used_height = _heuristic_relations(inst, requested)
        mode, complete = "heuristic", False
    violations = [m for m in relations if not _in_integers(inst, m)]
    return RelationCheck(
        relations=relations,
        violations=violations,
        solvable=not violations,
        mode=mode,
        theta_mode="exact" if inst.exact_targets is not None else "numeric",
        height=used_height,
        complete=complete,
    )


# Power expansion certificate

_ROOTS = {
    1: {0: 1 + 0j},
    2: {0: 1 + 0j, 1: -1 + 0j},
    4: {0: 1 + 0j, 1: -1j, 2: -1 + 0j, 3: 1j},
}


def _unit_root(phase: Fraction) -> complex:
    """exp(-2 pi i phase), exact for denominators 1, 2 and 4."""
    reduced = phase - (phase.numerator // phase.denominator)
    table = _ROOTS.get(reduced.denominator)
    if table is not None:
        return table[reduced.numerator]
    return complex(np.exp(-2j * np.pi * float(reduced)))


def power_expansion(inst: KroneckerInstance, q: int) -> PowerExpansionReport:
    """Terms of f(t)^q = sum_s alpha_s exp(2 pi i <beta_s, t>) with collisions merged."""
    if q < 0 or int(q) != q:
        raise ConfigurationError("q must be a nonnegative integer")
    q, n = int(q), inst.n
    if (q + 1) ** n > Config.POWER_EXPANSION_CAP:
        raise ResourceLimitError(f"(q+1)^N = {(q + 1) ** n} exceeds the cap {Config.POWER_EXPANSION_CAP}")
    exact_phase = inst.exact_targets is not None
    entries: List[PowerEntry] = []
    groups: Dict[tuple, Dict] = defaultdict(lambda: {"phases": defaultdict(int), "floats": 0j, "count": 0, "frequency": None})
    for exponents, multinomial in sorted(sympy.multinomial_coefficients(n + 1, q).items(), reverse=True):
        m = list(exponents[1:])
        multinomial = int(multinomial)
        frequency = np.asarray(m, dtype=float) @ inst.vectors
        if exact_phase:
            phase_exact = sum((k * t for k, t in zip(m, inst.exact_targets)), Fraction(0))
            phase = float(phase_exact)
            alpha = multinomial * _unit_root(phase_exact)
        else:
            phase_exact = None
            phase = float(np.dot(m, inst.targets))
            alpha = multinomial * complex(np.exp(-2j * np.pi * phase))
        entries.append(
            PowerEntry(
                exponents=m,
                frequency=frequency.tolist(),
                multinomial=multinomial,
                phase=phase,
                phase_exact=str(phase_exact) if phase_exact is not None else None,
                coefficient=to_pair(alpha),
            )
        )
        if inst.is_rational:
            key = tuple(sum((k * row[r] for k, row in zip(m, inst.exact_vectors)), Fraction(0)) for r in range(inst.dim))
        else:
            key = tuple(np.round(frequency, 12) + 0.0)
        group = groups[key]
        group["frequency"] = frequency
        group["count"] += 1
        if exact_phase:
            group["phases"][phase_exact - (phase_exact.numerator // phase_exact.denominator)] += multinomial
        else:
            group["floats"] += alpha
    merged = []
    for group in groups.values():
        coefficient = group["floats"]
        for phase, total in group["phases"].items():
            coefficient += total * _unit_root(phase)
        merged.append(
            MergedTerm(frequency=group["frequency"].tolist(), coefficient=to_pair(coefficient), multiplicity=group["count"])
        )
    merged.sort(key=lambda term: term.frequency)
    return PowerExpansionReport(q=q, n=n, entries=entries, merged=merged, collisions=len(entries) - len(merged))


def _format_number(value) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.15g}"


def certificate_check(expansion: PowerExpansionReport, independent: bool) -> CertificateCheck:
    """Compare sum |alpha_s| after merging with (N+1)^q."""
    target = (expansion.n + 1) ** expansion.q
    if independent:
        total = sum(entry.multinomial for entry in expansion.entries)
        deficit = target - total
        return CertificateCheck(
            sum_abs=str(total),
            target=str(target),
            deficit=str(deficit),
            exact=True,
            strict_deficit=deficit > 0,
            passes=deficit == 0 and expansion.collisions == 0,
        )
    total = float(sum(abs(complex(*term.coefficient)) for term in expansion.merged))
    deficit = target - total
    return CertificateCheck(
        sum_abs=_format_number(total),
        target=str(target),
        deficit=_format_number(deficit),
        exact=False,
        strict_deficit=deficit > 1e-9 * target,
        passes=abs(deficit) <= 1e-9 * target,
    )


def sup_estimate(inst: KroneckerInstance, budget: Optional[int] = None, seed: Optional[int] = None) -> float:
    """Lower bound on sup_t |f(t)| from the solver's t and the search pool."""
    solution = solve(inst, seed=seed, pool_size=budget)
    best = solution.f_modulus
    if solution.backend == "search":
        rng = np.random.default_rng(Config.DEFAULT_SEED if seed is None else seed)
        norms = np.linalg.norm(inst.vectors, axis=1)
        starts = _pool_candidates(inst, rng, 50.0 / norms.min(), budget or Config.KRONECKER_MIN_POOL)
        best = max(best, max(abs(f_value(inst, _ascend(inst, s))) for s in starts[:8]))
    return float(best)


def independent_instance(n: int, dim: int = 1, eps: float = 1e-2) -> KroneckerInstance:
    """x_j = sqrt(p_j) e_1 for the first n primes, theta = 0."""
    primes = list(sympy.primerange(2, 100))[:n]
    vectors = [[f"sqrt({p})"] + [0] * (dim - 1) for p in primes]
    return KroneckerInstance.create(vectors, [0] * n, eps, dim)
