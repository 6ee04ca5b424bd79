"""
Finite Dirichlet series, Bohr mean Fourier coefficients over balls, the
Parseval identity and epsilon-almost periods.

All means are taken over balls B(x, R). The mean of exp(2 pi i <t, delta>)
over B(x, R) is exp(2 pi i <x, delta>) K_d(2 pi R |delta|) with

    K_1(z) = sin z / z,  K_2(z) = 2 J_1(z) / z,  K_3(z) = 3 (sin z - z cos z) / z^3.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, special
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .config import Config
from .errors import ConfigurationError, ConvolutionMismatchError, QuadratureError, ResourceLimitError
from .measure import AtomicMeasure, as_point, as_points
from .models import (
    AlmostPeriodReport,
    BohrEstimate,
    CoefficientCheck,
    ConvolutionCoefficientReport,
    ParsevalPoint,
    ParsevalReport,
    RouteSample,
    from_pair,
    to_pair,
)
from .parallel import parallel_map
from .schwartz import FourierImage, TestFunction, convolve_measure

logger = logging.getLogger(__name__)

# sup |J_1| on [0, inf), doubled
_J1_BOUND = 1.1638


def averaging_kernel(z, dim: int) -> np.ndarray:
    """Mean of exp(i <t, u>) over the unit ball for |u| = z."""
    z = np.abs(np.asarray(z, dtype=float))
    out = np.ones_like(z)
    nz = z > 1e-4
    zz = z[nz]
    if dim == 1:
        out[nz] = np.sin(zz) / zz
        out[~nz] = 1 - z[~nz] ** 2 / 6
    elif dim == 2:
        out[nz] = 2 * special.j1(zz) / zz
        out[~nz] = 1 - z[~nz] ** 2 / 8
    else:
        out[nz] = 3 * (np.sin(zz) - zz * np.cos(zz)) / zz**3
        out[~nz] = 1 - z[~nz] ** 2 / 10
    return out


def kernel_bound(z, dim: int) -> np.ndarray:
    """Majorant of |K_d(z)| decaying at least like 1/z."""
    z = np.abs(np.asarray(z, dtype=float))
    safe = np.where(z > 0, z, 1.0)
    if dim == 1:
        tail = 1.0 / safe
    elif dim == 2:
        tail = _J1_BOUND / safe
    else:
        tail = 3 * (1 + safe) / safe**3
    return np.where(z > 0, np.minimum(1.0, tail), 1.0)


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """D(x) = sum_omega a_omega exp(2 pi i <x, omega>) with pairwise distinct frequencies."""

    dim: int
    frequencies: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable[Tuple[Sequence[float], complex]]) -> "TrigPolynomial":
        if dim not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {dim}")
        terms = list(terms)
        freqs = as_points([as_point(w, dim) for w, _ in terms], dim) if terms else np.zeros((0, dim))
        coefs = np.array([complex(a) for _, a in terms], dtype=complex)
        return cls.from_arrays(dim, freqs, coefs)

    @classmethod
    def from_arrays(cls, dim: int, frequencies, coefficients) -> "TrigPolynomial":
        freqs = as_points(frequencies, dim)
        coefs = np.asarray(coefficients, dtype=complex).reshape(-1)
        if len(freqs) != len(coefs):
            raise ConfigurationError("frequency and coefficient counts differ")
        if len(freqs):
            freqs, inverse = np.unique(freqs + 0.0, axis=0, return_inverse=True)
            merged = np.zeros(len(freqs), dtype=complex)
            np.add.at(merged, inverse.reshape(-1), coefs)
            if len(freqs) > 1 and len(cKDTree(freqs).query_pairs(Config.NEAR_DUPLICATE_TOL)):
                raise ConfigurationError("frequencies closer than the merge tolerance")
            keep = merged != 0
            freqs, coefs = freqs[keep], merged[keep]
        return cls(dim, freqs, coefs)

    @classmethod
    def from_measure(cls, mu_hat: AtomicMeasure, weights=None) -> "TrigPolynomial":
        """Frequencies at the atoms, coefficients mass * weight."""
        weights = 1.0 if weights is None else np.asarray(weights)
        return cls.from_arrays(mu_hat.dim, mu_hat.points, mu_hat.masses * weights)

    @classmethod
    def from_dict(cls, data: dict) -> "TrigPolynomial":
        try:
            dim = int(data["dim"])
            terms = [(t["omega"], from_pair(t["a"])) for t in data.get("terms", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed trigonometric polynomial: {exc}") from exc
        return cls.from_terms(dim, terms)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"omega": w.tolist(), "a": list(to_pair(a))}
                for w, a in zip(self.frequencies, self.coefficients)
            ],
        }

    def __len__(self) -> int:
        return len(self.coefficients)

    def evaluate(self, x):
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 0 or (arr.ndim == 1 and self.dim > 1)
        pts = as_points(arr, self.dim)
        values = np.exp(2j * np.pi * pts @ self.frequencies.T) @ self.coefficients if len(self) else np.zeros(len(pts), complex)
        return complex(values[0]) if single else values

    def __call__(self, x):
        return self.evaluate(x)

    @property
    def abs_sum(self) -> float:
        return float(np.abs(self.coefficients).sum())

    @property
    def square_sum(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def coefficient_at(self, omega, tol: float = 1e-9) -> complex:
        """a_omega, or 0 when omega is not a frequency."""
        omega = as_point(omega, self.dim)
        if not len(self):
            return 0j
        dist = np.linalg.norm(self.frequencies - omega, axis=1)
        idx = int(np.argmin(dist))
        return complex(self.coefficients[idx]) if dist[idx] <= tol else 0j


def evaluate(polynomial: TrigPolynomial, x):
    return polynomial.evaluate(x)


def _closed_form_coefficient(D: TrigPolynomial, omega: np.ndarray, R: float, x: np.ndarray):
    if not len(D):
        return 0j, 0.0
    delta = D.frequencies - omega
    dist = np.linalg.norm(delta, axis=1)
    z = 2 * np.pi * R * dist
    terms = D.coefficients * np.exp(2j * np.pi * delta @ x) * averaging_kernel(z, D.dim)
    cross = dist > 1e-9
    error = float(np.sum(np.abs(D.coefficients[cross]) * kernel_bound(z[cross], D.dim)))
    return complex(terms.sum()), error


def _ball_average(f: Callable, x: np.ndarray, R: float, dim: int) -> Tuple[complex, float]:
    """Mean of f over B(x, R) by adaptive quadrature; returns (value, absolute error)."""
    volume = {1: 2 * R, 2: np.pi * R * R, 3: 4 / 3 * np.pi * R**3}[dim]
    results = []
    for part in (np.real, np.imag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if dim == 1:
                value, err = integrate.quad(
                    lambda t: float(part(f(np.array([t])))), x[0] - R, x[0] + R,
                    limit=max(Config.QUADRATURE_LIMIT, int(8 * R)),
                )
            elif dim == 2:
                half = lambda t1: np.sqrt(max(0.0, R * R - (t1 - x[0]) ** 2))
                value, err = integrate.nquad(
                    lambda t2, t1: float(part(f(np.array([t1, t2])))),
                    [lambda t1: (x[1] - half(t1), x[1] + half(t1)), (x[0] - R, x[0] + R)],
                )
            else:
                half = lambda t1: np.sqrt(max(0.0, R * R - (t1 - x[0]) ** 2))
                inner = lambda t2, t1: np.sqrt(max(0.0, half(t1) ** 2 - (t2 - x[1]) ** 2))
                value, err = integrate.nquad(
                    lambda t3, t2, t1: float(part(f(np.array([t1, t2, t3])))),
                    [
                        lambda t2, t1: (x[2] - inner(t2, t1), x[2] + inner(t2, t1)),
                        lambda t1: (x[1] - half(t1), x[1] + half(t1)),
                        (x[0] - R, x[0] + R),
                    ],
                )
        results.append((value / volume, err / volume))
    (re, re_err), (im, im_err) = results
    return complex(re, im), re_err + im_err


def bohr_coefficient(f, omega, R: Optional[float] = None, center=None) -> BohrEstimate:
    """Mean of f(t) exp(-2 pi i <t, omega>) over B(center, R).

    Trigonometric polynomials use the closed form with the cross-term bound;
    any other callable is averaged by quadrature.
    """
    R = Config.BOHR_RADIUS if R is None else float(R)
    if not R > 0:
        raise ConfigurationError("averaging radius must be positive")
    if isinstance(f, TrigPolynomial):
        dim = f.dim
    else:
        dim = getattr(f, "dim", None) or len(np.atleast_1d(omega))
    omega = as_point(omega, dim)
    x = np.zeros(dim) if center is None else as_point(center, dim)
    if isinstance(f, TrigPolynomial):
        value, error = _closed_form_coefficient(f, omega, R, x)
        method = "closed-form"
    else:
        evaluate_f = f.evaluate if hasattr(f, "evaluate") else f
        integrand = lambda t: complex(np.asarray(evaluate_f(t)).reshape(-1)[0]) * np.exp(-2j * np.pi * t @ omega)
        value, error = _ball_average(integrand, x, R, dim)
        if error > Config.ROUTE_TOLERANCE:
            raise QuadratureError(f"Bohr mean over radius {R} reached only {error:.3g}", achieved=error)
        method = "quadrature"
    return BohrEstimate(
        frequency=omega.tolist(),
        value=to_pair(value),
        averaging_radius=R,
        center=x.tolist(),
        error_bound=error,
        method=method,
    )


def extrapolate_limit(radii: Sequence[float], values: Sequence[float]) -> float:
    """Fit value(R) = c + k / R by least squares and return c."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        raise ConfigurationError("nothing to extrapolate")
    if len(values) == 1:
        return float(values[0])
    design = np.column_stack([np.ones_like(radii), 1.0 / radii])
    (c, _), *_ = np.linalg.lstsq(design, values, rcond=None)
    return float(c)


def mean_square(D: TrigPolynomial, R: float, center) -> Tuple[float, float]:
    """(mean of |D|^2 over B(center, R), bound on its distance to sum |a|^2)."""
    if not len(D):
        return 0.0, 0.0
    x = as_point(center, D.dim)
    delta = D.frequencies[:, None, :] - D.frequencies[None, :, :]
    dist = np.linalg.norm(delta, axis=2)
    z = 2 * np.pi * R * dist
    products = D.coefficients[:, None] * np.conj(D.coefficients)[None, :]
    value = np.sum(products * np.exp(2j * np.pi * delta @ x) * averaging_kernel(z, D.dim))
    off = ~np.eye(len(D), dtype=bool)
    bound = float(np.sum(np.abs(products[off]) * kernel_bound(z[off], D.dim)))
    return float(value.real), bound


def parseval_check(D: TrigPolynomial, schedule: Optional[Sequence[float]] = None, center=None) -> ParsevalReport:
    """Mean of |D|^2 over growing balls against the Parseval limit sum |a_omega|^2."""
    schedule = list(Config.PARSEVAL_SCHEDULE if schedule is None else schedule)
    if not schedule or any(r <= 0 for r in schedule) or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigurationError("the radius schedule must be positive and strictly increasing")
    x = np.zeros(D.dim) if center is None else as_point(center, D.dim)
    limit = D.square_sum
    points = []
    for R in schedule:
        value, bound = mean_square(D, R, x)
        points.append(ParsevalPoint(radius=R, mean_square=value, deviation=abs(value - limit), bound=bound))
    extrapolated = extrapolate_limit(schedule, [p.mean_square for p in points])
    return ParsevalReport(
        center=x.tolist(),
        limit=limit,
        points=points,
        o_constant=max(p.radius * p.bound for p in points),
        extrapolated=extrapolated,
        within_bound=all(p.deviation <= p.bound + 1e-12 * max(1.0, limit) for p in points),
    )


def period_criterion(D: TrigPolynomial, taus: np.ndarray) -> np.ndarray:
    """sum |a_omega| |exp(2 pi i <tau, omega>) - 1|, an upper bound for sup_x |D(x + tau) - D(x)|."""
    if not len(D):
        return np.zeros(len(taus))
    phases = taus @ D.frequencies.T
    return 2 * np.abs(np.sin(np.pi * phases)) @ np.abs(D.coefficients)


def _refine_period(D: TrigPolynomial, start: np.ndarray, pitch: float, epsilon: float) -> np.ndarray:
    base = float(period_criterion(D, start[None, :])[0])
    if base == 0:
        return start
    objective = lambda p: float(period_criterion(D, np.asarray(p, dtype=float).reshape(1, -1))[0])
    if D.dim == 1:
        result = optimize.minimize_scalar(
            lambda s: objective([s]), bounds=(start[0] - pitch, start[0] + pitch), method="bounded",
            options={"xatol": 1e-12},
        )
        candidate = np.array([result.x])
    else:
        result = optimize.minimize(objective, start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
        candidate = np.asarray(result.x, dtype=float)
    if objective(candidate) < min(epsilon, base) and np.linalg.norm(candidate - start) <= 2 * pitch:
        return candidate
    return start


def almost_periods(D: TrigPolynomial, epsilon: float, scan_range: float, scan_pitch: float) -> AlmostPeriodReport:
    """epsilon-almost periods of D in [-scan_range, scan_range]^d.

    Grid points passing the criterion are grouped into clusters of adjacent grid
    cells; each cluster contributes one locally refined period.
    """
    if not epsilon > 0:
        raise ConfigurationError("epsilon must be positive")
    if not (scan_range > 0 and scan_pitch > 0):
        raise ConfigurationError("scan range and pitch must be positive")
    d = D.dim
    k = int(np.floor(scan_range / scan_pitch))
    count = (2 * k + 1) ** d
    if count > Config.MAX_PERIOD_CANDIDATES:
        raise ResourceLimitError(f"{count} period candidates exceed the cap {Config.MAX_PERIOD_CANDIDATES}")
    axis = np.arange(-k, k + 1) * scan_pitch
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    criterion = period_criterion(D, grid)
    accepted = grid[criterion < epsilon]
    scores = criterion[criterion < epsilon]

    periods: List[np.ndarray] = []
    if len(accepted):
        pairs = cKDTree(accepted).query_pairs(scan_pitch * np.sqrt(d) * 1.01, output_type="ndarray")
        pairs = pairs.reshape(-1, 2)
        graph = coo_matrix(
            (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(accepted), len(accepted))
        )
        n_clusters, labels = connected_components(graph, directed=False)
        for label in range(n_clusters):
            members = np.flatnonzero(labels == label)
            best = members[np.argmin(scores[members])]
            periods.append(_refine_period(D, accepted[best], scan_pitch, epsilon))
    periods.sort(key=lambda p: tuple(p))

    if d == 1:
        coords = np.array([p[0] for p in periods])
        max_gap = float(np.max(np.diff(coords))) if len(coords) > 1 else float(scan_range)
        inclusion = max_gap / 2 if len(coords) > 1 else float(scan_range)
    elif periods:
        # covering radius of the inner half of the scan box
        probe_axis = np.linspace(-scan_range / 2, scan_range / 2, 41)
        probes = np.stack(np.meshgrid(*([probe_axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
        dist, _ = cKDTree(np.array(periods)).query(probes)
        max_gap = inclusion = float(dist.max())
    else:
        max_gap = inclusion = float(scan_range)
    logger.debug("%d almost periods at epsilon %.3g", len(periods), epsilon)
    return AlmostPeriodReport(
        epsilon=epsilon,
        periods=[p.tolist() for p in periods],
        scan_range=scan_range,
        scan_pitch=scan_pitch,
        max_gap=max_gap,
        inclusion_length=inclusion,
        candidates_accepted=int(len(accepted)),
    )


def convolution_polynomial(mu_hat: AtomicMeasure, phi: TestFunction) -> TrigPolynomial:
    """sum_{gamma in supp phi} b_gamma phi(gamma) exp(2 pi i <t, gamma>), the expansion of mu * phi-hat."""
    if phi.support_radius is None:
        raise ConfigurationError("the test function must be compactly supported")
    if mu_hat.window_radius < phi.support_radius:
        raise ConfigurationError(
            f"spectrum window {mu_hat.window_radius} does not cover supp phi (radius {phi.support_radius})"
        )
    inside = mu_hat.norms < phi.support_radius
    points = mu_hat.points[inside]
    weights = phi._values(points) if len(points) else np.zeros(0)
    return TrigPolynomial.from_arrays(mu_hat.dim, points, mu_hat.masses[inside] * weights)


def grid_kernel_bound(delta: np.ndarray, pitch: float, n: int) -> np.ndarray:
    """Majorant of |mean of exp(2 pi i <t, delta>)| over the grid pitch * {-n..n}^d.

    Per axis the mean is sin((2n+1) pi h u) / ((2n+1) sin(pi h u)); for |h u| <= 1/2
    the sine is at least 2 h |u|. Each row of ``delta`` takes the best axis.
    """
    delta = np.abs(np.atleast_2d(delta))
    with np.errstate(divide="ignore"):
        axis = np.where(delta > 0, 1.0 / ((2 * n + 1) * 2 * pitch * delta), np.inf)
    return np.minimum(1.0, axis.min(axis=1))


@dataclass(frozen=True, eq=False)
class DirectRouteGrid:
    """(mu * phi-hat) sampled by direct convolution on pitch * {-n..n}^d."""

    points: np.ndarray
    values: np.ndarray
    tails: np.ndarray
    pitch: float
    n: int


def direct_route_samples(
    mu: AtomicMeasure, phi: TestFunction, reach: float, half_width: Optional[float] = None
) -> DirectRouteGrid:
    """Sample mu * phi-hat on a centered grid whose pitch resolves frequencies of size ``reach``.

    Every axis component u of a frequency below ``reach`` has |pitch * u| < 1/2,
    so grid means of its exponential obey ``grid_kernel_bound``.
    """
    d = mu.dim
    pitch = 1.0 / (2 * reach + 1)
    half_width = Config.ROUTE_MEAN_HALF_WIDTH if half_width is None else float(half_width)
    half_width = min(half_width, mu.window_radius / 2)
    per_axis = int(round(Config.ROUTE_MEAN_POINTS ** (1.0 / d)))
    n = max(1, min(int(half_width / pitch), (per_axis - 1) // 2))
    axis = pitch * np.arange(-n, n + 1)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    image = FourierImage(phi)
    values = parallel_map(lambda t: convolve_measure(mu, image, t), list(grid))
    logger.debug("direct route: %d grid points, pitch %.4g", len(grid), pitch)
    return DirectRouteGrid(
        points=grid,
        values=np.array([from_pair(v.value) for v in values]),
        tails=np.array([v.tail_bound for v in values]),
        pitch=pitch,
        n=n,
    )


def direct_route_means(
    mu: AtomicMeasure, phi: TestFunction, gammas: np.ndarray, half_width: Optional[float] = None
) -> Tuple[np.ndarray, float, float, int]:
    """Grid means of (mu * phi-hat)(t) exp(-2 pi i <t, gamma>) from direct convolutions.

    Returns (means, mean tail bound, pitch, n).
    """
    reach = phi.support_radius + (float(np.abs(gammas).max()) if len(gammas) else 0.0)
    grid = direct_route_samples(mu, phi, reach, half_width)
    means = np.exp(-2j * np.pi * gammas @ grid.points.T) @ grid.values / len(grid.points)
    return means, float(grid.tails.mean()), grid.pitch, grid.n


def direct_mean_square(
    mu: AtomicMeasure, mu_hat: AtomicMeasure, phi: TestFunction, half_width: Optional[float] = None
) -> Tuple[float, float, float]:
    """Grid mean of |mu * phi-hat|^2 by direct convolution against sum |b_gamma phi(gamma)|^2.

    Returns (direct mean, Parseval limit, bound on their distance).
    """
    D = convolution_polynomial(mu_hat, phi)
    grid = direct_route_samples(mu, phi, 2 * phi.support_radius, half_width)
    direct = float(np.mean(np.abs(grid.values) ** 2))
    if len(D):
        delta = D.frequencies[:, None, :] - D.frequencies[None, :, :]
        products = np.abs(D.coefficients[:, None] * np.conj(D.coefficients)[None, :])
        off = ~np.eye(len(D), dtype=bool)
        leak = float(np.sum(products[off] * grid_kernel_bound(delta[off], grid.pitch, grid.n)))
    else:
        leak = 0.0
    # |D + e|^2 - |D|^2 is at most 2 |D| |e| + |e|^2
    tails = grid.tails
    bound = leak + float(np.mean(2 * D.abs_sum * tails + tails**2)) + Config.ROUTE_TOLERANCE
    return direct, D.square_sum, bound


def convolution_fourier_coefficients(
    mu: AtomicMeasure,
    mu_hat: AtomicMeasure,
    phi: TestFunction,
    probes,
    R: Optional[float] = None,
    route_points=None,
) -> ConvolutionCoefficientReport:
    """Check c_gamma(mu * phi-hat) = b_gamma phi(gamma) at the probe frequencies.

    Route (i) is the trigonometric polynomial built from the spectrum; route (ii)
    is the direct convolution of mu with phi-hat. The routes are compared
    pointwise, then each coefficient is taken as a grid mean of route (ii) and
    compared with b_gamma phi(gamma). ``R`` caps the half width of that grid.
    """
    R = Config.ROUTE_MEAN_HALF_WIDTH if R is None else float(R)
    if not R > 0:
        raise ConfigurationError("averaging radius must be positive")
    d = mu.dim
    polynomial = convolution_polynomial(mu_hat, phi)

    if route_points is None:
        route_points = np.linspace(-0.5, 0.5, Config.ROUTE_SAMPLES).reshape(-1, 1) * np.ones((1, d))
    route_points = as_points(route_points, d)
    image = FourierImage(phi)
    samples = []
    for t in route_points:
        direct = convolve_measure(mu, image, t)
        trig = polynomial.evaluate(t)
        discrepancy = abs(trig - from_pair(direct.value))
        samples.append(
            RouteSample(
                point=t.tolist(),
                trig_value=to_pair(trig),
                direct_value=direct.value,
                discrepancy=discrepancy,
                tail_bound=direct.tail_bound,
            )
        )
        if discrepancy > Config.ROUTE_TOLERANCE + direct.tail_bound:
            raise ConvolutionMismatchError(
                f"mu * phi-hat at {t.tolist()}: spectral route {trig:.12g} vs direct route "
                f"{from_pair(direct.value):.12g}"
            )

    gammas = as_points(probes, d)
    means, tail, pitch, n = direct_route_means(mu, phi, gammas, R)
    checks = []
    for gamma, value in zip(gammas, means):
        b = _mass_at(mu_hat, gamma)
        expected = b * complex(phi._values(gamma.reshape(1, -1))[0]) if b else 0j
        delta = polynomial.frequencies - gamma
        cross = np.linalg.norm(delta, axis=1) > 1e-9
        leak = float(np.sum(np.abs(polynomial.coefficients[cross]) * grid_kernel_bound(delta[cross], pitch, n)))
        bound = leak + tail + Config.ROUTE_TOLERANCE
        error = abs(complex(value) - expected)
        checks.append(
            CoefficientCheck(
                frequency=gamma.tolist(),
                bohr_value=to_pair(complex(value)),
                expected=to_pair(expected),
                error=error,
                error_bound=bound,
                agrees=error <= bound,
            )
        )
    return ConvolutionCoefficientReport(
        checks=checks, route_samples=samples, route_tolerance=Config.ROUTE_TOLERANCE, averaging_radius=n * pitch
    )


def _mass_at(mu_hat: AtomicMeasure, gamma: np.ndarray, tol: float = 1e-9) -> complex:
    if not len(mu_hat):
        return 0j
    dist, idx = mu_hat.tree.query(gamma)
    return complex(mu_hat.masses[idx]) if dist <= tol else 0j
