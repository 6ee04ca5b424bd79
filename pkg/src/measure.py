"""
Atomic measures: finite window restrictions of pure point measures.

All balls are open: an atom at distance exactly r from the center is not in
B(center, r).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .config import Config
from .errors import ConfigurationError, NearDuplicateAtomError
from .models import (
    BallVariation,
    GrowthReport,
    PartialMassBound,
    TranslationBoundReport,
    from_pair,
    to_pair,
)

logger = logging.getLogger(__name__)


def as_points(points, dim: int) -> np.ndarray:
    """Coerce to a float array of shape (n, dim)."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.zeros((0, dim))
    if arr.ndim == 1:
        arr = arr.reshape(-1, dim)
    if arr.shape[-1] != dim:
        raise ConfigurationError(f"expected points of dimension {dim}, got shape {arr.shape}")
    return arr.reshape(-1, dim)


def as_point(point, dim: int) -> np.ndarray:
    arr = np.asarray(point, dtype=float).reshape(-1)
    if arr.shape[0] != dim:
        raise ConfigurationError(f"expected a point of dimension {dim}, got {arr.tolist()}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("point coordinates must be finite")
    return arr


def _merge_atoms(points: np.ndarray, masses: np.ndarray):
    """Sum masses at identical locations, reject near-duplicates, drop zeros."""
    if len(points) == 0:
        return points, masses
    points = points + 0.0  # -0.0 -> 0.0
    scale = float(np.max(np.abs(masses))) if len(masses) else 0.0
    unique, inverse = np.unique(points, axis=0, return_inverse=True)
    merged = np.zeros(len(unique), dtype=complex)
    np.add.at(merged, inverse.reshape(-1), masses)

    if len(unique) > 1:
        pairs = cKDTree(unique).query_pairs(r=Config.NEAR_DUPLICATE_TOL, output_type="ndarray")
        if len(pairs):
            i, j = pairs[0]
            raise NearDuplicateAtomError(
                f"atoms at {unique[i].tolist()} and {unique[j].tolist()} are closer than "
                f"{Config.NEAR_DUPLICATE_TOL}"
            )

    keep = np.abs(merged) > Config.ZERO_MASS_TOL * max(1.0, scale)
    return unique[keep], merged[keep]


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Restriction to B(0, window_radius) of a pure point measure on R^d."""

    dim: int
    points: np.ndarray
    masses: np.ndarray
    window_radius: float
    margin: float = 0.0
    label: str = field(default="", compare=False)

    @classmethod
    def from_atoms(
        cls,
        dim: int,
        points,
        masses,
        window_radius: float,
        margin: float = 0.0,
        label: str = "",
    ) -> "AtomicMeasure":
        if dim not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {dim}")
        if not window_radius > 0:
            raise ConfigurationError("window radius must be positive")
        if margin < 0:
            raise ConfigurationError("margin must be nonnegative")
        pts = as_points(points, dim)
        mass = np.asarray(masses, dtype=complex).reshape(-1)
        if len(pts) != len(mass):
            raise ConfigurationError(f"{len(pts)} locations but {len(mass)} masses")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(mass)):
            raise ConfigurationError("atom locations and masses must be finite")
        if len(pts) and np.any(np.linalg.norm(pts, axis=1) >= window_radius):
            raise ConfigurationError(f"atoms must lie in the open window B(0, {window_radius})")
        pts, mass = _merge_atoms(pts, mass)
        return cls(dim, pts, mass, float(window_radius), float(margin), label)

    @classmethod
    def empty(cls, dim: int, window_radius: float, margin: float = 0.0) -> "AtomicMeasure":
        return cls.from_atoms(dim, np.zeros((0, dim)), np.zeros(0), window_radius, margin)

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicMeasure":
        try:
            dim = int(data["dim"])
            atoms = data.get("atoms", [])
            points = [atom["x"] for atom in atoms]
            masses = [from_pair(atom["mass"]) for atom in atoms]
            return cls.from_atoms(
                dim,
                np.asarray(points, dtype=float).reshape(-1, dim),
                masses,
                float(data["window"]),
                float(data.get("margin", 0.0)),
                str(data.get("label", "")),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed atomic measure: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "window": self.window_radius,
            "margin": self.margin,
            "atoms": [
                {"x": p.tolist(), "mass": list(to_pair(m))} for p, m in zip(self.points, self.masses)
            ],
        }

    def __len__(self) -> int:
        return len(self.masses)

    @cached_property
    def abs_masses(self) -> np.ndarray:
        return np.abs(self.masses)

    @cached_property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1) if len(self) else np.zeros(0)

    @cached_property
    def tree(self) -> Optional[cKDTree]:
        return cKDTree(self.points) if len(self) else None

    def with_masses(self, masses) -> "AtomicMeasure":
        """Same support, new masses (zeros are dropped)."""
        return AtomicMeasure.from_atoms(
            self.dim, self.points, masses, self.window_radius, self.margin, self.label
        )

    def scaled(self, factor: complex) -> "AtomicMeasure":
        return self.with_masses(self.masses * factor)

    def merged_with(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if other.dim != self.dim:
            raise ConfigurationError("cannot merge measures of different dimension")
        return AtomicMeasure.from_atoms(
            self.dim,
            np.vstack([self.points, other.points]),
            np.concatenate([self.masses, other.masses]),
            max(self.window_radius, other.window_radius),
            max(self.margin, other.margin),
            self.label,
        )

    def restricted(self, radius: float) -> "AtomicMeasure":
        """Restriction to the smaller window B(0, radius)."""
        if radius > self.window_radius:
            raise ConfigurationError("restriction radius exceeds the window")
        keep = self.norms < radius
        return AtomicMeasure.from_atoms(
            self.dim, self.points[keep], self.masses[keep], radius, self.margin, self.label
        )

    @property
    def is_nonnegative(self) -> bool:
        tol = Config.ZERO_MASS_TOL * max(1.0, float(self.abs_masses.max(initial=0.0)))
        return bool(np.all(np.abs(self.masses.imag) <= tol) and np.all(self.masses.real >= -tol))


def ball_sums(mu: AtomicMeasure, centers: np.ndarray, radius: float, weights=None) -> np.ndarray:
    """Sum of ``weights`` (default |mass|) over atoms in each open ball B(center, radius)."""
    centers = as_points(centers, mu.dim)
    out = np.zeros(len(centers))
    if len(mu) == 0 or len(centers) == 0:
        return out
    weights = mu.abs_masses if weights is None else np.asarray(weights)
    neighbours = mu.tree.query_ball_point(centers, radius)
    lengths = np.fromiter((len(n) for n in neighbours), dtype=int, count=len(centers))
    if lengths.sum() == 0:
        return out
    rows = np.repeat(np.arange(len(centers)), lengths)
    cols = np.fromiter(chain.from_iterable(neighbours), dtype=int, count=int(lengths.sum()))
    # query_ball_point is closed; keep the open ball
    inside = np.linalg.norm(mu.points[cols] - centers[rows], axis=1) < radius
    out += np.bincount(rows[inside], weights=weights[cols[inside]], minlength=len(centers))
    return out


def radial_profile(mu: AtomicMeasure, center, radii) -> np.ndarray:
    """|mu|(B(center, r)) for every r in ``radii``."""
    center = as_point(center, mu.dim)
    radii = np.asarray(radii, dtype=float)
    if len(mu) == 0:
        return np.zeros_like(radii)
    dist = np.linalg.norm(mu.points - center, axis=1)
    order = np.argsort(dist)
    cumulative = np.concatenate([[0.0], np.cumsum(mu.abs_masses[order])])
    return cumulative[np.searchsorted(dist[order], radii, side="left")]


def variation_on_ball(mu: AtomicMeasure, center, r: float) -> BallVariation:
    """|mu|(B(center, r)); flagged as truncated when the ball leaves the window."""
    if not r > 0:
        raise ConfigurationError("ball radius must be positive")
    center = as_point(center, mu.dim)
    value = float(radial_profile(mu, center, [r])[0])
    truncated = bool(np.linalg.norm(center) + r > mu.window_radius)
    return BallVariation(center=center.tolist(), radius=r, value=value, truncated=truncated)


def _sweep_1d(mu: AtomicMeasure, r: float, scan_radius: float):
    """Exact sup of the open-interval variation over centers in (-scan_radius, scan_radius)."""
    if len(mu) == 0:
        return 0.0, np.zeros(1), 1
    order = np.argsort(mu.points[:, 0])
    x = mu.points[order, 0]
    prefix = np.concatenate([[0.0], np.cumsum(mu.abs_masses[order])])
    # The variation is piecewise constant between the breakpoints x +- r and lower
    # semicontinuous at them, so midpoints of consecutive breakpoints suffice.
    breaks = np.concatenate([x - r, x + r, [-scan_radius, scan_radius]])
    breaks = np.unique(np.clip(breaks, -scan_radius, scan_radius))
    mids = 0.5 * (breaks[:-1] + breaks[1:]) if len(breaks) > 1 else np.zeros(1)
    values = (
        prefix[np.searchsorted(x, mids + r, side="left")]
        - prefix[np.searchsorted(x, mids - r, side="right")]
    )
    best = int(np.argmax(values))
    return float(values[best]), np.array([mids[best]]), len(mids)


def _grid_scan(mu: AtomicMeasure, r: float, scan_radius: float):
    d = mu.dim
    pitch = r * Config.SCAN_PITCH_FRACTION
    per_axis = int(np.floor(2 * scan_radius / pitch)) + 1
    if per_axis**d > Config.MAX_SCAN_CENTERS:
        per_axis = max(2, int(Config.MAX_SCAN_CENTERS ** (1.0 / d)))
        pitch = 2 * scan_radius / (per_axis - 1)
    axis = np.linspace(-scan_radius, scan_radius, per_axis)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    candidates = [grid]
    if len(mu):
        candidates.append(mu.points)
    centers = np.vstack(candidates)
    centers = centers[np.linalg.norm(centers, axis=1) < scan_radius]
    if len(centers) == 0:
        centers = np.zeros((1, d))
    centers = centers[np.lexsort(centers.T[::-1])]
    values = ball_sums(mu, centers, r)
    best = int(np.argmax(values))
    return float(values[best]), centers[best], len(centers), pitch


def translation_bound_estimate(mu: AtomicMeasure, ball_radius: float) -> TranslationBoundReport:
    """sup over admissible centers c of |mu|(B(c, ball_radius)).

    Centers range over B(0, W - max(margin, ball_radius)) so that every scanned
    ball lies inside the window. For d = 1 the sweep is exact; for d >= 2 the
    candidates are the atoms plus a grid and the result is a lower bound.
    """
    if not ball_radius > 0:
        raise ConfigurationError("ball radius must be positive")
    scan_radius = mu.window_radius - max(mu.margin, ball_radius)
    if ball_radius >= mu.window_radius - mu.margin or scan_radius <= 0:
        raise ConfigurationError(
            f"ball radius {ball_radius} leaves no admissible centers in a window of radius "
            f"{mu.window_radius} with margin {mu.margin}"
        )
    if mu.dim == 1:
        value, center, scanned = _sweep_1d(mu, ball_radius, scan_radius)
        pitch = None
        exact = True
    else:
        value, center, scanned, pitch = _grid_scan(mu, ball_radius, scan_radius)
        exact = False
    logger.debug("translation bound %.6g at %s over %d centers", value, center, scanned)
    return TranslationBoundReport(
        ball_radius=ball_radius,
        sup_estimate=value,
        argmax_center=np.asarray(center, dtype=float).tolist(),
        centers_scanned=scanned,
        scan_radius=scan_radius,
        exact=exact,
        grid_pitch=pitch,
    )


def fit_power_law(radii: Sequence[float], values: Sequence[float]):
    """Least-squares fit of log(value) = slope * log(r) + log(constant).

    Returns (slope, constant, max residual, mask of the samples used).
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    used = values > 0
    if used.sum() < 2:
        constant = float(values[used][0]) if used.any() else 0.0
        return 0.0, constant, 0.0, used
    log_r, log_v = np.log(radii[used]), np.log(values[used])
    slope, intercept = np.polyfit(log_r, log_v, 1)
    residual = float(np.max(np.abs(log_v - (slope * log_r + intercept))))
    return float(slope), float(np.exp(intercept)), residual, used


def growth_exponent(mu: AtomicMeasure, radii: Iterable[float]) -> GrowthReport:
    """Fit |mu|(B(0, r)) ~ C r^rho; flag growth that is not polynomial."""
    radii = np.sort(np.asarray(list(radii), dtype=float))
    if len(radii) < 3:
        raise ConfigurationError("growth fit needs at least 3 radii")
    if np.any(radii <= 0):
        raise ConfigurationError("radii must be positive")
    if np.any(radii > mu.window_radius):
        raise ConfigurationError(f"radii must not exceed the window radius {mu.window_radius}")
    variations = radial_profile(mu, np.zeros(mu.dim), radii)
    slope, constant, residual, used = fit_power_law(radii, variations)
    polynomial = residual <= Config.GROWTH_RESIDUAL_THRESHOLD
    if not polynomial:
        logger.info("---GROWTH NOT POLYNOMIAL (residual %.3g)---", residual)
    return GrowthReport(
        radii=radii.tolist(),
        variations=variations.tolist(),
        fitted_exponent=slope if polynomial else None,
        fitted_constant=constant if polynomial else None,
        slope=slope,
        residual=residual,
        polynomial=polynomial,
        dropped_radii=radii[~used].tolist(),
    )


def looks_translation_bounded(mu: AtomicMeasure, n_radii: int = 12) -> GrowthReport:
    """Growth fit used as the translation-boundedness gate: polynomial with exponent <= d.

    Radii span [W/4, W); below that, lattice counts are too coarse for a log-log fit.
    """
    upper = mu.window_radius * (1 - 1e-9)
    return growth_exponent(mu, np.geomspace(upper / 4, upper, n_radii))


def is_translation_bounded(report: GrowthReport, dim: int) -> bool:
    return report.polynomial and report.slope <= dim + Config.TRANSLATION_BOUNDED_SLACK


def growth_constant(mu: AtomicMeasure, centers, ratio: Optional[float] = None) -> float:
    """Certified C1 with |mu|(B(x, r)) <= C1 max{1, r}^d for every r > 0 and each given x.

    On (r_k, r_{k+1}] the variation is at most M(r_{k+1}) while max{1, r}^d is at
    least r_k^d, so a geometric radius grid from 1 to beyond the window gives an
    upper bound rather than a sample.
    """
    ratio = ratio or Config.GROWTH_RADIUS_RATIO
    centers = as_points(centers, mu.dim)
    c1 = 0.0
    for center in centers:
        r_max = mu.window_radius + float(np.linalg.norm(center))
        count = int(np.ceil(np.log(max(r_max, 1.0 + 1e-12)) / np.log(ratio))) + 2
        radii = ratio ** np.arange(count)
        profile = radial_profile(mu, center, radii)
        ratios = np.concatenate([profile[:1], profile[1:] / radii[:-1] ** mu.dim])
        c1 = max(c1, float(ratios.max()))
    return c1


def power_mass_measure(mu_hat: AtomicMeasure, q: float) -> AtomicMeasure:
    """Same support, masses |b|^q. Nothing is claimed about translation boundedness for q < 2."""
    if not q > 0:
        raise ConfigurationError("exponent must be positive")
    return mu_hat.with_masses(mu_hat.abs_masses**q)


def squared_mass_measure(mu_hat: AtomicMeasure) -> AtomicMeasure:
    """nu = sum |b_gamma|^2 delta_gamma."""
    return power_mass_measure(mu_hat, 2)


def partial_mass_bound_check(mu_hat: AtomicMeasure, r: float) -> PartialMassBound:
    """sum_{|g|<r} |b_g| <= (sum |b_g|^2)^(1/2) * #{|g| < r}^(1/2)."""
    if not r > 0:
        raise ConfigurationError("radius must be positive")
    if r > mu_hat.window_radius:
        raise ConfigurationError(f"radius {r} exceeds the window radius {mu_hat.window_radius}")
    inside = mu_hat.norms < r
    masses = mu_hat.abs_masses[inside]
    lhs = float(masses.sum())
    count = int(inside.sum())
    rhs = float(np.sqrt(np.sum(masses**2)) * np.sqrt(count))
    return PartialMassBound(
        radius=r, lhs=lhs, rhs=rhs, count=count, holds=lhs <= rhs + 1e-12 * max(1.0, rhs)
    )


def minimal_gap(mu: AtomicMeasure) -> float:
    """Smallest distance between two distinct atoms (inf for fewer than two)."""
    if len(mu) < 2:
        return float("inf")
    dist, _ = mu.tree.query(mu.points, k=2)
    return float(dist[:, 1].min())
