"""
Test functions with Fourier transforms and Schwartz norms, measure-function
convolution, and the explicit constants behind the translation-boundedness
certificates.

Fourier convention (fixed everywhere): phi-hat(x) = int phi(t) exp(-2 pi i <x, t>) dt.
"""

import logging
import warnings
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, special

from .config import Config
from .errors import (
    CheckFailedError,
    ConfigurationError,
    NotTranslationBoundedError,
    QuadratureError,
)
from .measure import (
    AtomicMeasure,
    as_point,
    as_points,
    growth_constant,
    is_translation_bounded,
    looks_translation_bounded,
    radial_profile,
)
from .models import ConvolutionValue, Prop2Certificate, Prop3Certificate, SchwartzNormReport, to_pair
from .parallel import parallel_map

logger = logging.getLogger(__name__)


def _batch(y, dim: int) -> Tuple[np.ndarray, bool]:
    """(points of shape (n, dim), True when a single point was given)."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0 or (arr.ndim == 1 and arr.size == dim):
        return arr.reshape(1, dim), True
    return as_points(arr, dim), False


def _finish(values: np.ndarray, single: bool):
    return complex(values[0]) if single else values


def _glue(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    a, b = _glue(t), _glue(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def _quad(integrand, lo: float, hi: float, **kwargs) -> Tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(
            integrand,
            lo,
            hi,
            epsabs=kwargs.pop("epsabs", Config.QUADRATURE_TOL / 10),
            epsrel=1e-12,
            limit=Config.QUADRATURE_LIMIT,
            **kwargs,
        )
    return value, error


def radial_transform(profile, support: float, xi: float, dim: int) -> float:
    """Fourier transform at |x| = xi of the radial function g(|t|) supported in B(0, support)."""
    g = lambda s: float(profile(s))
    w = 2 * np.pi * xi
    if dim == 1:
        factor = 2.0
        if xi == 0:
            value, error = _quad(g, 0.0, support)
        else:
            value, error = _quad(g, 0.0, support, weight="cos", wvar=w)
    elif dim == 2:
        factor = 2 * np.pi
        value, error = _quad(lambda s: g(s) * special.j0(w * s) * s, 0.0, support)
    else:
        factor = 4 * np.pi
        value, error = _quad(lambda s: g(s) * s * s * np.sinc(2 * xi * s), 0.0, support)
    error *= factor
    if error > Config.QUADRATURE_TOL:
        raise QuadratureError(
            f"radial transform at {xi} reached only {error:.3g} (target {Config.QUADRATURE_TOL})",
            achieved=error,
        )
    return factor * value


def radial_integral(profile, support: float, dim: int) -> float:
    """int_{B(0, support)} g(|t|) dt."""
    shell = {1: lambda s: 2.0, 2: lambda s: 2 * np.pi * s, 3: lambda s: 4 * np.pi * s * s}[dim]
    value, error = _quad(lambda s: float(profile(s)) * shell(s), 0.0, support)
    if error > Config.QUADRATURE_TOL:
        raise QuadratureError(f"radial integral reached only {error:.3g}", achieved=error)
    return value


class TestFunction(ABC):
    """A Schwartz test function on R^d with its Fourier transform."""

    __test__ = False  # not a pytest class

    kind: str = ""
    radial: bool = False
    support_radius: Optional[float] = None

    def __init__(self, dim: int):
        if dim not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {dim}")
        self.dim = dim
        self._cache: Dict[str, float] = {}

    @abstractmethod
    def _values(self, pts: np.ndarray) -> np.ndarray:
        """phi at each row of ``pts``."""

    @abstractmethod
    def _transform(self, pts: np.ndarray) -> np.ndarray:
        """phi-hat at each row of ``pts``."""

    @abstractmethod
    def to_dict(self) -> dict:
        pass

    def evaluate(self, y):
        pts, single = _batch(y, self.dim)
        return _finish(self._values(pts), single)

    def fourier(self, x):
        pts, single = _batch(x, self.dim)
        return _finish(self._transform(pts), single)

    def __call__(self, y):
        return self.evaluate(y)

    def profile(self, r) -> np.ndarray:
        """g(r) = phi(r e_1); meaningful for radial functions."""
        r = np.abs(np.atleast_1d(np.asarray(r, dtype=float)))
        pts = np.zeros((len(r), self.dim))
        pts[:, 0] = r
        return self._values(pts)

    def radial_derivatives(self, r: np.ndarray):
        """(g, g', g'', error) along the radius by central differences."""
        h = Config.FD_STEP
        g0, gp, gm = self.profile(r), self.profile(r + h), self.profile(r - h)
        gp2, gm2 = self.profile(r + 2 * h), self.profile(r - 2 * h)
        g1 = (gp - gm) / (2 * h)
        g2 = (gp - 2 * g0 + gm) / h**2
        g1_coarse = (gp2 - gm2) / (4 * h)
        g2_coarse = (gp2 - 2 * g0 + gm2) / (4 * h**2)
        error = float(max(np.max(np.abs(g1 - g1_coarse)), np.max(np.abs(g2 - g2_coarse))))
        return g0, g1, g2, error

    def max_abs(self) -> float:
        return decay_constant(self, 0)

    def tail_integral(self, rho: float) -> Optional[float]:
        """int_rho^inf max{1,s}^d (-Phi'(s)) ds for a radial decreasing majorant Phi of |phi|.

        None when no closed envelope is known.
        """
        return None

    def norm_extent(self) -> Tuple[float, float]:
        """(radius, pitch) of the radial grid used for sups."""
        if self.support_radius is not None:
            return self.support_radius, Config.NORM_GRID_PITCH
        return Config.DECAY_SCAN_RADIUS, Config.DECAY_SCAN_PITCH


class GaussianModulated(TestFunction):
    """phi(y) = A exp(-pi a |y - y0|^2) exp(2 pi i <x0, y>)."""

    kind = "gaussian"

    def __init__(self, scale: float = 1.0, center=None, modulation=None, amplitude: complex = 1.0, dim: int = 1):
        super().__init__(dim)
        if not scale > 0:
            raise ConfigurationError("Gaussian scale must be positive")
        self.scale = float(scale)
        self.center = np.zeros(dim) if center is None else as_point(center, dim)
        self.modulation = np.zeros(dim) if modulation is None else as_point(modulation, dim)
        self.amplitude = complex(amplitude)
        self.radial = not (np.any(self.center) or np.any(self.modulation))

    def _values(self, pts):
        diff = pts - self.center
        return (
            self.amplitude
            * np.exp(-np.pi * self.scale * np.sum(diff * diff, axis=1))
            * np.exp(2j * np.pi * pts @ self.modulation)
        )

    def _transform(self, pts):
        diff = pts - self.modulation
        d = self.dim
        return (
            self.amplitude
            * self.scale ** (-d / 2)
            * np.exp(-np.pi * np.sum(diff * diff, axis=1) / self.scale)
            * np.exp(-2j * np.pi * diff @ self.center)
        )

    def transform(self) -> "GaussianModulated":
        """phi-hat as a Gaussian: shift becomes modulation and modulation becomes shift."""
        a, d = self.scale, self.dim
        amplitude = self.amplitude * a ** (-d / 2) * np.exp(2j * np.pi * self.modulation @ self.center)
        return GaussianModulated(1.0 / a, self.modulation, -self.center, amplitude, d)

    def derivatives(self, pts: np.ndarray):
        """(phi, gradient (n, d), Hessian (n, d, d)) in closed form."""
        values = self._values(pts)
        g = -2 * np.pi * self.scale * (pts - self.center) + 2j * np.pi * self.modulation
        grad = values[:, None] * g
        hess = values[:, None, None] * (
            g[:, :, None] * g[:, None, :] - 2 * np.pi * self.scale * np.eye(self.dim)
        )
        return values, grad, hess

    def radial_derivatives(self, r):
        a = self.scale
        g0 = self.amplitude * np.exp(-np.pi * a * r * r)
        return g0, -2 * np.pi * a * r * g0, (4 * np.pi**2 * a * a * r * r - 2 * np.pi * a) * g0, 0.0

    def half_width(self) -> float:
        return Config.GAUSSIAN_TAIL_SIGMAS / np.sqrt(2 * np.pi * self.scale)

    def max_abs(self) -> float:
        return abs(self.amplitude)

    def norm_extent(self):
        return float(np.linalg.norm(self.center)) + self.half_width(), Config.NORM_GRID_PITCH

    def tail_integral(self, rho):
        a, c, d = self.scale, float(np.linalg.norm(self.center)), self.dim
        start = max(rho, c)
        integrand = lambda s: max(1.0, s) ** d * 2 * np.pi * a * (s - c) * np.exp(-np.pi * a * (s - c) ** 2)
        value, _ = _quad(integrand, start, np.inf)
        return abs(self.amplitude) * value

    def to_dict(self):
        return {
            "kind": self.kind,
            "dim": self.dim,
            "scale": self.scale,
            "center": self.center.tolist(),
            "modulation": self.modulation.tolist(),
            "amplitude": list(to_pair(self.amplitude)),
        }


class RadialBump(TestFunction):
    """Compactly supported radial function given by a profile g on [0, support)."""

    radial = True

    def __init__(self, dim: int, support: float):
        super().__init__(dim)
        self.support_radius = float(support)
        self._hat: Dict[float, float] = {}

    @abstractmethod
    def radial_profile(self, s):
        pass

    def profile(self, r):
        return self.radial_profile(np.abs(np.atleast_1d(np.asarray(r, dtype=float)))).astype(complex)

    def _values(self, pts):
        return self.profile(np.linalg.norm(pts, axis=1))

    def _radial_hat(self, xi: float) -> float:
        if xi not in self._hat:
            self._hat[xi] = radial_transform(self.radial_profile, self.support_radius, xi, self.dim)
        return self._hat[xi]

    def _transform(self, pts):
        norms = np.round(np.linalg.norm(pts, axis=1), 12)
        unique, inverse = np.unique(norms, return_inverse=True)
        values = np.array(parallel_map(self._radial_hat, [float(u) for u in unique]))
        return values[inverse.reshape(-1)].astype(complex)

    def integral(self) -> float:
        return radial_integral(self.radial_profile, self.support_radius, self.dim)

    def tail_integral(self, rho):
        if rho >= self.support_radius:
            return 0.0
        return self.max_abs() * max(1.0, self.support_radius) ** self.dim


class PlateauBump(RadialBump):
    """Equal to 1 on B(0, r_in), supported in B(0, r_out), smooth-step glue between."""

    kind = "plateau"

    def __init__(self, r_in: float = 1.0, r_out: float = 2.0, dim: int = 1):
        if not 0 < r_in < r_out:
            raise ConfigurationError(f"plateau needs 0 < r_in < r_out, got {r_in}, {r_out}")
        super().__init__(dim, r_out)
        self.r_in, self.r_out = float(r_in), float(r_out)

    def radial_profile(self, s):
        return 1.0 - smooth_step((np.asarray(s, dtype=float) - self.r_in) / (self.r_out - self.r_in))

    def max_abs(self):
        return 1.0

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "r_in": self.r_in, "r_out": self.r_out}


class StandardBump(RadialBump):
    """psi(t) = exp(-1 / (1 - |t/rho|^2)) on B(0, rho)."""

    kind = "bump"

    def __init__(self, radius: float = 1.0, dim: int = 1):
        if not radius > 0:
            raise ConfigurationError("bump radius must be positive")
        super().__init__(dim, radius)
        self.radius = float(radius)

    def radial_profile(self, s):
        u = np.asarray(s, dtype=float) / self.radius
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    def max_abs(self):
        return float(np.exp(-1.0))

    def l2_squared(self) -> float:
        return radial_integral(lambda s: self.radial_profile(s) ** 2, self.radius, self.dim)

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "radius": self.radius}


class BumpAutocorrelation(RadialBump):
    """phi = psi * conj(psi(-.)) for a standard bump psi; phi-hat = |psi-hat|^2 >= 0."""

    kind = "autocorr"

    def __init__(self, base: Optional[StandardBump] = None, dim: int = 1):
        base = base or StandardBump(1.0, dim)
        super().__init__(base.dim, 2 * base.radius)
        self.base = base
        self._profile_cache: Dict[float, float] = {}

    def _profile_at(self, s: float) -> float:
        if s in self._profile_cache:
            return self._profile_cache[s]
        rho = self.base.radius
        if s >= 2 * rho:
            value = 0.0
        else:
            psi = lambda r: float(self.base.radial_profile(r))
            lo, hi = max(-rho, s - rho), min(rho, s + rho)
            if self.dim == 1:
                value, _ = _quad(lambda t: psi(abs(s - t)) * psi(abs(t)), lo, hi)
            else:
                half = lambda t1: np.sqrt(max(0.0, rho * rho - max(t1 * t1, (t1 - s) ** 2)))
                if self.dim == 2:
                    func = lambda t2, t1: psi(np.hypot(s - t1, t2)) * psi(np.hypot(t1, t2))
                    ranges = [lambda t1: (-half(t1), half(t1)), (lo, hi)]
                else:
                    func = lambda t3, t2, t1: psi(np.sqrt((s - t1) ** 2 + t2 * t2 + t3 * t3)) * psi(
                        np.sqrt(t1 * t1 + t2 * t2 + t3 * t3)
                    )
                    inner = lambda t2, t1: np.sqrt(max(0.0, half(t1) ** 2 - t2 * t2))
                    ranges = [
                        lambda t2, t1: (-inner(t2, t1), inner(t2, t1)),
                        lambda t1: (-half(t1), half(t1)),
                        (lo, hi),
                    ]
                value, _ = integrate.nquad(func, ranges, opts={"epsabs": Config.QUADRATURE_TOL, "epsrel": 1e-10})
        self._profile_cache[s] = value
        return value

    def radial_profile(self, s):
        s = np.abs(np.atleast_1d(np.asarray(s, dtype=float)))
        return np.array([self._profile_at(float(v)) for v in s])

    def _transform(self, pts):
        return np.abs(self.base._transform(pts)) ** 2 + 0j

    def max_abs(self):
        # phi(0) = int psi^2 is the maximum by Cauchy-Schwarz
        return self.base.l2_squared()

    def norm_extent(self):
        radius = self.support_radius
        pitch = Config.NORM_GRID_PITCH if self.dim == 1 else radius / 200
        return radius, pitch

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "radius": self.base.radius}


class FourierImage(TestFunction):
    """phi-hat viewed as a test function; its own transform is phi(-x)."""

    kind = "fourier_image"

    def __init__(self, source: TestFunction):
        super().__init__(source.dim)
        self.source = source
        self.radial = source.radial

    def _values(self, pts):
        return self.source._transform(pts)

    def _transform(self, pts):
        return self.source._values(-pts)

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "of": self.source.to_dict()}


class LinearCombination(TestFunction):
    """sum_k c_k phi_k."""

    kind = "combination"

    def __init__(self, terms: Sequence[Tuple[complex, TestFunction]]):
        if not terms:
            raise ConfigurationError("a combination needs at least one term")
        dims = {phi.dim for _, phi in terms}
        if len(dims) != 1:
            raise ConfigurationError("combined test functions must share a dimension")
        super().__init__(dims.pop())
        self.terms = [(complex(c), phi) for c, phi in terms]

    def _values(self, pts):
        return sum(c * phi._values(pts) for c, phi in self.terms)

    def _transform(self, pts):
        return sum(c * phi._transform(pts) for c, phi in self.terms)

    def tail_integral(self, rho):
        parts = [phi.tail_integral(rho) for _, phi in self.terms]
        if any(p is None for p in parts):
            return None
        return sum(abs(c) * p for (c, _), p in zip(self.terms, parts))

    def to_dict(self):
        return {
            "kind": self.kind,
            "dim": self.dim,
            "terms": [{"c": list(to_pair(c)), "phi": phi.to_dict()} for c, phi in self.terms],
        }


def test_function_from_dict(data: dict) -> TestFunction:
    """Build from { "kind": "gaussian"|"plateau"|"autocorr"|"bump", parameters as named }."""
    try:
        kind = data["kind"]
        dim = int(data.get("dim", 1))
        if kind == "gaussian":
            amplitude = data.get("amplitude", 1.0)
            return GaussianModulated(
                float(data.get("scale", 1.0)),
                data.get("center"),
                data.get("modulation"),
                complex(*amplitude) if isinstance(amplitude, (list, tuple)) else complex(amplitude),
                dim,
            )
        if kind == "plateau":
            return PlateauBump(float(data.get("r_in", 1.0)), float(data.get("r_out", 2.0)), dim)
        if kind == "autocorr":
            return BumpAutocorrelation(StandardBump(float(data.get("radius", 1.0)), dim))
        if kind == "bump":
            return StandardBump(float(data.get("radius", 1.0)), dim)
        if kind == "fourier_image":
            return FourierImage(test_function_from_dict(data["of"]))
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed test function: {exc}") from exc
    raise ConfigurationError(f"unknown test function kind {data.get('kind')!r}")


def evaluate(phi: TestFunction, y):
    return phi.evaluate(y)


def fourier(phi: TestFunction, x):
    return phi.fourier(x)


# Sups over R^d

def _refine_1d(objective, best: float, pitch: float, lower: float = 0.0) -> float:
    """Local maximum of ``objective`` near ``best``."""
    lo, hi = max(lower, best - pitch), best + pitch
    result = optimize.minimize_scalar(
        lambda r: -float(objective(np.array([r]))[0]), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-10},
    )
    return -float(result.fun)


def _radial_objective(phi: TestFunction, r: np.ndarray, m: int):
    g0, g1, g2, error = phi.radial_derivatives(r)
    terms = [np.abs(g0)]
    if m >= 1:
        terms.append(np.abs(g1))
    if m >= 2:
        terms.append(np.abs(g2))
        if phi.dim >= 2:
            safe = np.where(r > 0, r, 1.0)
            terms.append(np.where(r > 0, np.abs(g1) / safe, np.abs(g2)))
    weight = np.maximum(1.0, r**m)
    return weight * np.max(terms, axis=0), error


def _radial_norm(phi: TestFunction, m: int) -> SchwartzNormReport:
    # For radial g(|t|), the largest partial derivative of order <= 2 over all
    # directions is max(|g|, |g'|, |g''|, |g'/r|), attained along an axis.
    extent, pitch = phi.norm_extent()
    r = np.arange(0.0, extent + pitch, pitch)
    best, error, tail = 0.0, 0.0, 0.0
    for k in range(m + 1):
        values, err = _radial_objective(phi, r, k)
        error = max(error, err)
        idx = int(np.argmax(values))
        refined = _refine_1d(lambda x: _radial_objective(phi, x, k)[0], float(r[idx]), pitch)
        best = max(best, float(values[idx]), refined)
    if isinstance(phi, GaussianModulated):
        tail = _gaussian_tail(phi, m)
    return SchwartzNormReport(m=m, value=best, grid_pitch=pitch, tail_bound=tail, derivative_error=error)


def _gaussian_objective(phi: GaussianModulated, pts: np.ndarray, m: int) -> np.ndarray:
    values, grad, hess = phi.derivatives(pts)
    out = np.abs(values)
    if m >= 1:
        out = np.maximum(out, np.max(np.abs(grad), axis=1))
    if m >= 2:
        out = np.maximum(out, np.max(np.abs(hess).reshape(len(pts), -1), axis=1))
    return np.maximum(1.0, np.linalg.norm(pts, axis=1) ** m) * out


def _gaussian_tail(phi: GaussianModulated, m: int) -> float:
    """Bound on the norm objective at distance >= half width from the center."""
    a, hw = phi.scale, phi.half_width()
    c, mod = float(np.linalg.norm(phi.center)), float(np.linalg.norm(phi.modulation))
    s = hw + np.linspace(0.0, 10 * hw, 400)
    p1 = 2 * np.pi * a * s + 2 * np.pi * mod
    derivative = np.maximum.reduce([np.ones_like(s), p1, p1 * p1 + 2 * np.pi * a])
    bound = abs(phi.amplitude) * np.exp(-np.pi * a * s * s) * np.maximum(1.0, (c + s) ** m) * derivative
    return float(bound.max())


def _gaussian_grid_norm(phi: GaussianModulated, m: int) -> SchwartzNormReport:
    d, hw = phi.dim, phi.half_width()
    pitch = Config.NORM_GRID_PITCH
    per_axis = int(np.ceil(2 * hw / pitch)) + 1
    if per_axis**d > Config.NORM_GRID_MAX_POINTS:
        per_axis = int(Config.NORM_GRID_MAX_POINTS ** (1.0 / d))
        pitch = 2 * hw / (per_axis - 1)
    axes = [np.linspace(c - hw, c + hw, per_axis) for c in phi.center]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    best = 0.0
    for k in range(m + 1):
        values = _gaussian_objective(phi, grid, k)
        idx = int(np.argmax(values))
        result = optimize.minimize(
            lambda p: -float(_gaussian_objective(phi, p.reshape(1, d), k)[0]),
            grid[idx],
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14},
        )
        best = max(best, float(values[idx]), -float(result.fun))
    return SchwartzNormReport(m=m, value=best, grid_pitch=pitch, tail_bound=_gaussian_tail(phi, m))


def schwartz_norm(phi: TestFunction, m: int) -> SchwartzNormReport:
    """N_m(phi) = sup_t max{1, |t|^m} max_{|k| <= m} |D^k phi(t)| for m in {0, 1, 2}."""
    if m not in (0, 1, 2):
        raise ConfigurationError(f"norm order must be 0, 1 or 2, got {m}")
    if phi.radial:
        return _radial_norm(phi, m)
    if isinstance(phi, GaussianModulated):
        return _gaussian_grid_norm(phi, m)
    raise ConfigurationError(f"Schwartz norms are not available for {phi.kind} test functions")


def decay_constant(phi: TestFunction, power: int) -> float:
    """C2 = sup_t |phi(t)| max{1, |t|}^power."""
    key = f"decay:{power}"
    if key in phi._cache:
        return phi._cache[key]
    if isinstance(phi, GaussianModulated):
        # the sup lies on the ray through the center
        a, c = phi.scale, float(np.linalg.norm(phi.center))
        extent = c + phi.half_width() + np.sqrt(power / (2 * np.pi * a))
        objective = lambda s: abs(phi.amplitude) * np.exp(-np.pi * a * (s - c) ** 2) * np.maximum(1.0, s) ** power
        pitch = Config.NORM_GRID_PITCH
    elif phi.radial:
        extent, pitch = phi.norm_extent()
        objective = lambda s: np.abs(phi.profile(s)) * np.maximum(1.0, s) ** power
    else:
        raise ConfigurationError(f"decay constants need a radial or Gaussian test function, got {phi.kind}")
    s = np.arange(0.0, extent + pitch, pitch)
    values = objective(s)
    idx = int(np.argmax(values))
    value = max(float(values[idx]), _refine_1d(objective, float(s[idx]), pitch))
    phi._cache[key] = value
    logger.debug("decay constant of %s at power %d: %.6g", phi.kind, power, value)
    return value


# Measures against test functions

def convolve_measure(
    mu: AtomicMeasure, phi: TestFunction, x, c1: Optional[float] = None
) -> ConvolutionValue:
    """(mu * phi)(x) = sum a_lambda phi(x - lambda) over the window's atoms.

    Atoms outside the window lie at distance >= rho = W - |x| from x, so their
    contribution is at most C1 int_rho^inf max{1,s}^d (-Phi'(s)) ds where Phi
    is a radial decreasing majorant of |phi| and C1 is the growth constant at x.
    """
    if phi.dim != mu.dim:
        raise ConfigurationError("test function and measure dimensions differ")
    x = as_point(x, mu.dim)
    value = complex(np.sum(mu.masses * phi._values(x - mu.points))) if len(mu) else 0j
    rho = mu.window_radius - float(np.linalg.norm(x))
    if rho <= 0:
        tail = float("inf")
    else:
        integral = phi.tail_integral(rho)
        if integral is None:
            integral = (mu.dim + 1) * decay_constant(phi, mu.dim + 1) / max(1.0, rho)
        c1 = growth_constant(mu, [x]) if c1 is None else c1
        tail = c1 * integral
    return ConvolutionValue(point=x.tolist(), value=to_pair(value), tail_bound=tail)


def prop3_certificate(mu: AtomicMeasure, phi: TestFunction, sample_points) -> Prop3Certificate:
    """Check |(mu * phi)(x)| <= (d+1) C1 C2 at the sample points."""
    growth = looks_translation_bounded(mu)
    if not is_translation_bounded(growth, mu.dim):
        raise NotTranslationBoundedError(
            f"growth fit slope {growth.slope:.3g} (residual {growth.residual:.3g}) does not look "
            f"translation bounded in dimension {mu.dim}"
        )
    samples = as_points(sample_points, mu.dim)
    if len(samples) == 0:
        raise ConfigurationError("at least one sample point is required")
    d = mu.dim
    c1 = growth_constant(mu, samples)
    c2 = decay_constant(phi, d + 1)
    bound = (d + 1) * c1 * c2
    values = parallel_map(
        lambda x: abs(complex(np.sum(mu.masses * phi._values(x - mu.points)))) if len(mu) else 0.0,
        list(samples),
    )
    observed = float(max(values))
    logger.info("---PROP3 CERTIFICATE--- C1=%.4g C2=%.4g bound=%.4g observed=%.4g", c1, c2, bound, observed)
    return Prop3Certificate(
        c1=c1,
        c2=c2,
        bound=bound,
        observed_sup=observed,
        margin=bound - observed,
        samples=len(samples),
        holds=observed <= bound,
    )


def _certified_radius(phi: BumpAutocorrelation, eta: float, lipschitz: float) -> float:
    """Largest r on the radial grid with phi-hat > eta on B(0, r), Lipschitz slack included."""
    s_max = 2.0 / phi.base.radius
    s = np.linspace(0.0, s_max, Config.PROP2_SCAN_POINTS)
    pitch = s[1] - s[0]
    pts = np.zeros((len(s), phi.dim))
    pts[:, 0] = s
    values = phi._transform(pts).real
    ok = values - lipschitz * pitch / 2 > eta
    if not ok[0]:
        raise CheckFailedError("phi-hat does not exceed eta near the origin; quadrature is broken")
    failing = np.flatnonzero(~ok)
    if len(failing) == 0:
        return float(s[-1])
    return float(s[failing[0] - 1] + pitch / 2)


def prop2_certificate(psi: StandardBump, mu: AtomicMeasure, mu_hat: AtomicMeasure, trial_centers) -> Prop2Certificate:
    """Certificate that mu(B(t, r)) <= eta^-1 max|phi| |mu-hat|(B(0, 2 rho)) at every trial center."""
    if not isinstance(psi, StandardBump):
        raise ConfigurationError("the base function must be a StandardBump")
    if psi.dim != mu.dim or mu_hat.dim != mu.dim:
        raise ConfigurationError("bump and measures must share a dimension")
    if not mu.is_nonnegative:
        raise ConfigurationError("the certificate needs a nonnegative measure")
    phi = BumpAutocorrelation(psi)
    if mu_hat.window_radius < phi.support_radius:
        raise ConfigurationError(
            f"the spectrum window {mu_hat.window_radius} must cover B(0, {phi.support_radius})"
        )
    d = mu.dim
    peak = float(phi.fourier(np.zeros(d)).real)
    if peak <= 0:
        raise CheckFailedError("max of phi-hat is not positive; quadrature is broken")
    eta = peak / 2
    # |grad phi-hat| <= 2 pi int |t| phi(t) dt <= 2 pi * 2 rho * int phi = 4 pi rho phi-hat(0)
    lipschitz = 4 * np.pi * psi.radius * peak
    r = _certified_radius(phi, eta, lipschitz)

    axis = np.linspace(-r, r, Config.PROP2_BALL_GRID)
    ball = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    ball = ball[np.linalg.norm(ball, axis=1) < r]
    if np.any(phi._transform(ball).real <= eta):
        raise CheckFailedError(f"phi-hat drops below eta inside B(0, {r})")

    max_phi = phi.max_abs()
    hat_mass = float(radial_profile(mu_hat, np.zeros(d), [phi.support_radius])[0])
    bound = max_phi * hat_mass / eta
    centers = as_points(trial_centers, d)
    masses = [float(radial_profile(mu, c, [r])[0]) for c in centers]
    max_mass = max(masses) if masses else 0.0
    logger.info("---PROP2 CERTIFICATE--- eta=%.4g r=%.4g bound=%.4g max=%.4g", eta, r, bound, max_mass)
    return Prop2Certificate(
        eta=eta,
        r=r,
        x0=[0.0] * d,
        max_phi=max_phi,
        hat_mu_ball_mass=hat_mass,
        lipschitz=lipschitz,
        bound=bound,
        max_ball_mass=max_mass,
        margin=bound - max_mass,
        trials=len(centers),
        holds=max_mass <= bound,
    )
