"""
Full-rank lattices, dual lattices and lattice-comb representations

    mu = sum_j sum_{x in L_j + lambda_j} [ sum_s beta_{j,s} exp(2 pi i <x, alpha_{j,s}>) ] delta_x

together with the closed form of their Fourier transforms.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .errors import ConfigurationError, ResourceLimitError, SingularLatticeError
from .measure import AtomicMeasure, as_point
from .models import from_pair, to_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice generated by the columns of ``basis``."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if basis.shape[0] != basis.shape[1] or basis.shape[0] not in (1, 2, 3):
            raise ConfigurationError(f"basis must be a square d x d matrix with d <= 3, got {basis.shape}")
        if not np.all(np.isfinite(basis)):
            raise ConfigurationError("basis entries must be finite")
        scale = float(np.prod(np.linalg.norm(basis, axis=0)))
        if scale == 0 or abs(np.linalg.det(basis)) <= Config.SINGULAR_TOL * scale:
            raise SingularLatticeError(f"basis {basis.tolist()} is singular")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]]) -> "Lattice":
        """Build from a list of basis vectors (the JSON form)."""
        return cls(np.asarray(vectors, dtype=float).T)

    @classmethod
    def integer(cls, dim: int, scale: float = 1.0) -> "Lattice":
        return cls(scale * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def covolume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    def vectors(self) -> List[List[float]]:
        return self.basis.T.tolist()

    def points_in_ball(self, radius: float, shift=None) -> Tuple[np.ndarray, np.ndarray]:
        """Points p = v + shift with v in the lattice and |p| < radius.

        Returns (points, lattice vectors v). Integer coordinates are enumerated in
        the axis-aligned box given by the rows of the inverse basis.
        """
        d = self.dim
        shift = np.zeros(d) if shift is None else as_point(shift, d)
        inverse = np.linalg.inv(self.basis)
        center = -inverse @ shift
        reach = np.linalg.norm(inverse, axis=1) * radius
        lo = np.floor(center - reach).astype(int)
        hi = np.ceil(center + reach).astype(int)
        box = int(np.prod(hi - lo + 1))
        if box > Config.MAX_ATOMS:
            raise ResourceLimitError(
                f"enumerating a ball of radius {radius} needs {box} lattice candidates "
                f"(cap {Config.MAX_ATOMS})"
            )
        axes = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
        coords = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        vectors = coords @ self.basis.T
        points = vectors + shift
        keep = np.linalg.norm(points, axis=1) < radius
        return points[keep], vectors[keep]


def dual_lattice(lattice: Lattice) -> Lattice:
    """L* = {y : <x, y> in Z for all x in L}, basis = inverse transpose."""
    return Lattice(np.linalg.inv(lattice.basis).T)


def same_lattice(first: Lattice, second: Lattice, tol: float = 1e-9) -> bool:
    """True when the change of basis between the two is integral and unimodular."""
    if first.dim != second.dim:
        return False
    change = np.linalg.solve(first.basis, second.basis)
    rounded = np.round(change)
    if np.max(np.abs(change - rounded)) > tol:
        return False
    return abs(round(np.linalg.det(rounded))) == 1


def shortest_vector(lattice: Lattice) -> float:
    """Length of the shortest nonzero lattice vector."""
    bound = float(np.min(np.linalg.norm(lattice.basis, axis=0))) * (1 + 1e-9)
    _, vectors = lattice.points_in_ball(bound)
    lengths = np.linalg.norm(vectors, axis=1)
    return float(lengths[lengths > 0].min())


@dataclass(frozen=True, eq=False)
class LatticeMode:
    beta: complex
    alpha: np.ndarray


@dataclass(frozen=True, eq=False)
class ShiftedLatticeTerm:
    lattice: Lattice
    shift: np.ndarray
    modes: Tuple[LatticeMode, ...]

    def __post_init__(self):
        if not self.modes:
            raise ConfigurationError("a lattice term needs at least one mode")
        d = self.lattice.dim
        object.__setattr__(self, "shift", as_point(self.shift, d))
        for mode in self.modes:
            if np.asarray(mode.alpha).reshape(-1).shape[0] != d:
                raise ConfigurationError("mode frequency dimension does not match the lattice")

    @property
    def alphas(self) -> np.ndarray:
        return np.array([np.asarray(m.alpha, dtype=float).reshape(-1) for m in self.modes])

    @property
    def betas(self) -> np.ndarray:
        return np.array([complex(m.beta) for m in self.modes])

    def mass_at(self, points: np.ndarray) -> np.ndarray:
        """sum_s beta_s exp(2 pi i <x, alpha_s>) at each point x."""
        phases = np.exp(2j * np.pi * points @ self.alphas.T)
        return phases @ self.betas


@dataclass(frozen=True, eq=False)
class LatticeCombSpec:
    dim: int
    terms: Tuple[ShiftedLatticeTerm, ...]
    window_radius: float
    spec_id: str = ""

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {self.dim}")
        if not self.window_radius > 0:
            raise ConfigurationError("window radius must be positive")
        for term in self.terms:
            if term.lattice.dim != self.dim:
                raise ConfigurationError("all terms must share the spec dimension")

    @classmethod
    def single(
        cls,
        basis=None,
        shift=None,
        modes: Optional[Sequence[Tuple[complex, Sequence[float]]]] = None,
        window: float = 50.0,
        dim: int = 1,
        spec_id: str = "",
    ) -> "LatticeCombSpec":
        """One-term spec; defaults give the unit Dirac comb."""
        lattice = Lattice(np.eye(dim) if basis is None else np.atleast_2d(np.asarray(basis, dtype=float)))
        dim = lattice.dim
        shift = np.zeros(dim) if shift is None else shift
        modes = modes or [(1.0, np.zeros(dim))]
        term = ShiftedLatticeTerm(
            lattice, shift, tuple(LatticeMode(complex(b), np.asarray(a, dtype=float).reshape(-1)) for b, a in modes)
        )
        return cls(dim, (term,), float(window), spec_id)

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeCombSpec":
        try:
            dim = int(data["dim"])
            terms = []
            for raw in data.get("terms", []):
                lattice = Lattice.from_vectors(raw["basis"])
                modes = tuple(
                    LatticeMode(from_pair(m["beta"]), np.asarray(m["alpha"], dtype=float).reshape(-1))
                    for m in raw["modes"]
                )
                terms.append(ShiftedLatticeTerm(lattice, raw.get("shift", [0.0] * dim), modes))
            return cls(dim, tuple(terms), float(data["window"]), str(data.get("id", "")))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"malformed lattice comb spec: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "id": self.spec_id,
            "dim": self.dim,
            "window": self.window_radius,
            "terms": [
                {
                    "basis": term.lattice.vectors(),
                    "shift": term.shift.tolist(),
                    "modes": [
                        {"beta": list(to_pair(m.beta)), "alpha": np.asarray(m.alpha).tolist()}
                        for m in term.modes
                    ],
                }
                for term in self.terms
            ],
        }

    def with_terms(self, terms) -> "LatticeCombSpec":
        return LatticeCombSpec(self.dim, tuple(terms), self.window_radius, self.spec_id)

    def scaled(self, factor: complex) -> "LatticeCombSpec":
        """Multiply every beta by ``factor``."""
        return self.with_terms(
            ShiftedLatticeTerm(
                t.lattice, t.shift, tuple(LatticeMode(m.beta * factor, m.alpha) for m in t.modes)
            )
            for t in self.terms
        )


def _check_cap(count: int) -> None:
    if count > Config.MAX_ATOMS:
        raise ResourceLimitError(f"{count} atoms exceed the cap of {Config.MAX_ATOMS}")


def realize_measure(spec: LatticeCombSpec, window: Optional[float] = None) -> AtomicMeasure:
    """Atoms of mu inside B(0, window); coincident points of different terms are merged."""
    window = float(window or spec.window_radius)
    points, masses, total = [], [], 0
    for term in spec.terms:
        pts, _ = term.lattice.points_in_ball(window, term.shift)
        total += len(pts)
        _check_cap(total)
        points.append(pts)
        masses.append(term.mass_at(pts))
    if not points:
        return AtomicMeasure.empty(spec.dim, window)
    logger.debug("realized %d atoms for spec %r", total, spec.spec_id)
    return AtomicMeasure.from_atoms(
        spec.dim, np.vstack(points), np.concatenate(masses), window, label=spec.spec_id
    )


def fourier_of_spec(spec: LatticeCombSpec, window: Optional[float] = None) -> AtomicMeasure:
    """Atoms of mu-hat inside B(0, window).

    Term j, mode s contributes mass beta_{j,s} exp(-2 pi i <lambda_j, gamma>) / covol(L_j)
    at alpha_{j,s} + gamma for every gamma in the dual lattice L_j*. Alphas that
    differ by a dual vector are the caller's business; near-coincident spectrum
    points are rejected by the atom merge.
    """
    window = float(window or spec.window_radius)
    points, masses, total = [], [], 0
    for term in spec.terms:
        dual = dual_lattice(term.lattice)
        covolume = term.lattice.covolume
        for mode in term.modes:
            pts, gammas = dual.points_in_ball(window, mode.alpha)
            total += len(pts)
            _check_cap(total)
            points.append(pts)
            masses.append(complex(mode.beta) * np.exp(-2j * np.pi * gammas @ term.shift) / covolume)
    if not points:
        return AtomicMeasure.empty(spec.dim, window)
    return AtomicMeasure.from_atoms(
        spec.dim, np.vstack(points), np.concatenate(masses), window, label=spec.spec_id
    )
