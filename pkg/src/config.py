"""
Configuration settings for the crystalline measures lab.
"""

import os

from dotenv import load_dotenv

from .errors import ConfigurationError

load_dotenv()


class Config:
    """Configuration class for the crystalline measures lab."""

    # Thread count (the only setting read from the environment)
    WORKERS: int = int(os.getenv("CRYSTAL_WORKERS", "1"))

    # Reproducibility
    DEFAULT_SEED: int = 20240817

    # Atomic measures
    NEAR_DUPLICATE_TOL: float = 1e-12
    ZERO_MASS_TOL: float = 1e-12
    MAX_ATOMS: int = 10**7
    MAX_SCAN_CENTERS: int = 200_000
    SCAN_PITCH_FRACTION: float = 0.25  # grid pitch / ball radius for d >= 2 sweeps

    # Growth fits
    GROWTH_RESIDUAL_THRESHOLD: float = 0.15
    GROWTH_RADIUS_RATIO: float = 1.05
    TRANSLATION_BOUNDED_SLACK: float = 0.1  # allowed excess of the fitted exponent over d

    # Lattices
    SINGULAR_TOL: float = 1e-12

    # Test functions and quadrature
    QUADRATURE_TOL: float = 1e-10
    QUADRATURE_LIMIT: int = 400
    FD_STEP: float = 1e-5
    NORM_GRID_PITCH: float = 1e-3
    NORM_GRID_MAX_POINTS: int = 400_000
    DECAY_SCAN_RADIUS: float = 200.0
    DECAY_SCAN_PITCH: float = 0.05
    GAUSSIAN_TAIL_SIGMAS: float = 8.0

    # Prop. 2
    PROP2_SCAN_POINTS: int = 400
    PROP2_BALL_GRID: int = 9

    # Almost periodic functions
    BOHR_RADIUS: float = 1e4
    PARSEVAL_SCHEDULE: tuple = (1e2, 1e3, 1e4)
    ROUTE_TOLERANCE: float = 1e-6
    ROUTE_SAMPLES: int = 4
    ROUTE_MEAN_HALF_WIDTH: float = 20.0
    ROUTE_MEAN_POINTS: int = 1001
    MAX_PERIOD_CANDIDATES: int = 2_000_000

    # Kronecker
    KRONECKER_STARTS: int = 64
    KRONECKER_ROUNDS: int = 3
    KRONECKER_MIN_POOL: int = 200_000
    KRONECKER_MAX_POOL: int = 4_000_000
    KRONECKER_CHUNK: int = 250_000
    RANK_PIVOT_TOL: float = 1e-10
    GRADIENT_TOL: float = 1e-12
    RELATION_HEIGHT: int = 6
    RELATION_MAX_CANDIDATES: int = 2_000_000
    RELATION_TOL: float = 1e-9
    POWER_EXPANSION_CAP: int = 10**7

    # Experiments
    POISSON_TOLERANCE: float = 1e-8
    POISSON_TAIL_TARGET: float = 1e-12
    GATE_SCALES: tuple = (0.5, 1.0, 2.0)
    THEOREM2_CENTERS: int = 1000
    CHAIN_AGREEMENT: float = 0.05
    TEMPERED_SLACK: float = 0.1
    DEFAULT_ETA: float = 0.4
    ALIGNMENT_EPS: float = 0.15  # cos(2*pi*0.15) > 1/2
    THEOREM3_PROBES: int = 8
    THEOREM3_INVENTORY_RADIUS: float = 10.0
    POISSON_MAX_WIDENINGS: int = 12

    @classmethod
    def validate(cls) -> bool:
        """Validate that the settings are usable."""
        if cls.WORKERS < 1:
            raise ConfigurationError("CRYSTAL_WORKERS must be a positive integer")
        if not 0 < cls.ALIGNMENT_EPS < 1 / 6:
            raise ConfigurationError("ALIGNMENT_EPS must lie in (0, 1/6) for the phase alignment")
        if cls.GROWTH_RADIUS_RATIO <= 1:
            raise ConfigurationError("GROWTH_RADIUS_RATIO must exceed 1")
        return True
