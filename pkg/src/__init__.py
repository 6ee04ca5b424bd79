"""
Crystalline measures lab package initialization.
"""

from .config import Config
from .kronecker import KroneckerInstance
from .lattice import Lattice, LatticeCombSpec
from .measure import AtomicMeasure
from .almost_periodic import TrigPolynomial

__version__ = "1.0.0"
__all__ = ["AtomicMeasure", "Lattice", "LatticeCombSpec", "TrigPolynomial", "KroneckerInstance", "Config"]
