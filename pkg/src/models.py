"""
Report and certificate models for the crystalline measures lab.

Complex numbers travel as ``[re, im]`` pairs and exact integers as decimal
strings so that every report serializes to plain JSON.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_serializer

ComplexPair = Tuple[float, float]
Vector = List[float]


def to_pair(z: complex) -> ComplexPair:
    z = complex(z)
    return (float(z.real), float(z.imag))


def from_pair(pair) -> complex:
    if isinstance(pair, (int, float, complex)):
        return complex(pair)
    re, im = pair
    return complex(float(re), float(im))


# measure-core

class BallVariation(BaseModel):
    """Variation of a measure on an open ball."""

    center: Vector
    radius: float
    value: float = Field(..., ge=0.0, description="Sum of |mass| over atoms strictly inside the ball")
    truncated: bool = Field(
        ..., description="The ball leaves the window, so the value is only a lower bound"
    )


class TranslationBoundReport(BaseModel):
    """Supremum of ball variations over admissible centers."""

    ball_radius: float
    sup_estimate: float = Field(..., ge=0.0)
    argmax_center: Vector
    centers_scanned: int
    scan_radius: float = Field(..., description="Centers range over the open ball B(0, scan_radius)")
    exact: bool = Field(..., description="True for the d=1 sweep; d>=2 reports are certified lower bounds")
    grid_pitch: Optional[float] = None


class GrowthReport(BaseModel):
    """Log-log fit of |mu|(B(0, r)) against r."""

    radii: List[float]
    variations: List[float]
    fitted_exponent: Optional[float] = Field(
        None, description="Set only when the fit residual is below the polynomial threshold"
    )
    fitted_constant: Optional[float] = None
    slope: float = Field(..., description="Raw least-squares slope, reported even for non-polynomial growth")
    residual: float
    polynomial: bool
    dropped_radii: List[float] = Field(default_factory=list)


class PartialMassBound(BaseModel):
    """Cauchy-Bunyakovskii bound for the partial mass sum of a spectrum."""

    radius: float
    lhs: float
    rhs: float
    count: int
    holds: bool


# schwartz-kit

class ConvolutionValue(BaseModel):
    point: Vector
    value: ComplexPair
    tail_bound: float = Field(..., ge=0.0, description="Bound on the contribution of atoms outside the window")


class SchwartzNormReport(BaseModel):
    m: int
    value: float
    grid_pitch: float
    tail_bound: float = 0.0
    derivative_error: float = 0.0


class Prop2Certificate(BaseModel):
    """Positive-definite test function certificate for translation boundedness."""

    eta: float = Field(..., gt=0.0)
    r: float = Field(..., gt=0.0)
    x0: Vector
    max_phi: float = Field(..., gt=0.0)
    hat_mu_ball_mass: float
    lipschitz: float
    bound: float = Field(..., description="eta^-1 * max|phi| * |mu-hat|(B(0,2))")
    max_ball_mass: float
    margin: float
    trials: int
    holds: bool


class Prop3Certificate(BaseModel):
    """Uniform bound for mu * phi from translation growth and decay constants."""

    c1: float
    c2: float
    bound: float
    observed_sup: float
    margin: float
    samples: int
    holds: bool


# almost-periodic

class BohrEstimate(BaseModel):
    frequency: Vector
    value: ComplexPair
    averaging_radius: float
    center: Vector
    error_bound: float = Field(..., ge=0.0)
    method: str = Field(..., description="'closed-form' for trigonometric polynomials, 'quadrature' otherwise")


class ParsevalPoint(BaseModel):
    radius: float
    mean_square: float
    deviation: float
    bound: float


class ParsevalReport(BaseModel):
    center: Vector
    limit: float = Field(..., description="Sum of |a_omega|^2")
    points: List[ParsevalPoint]
    o_constant: float = Field(..., description="max over the schedule of R * bound(R)")
    extrapolated: float
    within_bound: bool


class AlmostPeriodReport(BaseModel):
    epsilon: float
    periods: List[Vector]
    scan_range: float
    scan_pitch: float
    max_gap: float
    inclusion_length: float
    candidates_accepted: int
    note: str = "relative density certified only within the scan range"


class CoefficientCheck(BaseModel):
    frequency: Vector
    bohr_value: ComplexPair
    expected: ComplexPair
    error: float
    error_bound: float
    agrees: bool


class RouteSample(BaseModel):
    point: Vector
    trig_value: ComplexPair
    direct_value: ComplexPair
    discrepancy: float
    tail_bound: float = Field(0.0, description="Truncation bound of the direct convolution")


class ConvolutionCoefficientReport(BaseModel):
    checks: List[CoefficientCheck]
    route_samples: List[RouteSample]
    route_tolerance: float
    averaging_radius: float


# kronecker

class RelationCheck(BaseModel):
    relations: List[List[int]]
    violations: List[List[int]]
    solvable: bool
    mode: str = Field(..., description="'exact' (rational null space) or 'heuristic' (bounded height)")
    theta_mode: str = Field(..., description="'exact' or 'numeric'")
    height: Optional[int] = None
    complete: bool


class KroneckerSolution(BaseModel):
    t: Vector
    p: List[int]
    residuals: List[float]
    max_residual: float
    success: bool
    backend: str
    f_modulus: float = Field(..., description="|f(t)| for f = 1 + sum exp(2 pi i (<x_j,t> - theta_j))")
    t_norm: float
    diagnosis: Optional[RelationCheck] = None


class PowerEntry(BaseModel):
    exponents: List[int]
    frequency: Vector
    multinomial: int
    phase: float
    phase_exact: Optional[str] = None
    coefficient: ComplexPair

    @field_serializer("multinomial")
    def _multinomial_as_string(self, value: int) -> str:
        return str(value)


class MergedTerm(BaseModel):
    frequency: Vector
    coefficient: ComplexPair
    multiplicity: int


class PowerExpansionReport(BaseModel):
    q: int
    n: int
    entries: List[PowerEntry]
    merged: List[MergedTerm]
    collisions: int


class CertificateCheck(BaseModel):
    sum_abs: str
    target: str
    deficit: str
    exact: bool
    strict_deficit: bool
    passes: bool


# experiments

class PoissonRow(BaseModel):
    test_function: dict
    lhs: ComplexPair
    rhs: ComplexPair
    residual: float
    tail_bound: float
    passed: bool


class PoissonReport(BaseModel):
    spec_id: str
    spatial_window: float
    spectral_window: float
    rows: List[PoissonRow]
    max_residual: float
    passed: bool


class CenterCheck(BaseModel):
    center: Vector
    nu_ball: float
    chain_middle: float
    parseval_limit: float
    passed: bool


class TemperedFit(BaseModel):
    partial_mass_exponent: float
    count_exponent: float
    bound: float
    holds: bool
    cauchy_bunyakovskii_holds: bool


class Theorem2Report(BaseModel):
    spec_id: str
    nu_translation_bound: TranslationBoundReport
    parseval_constant: float = Field(..., description="Largest per-center Parseval limit")
    parseval_constant_origin: float
    direct_mean_square: float = Field(..., description="Mean of |mu * phi-hat|^2 over a grid of direct convolutions")
    direct_error_bound: float
    direct_agrees: bool
    centers_checked: int
    centers_passed: int
    max_chain_gap: float
    tempered: TemperedFit
    checks: List[CenterCheck]
    passed: bool


class BallRecord(BaseModel):
    center: Vector
    points: List[Vector]
    mass: float
    status: str = Field(..., description="'independent' or 'dependent'")
    relations: List[List[int]] = Field(default_factory=list)
    x: Optional[Vector] = None
    aligned_sum: Optional[float] = None
    plateau_sum: Optional[float] = None
    aligned: bool = False


class Theorem3Report(BaseModel):
    spec_id: str
    eta: float
    balls: List[BallRecord]
    prop3_ceiling: float
    max_half_mass: float
    max_plateau_sum: float
    conclusion: str
    passed: bool
