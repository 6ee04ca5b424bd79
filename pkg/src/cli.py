"""
Command-line entry point.

Every subcommand reads a JSON config, writes a JSON report and, where a
radius series exists, an optional ``r,value`` CSV. Exit codes: 0 pass,
1 check failed, 2 configuration error, 3 resource cap.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from .almost_periodic import (
    TrigPolynomial,
    almost_periods,
    bohr_coefficient,
    convolution_fourier_coefficients,
    parseval_check,
)
from .config import Config
from .errors import ConfigurationError, CrystalLabError
from .harness import poisson_check, theorem2_harness, theorem3_harness
from .kronecker import (
    KroneckerInstance,
    certificate_check,
    independent_instance,
    power_expansion,
    relation_check,
    solve,
)
from .lattice import LatticeCombSpec, fourier_of_spec, realize_measure
from .measure import AtomicMeasure, growth_exponent, translation_bound_estimate
from .reporting import print_summary, save_series_to_csv, write_report
from .schwartz import (
    GaussianModulated,
    PlateauBump,
    StandardBump,
    prop2_certificate,
    prop3_certificate,
    test_function_from_dict,
)

logger = logging.getLogger(__name__)

Series = Optional[Tuple[List[float], List[float]]]
Outcome = Tuple[object, bool, Series]


def _load_json(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must hold a JSON object")
    return data


def _resolve(value, base: Path) -> dict:
    """Inline object, or a path relative to the config file."""
    if isinstance(value, str):
        path = Path(value)
        if not path.is_absolute() and not path.exists():
            path = base / path
        return _load_json(path)
    if not isinstance(value, dict):
        raise ConfigurationError("expected an object or a path to one")
    return value


def _spec(config: dict, base: Path) -> LatticeCombSpec:
    if "spec" not in config:
        raise ConfigurationError("the config needs a 'spec'")
    return LatticeCombSpec.from_dict(_resolve(config["spec"], base))


def _measure(config: dict, base: Path, window: Optional[float] = None) -> AtomicMeasure:
    if "measure" in config:
        return AtomicMeasure.from_dict(_resolve(config["measure"], base))
    spec = _spec(config, base)
    return realize_measure(spec, max(window or 0.0, spec.window_radius))


def _polynomial(config: dict, base: Path) -> TrigPolynomial:
    if "polynomial" not in config:
        raise ConfigurationError("the config needs a 'polynomial'")
    return TrigPolynomial.from_dict(_resolve(config["polynomial"], base))


def _instance(config: dict, base: Path) -> KroneckerInstance:
    return KroneckerInstance.from_dict(_resolve(config.get("instance", config), base))


def _random_points(rng: np.random.Generator, count: int, half: float, dim: int) -> np.ndarray:
    return rng.uniform(-half, half, size=(count, dim))


# Subcommands

def cmd_poisson_check(config: dict, base: Path, args) -> Outcome:
    spec = _spec(config, base)
    functions = [test_function_from_dict(f) for f in config.get("test_functions", [])] or None
    report = poisson_check(spec, functions)
    return report, report.passed, None


def cmd_growth(config: dict, base: Path, args) -> Outcome:
    radii = config.get("radii") or np.geomspace(10.0, 100.0, 12).tolist()
    mu = _measure(config, base, window=max(radii) * 1.01)
    report = growth_exponent(mu, radii)
    expected = config.get("expect_polynomial")
    passed = True if expected is None else report.polynomial == bool(expected)
    return report, passed, (report.radii, report.variations)


def cmd_translation_bound(config: dict, base: Path, args) -> Outcome:
    mu = _measure(config, base)
    report = translation_bound_estimate(mu, float(config.get("ball_radius", 1.0)))
    bound = config.get("bound")
    return report, bound is None or report.sup_estimate <= float(bound), None


def cmd_bohr(config: dict, base: Path, args) -> Outcome:
    R = config.get("R")
    if "spec" in config:
        spec = _spec(config, base)
        phi = test_function_from_dict(config.get("test_function", {"kind": "plateau", "dim": spec.dim}))
        mu_hat = fourier_of_spec(spec, max(spec.window_radius, (phi.support_radius or 0.0) + 1.0))
        probes = config.get("frequencies") or mu_hat.points[mu_hat.norms < (phi.support_radius or 1.0)].tolist()
        report = convolution_fourier_coefficients(realize_measure(spec), mu_hat, phi, probes, R)
        return report, all(c.agrees for c in report.checks), None
    polynomial = _polynomial(config, base)
    frequencies = config.get("frequencies") or polynomial.frequencies.tolist()
    estimates = [bohr_coefficient(polynomial, w, R, config.get("center")) for w in frequencies]
    return {"estimates": [e.model_dump(mode="json") for e in estimates]}, True, None


def cmd_parseval(config: dict, base: Path, args) -> Outcome:
    report = parseval_check(_polynomial(config, base), config.get("schedule"), config.get("center"))
    return report, report.within_bound, ([p.radius for p in report.points], [p.mean_square for p in report.points])


def cmd_almost_periods(config: dict, base: Path, args) -> Outcome:
    try:
        epsilon = float(config["epsilon"])
        scan_range = float(config.get("scan_range", 10.0))
        scan_pitch = float(config.get("scan_pitch", 1e-3))
    except KeyError as exc:
        raise ConfigurationError("almost-periods needs an 'epsilon'") from exc
    report = almost_periods(_polynomial(config, base), epsilon, scan_range, scan_pitch)
    return report, True, None


def cmd_kronecker_solve(config: dict, base: Path, args) -> Outcome:
    solution = solve(_instance(config, base), seed=args.seed, pool_size=config.get("pool_size"))
    return solution, solution.success, None


def cmd_kronecker_relations(config: dict, base: Path, args) -> Outcome:
    report = relation_check(_instance(config, base), config.get("height"))
    return report, True, None


def cmd_kronecker_certify(config: dict, base: Path, args) -> Outcome:
    q = args.q if args.q is not None else int(config.get("q", 2))
    if args.N is not None:
        inst, independent = independent_instance(args.N), True
    else:
        inst, independent = _instance(config, base), bool(config.get("independent", False))
    expansion = power_expansion(inst, q)
    check = certificate_check(expansion, independent)
    report = {
        "n": expansion.n,
        "q": expansion.q,
        "entries": len(expansion.entries),
        "collisions": expansion.collisions,
        "independent": independent,
        **check.model_dump(mode="json"),
    }
    return report, check.passes, None


def cmd_theorem2(config: dict, base: Path, args) -> Outcome:
    spec = _spec(config, base)
    plateau = config.get("plateau", {})
    phi = PlateauBump(float(plateau.get("r_in", 1.0)), float(plateau.get("r_out", 2.0)), spec.dim)
    centers = config.get("centers")
    if isinstance(centers, int):
        rng = np.random.default_rng(args.seed)
        centers = _random_points(rng, centers, spec.window_radius / 2, spec.dim)
    report = theorem2_harness(spec, phi, centers, config.get("schedule"), seed=args.seed)
    return report, report.passed, None


def cmd_theorem3(config: dict, base: Path, args) -> Outcome:
    spec = _spec(config, base)
    report = theorem3_harness(spec, config.get("eta"), seed=args.seed)
    return report, report.passed, None


def cmd_prop2(config: dict, base: Path, args) -> Outcome:
    spec = _spec(config, base)
    psi = StandardBump(float(config.get("radius", 1.0)), spec.dim)
    rng = np.random.default_rng(args.seed)
    trials = _random_points(rng, int(config.get("trials", 100)), spec.window_radius / 2, spec.dim)
    report = prop2_certificate(psi, realize_measure(spec), fourier_of_spec(spec), trials)
    return report, report.holds, None


def cmd_prop3(config: dict, base: Path, args) -> Outcome:
    spec = _spec(config, base)
    raw = config.get("test_function")
    phi = test_function_from_dict(raw) if raw else GaussianModulated(dim=spec.dim)
    rng = np.random.default_rng(args.seed)
    probes = _random_points(rng, int(config.get("probes", 100)), spec.window_radius / 4, spec.dim)
    report = prop3_certificate(realize_measure(spec), phi, probes)
    return report, report.holds, None


COMMANDS: Dict[str, Callable[[dict, Path, argparse.Namespace], Outcome]] = {
    "poisson-check": cmd_poisson_check,
    "growth": cmd_growth,
    "translation-bound": cmd_translation_bound,
    "bohr": cmd_bohr,
    "parseval": cmd_parseval,
    "almost-periods": cmd_almost_periods,
    "kronecker-solve": cmd_kronecker_solve,
    "kronecker-certify": cmd_kronecker_certify,
    "kronecker-relations": cmd_kronecker_relations,
    "theorem2": cmd_theorem2,
    "theorem3": cmd_theorem3,
    "prop2": cmd_prop2,
    "prop3": cmd_prop3,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crystal-lab", description="Crystalline measures and Fourier quasicrystals lab")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", type=Path, help="JSON config for the subcommand")
        sub.add_argument("--output", type=Path, help="where to write the JSON report")
        sub.add_argument("--csv", type=Path, help="where to write the r,value series")
        sub.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
        sub.add_argument("--verbose", action="store_true")
        sub.add_argument("--quiet", action="store_true", help="skip the console summary")
        if name == "kronecker-certify":
            sub.add_argument("--N", type=int, help="number of independent frequencies sqrt(p_j)")
            sub.add_argument("--q", type=int, help="power of f")
    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        Config.validate()
        config = _load_json(args.config) if args.config else {}
        base = args.config.parent if args.config else Path(".")
        if args.command == "kronecker-certify" and args.N is not None and args.N < 1:
            raise ConfigurationError("--N must be positive")
        report, passed, series = COMMANDS[args.command](config, base, args)
    except CrystalLabError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"❌ invalid input: {exc}", file=sys.stderr)
        return ConfigurationError.exit_code

    output = args.output or Path("reports") / f"{args.command}.json"
    write_report(report, output)
    if args.csv and series is not None:
        save_series_to_csv(*series, args.csv)
    if not args.quiet:
        print_summary(args.command, report, passed)
        print(f"💾 Report saved to {output}")
    return 0 if passed else 1


def main():
    sys.exit(run_cli())
