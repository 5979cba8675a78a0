import logging
import math
import time
from itertools import combinations_with_replacement
from typing import Optional

from ncft.core.config import settings
from ncft.core.exceptions import InvalidSpec, NcftError
from ncft.models.report import ALL_CHECKS, Report, RunConfig, SuiteConfig
from ncft.models.space import OperatorSpaceDesc, SpaceKind, format_exponent
from ncft.models.verdict import CheckResult
from ncft.services.bounds import check_theorem_bounds
from ncft.services.estimation import ConstantEstimator
from ncft.services.groups import build_group
from ncft.services.representations import compute_irreps
from ncft.services.verification import InequalityVerifier

logger = logging.getLogger(__name__)

HOLDER_DIMS = (2, 2)
MINKOWSKI_DIMS = (2, 2)


def _validate(config: SuiteConfig) -> list[OperatorSpaceDesc]:
    unknown = [check for check in config.checks if check not in ALL_CHECKS]
    if unknown:
        raise InvalidSpec(f"unknown checks {unknown}; expected a subset of {ALL_CHECKS}")
    needs_hy_range = {"hy", "invhy"} & set(config.checks) or config.estimates
    bad = [p for p in config.exponents if not 1 <= p <= 2]
    if bad and needs_hy_range:
        raise InvalidSpec(f"p must lie in [1, 2] for Hausdorff-Young checks and estimates, got {[format_exponent(p) for p in bad]}")
    return [OperatorSpaceDesc.parse(text) for text in config.spaces]


def _applies(check: str, space: OperatorSpaceDesc) -> bool:
    if space.kind == SpaceKind.SCALAR:
        return True
    if check == "plancherel":
        return space.exponent == 2
    if check == "linf-l1":
        return math.isinf(space.exponent)
    return True


def suite_all(
    config: SuiteConfig,
    verifier: Optional[InequalityVerifier] = None,
    estimator: Optional[ConstantEstimator] = None,
    run_config: Optional[RunConfig] = None,
) -> Report:
    """
    Run every requested check and estimate over the grid.

    Errors on one group are recorded and the run continues; the report's
    exit code reflects the worst outcome.
    """
    spaces = _validate(config)
    verifier = verifier or InequalityVerifier()
    estimator = estimator or ConstantEstimator()
    report = Report(
        version=settings.VERSION,
        config=run_config or RunConfig(
            command="suite",
            flags=config.model_dump(mode="json"),
            seed=config.seed,
            threads=settings.THREADS,
            tolerances=settings.tolerances(),
        ),
    )
    if not config.groups:
        return report

    started = time.perf_counter()
    logger.info(f"🚀 Suite over {len(config.groups)} groups, {len(spaces)} spaces, p in {[format_exponent(p) for p in config.exponents]}")
    for spec in config.groups:
        group_started = time.perf_counter()
        try:
            group = build_group(spec)
            table = compute_irreps(group, seed=config.seed)
            report.checks.extend(_group_checks(config, spaces, group, table, verifier))
            for kind in config.estimates:
                for space in spaces:
                    for p in config.exponents:
                        report.estimates.append(estimator.estimate(
                            kind, group, table, p, space,
                            level=config.level, budget=config.budget, seed=config.seed, trials=config.estimate_trials,
                        ))
        except NcftError as e:
            logger.error(f"❌ Suite failed on {spec}: {e}")
            report.errors.append(f"{spec}: {e}")
        report.timing[spec] = time.perf_counter() - group_started

    report.checks.extend(_matrix_checks(config, verifier))
    if report.estimates:
        report.bounds = check_theorem_bounds(report.estimates)
    report.timing["total"] = time.perf_counter() - started
    logger.info(f"✅ Suite finished: {len(report.checks)} checks, {len(report.estimates)} estimates, {report.violated} violated")
    return report


def _group_checks(config: SuiteConfig, spaces, group, table, verifier: InequalityVerifier) -> list[CheckResult]:
    results = []
    for space in spaces:
        for check in config.checks:
            if not _applies(check, space):
                logger.debug(f"Skipping {check} for {space.label}")
                continue
            if check == "plancherel":
                verdicts = verifier.check_plancherel(group, table, space, config.trials, config.seed)
                results.append(verifier.summarize(check, verdicts, group.label, space.label, 2.0))
            elif check == "parseval":
                verdicts = verifier.check_parseval(group, table, space, config.trials, config.seed)
                results.append(verifier.summarize(check, verdicts, group.label, space.label))
            elif check == "linf-l1":
                verdicts = verifier.check_linf_l1(group, table, space, config.trials, config.seed)
                results.append(verifier.summarize(check, verdicts, group.label, space.label, 1.0))
            elif check in ("hy", "invhy"):
                run = verifier.check_hausdorff_young if check == "hy" else verifier.check_inverse_hy
                for p in config.exponents:
                    verdicts = run(group, table, p, space, config.trials, config.seed)
                    results.append(verifier.summarize(check, verdicts, group.label, space.label, p))
    return results


def _matrix_checks(config: SuiteConfig, verifier: InequalityVerifier) -> list[CheckResult]:
    """Checks that depend only on exponents, run once per suite"""
    results = []
    if "holder" in config.checks:
        n1, n2 = HOLDER_DIMS
        for p in config.exponents:
            verdicts = verifier.check_holder_lemma(n1, n2, p, config.trials, config.seed)
            results.append(verifier.summarize("holder", verdicts, p=p))
    if "minkowski" in config.checks:
        k1, k2 = MINKOWSKI_DIMS
        for p1, p2 in combinations_with_replacement(sorted(set(config.exponents)), 2):
            verdicts = verifier.check_minkowski(p1, p2, k1, k2, config.trials, config.seed)
            result = verifier.summarize("minkowski", verdicts, p=p1)
            result.witness = {"p1": format_exponent(p1), "p2": format_exponent(p2), **(result.witness or {})}
            results.append(result)
    return results
