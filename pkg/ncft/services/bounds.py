import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from ncft.core.config import settings
from ncft.models.space import OperatorSpaceDesc, SpaceKind, conjugate_exponent, format_exponent, inverse_exponent
from ncft.models.verdict import BoundFinding, BoundsReport, ConstantEstimate, DualityPair, EstimateKind

logger = logging.getLogger(__name__)

LOWER_BOUND_TOL = 1e-9

@dataclass(frozen=True)
class TheoremBound:
    rule: str
    bound: float
    conditional: bool = False


def _type_bounds(space: OperatorSpaceDesc, p: float) -> list[TheoremBound]:
    """Known upper bounds for the Fourier type constant at exponent p"""
    bounds: list[TheoremBound] = []
    dual = conjugate_exponent(p)
    conditional = space.kind == SpaceKind.DIAGLP
    if p == 1:
        bounds.append(TheoremBound("endpoint", 1.0))
    if space.kind == SpaceKind.SCALAR:
        bounds.append(TheoremBound("hausdorff-young", 1.0))
    else:
        r = space.exponent
        if p <= r <= dual:
            rule = "lebesgue-type-preservation" if conditional else "schatten-type-preservation"
            bounds.append(TheoremBound(rule, 1.0, conditional))
        if conditional:
            # DiagLp(n, r) sits inside Schatten(n, r)
            bounds.extend(
                TheoremBound(f"subspace:{found.rule}", found.bound, True)
                for found in _type_bounds(OperatorSpaceDesc.schatten(space.dim, r), p)
            )
            if r < p:
                bounds.append(TheoremBound("lp-power", space.dim ** (inverse_exponent(r) - inverse_exponent(p)), True))
    if p == 2:
        bounds.append(TheoremBound("sqrt-dimension", math.sqrt(space.vector_dim), conditional))
    return bounds


def theorem_bounds(kind: EstimateKind, space: OperatorSpaceDesc, p: float) -> list[TheoremBound]:
    """
    Upper bounds on the type constant C(p) or the cotype constant at p'.

    Cotype bounds for E are the type bounds for the dual space.
    """
    if kind == EstimateKind.cotype:
        return _type_bounds(space.dual(), p)
    return _type_bounds(space, p)


def _monotonicity_bounds(
    kind: EstimateKind, space: OperatorSpaceDesc, p1: float, exponents: Sequence[float]
) -> list[TheoremBound]:
    """C(p1) <= C(p2)^(p2'/p1') for p1 <= p2"""
    bounds = []
    dual_p1 = conjugate_exponent(p1)
    for p2 in sorted(set(exponents) | {2.0}):
        if p2 <= p1:
            continue
        power = 0.0 if math.isinf(dual_p1) else conjugate_exponent(p2) / dual_p1
        for found in theorem_bounds(kind, space, p2):
            bounds.append(TheoremBound(f"monotonicity:{found.rule}", found.bound ** power, found.conditional))
    return bounds


def best_bound(kind: EstimateKind, space: OperatorSpaceDesc, p: float) -> Optional[float]:
    bounds = theorem_bounds(kind, space, p) + _monotonicity_bounds(kind, space, p, [])
    return min((found.bound for found in bounds), default=None)


def check_theorem_bounds(results: Sequence[ConstantEstimate]) -> BoundsReport:
    """
    Compare estimates with the lower bound 1 and every applicable theorem bound.

    A flagged finding means a certified lower bound beat a proven upper
    bound; it is reported, never raised.
    """
    findings: list[BoundFinding] = []
    for index, estimate in enumerate(results):
        space = OperatorSpaceDesc.parse(estimate.space)
        findings.append(BoundFinding(
            estimate=index,
            rule="lower-bound",
            bound=1.0,
            value=estimate.value,
            flagged=estimate.value < 1.0 - LOWER_BOUND_TOL,
        ))
        siblings = [
            other.p for other in results
            if other.kind == estimate.kind and other.group == estimate.group and other.space == estimate.space
        ]
        for found in theorem_bounds(estimate.kind, space, estimate.p) + _monotonicity_bounds(
            estimate.kind, space, estimate.p, siblings
        ):
            limit = found.bound + settings.BOUND_TOL * max(1.0, found.bound)
            findings.append(BoundFinding(
                estimate=index,
                rule=found.rule,
                bound=found.bound,
                value=estimate.value,
                flagged=estimate.value > limit,
                conditional=found.conditional,
            ))

    pairs = []
    for estimate in results:
        if estimate.kind != EstimateKind.type:
            continue
        dual_label = OperatorSpaceDesc.parse(estimate.space).dual().label
        for other in results:
            if (
                other.kind == EstimateKind.cotype
                and other.group == estimate.group
                and other.p == estimate.p
                and other.space == dual_label
            ):
                pairs.append(DualityPair(
                    group=estimate.group,
                    p=estimate.p,
                    type_space=estimate.space,
                    type_value=estimate.value,
                    cotype_space=other.space,
                    cotype_value=other.value,
                ))

    flagged = sum(finding.flagged for finding in findings)
    if flagged:
        logger.error(f"❌ {flagged} estimates exceed a theorem bound")
    return BoundsReport(findings=findings, duality_pairs=pairs, flagged=flagged)


def estimate_rows(results: Sequence[ConstantEstimate]) -> list[dict]:
    """(group, kind, p, E, estimate, bound) rows for spreadsheet export"""
    rows = []
    for estimate in results:
        bound = best_bound(estimate.kind, OperatorSpaceDesc.parse(estimate.space), estimate.p)
        rows.append({
            "group": estimate.group,
            "kind": estimate.kind.value,
            "p": format_exponent(estimate.p),
            "E": estimate.space,
            "estimate": f"{estimate.value:.12g}",
            "bound": "" if bound is None else f"{bound:.12g}",
        })
    return rows
