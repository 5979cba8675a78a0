import logging
import math
from typing import Callable, Optional

import numpy as np

from ncft.core.config import settings
from ncft.core.exceptions import GroupMismatch, InvalidSpec, UnsupportedSpace
from ncft.core.parallel import ordered_map
from ncft.models.norms import NormSandwich
from ncft.models.space import OperatorSpaceDesc, SpaceKind, conjugate_exponent, format_exponent
from ncft.models.verdict import CheckResult, Verdict, VerdictStatus
from ncft.services.fourier import (
    GroupFunction,
    SpectralArray,
    forward,
    inverse,
    involution,
    pairing,
    random_function,
    random_spectrum,
)
from ncft.services.groups import FiniteGroup
from ncft.services.representations import IrrepTable
from ncft.services.schatten import (
    BlockMatrix,
    e_norm,
    lpG_norm,
    lpGhat_norm,
    reorder,
    schatten_norm,
    sn_p_norm,
)

logger = logging.getLogger(__name__)

MAX_MINKOWSKI_DIM = 3


def _scale(sandwich: NormSandwich, factor: float) -> NormSandwich:
    return NormSandwich(
        lower=sandwich.lower * factor,
        estimate=sandwich.estimate * factor,
        upper=sandwich.upper * factor,
        method=sandwich.method,
        restarts_used=sandwich.restarts_used,
        budget_exhausted=sandwich.budget_exhausted,
    )


def _require_hausdorff_young_range(p: float):
    if not 1 <= p <= 2:
        raise InvalidSpec(f"Hausdorff-Young needs p in [1, 2], got {format_exponent(p)}")


class InequalityVerifier:
    """
    Randomized checks of the Fourier inequalities.

    Each check draws trial t from default_rng([seed, t]) and returns one
    Verdict per trial; summarize() folds them into a CheckResult.
    """

    def __init__(
        self,
        restarts: Optional[int] = None,
        iterations: Optional[int] = None,
        pool: Optional[int] = None,
        slack: Optional[float] = None,
        threads: Optional[int] = None,
    ):
        self.norm_options = {
            "restarts": settings.CHECK_RESTARTS if restarts is None else restarts,
            "iterations": settings.CHECK_ITERATIONS if iterations is None else iterations,
            "pool": settings.CHECK_POOL if pool is None else pool,
        }
        self.slack = settings.VERDICT_SLACK if slack is None else slack
        self.threads = threads

    def _trials(self, trial: Callable[[np.random.Generator, int], Verdict], trials: int, seed: int) -> list[Verdict]:
        return ordered_map(lambda t: trial(np.random.default_rng([seed, t]), t), range(trials), threads=self.threads)

    @staticmethod
    def _same_group(group: FiniteGroup, table: IrrepTable):
        if not group.same_as(table.group):
            raise GroupMismatch(f"irreps belong to {table.group.label}, not {group.label}")

    # -- single verdicts -------------------------------------------------

    def plancherel_verdict(self, f: GroupFunction, table: IrrepTable) -> Verdict:
        lhs = NormSandwich.exact(lpG_norm(f, 2))
        rhs = lpGhat_norm(forward(f, table), 2)
        return Verdict.equality(lhs, rhs, self.slack)

    def parseval_verdict(self, f: GroupFunction, h: GroupFunction, table: IrrepTable) -> Verdict:
        """Residual of (1/|G|) sum f h against the spectral pairing, compared to a relative tolerance"""
        direct = np.tensordot(h.values, f.values, axes=([0], [0])) / f.group.order
        spectral = pairing(forward(f, table), forward(involution(h), table))
        residual = e_norm(np.asarray(direct - spectral).reshape(f.space.value_shape), f.space)
        norms = np.array([e_norm(value, f.space) for value in f.values])
        scale = float(np.mean(norms * np.abs(h.values)))
        tolerance = max(scale, 1.0) * 1e-9
        return Verdict.compare(NormSandwich.exact(residual), NormSandwich.exact(tolerance), self.slack)

    def hausdorff_young_verdict(self, f: GroupFunction, table: IrrepTable, p: float, seed: int = 0) -> Verdict:
        lhs = lpGhat_norm(forward(f, table), conjugate_exponent(p), seed=seed, **self.norm_options)
        rhs = NormSandwich.exact(lpG_norm(f, p))
        return Verdict.compare(lhs, rhs, self.slack)

    def inverse_hy_verdict(self, spectrum: SpectralArray, p: float, seed: int = 0) -> Verdict:
        lhs = NormSandwich.exact(lpG_norm(inverse(spectrum), conjugate_exponent(p)))
        rhs = lpGhat_norm(spectrum, p, seed=seed, **self.norm_options)
        return Verdict.compare(lhs, rhs, self.slack)

    def holder_verdict(self, a: np.ndarray, b: np.ndarray, p: float, seed: int = 0) -> Verdict:
        """
        Args:
            a: n1 x n1 matrix
            b: array (n2, n2, n1, n1) with b[i, j] the matrix B_ij
            p: exponent of the outer Schatten class on the right
        """
        n2 = b.shape[0]
        traces = np.einsum("kl,ijlk->ij", a, b)
        lhs = NormSandwich.exact(schatten_norm(traces, 1))
        blocks = BlockMatrix(blocks=b.transpose(2, 3, 0, 1), space=OperatorSpaceDesc.schatten(n2, 1))
        outer = sn_p_norm(blocks, p, seed=seed, **self.norm_options)
        rhs = _scale(outer, schatten_norm(a, conjugate_exponent(p)))
        return Verdict.compare(lhs, rhs, self.slack)

    def minkowski_verdict(self, x: np.ndarray, p1: float, p2: float, k1: int, k2: int, seed: int = 0) -> Verdict:
        swapped = BlockMatrix.from_flat(reorder(x, k1, k2), k2, OperatorSpaceDesc.schatten(k1, p1))
        original = BlockMatrix.from_flat(x, k1, OperatorSpaceDesc.schatten(k2, p2))
        lhs = sn_p_norm(swapped, p2, seed=seed, **self.norm_options)
        rhs = sn_p_norm(original, p1, seed=seed, **self.norm_options)
        return Verdict.compare(lhs, rhs, self.slack)

    # -- randomized checks ----------------------------------------------

    def check_plancherel(self, group, table, space: OperatorSpaceDesc, trials: int, seed: int = 0) -> list[Verdict]:
        """||f||_{L^2} = ||f^||_{L^2(G^)}; E must have an exact p = 2 tier"""
        self._same_group(group, table)
        if space.kind != SpaceKind.SCALAR and space.exponent != 2:
            raise UnsupportedSpace(f"Plancherel needs an exact p=2 norm; {space.label} has none")
        return self._trials(lambda rng, t: self.plancherel_verdict(random_function(group, space, rng), table), trials, seed)

    def check_parseval(self, group, table, space: OperatorSpaceDesc, trials: int, seed: int = 0) -> list[Verdict]:
        self._same_group(group, table)
        scalar = OperatorSpaceDesc.scalar()

        def trial(rng, t):
            f = random_function(group, space, rng)
            h = random_function(group, scalar, rng)
            return self.parseval_verdict(f, h, table)

        return self._trials(trial, trials, seed)

    def check_hausdorff_young(self, group, table, p: float, space: OperatorSpaceDesc, trials: int, seed: int = 0) -> list[Verdict]:
        """||f^||_{L^p'(G^; E)} <= ||f||_{L^p(G; E)} on random f"""
        self._same_group(group, table)
        _require_hausdorff_young_range(p)
        return self._trials(
            lambda rng, t: self.hausdorff_young_verdict(random_function(group, space, rng), table, p, seed=t),
            trials,
            seed,
        )

    def check_inverse_hy(self, group, table, p: float, space: OperatorSpaceDesc, trials: int, seed: int = 0) -> list[Verdict]:
        """||inverse(A)||_{L^p'(G; E)} <= ||A||_{L^p(G^; E)} on random spectra"""
        self._same_group(group, table)
        _require_hausdorff_young_range(p)
        return self._trials(
            lambda rng, t: self.inverse_hy_verdict(random_spectrum(table, space, rng), p, seed=t),
            trials,
            seed,
        )

    def check_linf_l1(self, group, table, space: OperatorSpaceDesc, trials: int, seed: int = 0) -> list[Verdict]:
        """sup_pi ||f^(pi)||_{M_d(E)} <= ||f||_{L^1}; needs an exact p = inf tier"""
        self._same_group(group, table)
        if space.kind != SpaceKind.SCALAR and not math.isinf(space.exponent):
            raise UnsupportedSpace(f"L^inf-L^1 check needs an exact p=inf norm; {space.label} has none")
        return self._trials(
            lambda rng, t: self.hausdorff_young_verdict(random_function(group, space, rng), table, 1.0, seed=t),
            trials,
            seed,
        )

    def check_holder_lemma(self, n1: int, n2: int, p: float, trials: int, seed: int = 0) -> list[Verdict]:
        """Scalar case of the Hoelder-type trace inequality"""
        if n1 < 1 or n2 < 1:
            raise InvalidSpec("matrix dimensions must be >= 1")

        def trial(rng, t):
            a = rng.standard_normal((n1, n1)) + 1j * rng.standard_normal((n1, n1))
            b = rng.standard_normal((n2, n2, n1, n1)) + 1j * rng.standard_normal((n2, n2, n1, n1))
            return self.holder_verdict(a, b, p, seed=t)

        return self._trials(trial, trials, seed)

    def check_minkowski(self, p1: float, p2: float, k1: int, k2: int, trials: int, seed: int = 0) -> list[Verdict]:
        """||reorder(x)||_{S_k2^p2(S_k1^p1)} <= ||x||_{S_k1^p1(S_k2^p2)} for p1 <= p2"""
        if p1 > p2:
            raise InvalidSpec(f"Minkowski check needs p1 <= p2, got {format_exponent(p1)} > {format_exponent(p2)}")
        if not (1 <= k1 <= MAX_MINKOWSKI_DIM and 1 <= k2 <= MAX_MINKOWSKI_DIM):
            raise InvalidSpec(f"Minkowski check supports dimensions up to {MAX_MINKOWSKI_DIM}")
        size = k1 * k2

        def trial(rng, t):
            x = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
            return self.minkowski_verdict(x, p1, p2, k1, k2, seed=t)

        return self._trials(trial, trials, seed)

    # -- reporting -------------------------------------------------------

    def summarize(
        self,
        check: str,
        verdicts: list[Verdict],
        group: Optional[str] = None,
        space: Optional[str] = None,
        p: Optional[float] = None,
    ) -> CheckResult:
        counts = {status.value: 0 for status in VerdictStatus}
        for verdict in verdicts:
            counts[verdict.status.value] += 1
        worst_index = min(range(len(verdicts)), key=lambda k: verdicts[k].margin) if verdicts else None
        exhausted = sum(verdict.lhs.budget_exhausted or verdict.rhs.budget_exhausted for verdict in verdicts)
        if exhausted:
            logger.warning(f"⚠️ {check}: {exhausted} trials used sandwiches that hit the iteration budget")
        if counts[VerdictStatus.violated.value]:
            logger.error(f"❌ {check} on {group or '-'}: {counts[VerdictStatus.violated.value]} violated verdicts")
        else:
            logger.info(f"✅ {check} on {group or '-'}: {counts}")
        return CheckResult(
            check=check,
            group=group,
            space=space,
            p=p,
            trials=len(verdicts),
            counts=counts,
            worst_margin=verdicts[worst_index].margin if verdicts else None,
            worst=verdicts[worst_index] if verdicts else None,
            witness={"trial": worst_index} if verdicts else None,
        )
