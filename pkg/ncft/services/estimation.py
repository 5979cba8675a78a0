import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from ncft.core.config import settings
from ncft.core.exceptions import BudgetExhausted, GroupMismatch, InvalidSpec
from ncft.core.parallel import ordered_map
from ncft.models.space import OperatorSpaceDesc, conjugate_exponent, format_exponent
from ncft.models.verdict import ConstantEstimate, EstimateKind
from ncft.services.groups import FiniteGroup
from ncft.services.representations import IrrepTable
from ncft.services.schatten import BlockMatrix, sn_p_norm, weighted_lp
from ncft.services.storage import encode_complex

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 8
INITIAL_STEP = 0.5
STEP_SHRINK = 0.9


def unit_value(space: OperatorSpaceDesc) -> np.ndarray:
    """An E-value of norm one: 1, e_11 or e_1"""
    value = np.zeros(space.value_shape, dtype=complex)
    value[(0,) * len(space.value_shape)] = 1.0
    return value


@dataclass
class _Level:
    """Amplification level N: test objects are arrays with values in M_N (x) E"""
    group: FiniteGroup
    table: IrrepTable
    space: OperatorSpaceDesc
    p: float
    level: int

    @property
    def value_ndim(self) -> int:
        return len(self.space.value_shape)

    def matrix_unit(self, size: int) -> np.ndarray:
        """e_11 in M_size tensored with the unit of E"""
        unit = np.zeros((size, size, *self.space.value_shape), dtype=complex)
        unit[0, 0] = unit_value(self.space)
        return unit


class _TypeProblem(_Level):
    """Ratio ||F^||_{S_N^p'(L^p'(G^; E))} / ||F||_{L^p(G; S_N^p(E))}"""

    def shape(self) -> tuple:
        n = self.level
        return (self.group.order, n, n, *self.space.value_shape)

    def witnesses(self) -> list[np.ndarray]:
        constant = np.broadcast_to(self.matrix_unit(self.level), self.shape()).copy()
        atom = np.zeros(self.shape(), dtype=complex)
        atom[self.group.identity] = self.group.order * self.matrix_unit(self.level)
        return [constant, atom]

    def spectral_blocks(self, values: np.ndarray) -> list[np.ndarray]:
        """F^(pi) as (N d) x (N d) blocks, outer index (a, i)"""
        n = self.level
        blocks = []
        for irrep in self.table.irreps:
            d = irrep.degree
            coefficient = np.tensordot(irrep.matrices.conj().transpose(0, 2, 1), values, axes=([0], [0]))
            coefficient /= self.group.order
            axes = (2, 0, 3, 1) + tuple(range(4, 4 + self.value_ndim))
            blocks.append(coefficient.transpose(axes).reshape(n * d, n * d, *self.space.value_shape))
        return blocks

    def ratio(self, values: np.ndarray, options: dict) -> float:
        weights = np.full(self.group.order, 1.0 / self.group.order)
        domain = weighted_lp(
            [sn_p_norm(BlockMatrix(blocks=value, space=self.space), self.p, **options).upper for value in values],
            weights,
            self.p,
        )
        if domain <= 0:
            return 0.0
        dual = conjugate_exponent(self.p)
        codomain = weighted_lp(
            [sn_p_norm(BlockMatrix(blocks=block, space=self.space), dual, **options).lower
             for block in self.spectral_blocks(values)],
            self.table.degrees,
            dual,
        )
        return codomain / domain


class _CotypeProblem(_Level):
    """Ratio ||inverse(A)||_{L^p'(G; S_N^p'(E))} / ||A||_{S_N^p(L^p(G^; E))}"""

    def shape(self) -> tuple:
        # one (N d) x (N d) block per irrep, stored ragged
        return tuple(self.level * d for d in self.table.degrees)

    def _zeros(self) -> list[np.ndarray]:
        return [np.zeros((size, size, *self.space.value_shape), dtype=complex) for size in self.shape()]

    def witnesses(self) -> list[list[np.ndarray]]:
        trivial = self._zeros()
        trivial[self.table.trivial_index()] = self.matrix_unit(self.level)
        identity = [self._identity_block(d) for d in self.table.degrees]
        return [trivial, identity]

    def _identity_block(self, d: int) -> np.ndarray:
        """e_11 (x) I_d (x) unit, outer index (a, i)"""
        n = self.level
        block = np.zeros((n, d, n, d, *self.space.value_shape), dtype=complex)
        for i in range(d):
            block[0, i, 0, i] = unit_value(self.space)
        return block.reshape(n * d, n * d, *self.space.value_shape)

    def function_values(self, blocks: list[np.ndarray]) -> np.ndarray:
        n = self.level
        values = np.zeros((self.group.order, n, n, *self.space.value_shape), dtype=complex)
        axes = (1, 3, 0, 2) + tuple(range(4, 4 + self.value_ndim))
        for irrep, block in zip(self.table.irreps, blocks):
            d = irrep.degree
            coefficient = block.reshape(n, d, n, d, *self.space.value_shape).transpose(axes)
            values += d * np.tensordot(irrep.matrices.transpose(0, 2, 1), coefficient, axes=([1, 2], [0, 1]))
        return values

    def ratio(self, blocks: list[np.ndarray], options: dict) -> float:
        domain = weighted_lp(
            [sn_p_norm(BlockMatrix(blocks=block, space=self.space), self.p, **options).upper for block in blocks],
            self.table.degrees,
            self.p,
        )
        if domain <= 0:
            return 0.0
        dual = conjugate_exponent(self.p)
        weights = np.full(self.group.order, 1.0 / self.group.order)
        codomain = weighted_lp(
            [sn_p_norm(BlockMatrix(blocks=value, space=self.space), dual, **options).lower
             for value in self.function_values(blocks)],
            weights,
            dual,
        )
        return codomain / domain


def _flatten(candidate) -> np.ndarray:
    if isinstance(candidate, list):
        return np.concatenate([block.ravel() for block in candidate])
    return candidate.ravel()


def _unflatten(flat: np.ndarray, like):
    if isinstance(like, list):
        pieces, start = [], 0
        for block in like:
            pieces.append(flat[start:start + block.size].reshape(block.shape))
            start += block.size
        return pieces
    return flat.reshape(like.shape)


def _gaussian_like(like, rng: np.random.Generator):
    if isinstance(like, list):
        return [rng.standard_normal(block.shape) + 1j * rng.standard_normal(block.shape) for block in like]
    return rng.standard_normal(like.shape) + 1j * rng.standard_normal(like.shape)


class ConstantEstimator:
    """
    Certified lower bounds on truncated Fourier type and cotype constants.

    Every evaluation is lower(codomain) / upper(domain), so each ratio is
    itself a lower bound on the constant. The candidates are visited in a
    fixed order (witnesses, random draws, hill-climbing); the budget keeps a
    prefix of that order, so a larger budget never gives a smaller value.
    """

    def __init__(
        self,
        restarts: Optional[int] = None,
        iterations: Optional[int] = None,
        pool: Optional[int] = None,
        hill_steps: Optional[int] = None,
        threads: Optional[int] = None,
    ):
        self.norm_options = {
            "restarts": settings.ESTIMATE_RESTARTS if restarts is None else restarts,
            "iterations": settings.ESTIMATE_ITERATIONS if iterations is None else iterations,
            "pool": settings.ESTIMATE_POOL if pool is None else pool,
        }
        self.hill_steps = settings.HILL_CLIMB_STEPS if hill_steps is None else hill_steps
        self.threads = threads

    def _candidates(self, problem: _Level, trials: int, seed: int) -> Iterator:
        yield from problem.witnesses()
        like = problem.witnesses()[0]
        for i in range(trials):
            yield _gaussian_like(like, np.random.default_rng([seed, problem.level, 0, i]))

    def _run_level(self, problem: _Level, budget: int, trials: int, seed: int) -> tuple[float, object, int, bool]:
        options = dict(self.norm_options, seed=seed)
        candidates = list(self._candidates(problem, trials, seed))
        truncated = len(candidates) > budget
        candidates = candidates[:budget]
        ratios = ordered_map(lambda candidate: problem.ratio(candidate, options), candidates, threads=self.threads)
        best_index = int(np.argmax(ratios))
        best_value, best = ratios[best_index], candidates[best_index]
        evaluations = len(candidates)

        rng = np.random.default_rng([seed, problem.level, 1])
        step = INITIAL_STEP
        flat_best = _flatten(best)
        for _ in range(self.hill_steps):
            if evaluations >= budget:
                truncated = True
                break
            scale = float(np.max(np.abs(flat_best))) or 1.0
            proposal = flat_best.copy()
            index = int(rng.integers(proposal.size))
            proposal[index] += step * scale * complex(rng.standard_normal(), rng.standard_normal())
            value = problem.ratio(_unflatten(proposal, best), options)
            evaluations += 1
            if value > best_value:
                best_value, flat_best = value, proposal
            else:
                step *= STEP_SHRINK
        return best_value, _unflatten(flat_best, best), evaluations, truncated

    def estimate(
        self,
        kind: EstimateKind,
        group: FiniteGroup,
        table: IrrepTable,
        p: float,
        space: OperatorSpaceDesc,
        level: Optional[int] = None,
        budget: Optional[int] = None,
        seed: int = 0,
        trials: Optional[int] = None,
        strict: bool = False,
    ) -> ConstantEstimate:
        """
        Best ratio over amplification levels 1..level.

        Args:
            kind: type (transform) or cotype (inverse transform)
            p: exponent in [1, 2]; cotype measures L^p(G^) -> L^p'(G)
            level: highest amplification level, at most MAX_LEVEL
            budget: ratio evaluations allowed per level
            trials: random candidates per level before hill-climbing
            strict: raise BudgetExhausted when the budget truncates the search

        Returns:
            ConstantEstimate whose value never decreases with budget or level
        """
        if not group.same_as(table.group):
            raise GroupMismatch(f"irreps belong to {table.group.label}, not {group.label}")
        if not 1 <= p <= 2:
            raise InvalidSpec(f"Fourier {kind.value} needs p in [1, 2], got {format_exponent(p)}")
        level = settings.DEFAULT_LEVEL if level is None else level
        if not 1 <= level <= settings.MAX_LEVEL:
            raise InvalidSpec(f"amplification level must lie in [1, {settings.MAX_LEVEL}], got {level}")
        trials = DEFAULT_TRIALS if trials is None else trials
        budget = 2 + trials + self.hill_steps if budget is None else budget
        if budget < 1:
            raise InvalidSpec("budget must allow at least one evaluation")

        logger.info(f"🚀 Estimating {kind.value} constant on {group.label}, {space.label}, p={format_exponent(p)}")
        problem_class = _TypeProblem if kind == EstimateKind.type else _CotypeProblem
        per_level, evaluations, exhausted = [], 0, False
        best_value, witness = -np.inf, None
        for n in range(1, level + 1):
            problem = problem_class(group=group, table=table, space=space, p=p, level=n)
            value, candidate, used, truncated = self._run_level(problem, budget, trials, seed)
            per_level.append(value)
            evaluations += used
            exhausted = exhausted or truncated
            if value > best_value:
                best_value, witness = value, {"level": n, "values": _serialize(candidate)}

        if exhausted:
            message = f"{kind.value} estimate on {group.label} stopped at budget {budget}"
            if strict:
                raise BudgetExhausted(message)
            logger.warning(f"⚠️ {message}; reporting best so far")
        logger.info(f"✅ {kind.value} constant >= {best_value:.6f}")
        return ConstantEstimate(
            kind=kind,
            group=group.label,
            space=space.label,
            p=p,
            value=float(best_value),
            level=level,
            trials=trials,
            per_level=per_level,
            evaluations=evaluations,
            budget_exhausted=exhausted,
            witness=witness,
        )

    def estimate_type_constant(self, group, table, p, space, level=None, budget=None, seed=0, **kwargs) -> ConstantEstimate:
        return self.estimate(EstimateKind.type, group, table, p, space, level, budget, seed, **kwargs)

    def estimate_cotype_constant(self, group, table, p, space, level=None, budget=None, seed=0, **kwargs) -> ConstantEstimate:
        return self.estimate(EstimateKind.cotype, group, table, p, space, level, budget, seed, **kwargs)


def _serialize(candidate):
    if isinstance(candidate, list):
        return [encode_complex(block) for block in candidate]
    return encode_complex(candidate)
