import math

import pytest

from ncft.core.exceptions import BudgetExhausted, GroupMismatch, InvalidSpec
from ncft.models.space import OperatorSpaceDesc
from ncft.models.verdict import EstimateKind
from ncft.services.estimation import ConstantEstimator
from ncft.services.groups import build_group
from ncft.services.representations import irreps_catalog

SCALAR = OperatorSpaceDesc.scalar()


class TestConstantEstimator:

    @pytest.fixture
    def estimator(self):
        return ConstantEstimator(pool=4, hill_steps=5)

    @pytest.fixture
    def s3(self):
        return irreps_catalog(build_group("S3"))

    @pytest.fixture
    def q8(self):
        return irreps_catalog(build_group("Q8"))

    def test_type_endpoint_scalar(self, estimator, s3):
        """At p = 1 the scalar type constant is 1"""
        result = estimator.estimate_type_constant(s3.group, s3, 1.0, SCALAR, level=1, trials=3)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert result.kind == EstimateKind.type

    def test_type_endpoint_schatten(self, estimator, q8):
        """At p = 1 the constant is 1 for Schatten(2, 2) at level 2"""
        result = estimator.estimate_type_constant(q8.group, q8, 1.0, OperatorSpaceDesc.schatten(2, 2), level=2, trials=2)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert len(result.per_level) == 2

    def test_cotype_endpoint(self, estimator, q8):
        """At p = 1 the scalar cotype constant is 1"""
        result = estimator.estimate_cotype_constant(q8.group, q8, 1.0, SCALAR, level=2, trials=3)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert result.kind == EstimateKind.cotype

    def test_plancherel_level(self, estimator, s3):
        """At p = 2 every scalar ratio is 1"""
        result = estimator.estimate_type_constant(s3.group, s3, 2.0, SCALAR, level=2, trials=3)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert all(value == pytest.approx(1.0, abs=1e-9) for value in result.per_level)

    def test_diag_lp_below_bound(self, estimator):
        """DiagLp(2, 1) at p = 2 lands between 1 and sqrt(2)"""
        table = irreps_catalog(build_group("Z2"))
        result = estimator.estimate_type_constant(table.group, table, 2.0, OperatorSpaceDesc.diag_lp(2, 1), level=1, trials=3)
        assert 1.0 - 1e-9 <= result.value <= math.sqrt(2) * (1 + 1e-9)

    def test_monotone_in_budget(self, estimator, s3):
        """A larger budget never lowers the estimate"""
        small = estimator.estimate_type_constant(s3.group, s3, 4 / 3, SCALAR, level=1, budget=4, trials=6, seed=5)
        large = estimator.estimate_type_constant(s3.group, s3, 4 / 3, SCALAR, level=1, budget=10, trials=6, seed=5)
        assert large.value >= small.value
        assert small.budget_exhausted

    def test_monotone_in_level(self, estimator, s3):
        """Adding a level never lowers the estimate"""
        one = estimator.estimate_cotype_constant(s3.group, s3, 4 / 3, SCALAR, level=1, trials=3, seed=2)
        two = estimator.estimate_cotype_constant(s3.group, s3, 4 / 3, SCALAR, level=2, trials=3, seed=2)
        assert two.per_level[0] == one.per_level[0]
        assert two.value >= one.value
        assert two.value == max(two.per_level)

    def test_deterministic(self, estimator, s3):
        """Same seed, same value and witness"""
        first = estimator.estimate_type_constant(s3.group, s3, 1.5, SCALAR, level=1, trials=3, seed=1)
        second = estimator.estimate_type_constant(s3.group, s3, 1.5, SCALAR, level=1, trials=3, seed=1)
        assert first.value == second.value
        assert first.witness == second.witness

    def test_strict_budget(self, estimator, s3):
        """strict mode raises when the budget truncates the search"""
        with pytest.raises(BudgetExhausted):
            estimator.estimate_type_constant(s3.group, s3, 1.5, SCALAR, level=1, budget=2, trials=3, strict=True)

    def test_full_budget_not_exhausted(self, estimator, s3):
        """The default budget covers every candidate and hill step"""
        result = estimator.estimate_type_constant(s3.group, s3, 1.5, SCALAR, level=1, trials=2)
        assert not result.budget_exhausted
        assert result.evaluations == 2 + 2 + 5

    @pytest.mark.parametrize("p,level", [(3.0, 1), (1.5, 0), (1.5, 4)])
    def test_invalid_arguments(self, estimator, s3, p, level):
        """p outside [1, 2] and levels outside [1, 3] are rejected"""
        with pytest.raises(InvalidSpec):
            estimator.estimate_type_constant(s3.group, s3, p, SCALAR, level=level, trials=1)

    def test_group_mismatch(self, estimator, s3):
        """The irrep table must belong to the group"""
        with pytest.raises(GroupMismatch):
            estimator.estimate_type_constant(build_group("Z6"), s3, 1.5, SCALAR, level=1, trials=1)
