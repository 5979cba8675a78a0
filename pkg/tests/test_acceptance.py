"""
Acceptance-scale grids. Slow; run with:
    pytest -m slow tests/test_acceptance.py
"""

import itertools
import math

import numpy as np
import pytest

from ncft.models.space import INF, OperatorSpaceDesc
from ncft.services.estimation import ConstantEstimator
from ncft.services.fourier import forward, inverse, random_function, random_spectrum
from ncft.services.groups import build_group
from ncft.services.representations import irreps_catalog, irreps_numeric, validate_irreps
from ncft.services.schatten import BlockMatrix, SchattenNormEngine, schatten_norm
from ncft.services.verification import InequalityVerifier

GROUPS = [f"Z{n}" for n in range(1, 13)] + [f"D{n}" for n in range(1, 7)] + ["Q8", "S3", "S4"]
SANDWICH_EXPONENTS = [1.0, 4 / 3, 2.0, 4.0, INF]


def _random(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.slow
@pytest.mark.parametrize("spec", GROUPS)
def test_irreps_both_methods(spec):
    """Catalog and numeric tables validate and agree on degrees"""
    group = build_group(spec)
    catalog = irreps_catalog(group)
    numeric = irreps_numeric(group, seed=0)

    assert validate_irreps(catalog).passed
    assert validate_irreps(numeric).passed
    assert catalog.degrees == numeric.degrees


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["S3", "D4", "Q8", "S4", "Z2xS3"])
def test_numeric_characters_independent_of_seed(spec):
    """Different seeds give different bases but the same characters"""
    group = build_group(spec)
    reference = np.array([irrep.character for irrep in irreps_numeric(group, seed=0).irreps])
    for seed in range(1, 5):
        characters = np.array([irrep.character for irrep in irreps_numeric(group, seed=seed).irreps])
        assert np.allclose(characters, reference, atol=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["Z4", "S3", "D4", "Q8"])
def test_plancherel_grid(spec):
    """1000 scalar Plancherel trials all verify"""
    group = build_group(spec)
    verdicts = InequalityVerifier().check_plancherel(group, irreps_catalog(group), OperatorSpaceDesc.scalar(), trials=1000, seed=0)
    assert len(verdicts) == 1000
    assert all(verdict.status.value == "verified" for verdict in verdicts)


@pytest.mark.slow
@pytest.mark.parametrize("spec", GROUPS)
def test_round_trip_grid(spec):
    """200 Schatten(2, 2) round trips in each direction"""
    group = build_group(spec)
    table = irreps_catalog(group)
    space = OperatorSpaceDesc.schatten(2, 2)
    rng = np.random.default_rng(0)
    for _ in range(200):
        f = random_function(group, space, rng)
        assert np.allclose(inverse(forward(f, table)).values, f.values, atol=1e-10)
        spectrum = random_spectrum(table, space, rng)
        for restored, original in zip(forward(inverse(spectrum), table).blocks, spectrum.blocks):
            assert np.allclose(restored, original, atol=1e-10)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["Z7", "D5", "Q8", "S3", "S4"])
@pytest.mark.parametrize("p", [1.0, 4 / 3, 1.5, 2.0])
def test_hausdorff_young_grid(spec, p):
    """Scalar Hausdorff-Young and its inverse hold on 200 random trials each"""
    group = build_group(spec)
    table = irreps_catalog(group)
    verifier = InequalityVerifier()
    scalar = OperatorSpaceDesc.scalar()

    for verdicts in (
        verifier.check_hausdorff_young(group, table, p, scalar, trials=200, seed=0),
        verifier.check_inverse_hy(group, table, p, scalar, trials=200, seed=0),
    ):
        assert all(verdict.status.value == "verified" for verdict in verdicts)


@pytest.mark.slow
@pytest.mark.parametrize("p1,p2", [(1.0, 2.0), (1.0, float("inf")), (4 / 3, 4.0), (2.0, float("inf"))])
def test_minkowski_grid(p1, p2):
    """No violated verdict over 100 random 2 x 2 tensors"""
    verdicts = InequalityVerifier().check_minkowski(p1, p2, 2, 2, trials=100, seed=0)
    assert not any(verdict.status.value == "violated" for verdict in verdicts)


@pytest.mark.slow
@pytest.mark.parametrize("p", [1.0, 4 / 3, 2.0, 4.0])
def test_holder_grid(p):
    """No violated verdict over 100 random instances"""
    verdicts = InequalityVerifier().check_holder_lemma(2, 2, p, trials=100, seed=0)
    assert not any(verdict.status.value == "violated" for verdict in verdicts)


@pytest.mark.slow
@pytest.mark.parametrize("n,m", [(2, 2), (2, 3), (3, 2), (3, 3)])
@pytest.mark.parametrize("p,q", list(itertools.permutations(SANDWICH_EXPONENTS, 2)))
def test_sandwich_soundness_grid(n, m, p, q):
    """10^4 random instances per grid point; the engine raises on any inverted bracket"""
    engine = SchattenNormEngine(restarts=0, pool=2)
    space = OperatorSpaceDesc.schatten(m, q)
    rng = np.random.default_rng([n, m, SANDWICH_EXPONENTS.index(p), SANDWICH_EXPONENTS.index(q)])
    for i in range(10_000):
        x = BlockMatrix.from_flat(_random(rng, n * m, n * m), n, space)
        sandwich = engine.sn_p_norm(x, p, seed=i)
        assert sandwich.lower <= sandwich.upper


@pytest.mark.slow
@pytest.mark.parametrize("p", [4 / 3, 2.0, 4.0])
def test_forced_factorization_converges(p):
    """32 restarts on matched exponents land within 1e-4 of the exact value"""
    flat = _random(np.random.default_rng(1), 4, 4)
    x = BlockMatrix.from_flat(flat, 2, OperatorSpaceDesc.schatten(2, p))
    sandwich = SchattenNormEngine(restarts=32, iterations=400).sn_p_norm(x, p, force_factorization=True)
    exact = schatten_norm(flat, p)
    assert sandwich.lower == pytest.approx(exact, rel=1e-4)
    assert sandwich.upper == pytest.approx(exact, rel=1e-4)


@pytest.mark.slow
@pytest.mark.parametrize("p,q", list(itertools.permutations(SANDWICH_EXPONENTS, 2)))
def test_elementary_tensor_gap(p, q):
    """a (x) y with a, y in M_3 closes to within 1%"""
    rng = np.random.default_rng(2)
    a, y = _random(rng, 3, 3), _random(rng, 3, 3)
    x = BlockMatrix.from_flat(np.kron(a, y), 3, OperatorSpaceDesc.schatten(3, q))
    sandwich = SchattenNormEngine(restarts=4, iterations=200).sn_p_norm(x, p)
    expected = schatten_norm(a, p) * schatten_norm(y, q)
    assert sandwich.upper - sandwich.lower <= 0.01 * sandwich.upper
    assert sandwich.lower <= expected * (1 + 1e-9)
    assert sandwich.upper >= expected * (1 - 1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["Z4", "S3", "Q8"])
def test_cotype_endpoint_schatten(spec):
    """The cotype constant at p = 1 is 1 for Schatten(2, 2)"""
    table = irreps_catalog(build_group(spec))
    result = ConstantEstimator(pool=4, hill_steps=20).estimate_cotype_constant(
        table.group, table, 1.0, OperatorSpaceDesc.schatten(2, 2), level=2, trials=4,
    )
    assert result.value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("space", [OperatorSpaceDesc.schatten(2, 2), OperatorSpaceDesc.schatten(2, 1)])
def test_type_endpoint_s3(space):
    """The type constant at p = 1 is 1 on S3 with Schatten values"""
    table = irreps_catalog(build_group("S3"))
    result = ConstantEstimator(pool=4, hill_steps=20).estimate_type_constant(table.group, table, 1.0, space, level=2, trials=4)
    assert result.value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["S3", "D4", "Q8"])
@pytest.mark.parametrize("space", [OperatorSpaceDesc.schatten(2, 1), OperatorSpaceDesc.schatten(2, INF), OperatorSpaceDesc.diag_lp(4, 1)])
def test_four_dimensional_bound(spec, space):
    """At p = 2 a 4-dimensional E has type constant at most 2"""
    table = irreps_catalog(build_group(spec))
    result = ConstantEstimator(pool=4, hill_steps=20).estimate_type_constant(table.group, table, 2.0, space, level=2, trials=4)
    assert 1.0 - 1e-9 <= result.value <= 2.0 * (1 + 1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["S3", "D4", "Q8"])
def test_diag_lp_bound_non_abelian(spec):
    """DiagLp(2, 1) at p = 2 stays below sqrt(2) on non-abelian groups"""
    table = irreps_catalog(build_group(spec))
    result = ConstantEstimator(pool=4, hill_steps=20).estimate_type_constant(
        table.group, table, 2.0, OperatorSpaceDesc.diag_lp(2, 1), level=2, trials=4,
    )
    assert 1.0 - 1e-9 <= result.value <= math.sqrt(2) * (1 + 1e-9)
