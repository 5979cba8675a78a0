import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy import linalg, optimize

from ncft.core.config import settings
from ncft.core.exceptions import NonFiniteEntries, OptimizerBudgetExhausted, SandwichInverted, ShapeMismatch
from ncft.core.parallel import ordered_map
from ncft.models.norms import METHOD_RANK, NormMethod, NormSandwich
from ncft.models.space import INF, OperatorSpaceDesc, SpaceKind, conjugate_exponent, format_exponent, inverse_exponent

if TYPE_CHECKING:
    from ncft.services.fourier import GroupFunction, SpectralArray

logger = logging.getLogger(__name__)

# eigenvalues of the log-parametrized factors stay in [-30, 30]
LOG_CLIP = 30.0

# ---------------------------------------------------------------------------
# Scalar kernels

def _check_finite(a: np.ndarray):
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntries("matrix has NaN or infinite entries")


def lp_norm(values, p: float) -> float:
    """l^p norm of a vector of non-negative magnitudes, scaled against overflow"""
    values = np.abs(np.asarray(values)).astype(float).ravel()
    if values.size == 0:
        return 0.0
    peak = float(values.max())
    if peak == 0.0 or math.isinf(p):
        return peak
    if p == 1:
        return float(values.sum())
    return peak * float(np.sum((values / peak) ** p)) ** (1.0 / p)


def weighted_lp(values, weights, p: float) -> float:
    """(sum w_i v_i^p)^(1/p), max over v when p is infinite"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if math.isinf(p):
        return float(values.max())
    weights = np.asarray(weights, dtype=float)
    peak = float(values.max())
    if peak == 0.0:
        return 0.0
    return peak * float(np.sum(weights * (values / peak) ** p)) ** (1.0 / p)


def schatten_norm(a, p: float) -> float:
    """
    Schatten p-norm from singular values; rectangular input allowed.

    Raises:
        NonFiniteEntries: a has NaN or infinite entries
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    _check_finite(a)
    if a.size == 0:
        return 0.0
    return lp_norm(linalg.svdvals(a), p)


def e_norm(x, space: OperatorSpaceDesc) -> float:
    """Norm of a single value of E"""
    x = np.asarray(x)
    if x.shape != space.value_shape:
        raise ShapeMismatch(f"{space.label} values have shape {space.value_shape}, got {x.shape}")
    _check_finite(x)
    if space.kind == SpaceKind.SCALAR:
        return float(abs(x))
    if space.kind == SpaceKind.SCHATTEN:
        return schatten_norm(x, space.exponent)
    return lp_norm(x, space.exponent)


def norming_dual(a, p: float) -> np.ndarray:
    """
    Matrix z with ||z||_{p'} <= 1 and tr(a z) = ||a||_p.

    Built from the SVD a = U diag(s) V^H as z = V diag(t) U^H.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    u, s, vh = linalg.svd(a, full_matrices=False)
    t = np.zeros_like(s)
    if s.size and s.max() > 0:
        if p == 1:
            t[:] = 1.0
        elif math.isinf(p):
            t[int(np.argmax(s))] = 1.0
        else:
            t = (s / lp_norm(s, p)) ** (p - 1)
    return (vh.conj().T * t) @ u.conj().T


def pair(x_flat: np.ndarray, z_flat: np.ndarray) -> complex:
    """tr(x z) without forming the product"""
    return complex(np.sum(x_flat * z_flat.T))


def operator_schmidt(x_flat: np.ndarray, n: int, m: int):
    """x = sum_k s_k A_k (x) B_k with Frobenius-orthonormal A_k in M_n, B_k in M_m"""
    reshuffled = x_flat.reshape(n, m, n, m).transpose(0, 2, 1, 3).reshape(n * n, m * m)
    u, s, vh = linalg.svd(reshuffled, full_matrices=False)
    return s, u.T.reshape(-1, n, n), vh.reshape(-1, m, m)


def cross_norm_upper(x_flat: np.ndarray, n: int, m: int, p: float, q: float) -> float:
    """
    Upper bound for ||x||_{S_n^p(S_m^q)} by the triangle inequality over the
    operator-Schmidt terms; exact on elementary tensors.
    """
    s, outer, inner = operator_schmidt(x_flat, n, m)
    if not s.size or s[0] == 0:
        return 0.0
    terms = np.flatnonzero(s > s[0] * 1e-15)
    return float(sum(s[k] * schatten_norm(outer[k], p) * schatten_norm(inner[k], q) for k in terms))


def reorder(x_flat: np.ndarray, k1: int, k2: int) -> np.ndarray:
    """Swap the tensor factors: M_k1 (x) M_k2 -> M_k2 (x) M_k1 on the flattened layout"""
    return x_flat.reshape(k1, k2, k1, k2).transpose(1, 0, 3, 2).reshape(k1 * k2, k1 * k2)


def amplify(left: np.ndarray, x_flat: np.ndarray, right: np.ndarray, m: int) -> np.ndarray:
    """(left (x) I_m) x (right (x) I_m)"""
    n = left.shape[0]
    blocks = x_flat.reshape(n, m, n, m)
    return np.einsum("ik,kalb,lj->iajb", left, blocks, right).reshape(n * m, n * m)

# ---------------------------------------------------------------------------
# Block matrices

@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """An element of M_n (x) E: blocks[i, j] is the E-value in block (i, j)"""
    blocks: np.ndarray
    space: OperatorSpaceDesc

    def __post_init__(self):
        shape = self.blocks.shape
        if len(shape) < 2 or shape[0] != shape[1] or shape[2:] != self.space.value_shape:
            raise ShapeMismatch(
                f"blocks for {self.space.label} need shape (n, n, *{self.space.value_shape}), got {shape}"
            )

    @property
    def n(self) -> int:
        return int(self.blocks.shape[0])

    @property
    def inner_dim(self) -> int:
        return self.space.matrix_dim

    def flat(self) -> np.ndarray:
        """(n m) x (n m) matrix with block (i, j) in rows i*m..(i+1)*m"""
        n, m = self.n, self.inner_dim
        blocks = np.asarray(self.blocks, dtype=complex)
        if self.space.kind == SpaceKind.SCALAR:
            return blocks.copy()
        if self.space.kind == SpaceKind.DIAGLP:
            full = np.zeros((n, n, m, m), dtype=complex)
            full[:, :, np.arange(m), np.arange(m)] = blocks
            blocks = full
        return blocks.transpose(0, 2, 1, 3).reshape(n * m, n * m)

    @classmethod
    def from_flat(cls, matrix, n: int, space: OperatorSpaceDesc) -> "BlockMatrix":
        matrix = np.asarray(matrix, dtype=complex)
        m = space.matrix_dim
        if matrix.shape != (n * m, n * m):
            raise ShapeMismatch(f"expected a {n * m}x{n * m} matrix, got {matrix.shape}")
        if space.kind == SpaceKind.SCALAR:
            return cls(blocks=matrix.copy(), space=space)
        blocks = matrix.reshape(n, m, n, m).transpose(0, 2, 1, 3)
        if space.kind == SpaceKind.DIAGLP:
            blocks = np.diagonal(blocks, axis1=2, axis2=3)
        return cls(blocks=np.ascontiguousarray(blocks), space=space)


def embed_diag_lp(v, p: float) -> BlockMatrix:
    """A vector of l^p(n) as a single diagonal block of DiagLp(n, p)"""
    v = np.asarray(v, dtype=complex).ravel()
    space = OperatorSpaceDesc.diag_lp(v.size, p)
    return BlockMatrix(blocks=v.reshape(1, 1, -1), space=space)

# ---------------------------------------------------------------------------
# Vector-valued Schatten norms

def _hermitian(params: np.ndarray, n: int) -> np.ndarray:
    h = np.diag(params[:n]).astype(complex)
    rows, cols = np.triu_indices(n, 1)
    k = rows.size
    h[rows, cols] = params[n:n + k] + 1j * params[n + k:n + 2 * k]
    h[cols, rows] = np.conj(h[rows, cols])
    return h


@dataclass
class _RestartResult:
    value: float
    success: bool
    left: np.ndarray
    right: np.ndarray


class SchattenNormEngine:
    """
    Sandwich estimates for ||x||_{S_n^p(E)}.

    Exact tiers: scalar E, outer dimension 1, and matched exponents (Fubini).
    Otherwise the bound on one side comes from optimizing over positive
    factors a = exp(H_a), b = exp(H_b); the other side comes from dual
    certificates, the operator-Schmidt cross bound and the flat Schatten
    norms at p and q.
    """

    def __init__(
        self,
        restarts: Optional[int] = None,
        iterations: Optional[int] = None,
        pool: Optional[int] = None,
        threads: Optional[int] = None,
    ):
        self.restarts = settings.OPTIMIZER_RESTARTS if restarts is None else restarts
        self.iterations = settings.OPTIMIZER_ITERATIONS if iterations is None else iterations
        self.pool = settings.CERTIFICATE_POOL if pool is None else pool
        self.threads = threads

    def sn_p_norm(
        self,
        x: BlockMatrix,
        p: float,
        *,
        restarts: Optional[int] = None,
        iterations: Optional[int] = None,
        pool: Optional[int] = None,
        seed: int = 0,
        strict: bool = False,
        force_factorization: bool = False,
    ) -> NormSandwich:
        """
        Norm of x in S_n^p(E).

        Args:
            x: block matrix over E
            p: outer Schatten exponent
            restarts: optimizer restarts; 0 skips the optimizer
            iterations: Nelder-Mead iterations per restart
            pool: number of random dual certificates
            seed: restart i draws from default_rng([seed, 0, i])
            strict: raise OptimizerBudgetExhausted instead of flagging
            force_factorization: skip the matched-exponent shortcut

        Returns:
            NormSandwich with lower <= estimate <= upper
        """
        restarts = self.restarts if restarts is None else restarts
        iterations = self.iterations if iterations is None else iterations
        pool = self.pool if pool is None else pool

        space = x.space
        flat = x.flat()
        _check_finite(flat)
        if space.kind == SpaceKind.SCALAR:
            return NormSandwich.exact(schatten_norm(flat, p))
        q = space.exponent
        if x.n == 1 and not force_factorization:
            return NormSandwich.exact(schatten_norm(flat, q))
        if q == p and not force_factorization:
            return NormSandwich.exact(schatten_norm(flat, p), NormMethod.fubini)
        problem = _SandwichProblem(flat, x.n, x.inner_dim, p, q)
        best = None
        if restarts > 0 and x.n > 1:
            results = ordered_map(
                lambda i: problem.optimize(i, seed, iterations),
                range(restarts),
                threads=self.threads,
            )
            best = (min if problem.factorize else max)(results, key=lambda result: result.value)

        rng = np.random.default_rng([seed, 1])
        certificates = problem.certificates(rng, pool, best)
        certified = max((problem.certify(z) for z in certificates), default=0.0)

        if problem.factorize:
            upper = min(problem.cross_upper, problem.flat_p, best.value if best else INF)
            lower = max(problem.flat_q, certified)
        else:
            upper = min(problem.cross_upper, problem.flat_q)
            lower = max(problem.flat_p, certified, best.value if best else 0.0)
        if lower > upper * (1 + settings.SANDWICH_SLACK):
            message = (
                f"inverted sandwich on S_{x.n}^{format_exponent(p)}({space.label}): "
                f"lower {lower:.12g} > upper {upper:.12g}"
            )
            logger.error(f"❌ {message}")
            raise SandwichInverted(message)
        # rounding inside the slack
        lower = min(lower, upper)
        estimate = upper if problem.factorize else lower

        exhausted = bool(best is not None and not best.success)
        if exhausted:
            message = f"optimizer hit {iterations} iterations on S_{x.n}^{p}({space.label})"
            if strict:
                raise OptimizerBudgetExhausted(message)
            logger.debug(f"⚠️ {message}; gap {upper - lower:.3e}")
        return NormSandwich(
            lower=lower,
            estimate=estimate,
            upper=upper,
            method=NormMethod.factorization_dual,
            restarts_used=restarts,
            budget_exhausted=exhausted,
        )

    def mn_e_norm(self, x: BlockMatrix, **kwargs) -> NormSandwich:
        """Norm of M_n(E), the p = inf member of the family"""
        return self.sn_p_norm(x, INF, **kwargs)


class _SandwichProblem:
    """Bounds for one flattened x in S_n^p(S_m^q) with p != q"""

    def __init__(self, flat: np.ndarray, n: int, m: int, p: float, q: float):
        self.flat = flat
        self.n, self.m = n, m
        self.p, self.q = p, q
        # p < q: infimum over factorizations; p > q: supremum over weights
        self.factorize = p <= q
        gap = abs(inverse_exponent(p) - inverse_exponent(q))
        self.weight_exponent = INF if gap == 0 else 2.0 / gap
        self.dual_p, self.dual_q = conjugate_exponent(p), conjugate_exponent(q)
        self.flat_p = schatten_norm(flat, p)
        self.flat_q = schatten_norm(flat, q)
        self.cross_upper = cross_norm_upper(flat, n, m, p, q)

    def _factor(self, params: np.ndarray, sign: float):
        w, u = linalg.eigh(_hermitian(params, self.n))
        w = np.clip(w, -LOG_CLIP, LOG_CLIP)
        # gauge: unit weight norm
        w = w - math.log(lp_norm(np.exp(w), self.weight_exponent))
        return (u * np.exp(sign * w)) @ u.conj().T

    def _split(self, params: np.ndarray):
        k = self.n * self.n
        return params[:k], params[k:]

    def objective(self, params: np.ndarray) -> float:
        left, right = self._split(params)
        if self.factorize:
            y = amplify(self._factor(left, -1.0), self.flat, self._factor(right, -1.0), self.m)
            return schatten_norm(y, self.q)
        y = amplify(self._factor(left, 1.0), self.flat, self._factor(right, 1.0), self.m)
        return -schatten_norm(y, self.q)

    def optimize(self, index: int, seed: int, iterations: int) -> _RestartResult:
        size = 2 * self.n * self.n
        if index == 0:
            start = np.zeros(size)
        else:
            start = np.random.default_rng([seed, 0, index]).normal(scale=0.5, size=size)
        result = optimize.minimize(
            self.objective,
            start,
            method="Nelder-Mead",
            options={"maxiter": iterations, "xatol": 1e-9, "fatol": 1e-12},
        )
        left, right = self._split(result.x)
        sign = -1.0 if self.factorize else 1.0
        value = float(result.fun) if self.factorize else -float(result.fun)
        return _RestartResult(
            value=value,
            success=bool(result.success),
            left=self._factor(left, sign),
            right=self._factor(right, sign),
        )

    def dual_upper(self, z: np.ndarray) -> float:
        """Upper bound for ||z||_{S_n^p'(S_m^q')}"""
        bound = cross_norm_upper(z, self.n, self.m, self.dual_p, self.dual_q)
        if self.factorize:
            return min(bound, schatten_norm(z, self.dual_q))
        return min(bound, schatten_norm(z, self.dual_p))

    def certify(self, z: np.ndarray) -> float:
        denominator = self.dual_upper(z)
        if denominator <= 0 or not math.isfinite(denominator):
            return 0.0
        return abs(pair(self.flat, z)) / denominator

    def certificates(self, rng: np.random.Generator, pool: int, best: Optional[_RestartResult]):
        size = self.n * self.m
        yield self.flat.conj().T
        yield norming_dual(self.flat, self.q)
        yield norming_dual(self.flat, self.p)
        s, outer, inner = operator_schmidt(self.flat, self.n, self.m)
        for k in range(min(3, s.size)):
            yield np.kron(norming_dual(outer[k], self.p), norming_dual(inner[k], self.q))
        if best is not None:
            y = amplify(best.left, self.flat, best.right, self.m)
            yield amplify(best.right, norming_dual(y, self.q), best.left, self.m)
        for _ in range(pool):
            yield rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))


_engine: Optional[SchattenNormEngine] = None


def get_norm_engine() -> SchattenNormEngine:
    global _engine
    if _engine is None:
        _engine = SchattenNormEngine()
    return _engine


def sn_p_norm(x: BlockMatrix, p: float, **kwargs) -> NormSandwich:
    return get_norm_engine().sn_p_norm(x, p, **kwargs)


def mn_e_norm(x: BlockMatrix, **kwargs) -> NormSandwich:
    return get_norm_engine().mn_e_norm(x, **kwargs)

# ---------------------------------------------------------------------------
# Function and spectrum norms

def lpG_norm(f: "GroupFunction", p: float, space: Optional[OperatorSpaceDesc] = None) -> float:
    """||f||_{L^p(G; E)} for the normalized counting measure"""
    space = space or f.space
    norms = [e_norm(value, space) for value in f.values]
    return weighted_lp(norms, np.full(len(norms), 1.0 / len(norms)), p)


def lpGhat_norm(
    spectrum: "SpectralArray",
    p: float,
    space: Optional[OperatorSpaceDesc] = None,
    **kwargs,
) -> NormSandwich:
    """
    ||A||_{L^p(G^; E)} = (sum_pi d_pi ||A^pi||_{S_d^p(E)}^p)^(1/p).

    Lower and upper bounds combine blockwise; exact when every block is.
    """
    space = space or spectrum.space
    degrees = spectrum.table.degrees
    parts = [
        sn_p_norm(BlockMatrix(blocks=block, space=space), p, **kwargs) for block in spectrum.blocks
    ]
    method = max((part.method for part in parts), key=METHOD_RANK.get, default=NormMethod.exact)
    lower = weighted_lp([part.lower for part in parts], degrees, p)
    upper = weighted_lp([part.upper for part in parts], degrees, p)
    estimate = min(max(weighted_lp([part.estimate for part in parts], degrees, p), lower), upper)
    return NormSandwich(
        lower=lower,
        estimate=estimate,
        upper=upper,
        method=method,
        restarts_used=max((part.restarts_used for part in parts), default=0),
        budget_exhausted=any(part.budget_exhausted for part in parts),
    )
