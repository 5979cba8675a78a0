import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from ncft.core.config import settings
from ncft.core.exceptions import (
    DecompositionStalled,
    GroupMismatch,
    InvalidSpec,
    ShapeMismatch,
    ToleranceInvalid,
    UnsupportedFamily,
)
from ncft.models.group import GroupFamily
from ncft.models.irreps import IrrepValidationReport
from ncft.services.groups import FiniteGroup, build_group
from ncft.services.storage import decode_complex, encode_complex

logger = logging.getLogger(__name__)

@dataclass(frozen=True, eq=False)
class Irrep:
    """Unitary matrix representation: matrices[g] is the d x d image of element g"""
    matrices: np.ndarray

    @property
    def degree(self) -> int:
        return int(self.matrices.shape[1])

    @property
    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)

@dataclass(frozen=True, eq=False)
class IrrepTable:
    """The dual object: one irrep per equivalence class, in canonical order"""
    group: FiniteGroup
    irreps: tuple[Irrep, ...]
    method: str = "catalog"

    @property
    def degrees(self) -> list[int]:
        return [irrep.degree for irrep in self.irreps]

    def __len__(self) -> int:
        return len(self.irreps)

    def trivial_index(self) -> int:
        for k, irrep in enumerate(self.irreps):
            if irrep.degree == 1 and np.allclose(irrep.character, 1.0):
                return k
        raise ShapeMismatch("table has no trivial representation")

    def to_json(self) -> dict:
        return {
            "group": self.group.label,
            "method": self.method,
            "irreps": [{"degree": irrep.degree, "matrices": encode_complex(irrep.matrices)} for irrep in self.irreps],
        }

    @classmethod
    def from_json(cls, payload: dict, group: Optional[FiniteGroup] = None) -> "IrrepTable":
        """
        Rebuild a table from its JSON form.

        Args:
            payload: object with "group", "irreps" and optionally "method"
            group: group the caller expects; must match the file's "group"

        Raises:
            GroupMismatch: the file names a different group
            ShapeMismatch: missing fields or matrices of the wrong shape
        """
        if not isinstance(payload, dict):
            raise ShapeMismatch("irrep table must be a JSON object")
        try:
            stored = build_group(payload["group"])
            entries = payload["irreps"]
            decoded = [(int(entry["degree"]), decode_complex(entry["matrices"])) for entry in entries]
        except KeyError as e:
            raise ShapeMismatch(f"irrep table is missing the '{e.args[0]}' field") from e
        except (AttributeError, TypeError, ValueError) as e:
            raise ShapeMismatch(f"malformed irrep table: {e}") from e
        if group is None:
            group = stored
        elif not group.same_as(stored):
            raise GroupMismatch(f"irrep table is for {stored.label}, not {group.label}")

        irreps = []
        for degree, matrices in decoded:
            if matrices.shape != (group.order, degree, degree):
                raise ShapeMismatch(
                    f"irrep of degree {degree} needs {group.order} matrices of shape {degree}x{degree}, "
                    f"got {matrices.shape}"
                )
            irreps.append(Irrep(matrices=matrices))
        return cls(group=group, irreps=tuple(irreps), method=payload.get("method", "file"))


def _character_key(irrep: Irrep) -> tuple:
    # descending lexicographic within a degree puts the trivial character first
    chi = np.round(irrep.character, 6)
    return (irrep.degree, tuple((-(z.real) + 0.0, -(z.imag) + 0.0) for z in chi))


def _canonical(group: FiniteGroup, irreps: list[Irrep], method: str) -> IrrepTable:
    return IrrepTable(group=group, irreps=tuple(sorted(irreps, key=_character_key)), method=method)

# ---------------------------------------------------------------------------
# Closed forms

def _cyclic_irreps(group: FiniteGroup) -> list[Irrep]:
    n = group.order
    k = np.arange(n)
    return [Irrep(matrices=np.exp(2j * np.pi * j * k / n).reshape(n, 1, 1)) for j in range(n)]


def _dihedral_irreps(group: FiniteGroup) -> list[Irrep]:
    n = group.spec.n
    rotations = np.array([k for k, _ in group.elements])
    flips = np.array([f for _, f in group.elements])
    irreps = []
    signs_r = (1, -1) if n % 2 == 0 else (1,)
    for eps_r in signs_r:
        for eps_s in (1, -1):
            values = (eps_r ** rotations) * (eps_s ** flips)
            irreps.append(Irrep(matrices=values.astype(complex).reshape(-1, 1, 1)))
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    for h in range(1, (n - 1) // 2 + 1):
        omega = np.exp(2j * np.pi * h * rotations / n)
        matrices = np.zeros((group.order, 2, 2), dtype=complex)
        matrices[:, 0, 0] = omega
        matrices[:, 1, 1] = omega.conj()
        matrices[flips == 1] = matrices[flips == 1] @ swap
        irreps.append(Irrep(matrices=matrices))
    return irreps


def _quaternion_irreps(group: FiniteGroup) -> list[Irrep]:
    units = {
        "1": np.eye(2, dtype=complex),
        "i": np.array([[1j, 0], [0, -1j]]),
        "j": np.array([[0, 1], [-1, 0]], dtype=complex),
    }
    units["k"] = units["i"] @ units["j"]
    irreps = []
    for s_i in (1, -1):
        for s_j in (1, -1):
            image = {"1": 1, "i": s_i, "j": s_j, "k": s_i * s_j}
            values = np.array([image[unit] for _, unit in group.elements], dtype=complex)
            irreps.append(Irrep(matrices=values.reshape(-1, 1, 1)))
    irreps.append(Irrep(matrices=np.array([sign * units[unit] for sign, unit in group.elements])))
    return irreps


def _helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the sum-zero hyperplane of R^n, as columns"""
    basis = np.zeros((n, n - 1))
    for k in range(1, n):
        basis[:k, k - 1] = 1.0
        basis[k, k - 1] = -k
        basis[:, k - 1] /= math.sqrt(k * (k + 1))
    return basis


def _standard_images(perms: list[tuple[int, ...]]) -> np.ndarray:
    """Permutation action restricted to the sum-zero hyperplane"""
    n = len(perms[0])
    basis = _helmert_basis(n)
    images = np.zeros((len(perms), n - 1, n - 1), dtype=complex)
    for g, perm in enumerate(perms):
        permutation = np.zeros((n, n))
        permutation[list(perm), np.arange(n)] = 1.0
        images[g] = basis.T @ permutation @ basis
    return images


def _sign(perm: tuple[int, ...]) -> int:
    sign, seen = 1, set()
    for start in range(len(perm)):
        length, x = 0, start
        while x not in seen:
            seen.add(x)
            x = perm[x]
            length += 1
        if length and length % 2 == 0:
            sign = -sign
    return sign


_PAIRINGS = (
    frozenset({frozenset({0, 1}), frozenset({2, 3})}),
    frozenset({frozenset({0, 2}), frozenset({1, 3})}),
    frozenset({frozenset({0, 3}), frozenset({1, 2})}),
)


def _pairing_action(perm: tuple[int, ...]) -> tuple[int, ...]:
    """S4 -> S3 through the action on the three pairings of {0,1,2,3}"""
    moved = []
    for pairing in _PAIRINGS:
        image = frozenset(frozenset(perm[x] for x in pair) for pair in pairing)
        moved.append(_PAIRINGS.index(image))
    return tuple(moved)


def _symmetric_irreps(group: FiniteGroup) -> list[Irrep]:
    n = group.spec.n
    if n > 4:
        raise UnsupportedFamily(f"no closed-form irreps for S{n}; use the numeric decomposition")
    perms = list(group.elements)
    order = group.order
    trivial = Irrep(matrices=np.ones((order, 1, 1), dtype=complex))
    if n == 1:
        return [trivial]
    signs = np.array([_sign(perm) for perm in perms], dtype=complex)
    irreps = [trivial, Irrep(matrices=signs.reshape(-1, 1, 1))]
    if n >= 3:
        standard = _standard_images(perms)
        irreps.append(Irrep(matrices=standard))
    if n == 4:
        irreps.append(Irrep(matrices=_standard_images([_pairing_action(perm) for perm in perms])))
        irreps.append(Irrep(matrices=standard * signs[:, None, None]))
    return irreps


def _product_irreps(group: FiniteGroup) -> list[Irrep]:
    left, right = (irreps_catalog(factor) for factor in group.factors)
    irreps = []
    for a in left.irreps:
        for b in right.irreps:
            da, db = a.degree, b.degree
            kron = np.einsum("aij,bkl->abikjl", a.matrices, b.matrices)
            irreps.append(Irrep(matrices=kron.reshape(group.order, da * db, da * db)))
    return irreps


_CATALOG = {
    GroupFamily.cyclic: _cyclic_irreps,
    GroupFamily.dihedral: _dihedral_irreps,
    GroupFamily.quaternion8: _quaternion_irreps,
    GroupFamily.symmetric: _symmetric_irreps,
    GroupFamily.product: _product_irreps,
}


def irreps_catalog(group: FiniteGroup) -> IrrepTable:
    """
    Closed-form irreps for catalog families.

    Raises:
        UnsupportedFamily: table groups and S5; fall back to irreps_numeric
    """
    builder = _CATALOG.get(group.spec.family)
    if builder is None:
        raise UnsupportedFamily(f"no closed-form irreps for {group.label}; use the numeric decomposition")
    return _canonical(group, builder(group), "catalog")

# ---------------------------------------------------------------------------
# Numeric decomposition of the left regular representation

class _Stalled(Exception):
    pass


class RegularDecomposer:
    """
    Split the left regular representation into irreducible blocks.

    A random Hermitian matrix averaged over the group lies in the commutant;
    its eigenspaces are invariant subspaces. Subspaces that are not yet
    irreducible are split again with a fresh draw.
    """

    def __init__(self, group: FiniteGroup, tol: float, irreducibility_tol: Optional[float] = None):
        self.group = group
        self.tol = tol
        self.irreducibility_tol = irreducibility_tol or settings.IRREDUCIBILITY_TOL
        # (rho(g) V)[x] = V[g^-1 x]
        self.shift = group.mul[group.inv]

    def restrict(self, basis: np.ndarray) -> np.ndarray:
        """Matrices of the regular representation on span(basis), one per element"""
        shifted = basis[self.shift]  # (g, x, k)
        return basis.conj().T @ shifted

    def split(self, basis: np.ndarray, rng: np.random.Generator, depth: int = 0) -> list[np.ndarray]:
        restricted = self.restrict(basis)
        chi = np.trace(restricted, axis1=1, axis2=2)
        norm = float(np.mean(np.abs(chi) ** 2))
        if abs(norm - 1.0) < self.irreducibility_tol:
            return [basis]
        if norm < 1.0 or depth > 32:
            raise _Stalled(f"character norm {norm:.3g} at depth {depth}")

        k = basis.shape[1]
        noise = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        hermitian = (noise + noise.conj().T) / 2
        averaged = np.mean(restricted @ hermitian @ restricted.conj().transpose(0, 2, 1), axis=0)
        averaged = (averaged + averaged.conj().T) / 2
        eigenvalues, eigenvectors = linalg.eigh(averaged)

        scale = max(1.0, float(np.max(np.abs(eigenvalues))))
        breaks = np.flatnonzero(np.diff(eigenvalues) > self.tol * scale) + 1
        clusters = np.split(np.arange(k), breaks)
        if len(clusters) == 1:
            raise _Stalled("averaged matrix is scalar on a reducible subspace")

        pieces = []
        for cluster in clusters:
            pieces.extend(self.split(basis @ eigenvectors[:, cluster], rng, depth + 1))
        return pieces

    def decompose(self, rng: np.random.Generator) -> list[Irrep]:
        order = self.group.order
        subspaces = self.split(np.eye(order, dtype=complex), rng)
        irreps: list[Irrep] = []
        characters: list[np.ndarray] = []
        for basis in subspaces:
            matrices = self.restrict(basis)
            chi = np.trace(matrices, axis1=1, axis2=2)
            if any(len(seen) == len(chi) and np.max(np.abs(seen - chi)) < 1e-6 for seen in characters):
                continue
            characters.append(chi)
            irreps.append(Irrep(matrices=matrices))
        total = sum(irrep.degree ** 2 for irrep in irreps)
        if total != order:
            raise _Stalled(f"sum of squared degrees {total} != {order}")
        return irreps


def _check_tolerance(tol: float):
    if not (isinstance(tol, (int, float)) and math.isfinite(tol) and 0 < tol < 1):
        raise ToleranceInvalid(f"clustering tolerance must lie in (0, 1), got {tol}")


def irreps_numeric(group: FiniteGroup, seed: int = 0, tol: Optional[float] = None) -> IrrepTable:
    """
    Irreps by decomposing the left regular representation.

    Args:
        group: group of order <= 120
        seed: base seed; attempt k draws from default_rng([seed, k])
        tol: eigenvalue clustering tolerance (default 1e-8)

    Returns:
        IrrepTable in canonical order

    Raises:
        DecompositionStalled: no clean split after the configured retries
        ToleranceInvalid: tol outside (0, 1)
    """
    tol = settings.EIGEN_CLUSTER_TOL if tol is None else tol
    _check_tolerance(tol)
    if group.order > settings.MAX_NUMERIC_ORDER:
        raise InvalidSpec(f"numeric decomposition supports order <= {settings.MAX_NUMERIC_ORDER}, got {group.order}")

    decomposer = RegularDecomposer(group, tol)
    last_error = None
    for attempt in range(settings.DECOMPOSITION_RETRIES):
        rng = np.random.default_rng([seed, attempt])
        try:
            irreps = decomposer.decompose(rng)
        except _Stalled as e:
            last_error = e
            logger.warning(f"⚠️ Decomposition of {group.label} stalled (attempt {attempt + 1}): {e}")
            continue
        logger.info(f"✅ {group.label}: {len(irreps)} irreps from the regular representation")
        return _canonical(group, irreps, "numeric")
    raise DecompositionStalled(
        f"{group.label}: eigenvalues unresolvable at tol={tol} after {settings.DECOMPOSITION_RETRIES} attempts ({last_error})"
    )


def compute_irreps(group: FiniteGroup, method: str = "auto", seed: int = 0, tol: Optional[float] = None) -> IrrepTable:
    """catalog, numeric, or auto (catalog with numeric fallback)"""
    if method == "catalog":
        return irreps_catalog(group)
    if method == "numeric":
        return irreps_numeric(group, seed=seed, tol=tol)
    if method != "auto":
        raise InvalidSpec(f"unknown irrep method '{method}'; expected catalog, numeric or auto")
    try:
        return irreps_catalog(group)
    except UnsupportedFamily:
        logger.info(f"Falling back to numeric irreps for {group.label}")
        return irreps_numeric(group, seed=seed, tol=tol)

# ---------------------------------------------------------------------------
# Validation

def character_table(table: IrrepTable) -> tuple[list[list[int]], np.ndarray]:
    """Characters evaluated on one representative per conjugacy class"""
    classes = [list(members) for members in table.group.classes]
    representatives = [members[0] for members in classes]
    matrix = np.array([irrep.character[representatives] for irrep in table.irreps])
    return classes, matrix


def _op_norms(stack: np.ndarray) -> np.ndarray:
    if stack.size == 0:
        return np.zeros(stack.shape[:-2])
    return np.linalg.norm(stack, ord=2, axis=(-2, -1))


def validate_irreps(table: IrrepTable) -> IrrepValidationReport:
    """
    Worst-case residual of every IrrepTable invariant.

    Returns a report; failures are content, never exceptions.
    """
    group = table.group
    order = group.order
    tolerances = {
        "unitarity": settings.UNITARITY_TOL,
        "homomorphism": settings.HOMOMORPHISM_TOL,
        "irreducibility": settings.IRREDUCIBILITY_TOL,
        "orthogonality": settings.ORTHOGONALITY_TOL,
        "inequivalence": settings.INEQUIVALENCE_TOL,
        "class_orthogonality": settings.INEQUIVALENCE_TOL,
        "completeness": 0.0,
    }
    residuals = {name: 0.0 for name in tolerances}
    failures: list[str] = []

    for k, irrep in enumerate(table.irreps):
        m = irrep.matrices
        d = irrep.degree
        unitarity = _op_norms(m @ m.conj().transpose(0, 2, 1) - np.eye(d))
        worst = int(np.argmax(unitarity))
        residuals["unitarity"] = max(residuals["unitarity"], float(unitarity[worst]))
        if unitarity[worst] >= tolerances["unitarity"]:
            failures.append(f"unitarity: irrep {k} at element {worst} (residual {unitarity[worst]:.3e})")

        homomorphism = _op_norms(m[group.mul] - np.einsum("gij,hjk->ghik", m, m))
        g, h = np.unravel_index(int(np.argmax(homomorphism)), homomorphism.shape)
        residuals["homomorphism"] = max(residuals["homomorphism"], float(homomorphism[g, h]))
        if homomorphism[g, h] >= tolerances["homomorphism"]:
            failures.append(f"homomorphism: irrep {k} at ({g}, {h}) (residual {homomorphism[g, h]:.3e})")

        irreducibility = abs(float(np.mean(np.abs(irrep.character) ** 2)) - 1.0)
        residuals["irreducibility"] = max(residuals["irreducibility"], irreducibility)
        if irreducibility >= tolerances["irreducibility"]:
            failures.append(f"irreducibility: irrep {k} (residual {irreducibility:.3e})")

    if table.irreps:
        # Schur: columns sqrt(d) pi_ij are orthonormal for the normalized Haar inner product
        coefficients = np.concatenate(
            [math.sqrt(irrep.degree) * irrep.matrices.reshape(order, -1) for irrep in table.irreps], axis=1
        )
        gram = coefficients.conj().T @ coefficients / order
        residuals["orthogonality"] = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

        characters = np.array([irrep.character for irrep in table.irreps])
        inner = characters @ characters.conj().T / order
        residuals["inequivalence"] = float(np.max(np.abs(inner - np.eye(len(characters)))))

        classes, char_matrix = character_table(table)
        sizes = np.array([len(members) for members in classes])
        columns = char_matrix.conj().T @ char_matrix * sizes[:, None] / order
        if columns.shape[0] == len(table.irreps):
            residuals["class_orthogonality"] = float(np.max(np.abs(columns - np.eye(len(classes)))))
        else:
            residuals["class_orthogonality"] = float("inf")

    for name in ("orthogonality", "inequivalence", "class_orthogonality"):
        if residuals[name] >= tolerances[name]:
            failures.append(f"{name}: residual {residuals[name]:.3e}")

    total = sum(d * d for d in table.degrees)
    residuals["completeness"] = float(order - total)
    if total != order:
        failures.append(f"completeness: sum of squared degrees {total} != |G| = {order}")

    checks = {}
    for name, tol in tolerances.items():
        if name == "completeness":
            checks[name] = total == order
        else:
            checks[name] = residuals[name] < tol
    return IrrepValidationReport(
        group=group.label,
        degrees=table.degrees,
        residuals=residuals,
        tolerances=tolerances,
        checks=checks,
        failures=failures,
        passed=not failures,
    )
