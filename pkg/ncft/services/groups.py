import itertools
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from ncft.core.config import settings
from ncft.core.exceptions import InvalidFile, InvalidSpec, InvalidTable
from ncft.models.group import GroupFamily, GroupSpec, TableValidationReport
from ncft.services.storage import read_json

logger = logging.getLogger(__name__)

@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """
    Finite group on dense indices 0..order-1 with element 0 the identity.

    Haar measure is uniform with weight 1/order per element. `elements`
    carries family data (rotation/reflection pairs, quaternion units,
    permutations) used by the closed-form irreps; it is empty for tables.
    """
    spec: GroupSpec
    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...]
    classes: tuple[tuple[int, ...], ...]
    elements: tuple = ()
    factors: tuple["FiniteGroup", ...] = ()

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @property
    def identity(self) -> int:
        return 0

    @property
    def label(self) -> str:
        return self.spec.label

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def same_as(self, other: "FiniteGroup") -> bool:
        return self is other or (self.order == other.order and np.array_equal(self.mul, other.mul))

    def summary(self) -> dict:
        return {
            "group": self.label,
            "order": self.order,
            "abelian": self.is_abelian,
            "classes": [list(members) for members in self.classes],
            "class_sizes": [len(members) for members in self.classes],
            "labels": list(self.labels),
        }

# ---------------------------------------------------------------------------
# Spec grammar

_SHORT_NAMES = {"z": GroupFamily.cyclic, "c": GroupFamily.cyclic, "d": GroupFamily.dihedral, "s": GroupFamily.symmetric}
_LONG_NAMES = {"cyclic": GroupFamily.cyclic, "dihedral": GroupFamily.dihedral, "symmetric": GroupFamily.symmetric}


def _split_top(text: str, separator: str) -> list[str]:
    """Split on separator outside parentheses"""
    parts, depth, start = [], 0, 0
    for i, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise InvalidSpec(f"unbalanced parentheses in '{text}'")
        elif char == separator and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise InvalidSpec(f"unbalanced parentheses in '{text}'")
    parts.append(text[start:])
    return [part.strip() for part in parts]


def _parse_atom(text: str) -> GroupSpec:
    if text.startswith("(") and text.endswith(")"):
        return _parse_expression(text[1:-1])
    if text in ("q8", "quaternion8", "quaternion"):
        return GroupSpec(family=GroupFamily.quaternion8)
    match = re.fullmatch(r"product\((.*)\)", text)
    if match:
        args = _split_top(match.group(1), ",")
        if len(args) != 2:
            raise InvalidSpec(f"product needs two factors: '{text}'")
        return GroupSpec(family=GroupFamily.product, factors=tuple(_parse_expression(arg) for arg in args))
    match = re.fullmatch(r"([zcds])(\d+)", text)
    if match:
        return GroupSpec(family=_SHORT_NAMES[match.group(1)], n=int(match.group(2)))
    match = re.fullmatch(r"(cyclic|dihedral|symmetric)(?:\((\d+)\)|:(\d+))", text)
    if match:
        return GroupSpec(family=_LONG_NAMES[match.group(1)], n=int(match.group(2) or match.group(3)))
    raise InvalidSpec(
        f"unknown group '{text}'; try Z4, D4, Q8, S3, Z2xZ2, product(Z2,S3) or table:path.json"
    )


def _parse_expression(text: str) -> GroupSpec:
    parts = _split_top(text, "x")
    if any(not part for part in parts):
        raise InvalidSpec(f"empty factor in '{text}'")
    factors = [_parse_atom(part) for part in parts]
    spec = factors[0]
    for factor in factors[1:]:
        spec = GroupSpec(family=GroupFamily.product, factors=(spec, factor))
    return spec


def parse_group_spec(text: str) -> GroupSpec:
    """
    Parse a group spec string.

    Args:
        text: e.g. "Z4", "cyclic(4)", "D4", "Q8", "S3", "Z2xZ2",
            "product(Z2,S3)" or "table:path.json"

    Returns:
        GroupSpec

    Raises:
        InvalidSpec: unknown family, bad syntax or parameter out of range
    """
    source = (text or "").strip()
    if not source:
        raise InvalidSpec("empty group spec")
    try:
        if source.lower().startswith("table:"):
            return GroupSpec(family=GroupFamily.table, path=source[len("table:"):])
        return _parse_expression(source.lower().replace(" ", ""))
    except ValidationError as e:
        raise InvalidSpec(f"invalid group spec '{source}': {e.errors()[0]['msg']}") from e

# ---------------------------------------------------------------------------
# Table axioms

def validate_table(mul) -> TableValidationReport:
    """
    Check the group axioms of a multiplication table.

    Failures are report content, never exceptions. Associativity is checked
    exhaustively up to order 64 and on 10*order^2 sampled triples above.
    """
    checks = {"closure": False, "latin": False, "identity": False, "inverses": False, "associativity": False}
    failures: list[str] = []
    try:
        table = np.asarray(mul)
    except (ValueError, TypeError):
        table = None
    if table is None or table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        failures.append("closure: table must be a non-empty square array")
        return TableValidationReport(passed=False, checks=checks, failures=failures)
    n = table.shape[0]
    if not np.issubdtype(table.dtype, np.integer) or table.min() < 0 or table.max() >= n:
        failures.append(f"closure: entries must be integers in 0..{n - 1}")
        return TableValidationReport(passed=False, checks=checks, failures=failures)
    checks["closure"] = True

    expected = np.arange(n)
    bad_rows = [i for i in range(n) if not np.array_equal(np.sort(table[i]), expected)]
    bad_cols = [j for j in range(n) if not np.array_equal(np.sort(table[:, j]), expected)]
    if bad_rows or bad_cols:
        where = f"row {bad_rows[0]}" if bad_rows else f"column {bad_cols[0]}"
        failures.append(f"latin: not a Latin square ({where} repeats an element)")
        return TableValidationReport(passed=False, checks=checks, failures=failures)
    checks["latin"] = True

    identity = None
    for e in range(n):
        if np.array_equal(table[e], expected) and np.array_equal(table[:, e], expected):
            identity = e
            break
    if identity is None:
        failures.append("identity: no two-sided identity element")
        return TableValidationReport(passed=False, checks=checks, failures=failures)
    checks["identity"] = True

    # Latin rows give a unique right inverse; it must also be a left inverse
    right_inverse = np.argmax(table == identity, axis=1)
    left_ok = table[right_inverse, np.arange(n)] == identity
    if not left_ok.all():
        g = int(np.flatnonzero(~left_ok)[0])
        failures.append(f"inverses: element {g} has no two-sided inverse")
    else:
        checks["inverses"] = True

    checks["associativity"], witness = _check_associativity(table)
    if witness is not None:
        failures.append(f"associativity: (a*b)*c != a*(b*c) for (a, b, c) = {witness}")

    return TableValidationReport(passed=not failures, checks=checks, failures=failures, identity=identity)


def _check_associativity(table: np.ndarray) -> tuple[bool, Optional[tuple[int, int, int]]]:
    n = table.shape[0]
    if n <= settings.EXHAUSTIVE_ASSOCIATIVITY_ORDER:
        left = table[table]  # left[a, b, c] = (a*b)*c
        right = table[np.arange(n)[:, None, None], table[None, :, :]]  # a*(b*c)
        bad = np.argwhere(left != right)
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, 10 * n * n))
        mismatch = table[table[a, b], c] != table[a, table[b, c]]
        bad = np.stack([a, b, c], axis=1)[mismatch]
    if len(bad):
        return False, tuple(int(v) for v in bad[0])
    return True, None

# ---------------------------------------------------------------------------
# Construction

def conjugacy_classes(group: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    """Partition into conjugacy classes, ordered by smallest member"""
    return _conjugacy_partition(group.mul, group.inv)


def _conjugacy_partition(mul: np.ndarray, inv: np.ndarray) -> tuple[tuple[int, ...], ...]:
    # conj[h, x] = h x h^-1
    conj = mul[mul, inv[:, None]]
    assigned = np.zeros(mul.shape[0], dtype=bool)
    classes = []
    for x in range(mul.shape[0]):
        if assigned[x]:
            continue
        members = tuple(sorted(set(int(y) for y in conj[:, x])))
        assigned[list(members)] = True
        classes.append(members)
    return tuple(classes)


def _inverses(mul: np.ndarray) -> np.ndarray:
    return np.argmax(mul == 0, axis=1)


def _table_from_elements(elements: Sequence[Hashable], compose: Callable) -> np.ndarray:
    index = {element: i for i, element in enumerate(elements)}
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            mul[i, j] = index[compose(a, b)]
    return mul


def _power_label(symbol: str, k: int) -> str:
    if k == 0:
        return ""
    return symbol if k == 1 else f"{symbol}^{k}"


def _cyclic(n: int):
    mul = np.add.outer(np.arange(n), np.arange(n)) % n
    labels = ["e"] + [_power_label("r", k) for k in range(1, n)]
    return tuple(range(n)), mul, labels


def _dihedral(n: int):
    # r^k s^f stored at index k + n*f
    elements = [(k, f) for f in range(2) for k in range(n)]

    def compose(x, y):
        (a, f), (b, g) = x, y
        return ((a + (b if f == 0 else -b)) % n, (f + g) % 2)

    labels = [(_power_label("r", k) + (" s" if f else "")).strip() or "e" for k, f in elements]
    return tuple(elements), _table_from_elements(elements, compose), labels


_QUATERNION_UNITS = {
    "1": np.array([1, 0, 0, 0]),
    "i": np.array([0, 1, 0, 0]),
    "j": np.array([0, 0, 1, 0]),
    "k": np.array([0, 0, 0, 1]),
}


def _quaternion_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def _quaternion8():
    # (sign, unit) in the order 1, -1, i, -i, j, -j, k, -k
    elements = [(sign, unit) for unit in "1ijk" for sign in (1, -1)]

    def compose(x, y):
        product = _quaternion_product(x[0] * _QUATERNION_UNITS[x[1]], y[0] * _QUATERNION_UNITS[y[1]])
        axis = int(np.flatnonzero(product)[0])
        return (int(product[axis]), "1ijk"[axis])

    labels = [("" if sign > 0 else "-") + unit for sign, unit in elements]
    return tuple(elements), _table_from_elements(elements, compose), labels


def _cycle_label(perm: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle, x = [], start
        while x not in seen:
            seen.add(x)
            cycle.append(x)
            x = perm[x]
        cycles.append("(" + " ".join(str(v) for v in cycle) + ")")
    return "".join(cycles) or "e"


def _symmetric(n: int):
    # lexicographic order puts the identity first
    elements = list(itertools.permutations(range(n)))

    def compose(s, t):
        return tuple(s[t[x]] for x in range(n))

    labels = [_cycle_label(perm) for perm in elements]
    return tuple(elements), _table_from_elements(elements, compose), labels


def _relabel_identity_first(mul: np.ndarray, labels: list[str], identity: int):
    if identity == 0:
        return mul, labels
    order = [identity] + [g for g in range(mul.shape[0]) if g != identity]
    position = np.empty(len(order), dtype=np.int64)
    position[order] = np.arange(len(order))
    new_mul = position[mul[np.ix_(order, order)]]
    return new_mul, [labels[g] for g in order]


def _load_table(path: str):
    try:
        payload = read_json(path)
    except (OSError, InvalidFile) as e:
        raise InvalidTable(f"cannot read multiplication table {path}: {e}") from e
    if not isinstance(payload, dict) or "mul" not in payload:
        raise InvalidTable(f"{path}: expected an object with 'order' and 'mul'")
    mul = payload["mul"]
    report = validate_table(mul)
    if not report.passed:
        raise InvalidTable(f"{path}: " + "; ".join(report.failures), report.failures)
    mul = np.asarray(mul, dtype=np.int64)
    if payload.get("order", mul.shape[0]) != mul.shape[0]:
        raise InvalidTable(f"{path}: order {payload['order']} does not match a {mul.shape[0]}x{mul.shape[0]} table")
    labels = payload.get("labels") or [str(g) for g in range(mul.shape[0])]
    if len(labels) != mul.shape[0]:
        raise InvalidTable(f"{path}: expected {mul.shape[0]} labels, got {len(labels)}")
    return _relabel_identity_first(mul, [str(label) for label in labels], report.identity)


@lru_cache(maxsize=64)
def _build_cached(spec: GroupSpec) -> FiniteGroup:
    factors: tuple[FiniteGroup, ...] = ()
    elements: tuple = ()
    if spec.family == GroupFamily.cyclic:
        elements, mul, labels = _cyclic(spec.n)
    elif spec.family == GroupFamily.dihedral:
        elements, mul, labels = _dihedral(spec.n)
    elif spec.family == GroupFamily.quaternion8:
        elements, mul, labels = _quaternion8()
    elif spec.family == GroupFamily.symmetric:
        elements, mul, labels = _symmetric(spec.n)
    elif spec.family == GroupFamily.product:
        left, right = (_build_cached(factor) for factor in spec.factors)
        factors = (left, right)
        nb = right.order
        mul = (left.mul[:, None, :, None] * nb + right.mul[None, :, None, :]).reshape(left.order * nb, left.order * nb)
        labels = [f"({a},{b})" for a in left.labels for b in right.labels]
    else:
        mul, labels = _load_table(spec.path)

    mul = np.ascontiguousarray(mul, dtype=np.int64)
    mul.setflags(write=False)
    inv = _inverses(mul)
    inv.setflags(write=False)
    group = FiniteGroup(
        spec=spec,
        mul=mul,
        inv=inv,
        labels=tuple(labels),
        classes=_conjugacy_partition(mul, inv),
        elements=elements,
        factors=factors,
    )
    logger.debug(f"Built {spec.label}: order {group.order}, {len(group.classes)} classes")
    return group


def build_group(spec: GroupSpec | str) -> FiniteGroup:
    """
    Build a validated group from a spec; deterministic for a given spec.

    Args:
        spec: GroupSpec or spec string

    Returns:
        FiniteGroup with element 0 the identity

    Raises:
        InvalidSpec: unsupported family or parameter
        InvalidTable: table source fails an axiom
    """
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    if spec.family == GroupFamily.table:
        # files can change between calls
        return _build_cached.__wrapped__(spec)
    return _build_cached(spec)
