import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ncft.core.exceptions import GroupMismatch, ShapeMismatch
from ncft.models.space import OperatorSpaceDesc, SpaceKind
from ncft.services.groups import FiniteGroup, build_group
from ncft.services.representations import IrrepTable
from ncft.services.schatten import BlockMatrix, pair
from ncft.services.storage import decode_complex, encode_complex

logger = logging.getLogger(__name__)

@dataclass(frozen=True, eq=False)
class GroupFunction:
    """E-valued function on G; values[g] is the value at element g"""
    group: FiniteGroup
    space: OperatorSpaceDesc
    values: np.ndarray

    def __post_init__(self):
        expected = (self.group.order, *self.space.value_shape)
        if self.values.shape != expected:
            raise ShapeMismatch(f"{self.space.label} function on {self.group.label} needs shape {expected}, got {self.values.shape}")

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        return GroupFunction(self.group, self.space, self.values + other.values)

    def scaled(self, factor: complex) -> "GroupFunction":
        return GroupFunction(self.group, self.space, factor * self.values)

    def to_json(self) -> dict:
        return {"group": self.group.label, "E": self.space.label, "values": encode_complex(self.values)}

    @classmethod
    def from_json(cls, payload: dict, group: Optional[FiniteGroup] = None) -> "GroupFunction":
        try:
            group = group or build_group(payload["group"])
            space = OperatorSpaceDesc.parse(payload.get("E", "scalar"))
            values = decode_complex(payload["values"])
        except KeyError as e:
            raise ShapeMismatch(f"function file is missing the '{e.args[0]}' field") from e
        except (AttributeError, TypeError) as e:
            raise ShapeMismatch(f"malformed function file: {e}") from e
        return cls(group=group, space=space, values=values)


@dataclass(frozen=True, eq=False)
class SpectralArray:
    """One block per irrep: blocks[k] has shape (d_k, d_k, *value_shape)"""
    table: IrrepTable
    space: OperatorSpaceDesc
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.table):
            raise ShapeMismatch(f"expected {len(self.table)} blocks, got {len(self.blocks)}")
        for k, (block, d) in enumerate(zip(self.blocks, self.table.degrees)):
            expected = (d, d, *self.space.value_shape)
            if block.shape != expected:
                raise ShapeMismatch(f"block {k} needs shape {expected}, got {block.shape}")

    def block_matrix(self, k: int, space: Optional[OperatorSpaceDesc] = None) -> BlockMatrix:
        return BlockMatrix(blocks=self.blocks[k], space=space or self.space)

    def to_json(self) -> dict:
        return {
            "group": self.table.group.label,
            "E": self.space.label,
            "blocks": [
                {"pi": k, "degree": d, "data": encode_complex(block)}
                for k, (block, d) in enumerate(zip(self.blocks, self.table.degrees))
            ],
        }

    @classmethod
    def from_json(cls, payload: dict, table: IrrepTable) -> "SpectralArray":
        try:
            space = OperatorSpaceDesc.parse(payload.get("E", "scalar"))
            entries = sorted(payload["blocks"], key=lambda entry: entry["pi"])
            blocks = tuple(decode_complex(entry["data"]) for entry in entries)
        except KeyError as e:
            raise ShapeMismatch(f"spectrum file is missing the '{e.args[0]}' field") from e
        except (AttributeError, TypeError) as e:
            raise ShapeMismatch(f"malformed spectrum file: {e}") from e
        return cls(table=table, space=space, blocks=blocks)


def forward(f: GroupFunction, table: IrrepTable) -> SpectralArray:
    """
    Fourier coefficients f^(pi) = (1/|G|) sum_g f(g) pi(g)*.

    Raises:
        GroupMismatch: f and table live on different groups
    """
    if not f.group.same_as(table.group):
        raise GroupMismatch(f"function on {f.group.label} but irreps of {table.group.label}")
    values = np.asarray(f.values, dtype=complex)
    blocks = tuple(
        np.tensordot(irrep.matrices.conj().transpose(0, 2, 1), values, axes=([0], [0])) / f.group.order
        for irrep in table.irreps
    )
    return SpectralArray(table=table, space=f.space, blocks=blocks)


def inverse(spectrum: SpectralArray) -> GroupFunction:
    """f(g) = sum_pi d_pi tr(A^pi pi(g)), the trace being partial over M_d"""
    table = spectrum.table
    values = np.zeros((table.group.order, *spectrum.space.value_shape), dtype=complex)
    for irrep, block in zip(table.irreps, spectrum.blocks):
        values += irrep.degree * np.tensordot(irrep.matrices.transpose(0, 2, 1), block, axes=([1, 2], [0, 1]))
    return GroupFunction(group=table.group, space=spectrum.space, values=values)


def pairing(a: SpectralArray, b: SpectralArray) -> Union[complex, np.ndarray]:
    """
    sum_pi d_pi tr(A^pi B^pi).

    E against E (or its dual) gives a scalar through the flattened trace;
    a scalar spectrum against an E-valued one gives an E-value through
    the partial trace.
    """
    if not a.table.group.same_as(b.table.group) or a.table.degrees != b.table.degrees:
        raise ShapeMismatch("pairing needs spectra over the same irrep table")
    scalar_a = a.space.kind == SpaceKind.SCALAR
    scalar_b = b.space.kind == SpaceKind.SCALAR
    degrees = a.table.degrees
    if scalar_a != scalar_b:
        total = 0
        for d, block_a, block_b in zip(degrees, a.blocks, b.blocks):
            term = np.einsum("ij,ji...->...", block_a, block_b) if scalar_a else np.einsum("ij...,ji->...", block_a, block_b)
            total = total + d * term
        return total
    if a.space.value_shape != b.space.value_shape:
        raise ShapeMismatch(f"cannot pair {a.space.label} with {b.space.label}")
    total = 0j
    for k, d in enumerate(degrees):
        total += d * pair(a.block_matrix(k).flat(), b.block_matrix(k).flat())
    return total


def involution(f: GroupFunction) -> GroupFunction:
    """g -> f(g^-1)"""
    return GroupFunction(group=f.group, space=f.space, values=f.values[f.group.inv])


def random_function(group: FiniteGroup, space: OperatorSpaceDesc, rng: np.random.Generator) -> GroupFunction:
    shape = (group.order, *space.value_shape)
    values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return GroupFunction(group=group, space=space, values=values)


def random_spectrum(table: IrrepTable, space: OperatorSpaceDesc, rng: np.random.Generator) -> SpectralArray:
    blocks = []
    for d in table.degrees:
        shape = (d, d, *space.value_shape)
        blocks.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return SpectralArray(table=table, space=space, blocks=tuple(blocks))


def delta(group: FiniteGroup, space: OperatorSpaceDesc, element: int, value) -> GroupFunction:
    """Function with the given E-value at one element, zero elsewhere"""
    values = np.zeros((group.order, *space.value_shape), dtype=complex)
    values[element] = value
    return GroupFunction(group=group, space=space, values=values)
