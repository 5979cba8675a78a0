import json

import numpy as np
import pytest

from ncft.core.exceptions import InvalidSpec, InvalidTable
from ncft.models.group import GroupFamily
from ncft.services.groups import build_group, conjugacy_classes, parse_group_spec, validate_table


class TestGroupSpecs:

    @pytest.mark.parametrize("text,label,order", [
        ("Z4", "Z4", 4),
        ("C4", "Z4", 4),
        ("cyclic(4)", "Z4", 4),
        ("cyclic:4", "Z4", 4),
        ("D4", "D4", 8),
        ("dihedral(3)", "D3", 6),
        ("Q8", "Q8", 8),
        ("quaternion8", "Q8", 8),
        ("S3", "S3", 6),
        ("symmetric(4)", "S4", 24),
        ("Z2xZ3", "product(Z2,Z3)", 6),
        ("product(Z2,S3)", "product(Z2,S3)", 12),
    ])
    def test_parse_known_specs(self, text, label, order):
        """Every accepted spelling parses to a canonical label and order"""
        spec = parse_group_spec(text)
        assert spec.label == label
        assert spec.expected_order == order
        assert build_group(spec).order == order

    def test_label_round_trips(self):
        """Canonical labels parse back to the same spec"""
        spec = parse_group_spec("product(Z2,product(S3,Q8))")
        assert parse_group_spec(spec.label) == spec

    @pytest.mark.parametrize("text", ["nonsense", "", "Z0", "S9", "D100", "Z2x", "product(Z2)", "((Z2)"])
    def test_rejects_bad_specs(self, text):
        """Unknown families, out-of-range parameters and bad syntax raise InvalidSpec"""
        with pytest.raises(InvalidSpec):
            build_group(text)

    def test_table_spec(self):
        """table: prefix keeps the path verbatim"""
        spec = parse_group_spec("table:groups/Z3.json")
        assert spec.family == GroupFamily.table
        assert spec.path == "groups/Z3.json"


class TestBuildGroup:

    def test_trivial_group(self):
        """cyclic(1) is the one-element group"""
        group = build_group("cyclic(1)")
        assert group.order == 1
        assert group.mul.tolist() == [[0]]

    @pytest.mark.parametrize("spec", ["Z5", "D4", "Q8", "S3", "S4", "Z2xZ2", "product(Z3,S3)"])
    def test_tables_are_groups(self, spec):
        """Built tables satisfy every axiom with identity at index 0"""
        group = build_group(spec)
        report = validate_table(group.mul.tolist())
        assert report.passed, report.failures
        assert report.identity == 0
        assert np.all(group.mul[group.inv, np.arange(group.order)] == 0)

    def test_klein_four_involutions(self):
        """Every non-identity element of Z2 x Z2 squares to the identity"""
        group = build_group("product(cyclic(2),cyclic(2))")
        assert group.order == 4
        squares = group.mul[np.arange(4), np.arange(4)]
        assert squares.tolist() == [0, 0, 0, 0]

    def test_quaternion_classes(self):
        """Q8 has classes {1}, {-1}, {+-i}, {+-j}, {+-k}"""
        group = build_group("Q8")
        classes = conjugacy_classes(group)
        assert len(classes) == 5
        labels = sorted(sorted(group.labels[g] for g in members) for members in classes)
        assert labels == sorted([["1"], ["-1"], ["-i", "i"], ["-j", "j"], ["-k", "k"]])

    def test_dihedral_is_not_abelian(self):
        """D4 is non-abelian and Z6 is abelian"""
        assert not build_group("D4").is_abelian
        assert build_group("Z6").is_abelian

    def test_build_is_deterministic(self):
        """Same spec gives the same table"""
        assert np.array_equal(build_group("S4").mul, build_group("symmetric(4)").mul)

    def test_arrays_are_read_only(self):
        """Cached groups cannot be mutated by callers"""
        group = build_group("Z3")
        with pytest.raises(ValueError):
            group.mul[0, 0] = 1


class TestConjugacyClasses:

    def test_abelian_singletons(self):
        """cyclic(n) has n singleton classes"""
        classes = conjugacy_classes(build_group("Z7"))
        assert len(classes) == 7
        assert all(len(members) == 1 for members in classes)

    def test_symmetric_three(self):
        """S3 has classes of sizes 1, 3, 2"""
        sizes = sorted(len(members) for members in conjugacy_classes(build_group("S3")))
        assert sizes == [1, 2, 3]

    def test_dihedral_four(self):
        """D4 (order 8) has 5 classes"""
        assert len(conjugacy_classes(build_group("D4"))) == 5

    def test_partition_covers_group(self):
        """Classes are disjoint and cover every element"""
        group = build_group("S4")
        members = sorted(g for cls in conjugacy_classes(group) for g in cls)
        assert members == list(range(group.order))


class TestValidateTable:

    def test_trivial_table(self):
        """[[0]] is a group"""
        assert validate_table([[0]]).passed

    def test_z2(self):
        """[[0,1],[1,0]] is Z_2"""
        report = validate_table([[0, 1], [1, 0]])
        assert report.passed
        assert all(report.checks.values())

    def test_not_latin(self):
        """A repeated row entry fails the Latin square check"""
        report = validate_table([[0, 1], [1, 1]])
        assert not report.passed
        assert report.checks["latin"] is False
        assert report.failures[0].startswith("latin")

    def test_out_of_range(self):
        """Entries outside 0..n-1 fail closure"""
        report = validate_table([[0, 2], [2, 0]])
        assert not report.passed
        assert report.failures[0].startswith("closure")

    def test_non_associative(self):
        """A Latin square with identity but no associativity is rejected"""
        # loop of order 5 that is not a group
        table = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
        report = validate_table(table)
        assert not report.passed
        assert report.checks["latin"] and report.checks["identity"]
        assert any(failure.startswith("associativity") for failure in report.failures)

    def test_ragged_input(self):
        """Non-square input is a failed report, not an exception"""
        assert not validate_table([[0, 1], [1]]).passed


class TestTableFiles:

    def _write(self, tmp_path, payload) -> str:
        path = tmp_path / "group.json"
        path.write_text(json.dumps(payload))
        return str(path)

    def test_identity_relabelled_first(self, tmp_path):
        """A Z3 table with identity at index 1 is relabelled so identity is 0"""
        # element 1 is the identity; 0 and 2 are the generators
        mul = [[2, 0, 1], [0, 1, 2], [1, 2, 0]]
        path = self._write(tmp_path, {"order": 3, "mul": mul, "labels": ["a", "e", "b"]})
        group = build_group(f"table:{path}")
        assert group.order == 3
        assert group.labels[0] == "e"
        assert group.mul[0].tolist() == [0, 1, 2]
        assert validate_table(group.mul.tolist()).passed

    def test_invalid_table_file(self, tmp_path):
        """A table failing an axiom raises InvalidTable naming the axiom"""
        path = self._write(tmp_path, {"order": 2, "mul": [[0, 1], [1, 1]]})
        with pytest.raises(InvalidTable) as excinfo:
            build_group(f"table:{path}")
        assert any(failure.startswith("latin") for failure in excinfo.value.failures)

    def test_missing_file(self, tmp_path):
        """An unreadable path raises InvalidTable"""
        with pytest.raises(InvalidTable):
            build_group(f"table:{tmp_path / 'missing.json'}")
