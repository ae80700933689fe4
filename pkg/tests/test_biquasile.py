import itertools

import pytest

from conftest import read_data
from python.biquasile import (
    AlexanderParams,
    Biquasile,
    MalformedTableError,
    ParameterError,
    Verdict,
    alexander,
    alexander_divisions,
    check_axioms,
    derived_divisions,
    enumerate_biquasiles,
    is_alexander,
    latin_squares,
    render_block_matrix,
    unit_triples,
)
from python.parallel import resolve_workers


def satisfies_axioms(B):
    """Direct evaluation of both exchange axioms over every (a, b, x, y)."""
    s, d = B.op_star, B.op_dot
    for a, b, x, y in itertools.product(range(1, B.order + 1), repeat=4):
        y_ab = s(y, d(a, b))
        a_xy = s(a, d(x, y))
        if s(a, d(x, y_ab)) != s(a_xy, d(x, s(y, d(a_xy, b)))):
            return False
        if s(y, d(a_xy, b)) != s(y_ab, d(s(a, d(x, y_ab)), b)):
            return False
    return True


def is_latin(table):
    n = len(table)
    return all(sorted(r) == list(range(1, n + 1)) for r in table) and \
        all(sorted(c) == list(range(1, n + 1)) for c in zip(*table))


class TestTables:
    def test_alexander_block_matrix(self, z3_alexander):
        assert render_block_matrix(z3_alexander) == "1 3 2 | 2 3 1\n3 2 1 | 3 1 2\n2 1 3 | 1 2 3"

    def test_linear_example_block_matrix(self, z3_linear):
        assert render_block_matrix(z3_linear) == "3 1 2 | 1 3 2\n2 3 1 | 3 2 1\n1 2 3 | 2 1 3"

    def test_json_fixture_matches_construction(self, z3_alexander):
        assert Biquasile.from_json(read_data("biquasile_z3_alexander.json")) == z3_alexander

    def test_json_roundtrip(self, order_two):
        assert Biquasile.from_json(order_two.to_json()) == order_two

    def test_entry_out_of_range(self):
        with pytest.raises(MalformedTableError):
            Biquasile(2, [[1, 3], [2, 1]], [[1, 2], [2, 1]])

    def test_wrong_shape(self):
        with pytest.raises(MalformedTableError):
            Biquasile(2, [[1, 2]], [[1, 2], [2, 1]])

    def test_missing_json_key(self):
        with pytest.raises(MalformedTableError):
            Biquasile.from_json({'order': 2, 'star': [[1, 2], [2, 1]]})

    def test_operations_are_one_indexed(self, z3_alexander):
        assert z3_alexander.op_star(1, 2) == 3
        assert z3_alexander.op_dot(3, 3) == 3


class TestAxioms:
    def test_order_one(self):
        assert check_axioms(Biquasile(1, [[1]], [[1]])).valid

    def test_order_two_example(self, order_two):
        assert check_axioms(order_two).valid == satisfies_axioms(order_two)
        assert check_axioms(order_two).valid

    def test_latin_failure_names_the_table(self):
        verdict = check_axioms(Biquasile(2, [[1, 1], [2, 2]], [[1, 2], [2, 1]]))
        assert verdict == Verdict(False, "latin-star", (1, 1), "row 1 of star repeats 1")
        assert verdict.describe() == "fail: latin-star row 1 of star repeats 1"

    def test_dot_column_failure(self):
        verdict = check_axioms(Biquasile(2, [[1, 2], [2, 1]], [[1, 2], [1, 2]]))
        assert not verdict.valid
        assert verdict.axiom == "latin-dot"
        assert verdict.reason == "column 1 of dot repeats 1"

    def test_exchange_failure_has_witness(self):
        for star, dot in itertools.product(latin_squares(3), repeat=2):
            B = Biquasile(3, star, dot)
            if not satisfies_axioms(B):
                verdict = check_axioms(B)
                assert not verdict.valid
                assert verdict.axiom in ("i", "ii")
                assert len(verdict.witness) == 4
                break
        else:
            pytest.fail("every Latin pair of order 3 satisfied the axioms")

    @pytest.mark.parametrize("m", range(2, 8))
    def test_every_alexander_biquasile_passes(self, m):
        for p in unit_triples(m):
            assert check_axioms(alexander(p)).valid, p.label()

    def test_verdict_dict(self):
        assert Verdict(True).as_dict() == {'valid': True, 'axiom': None, 'witness': None, 'reason': ''}


class TestAlexanderParams:
    def test_parse(self):
        assert AlexanderParams.parse("3, 1, 1, 2") == AlexanderParams(3, 1, 1, 2)
        assert AlexanderParams.parse("5,6,1,1").d == 1

    @pytest.mark.parametrize("text", ["3,1,1", "3,a,1,1", "4,2,1,1", "1,1,1,1"])
    def test_rejected(self, text):
        with pytest.raises(ParameterError):
            AlexanderParams.parse(text)

    def test_zero_label(self):
        p = AlexanderParams(3, 1, 1, 2)
        assert p.to_label(0) == 3
        assert p.residue(3) == 0

    def test_unit_triples(self):
        assert len(unit_triples(2)) == 1
        assert len(unit_triples(6)) == 8
        assert len(unit_triples(7)) == 216

    @pytest.mark.parametrize("m", range(2, 8))
    def test_closed_form_divisions(self, m):
        for p in unit_triples(m):
            assert alexander_divisions(p) == derived_divisions(alexander(p))

    def test_is_alexander(self, z3_alexander, order_two):
        assert is_alexander(z3_alexander) == AlexanderParams(3, 1, 1, 2)
        assert is_alexander(order_two) is None


class TestDivisions:
    def test_divisions_invert(self, z3_alexander):
        B = z3_alexander
        div = B.divisions
        for y, z in itertools.product(range(1, 4), repeat=2):
            assert B.op_star(y, div.star_left[y - 1][z - 1]) == z
            assert B.op_star(div.star_right[z - 1][y - 1], y) == z
            assert B.op_dot(y, div.dot_left[y - 1][z - 1]) == z
            assert B.op_dot(div.dot_right[z - 1][y - 1], y) == z

    def test_non_latin_has_no_divisions(self):
        with pytest.raises(ValueError):
            derived_divisions(Biquasile(2, [[1, 1], [2, 2]], [[1, 2], [2, 1]]))


class TestEnumeration:
    def test_latin_square_counts(self):
        assert [len(latin_squares(n)) for n in (1, 2, 3, 4)] == [1, 2, 12, 576]
        assert all(is_latin(t) for t in latin_squares(3))
        assert list(latin_squares(3)) == sorted(latin_squares(3))

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_matches_exhaustive_check(self, order):
        expected = sorted(
            (star, dot)
            for star, dot in itertools.product(latin_squares(order), repeat=2)
            if satisfies_axioms(Biquasile(order, star, dot))
        )
        found = enumerate_biquasiles(order)
        assert [(B.star, B.dot) for B in found] == expected

    def test_contains_order_two_example(self, order_two):
        assert order_two in enumerate_biquasiles(2)

    def test_contains_alexander_tables(self, z3_alexander, z3_linear):
        found = enumerate_biquasiles(3)
        assert z3_alexander in found
        assert z3_linear in found

    def test_workers_do_not_change_output(self):
        assert enumerate_biquasiles(3, workers=2) == enumerate_biquasiles(3)

    @pytest.mark.slow
    def test_order_four(self):
        found = enumerate_biquasiles(4, workers=resolve_workers())
        assert len(found) == 2880
        assert len(set(found)) == 2880
        for B in found:
            assert check_axioms(B).valid, (B.star, B.dot)

    def test_unsupported_order(self):
        with pytest.raises(ParameterError):
            enumerate_biquasiles(5)
