import itertools
import json
import random

import pytest

from conftest import read_data
from python.biquasile import AlexanderParams, alexander, enumerate_biquasiles, unit_triples
from python.boltzmann import (
    CONSTANT,
    COUNTEREXAMPLE,
    TRIVIAL_ZERO,
    BoltzmannWeight,
    CoefficientMismatch,
    EnhancedPolynomial,
    ScanRecord,
    WeightError,
    check_weight,
    classify,
    coloring_weight,
    compare_coefficients,
    enhanced_polynomial,
    format_weight,
    link_table,
    linear_family,
    linear_weight,
    scan_conjecture,
    separates,
    solve_weights,
    summarize_scan,
    weight_system,
    weights_from_space,
)
from python.coloring import ColoringAssignment, enumerate_colorings
from python.diagram import DRAWN, TRACED, dual_graph_from_json, to_dual_graph


def axiom_instances(B):
    """
    Both weight axioms as (positive triples, negative triples) pairs.

    Divisions are found by search so nothing here leans on the division tables.
    """
    n = B.order
    s, d = B.op_star, B.op_dot
    elements = range(1, n + 1)

    def solve(f, target):
        return next(w for w in elements if f(w) == target)

    instances = []
    for x in elements:
        xx = solve(lambda w: s(x, w), x)
        for a in elements:
            instances.append(([(x, a, solve(lambda w: d(a, w), xx))], []))
            instances.append(([(x, solve(lambda w: d(w, a), xx), a)], []))
    for x, y, a, b in itertools.product(elements, repeat=4):
        xab = s(x, d(a, b))
        bxy = s(b, d(x, y))
        instances.append((
            [(x, a, b), (b, xab, y), (xab, a, s(b, d(xab, y)))],
            [(b, x, y), (x, a, bxy), (bxy, s(x, d(a, bxy)), y)],
        ))
    return instances


def satisfies(instances, values, m):
    return all(
        (sum(values[t] for t in pos) - sum(values[t] for t in neg)) % m == 0
        for pos, neg in instances
    )


class TestWeight:
    def test_indexing(self, phi):
        assert phi.value(1, 1, 1) == 2
        assert phi.value(2, 2, 2) == 3
        assert phi.value(1, 1, 2) == 0
        assert phi.index(2, 1, 1) == 4

    def test_coefficient_count_checked(self):
        with pytest.raises(WeightError):
            BoltzmannWeight(2, 5, (0,) * 7)

    def test_missing_triple_with_total(self):
        with pytest.raises(WeightError):
            BoltzmannWeight.from_map(1, 3, {}, total=True)

    @pytest.mark.parametrize("data", [
        {'order': 2, 'modulus': 5, 'coeffs': {"1,2": 1}},
        {'order': 2, 'modulus': 5, 'coeffs': {"1,2,x": 1}},
        {'order': 2, 'modulus': 5, 'coeffs': {"1,2,3": 1}},
        {'order': 2, 'coeffs': {}},
    ])
    def test_bad_json(self, data):
        with pytest.raises(WeightError):
            BoltzmannWeight.from_json(data)

    def test_json_keeps_nonzero_entries(self, phi):
        assert phi.to_json() == read_data("weight_phi_z5.json")

    def test_arithmetic(self, phi):
        assert (phi + phi.scaled(4)).is_zero()
        assert phi.scaled(2).value(1, 1, 1) == 4

    def test_format(self):
        W = BoltzmannWeight.from_map(2, 5, {(1, 1, 1): 2, (1, 2, 2): 3, (2, 1, 1): 1})
        assert format_weight(W) == "2χ(1,1,1) + 3χ(1,2,2) + χ(2,1,1)"
        assert format_weight(W, ascii=True) == "2*chi(1,1,1) + 3*chi(1,2,2) + chi(2,1,1)"
        assert format_weight(W.scaled(0)) == "0"


class TestAxioms:
    def test_published_weights_pass(self, order_two, phi, phi_z6):
        assert check_weight(order_two, phi).valid
        for label, W in phi_z6.items():
            assert check_weight(order_two, W).valid, label

    def test_zero_weight_passes(self, z3_alexander):
        assert check_weight(z3_alexander, BoltzmannWeight(3, 7, (0,) * 27)).valid

    def test_vanishing_triple_witness(self, order_two):
        W = BoltzmannWeight.from_map(2, 5, {(1, 1, 2): 1})
        verdict = check_weight(order_two, W)
        assert not verdict.valid
        assert verdict.axiom == "i"
        assert verdict.witness == (1, 1, 2)

    def test_random_weights_match_direct_evaluation(self, order_two):
        rng = random.Random(7)
        instances = axiom_instances(order_two)
        triples = list(itertools.product(range(1, 3), repeat=3))
        for _ in range(200):
            values = {t: rng.randrange(5) for t in triples}
            W = BoltzmannWeight.from_map(2, 5, values, total=True)
            assert check_weight(order_two, W).valid == satisfies(instances, values, 5)

    def test_order_mismatch(self, z3_alexander, phi):
        with pytest.raises(WeightError):
            check_weight(z3_alexander, phi)


class TestSolve:
    def test_order_two_has_125_weights_mod_5(self, order_two, phi):
        space = solve_weights(order_two, 5)
        assert space.count == 125
        assert space.contains(phi.coeffs)

    def test_system_shape(self, z3_alexander):
        M = weight_system(z3_alexander, 3)
        assert (M.rows, M.cols) == (2 * 9 + 81, 27)

    def test_generators_pass(self, z3_alexander):
        space = solve_weights(z3_alexander, 3)
        for g in space.generators:
            assert check_weight(z3_alexander, BoltzmannWeight(3, 3, g)).valid

    @pytest.mark.parametrize("m", [2, 3])
    def test_count_matches_brute_force(self, m):
        triples = list(itertools.product(range(1, 3), repeat=3))
        for B in enumerate_biquasiles(2):
            instances = axiom_instances(B)
            expected = sum(
                satisfies(instances, dict(zip(triples, values)), m)
                for values in itertools.product(range(m), repeat=8)
            )
            space = solve_weights(B, m)
            assert space.count == expected
            assert len(weights_from_space(space, 2)) == expected


class TestLinear:
    @pytest.mark.parametrize("m", range(2, 8))
    def test_linear_weights_are_weights(self, m):
        for p in unit_triples(m):
            B = alexander(p)
            for gamma in range(m):
                assert check_weight(B, linear_weight(p, gamma)).valid, (p.label(), gamma)

    def test_single_generator_family(self, z3_linear):
        p = AlexanderParams(3, 2, 2, 1)
        family = linear_family(p)
        assert len(family.weights) == 3
        assert family.single_generator
        space = solve_weights(z3_linear, 3)
        assert all(space.contains(W.coeffs) for W in family.weights)

    def test_closed_form(self):
        W = linear_weight(AlexanderParams(3, 2, 2, 1), 2)
        for x, y, z in W.triples():
            assert W.value(x, y, z) == (x + 2 * y + 2 * z) % 3

    def test_listed_expansion_discrepancies(self):
        listing = read_data("linear_weight_listed_z3.json")
        p = AlexanderParams.parse(listing["alexander"])
        report = compare_coefficients(linear_weight(p, 2), [(c, tuple(t)) for c, t in listing["listed"]])
        assert not report.matches
        assert report.repeated == ((2, 3, 1),)
        assert report.mismatches == (
            CoefficientMismatch((2, 1, 3), 1, 0, 0),
            CoefficientMismatch((2, 3, 1), 1, 2, 2),
        )
        assert report.describe()[0] == "(2, 3, 1) listed more than once"

    def test_matching_listing(self):
        W = linear_weight(AlexanderParams(3, 2, 2, 1), 1)
        assert compare_coefficients(W, [(c, t) for t, c in W.nonzero()]).matches


class TestPolynomial:
    def test_multiset_conversion(self):
        poly = EnhancedPolynomial.from_multiset([0, 0, 0, 1, 1, 2, 3, 3], 4)
        assert poly.text() == "3 + 2u + u^2 + 2u^3"
        assert poly.evaluate_at_one() == 8
        assert poly.to_json()["terms"] == {"0": 3, "1": 2, "2": 1, "3": 2}

    def test_text_edge_cases(self):
        assert EnhancedPolynomial(5, (0, 0, 0, 0, 0)).text() == "0"
        assert str(EnhancedPolynomial(5, (0, 1, 0, 0, 0))) == "u"

    def test_pictured_coloring_weights(self, hopf_dual, phi):
        assert coloring_weight(hopf_dual, phi, ColoringAssignment(2, (1, 2, 1, 1))) == 0
        assert coloring_weight(hopf_dual, phi, ColoringAssignment(2, (2, 2, 1, 2))) == 1

    def test_drawn_rule_reads_output_region_at_negative_crossing(self):
        W = BoltzmannWeight(2, 5, (1, 0, 0, 0, 3, 0, 0, 0))
        f = ColoringAssignment(2, (1, 1, 1, 2))
        record = {"x": 0, "a": 1, "b": 2, "y": 3}
        negative = dual_graph_from_json({"regions": 4, "crossings": [dict(record, sign=-1)]})
        positive = dual_graph_from_json({"regions": 4, "crossings": [dict(record, sign=1)]})
        assert negative.weight_rule == DRAWN
        assert coloring_weight(negative, W, f) == 2
        assert coloring_weight(positive, W, f) == 1

    def test_traced_rule_reads_input_region(self):
        W = BoltzmannWeight(2, 5, (1, 0, 0, 0, 3, 0, 0, 0))
        f = ColoringAssignment(2, (1, 1, 1, 2))
        record = {"x": 0, "a": 1, "b": 2, "y": 3, "sign": -1}
        G = dual_graph_from_json({"regions": 4, "rule": TRACED, "crossings": [record]})
        assert coloring_weight(G, W, f) == 1
        assert coloring_weight(G, W, ColoringAssignment(2, (2, 1, 1, 1))) == 3

    def test_unknown_rule_rejected(self):
        with pytest.raises(ValueError):
            dual_graph_from_json({"regions": 1, "rule": "sideways", "crossings": []})

    def test_hopf_and_l4a1(self, hopf_dual, l4a1, order_two, phi):
        assert enhanced_polynomial(hopf_dual, order_two, phi).text() == "4 + 4u"
        assert enhanced_polynomial(l4a1, order_two, phi).text() == "4 + 4u^2"

    def test_proper_enhancement(self, hopf_dual, l4a1, order_two, phi):
        result = separates(hopf_dual, l4a1, order_two, phi)
        assert result.counts == (8, 8)
        assert result.proper
        assert not separates(hopf_dual, hopf_dual, order_two, phi).proper

    def test_order_mismatch(self, hopf_dual, z3_alexander, phi):
        with pytest.raises(WeightError):
            enhanced_polynomial(hopf_dual, z3_alexander, phi)


class TestTable:
    def test_bundled_rows(self, corpus, order_two, phi_z6):
        layout = read_data("link_table_z6.json")
        expected = {**layout["published"], **layout["corrections"]}
        assert len(expected) == 18
        diagrams = {name: to_dual_graph(corpus[name].diagram) for name in layout["published"]}
        table = link_table(diagrams, order_two, phi_z6)
        assert set(table) == set(expected)
        for name, cells in expected.items():
            for label, cell in zip(("phi1", "phi2", "phi3"), cells):
                assert table[name][label] == cell, (name, label)

    def test_rows_follow_linking_number(self, corpus, order_two, phi_z6):
        # two-component rows depend only on the linking number
        rows = {
            -1: ["4 + 4u^4", "4 + 4u^3", "8"],
            -2: ["4 + 4u^2", "8", "8"],
            2: ["4 + 4u^4", "8", "8"],
            -3: ["8", "4 + 4u^3", "8"],
        }
        diagrams = {name: to_dual_graph(corpus[name].diagram) for name in ("L2a1", "L4a1", "L6a2", "L7a2", "L7n1")}
        table = link_table(diagrams, order_two, phi_z6)
        for name, lk in (("L2a1", -1), ("L4a1", -2), ("L6a2", -3), ("L7a2", -2), ("L7n1", 2)):
            assert [table[name][k] for k in ("phi1", "phi2", "phi3")] == rows[lk], name

    def test_workers_do_not_change_table(self, corpus, order_two, phi_z6):
        diagrams = {name: to_dual_graph(corpus[name].diagram) for name in ("L2a1", "L4a1", "L5a1")}
        assert link_table(diagrams, order_two, phi_z6, workers=2) == link_table(diagrams, order_two, phi_z6)


class TestScan:
    def test_classify(self, hopf_dual, order_two, phi):
        colorings = enumerate_colorings(hopf_dual, order_two)
        poly, predicate, witness = classify(hopf_dual, phi, colorings)
        assert (poly, predicate) == ("4 + 4u", COUNTEREXAMPLE)
        assert witness in {c.colors for c in colorings}
        zero = BoltzmannWeight(2, 5, (0,) * 8)
        assert classify(hopf_dual, zero, colorings) == ("8", TRIVIAL_ZERO, None)

    def test_small_scan(self, hopf_dual, corpus):
        diagrams = {"L2a1": hopf_dual, "3_1": to_dual_graph(corpus["3_1"].diagram)}
        records = scan_conjecture(diagrams, [2, 3])
        assert len(records) == 2 * 2 + 8 * 3 * 2
        assert summarize_scan(records) == {TRIVIAL_ZERO: 52, CONSTANT: 0, COUNTEREXAMPLE: 0}
        assert [r.key for r in records] == sorted(r.key for r in records)

    def test_resume(self, tmp_path, hopf_dual, corpus):
        diagrams = {"L2a1": hopf_dual, "3_1": to_dual_graph(corpus["3_1"].diagram)}
        path = tmp_path / "scan.jsonl"
        first = scan_conjecture(diagrams, [3], resume_path=str(path), batch_size=3)
        lines = path.read_text().splitlines()
        assert len(lines) == len(first) == 48

        path.write_text("\n".join(lines[:10]) + "\n")
        again = scan_conjecture(diagrams, [3], resume_path=str(path))
        assert again == first
        assert [json.loads(line) for line in path.read_text().splitlines()] == [r.to_json() for r in first]

    def test_resume_skips_cut_off_line(self, tmp_path, hopf_dual, corpus, caplog):
        diagrams = {"L2a1": hopf_dual, "3_1": to_dual_graph(corpus["3_1"].diagram)}
        path = tmp_path / "scan.jsonl"
        first = scan_conjecture(diagrams, [3], resume_path=str(path))
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:3] + [lines[3][:20]]))
        with caplog.at_level("WARNING", logger="python.boltzmann"):
            again = scan_conjecture(diagrams, [3], resume_path=str(path))
        assert again == first
        assert "Skipping unreadable line 4" in caplog.text
        assert [json.loads(line) for line in path.read_text().splitlines()] == [r.to_json() for r in first]

    def test_gamma_filter(self, hopf_dual):
        records = scan_conjecture({"L2a1": hopf_dual}, [3], gammas=[1, 4])
        assert {r.gamma for r in records} == {1}
        assert len(records) == 8

    def test_record_json(self):
        record = ScanRecord(3, 1, 2, 1, 2, "L2a1", "27", COUNTEREXAMPLE, (1, 2, 3, 3))
        assert ScanRecord.from_json(json.loads(json.dumps(record.to_json()))) == record
