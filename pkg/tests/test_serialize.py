import json
from fractions import Fraction

import numpy as np

from upbbell.bounds import ns_bound, upb_witness
from upbbell.families import gyni_upb, shifts_upb
from upbbell.inequalities import gyni_inequality, inequality_from_set
from upbbell.product_sets import check_property_p, same_set
from upbbell.serialize import (
    behavior_to_json,
    dump,
    frac_from_str,
    frac_to_str,
    inequality_from_json,
    inequality_to_json,
    set_from_json,
    set_to_json,
    witness_report_to_json,
)


def test_fraction_strings():
    assert frac_to_str(Fraction(4, 3)) == "4/3"
    assert frac_to_str(Fraction(1)) == "1/1"
    assert frac_from_str("7/10") == Fraction(7, 10)


def test_set_roundtrip_plain():
    pset = shifts_upb()
    stripped = type(pset)(dims=pset.dims, members=pset.members)
    doc = json.loads(dump(set_to_json(stripped)))
    back = set_from_json(doc)
    assert same_set(back, pset)
    assert back.subsets is None


def test_set_roundtrip_with_subsets():
    pset = gyni_upb(4)
    doc = json.loads(dump(set_to_json(pset)))
    back = set_from_json(doc)
    assert same_set(back, pset)
    assert back.subsets is not None
    assert back.subsets.labels == pset.subsets.labels
    for i in range(4):
        for k in range(2):
            for p in range(2):
                assert np.allclose(back.subsets.party_kets[i][k][p],
                                   pset.subsets.party_kets[i][k][p])


def test_inequality_roundtrip():
    ineq = gyni_inequality(4)
    doc = json.loads(dump(inequality_to_json(ineq)))
    back = inequality_from_json(doc)
    assert back.scenario == ineq.scenario
    assert back.sorted_terms() == ineq.sorted_terms()
    assert back.classical_bound == ineq.classical_bound


def test_behavior_table_rationals():
    pset = shifts_upb()
    ineq = inequality_from_set(pset, check_property_p(pset))
    res = ns_bound(ineq)
    table = behavior_to_json(ineq, res.behavior)
    assert len(table) == 8
    for block in table:
        total = sum(frac_from_str(p) for p in block["p"])
        assert total == 1


def test_witness_report_json_floats_roundtrip():
    report = upb_witness(shifts_upb(), restarts=16, seed=0)
    doc = json.loads(dump(witness_report_to_json(report)))
    assert doc["epsilon"] == report.epsilon
    assert doc["trace_bw"] == report.trace_bw
    w = np.array([[complex(re, im) for re, im in row] for row in doc["witness"]])
    assert np.array_equal(w, report.witness)


def test_dump_deterministic():
    doc = set_to_json(gyni_upb(3))
    assert dump(doc) == dump(doc)
    assert dump(doc, pretty=True) != dump(doc)
    assert json.loads(dump(doc, pretty=True)) == json.loads(dump(doc))
