"""JSON formats for product sets, inequalities and reports.

Rationals travel as "num/den" strings, complex amplitudes as [re, im]
pairs, matrices as nested amplitude pairs.  Floats rely on repr round-trip
(17 significant digits).
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .inequalities import BellInequality, BellTerm, Scenario
from .product_sets import ProductVectorSet, SubsetAnnotation


def frac_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def frac_from_str(s: str) -> Fraction:
    return Fraction(s)


def _ket_to_json(v) -> list:
    return [[float(a.real), float(a.imag)] for a in np.asarray(v, dtype=complex)]


def _ket_from_json(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=complex)


def _matrix_to_json(m) -> list:
    return [_ket_to_json(row) for row in np.asarray(m, dtype=complex)]


def set_to_json(pset: ProductVectorSet) -> dict:
    doc = {
        "dims": list(pset.dims),
        "members": [[_ket_to_json(k) for k in member] for member in pset.members],
    }
    if pset.subsets is not None:
        ann = pset.subsets
        doc["subsets"] = {
            "party_kets": [[[_ket_to_json(k) for k in subset] for subset in party]
                           for party in ann.party_kets],
            "labels": [[list(lab) for lab in member] for member in ann.labels],
        }
    return doc


def set_from_json(doc: dict) -> ProductVectorSet:
    dims = tuple(int(d) for d in doc["dims"])
    members = tuple(tuple(_ket_from_json(k) for k in member) for member in doc["members"])
    subsets = None
    if "subsets" in doc:
        ann = doc["subsets"]
        party_kets = tuple(tuple(tuple(_ket_from_json(k) for k in subset)
                                 for subset in party) for party in ann["party_kets"])
        labels = tuple(tuple(tuple(int(v) for v in lab) for lab in member)
                       for member in ann["labels"])
        subsets = SubsetAnnotation(party_kets=party_kets, labels=labels)
    return ProductVectorSet(dims=dims, members=members, subsets=subsets)


def inequality_to_json(ineq: BellInequality) -> dict:
    doc = {
        "scenario": {
            "inputs": list(ineq.scenario.inputs),
            "outputs": [list(row) for row in ineq.scenario.outputs],
        },
        "terms": [{"x": list(t.x), "a": list(t.a), "q": frac_to_str(t.q)}
                  for t in ineq.terms],
    }
    if ineq.classical_bound is not None:
        doc["classical_bound"] = frac_to_str(ineq.classical_bound)
    return doc


def inequality_from_json(doc: dict) -> BellInequality:
    sc = Scenario(inputs=tuple(doc["scenario"]["inputs"]),
                  outputs=tuple(tuple(row) for row in doc["scenario"]["outputs"]))
    terms = tuple(BellTerm(x=tuple(t["x"]), a=tuple(t["a"]), q=frac_from_str(t["q"]))
                  for t in doc["terms"])
    bound = doc.get("classical_bound")
    return BellInequality(scenario=sc, terms=terms,
                          classical_bound=frac_from_str(bound) if bound else None)


def behavior_to_json(ineq: BellInequality, behavior: dict) -> list:
    """Dense p(a|x) table in input-lexicographic blocks of rational strings."""
    from itertools import product
    sc = ineq.scenario
    table = []
    for x in product(*(range(m) for m in sc.inputs)):
        block = {
            "x": list(x),
            "p": [frac_to_str(behavior[(x, a)])
                  for a in product(*(range(sc.outputs[i][x[i]]) for i in range(sc.n)))],
        }
        table.append(block)
    return table


def bounds_report_to_json(report) -> dict:
    return {
        "beta_c": frac_to_str(report.beta_c),
        "beta_q_spectral": report.beta_q_spectral,
        "beta_q_seesaw": report.beta_q_seesaw,
        "beta_n": frac_to_str(report.beta_n) if report.beta_n is not None else None,
        "seed": report.seed,
        "restarts": report.restarts,
    }


def witness_report_to_json(report, include_matrices: bool = True) -> dict:
    doc = {
        "epsilon": report.epsilon,
        "epsilon_status": report.epsilon_status,
        "trace_bw": report.trace_bw,
        "formula_value": report.formula_value,
        "trace_w_rho": report.trace_w_rho,
        "ppt_flags": {"|".join(map(str, side)): flag
                      for side, flag in report.ppt_flags.items()},
        "ppt_min_eigenvalues": {"|".join(map(str, side)): val
                                for side, val in report.ppt_min_eigs.items()},
        "set_size": report.set_size,
        "total_dim": report.total_dim,
        "seed": report.seed,
        "restarts": report.restarts,
    }
    if include_matrices:
        doc["witness"] = _matrix_to_json(report.witness)
        doc["state"] = _matrix_to_json(report.state)
    return doc


def extendibility_report_to_json(report) -> dict:
    return {
        "unextendible": report.unextendible,
        "status": report.status,
        "method": report.method,
        "witness": ([_ket_to_json(k) for k in report.witness]
                    if report.witness is not None else None),
        "nodes": report.nodes,
    }


def tightness_report_to_json(report) -> dict:
    return {
        "polytope_dim": report.polytope_dim,
        "face_dim": report.face_dim,
        "is_facet": report.is_facet,
        "saturating_count": report.saturating_count,
        "vertex_count": report.vertex_count,
        "saturating_indices": report.saturating_indices,
    }


def dump(doc, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=False)
    return json.dumps(doc, separators=(",", ":"), sort_keys=False)
