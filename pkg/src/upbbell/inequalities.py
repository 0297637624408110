"""Bell inequality data model and the two-way map to product-vector sets.

Terms are sparse: an inequality sum_j q_j p(a_j|x_j) <= beta_C is stored
as its weighted (x, a) pairs.  Inputs and outputs are 0-based.  Weights
are exact rationals throughout, so classical bounds and facet checks can
be exact downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Sequence

import numpy as np

from .errors import CapacityError
from .families import even_subsets, _flip_positions
from .product_sets import MeasurementPartition, ProductVectorSet, SubsetAnnotation

CANONICAL_ORBIT_CAP = 5_000_000


@dataclass(frozen=True)
class Scenario:
    inputs: tuple            # m_i per party
    outputs: tuple           # outputs[i][x] = r_i^x

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(int(m) for m in self.inputs))
        object.__setattr__(self, "outputs", tuple(tuple(int(r) for r in row) for row in self.outputs))
        if len(self.inputs) != len(self.outputs):
            raise ValueError("inputs and outputs must cover the same parties")
        for i, (m, row) in enumerate(zip(self.inputs, self.outputs)):
            if m < 1 or len(row) != m or any(r < 1 for r in row):
                raise ValueError(f"party {i}: malformed scenario counts")

    @property
    def n(self) -> int:
        return len(self.inputs)

    def strategy_count(self) -> int:
        total = 1
        for row in self.outputs:
            for r in row:
                total *= r
        return total

    def table_size(self) -> int:
        total = 0
        for x in product(*(range(m) for m in self.inputs)):
            cell = 1
            for i, xi in enumerate(x):
                cell *= self.outputs[i][xi]
            total += cell
        return total


def as_fraction(q) -> Fraction:
    if isinstance(q, float):
        raise TypeError("weights must be exact rationals (Fraction, int or 'num/den' string)")
    return Fraction(q)


@dataclass(frozen=True)
class BellTerm:
    x: tuple
    a: tuple
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "q", as_fraction(self.q))
        if self.q <= 0:
            raise ValueError("term weights must be positive")


@dataclass(frozen=True)
class BellInequality:
    scenario: Scenario
    terms: tuple
    classical_bound: Fraction | None = None

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        seen = set()
        for t in terms:
            if len(t.x) != self.scenario.n or len(t.a) != self.scenario.n:
                raise ValueError("term arity does not match scenario")
            for i, (xi, ai) in enumerate(zip(t.x, t.a)):
                if not 0 <= xi < self.scenario.inputs[i]:
                    raise ValueError(f"input {xi} out of range at party {i}")
                if not 0 <= ai < self.scenario.outputs[i][xi]:
                    raise ValueError(f"output {ai} out of range at party {i}, input {xi}")
            if (t.x, t.a) in seen:
                raise ValueError(f"duplicate term {(t.x, t.a)}")
            seen.add((t.x, t.a))
        if self.classical_bound is not None:
            object.__setattr__(self, "classical_bound", as_fraction(self.classical_bound))

    @property
    def n(self) -> int:
        return self.scenario.n

    def max_weight(self) -> Fraction:
        return max(t.q for t in self.terms)

    def sorted_terms(self) -> tuple:
        return tuple(sorted(self.terms, key=lambda t: (t.x, t.a, t.q)))


def inequality_from_set(pset: ProductVectorSet,
                        partition: MeasurementPartition,
                        weights: Sequence | None = None) -> BellInequality:
    """One term per member: inputs are subset indices, outputs positions.

    `weights` defaults to all ones; entries must be positive rationals.
    """
    if len(partition.assignments) != pset.size:
        raise ValueError("partition does not cover this set")
    if weights is None:
        weights = [Fraction(1)] * pset.size
    if len(weights) != pset.size:
        raise ValueError(f"need {pset.size} weights, got {len(weights)}")
    scenario = Scenario(
        inputs=tuple(partition.input_count(i) for i in range(pset.n)),
        outputs=tuple(tuple(partition.output_count(i, k)
                            for k in range(partition.input_count(i)))
                      for i in range(pset.n)),
    )
    terms = []
    for j in range(pset.size):
        x = tuple(partition.assignments[j][i][0] for i in range(pset.n))
        a = tuple(partition.assignments[j][i][1] for i in range(pset.n))
        terms.append(BellTerm(x=x, a=a, q=as_fraction(weights[j])))
    return BellInequality(scenario=scenario, terms=tuple(terms))


def _flip(bits: tuple, where) -> tuple:
    out = list(bits)
    for pos in where:
        out[pos - 1] ^= 1
    return tuple(out)


def gyni_inequality(n: int) -> BellInequality:
    """The 2^(n-1)-term parity-flip inequality with no quantum violation.

    Every term applies the same flip pattern as the matching family member:
    inputs flipped on an even-size subset I, outputs flipped at {i-1 : i in I}
    with 1 wrapping to n.  Odd n flips one seed p(0..0|0..0); even n flips
    both p(0..0|0..0) and p(0..01|10..0) over even-size I within {2..n}.
    The classical bound is 1.
    """
    if n < 3:
        raise ValueError("inequality family needs at least 3 parties")
    zero = (0,) * n
    terms = []
    if n % 2 == 1:
        for flips in even_subsets(1, n):
            x = _flip(zero, flips)
            a = _flip(zero, _flip_positions(flips, n))
            terms.append(BellTerm(x=x, a=a, q=Fraction(1)))
    else:
        seed_b_x = (1,) + (0,) * (n - 1)
        seed_b_a = (0,) * (n - 1) + (1,)
        for seed_x, seed_a in ((zero, zero), (seed_b_x, seed_b_a)):
            for flips in even_subsets(2, n):
                x = _flip(seed_x, flips)
                a = _flip(seed_a, _flip_positions(flips, n))
                terms.append(BellTerm(x=x, a=a, q=Fraction(1)))
    scenario = Scenario(inputs=(2,) * n, outputs=((2, 2),) * n)
    return BellInequality(scenario=scenario, terms=tuple(terms),
                          classical_bound=Fraction(1))


def vectors_from_inequality(ineq: BellInequality, dictionaries) -> ProductVectorSet:
    """Reverse construction: member j carries dictionaries[i][x_i][a_i].

    `dictionaries[i][x]` lists one ket per output of input x at party i,
    orthonormal within each input; the local dimension is the maximal
    output count at that party.
    """
    sc = ineq.scenario
    if len(dictionaries) != sc.n:
        raise ValueError("need one dictionary per party")
    dims = []
    for i in range(sc.n):
        if len(dictionaries[i]) != sc.inputs[i]:
            raise ValueError(f"party {i}: need {sc.inputs[i]} input dictionaries")
        d = max(sc.outputs[i])
        for x, kets in enumerate(dictionaries[i]):
            if len(kets) != sc.outputs[i][x]:
                raise ValueError(f"party {i}, input {x}: need {sc.outputs[i][x]} kets")
            for a, k in enumerate(kets):
                k = np.asarray(k, dtype=complex)
                if k.shape != (d,):
                    raise ValueError(f"party {i}, input {x}: ket dimension != {d}")
                for b in range(a):
                    if abs(np.vdot(kets[b], k)) > 1e-9:
                        raise ValueError(f"party {i}, input {x}: kets not orthogonal")
        dims.append(d)
    members = tuple(
        tuple(np.asarray(dictionaries[i][t.x[i]][t.a[i]], dtype=complex) for i in range(sc.n))
        for t in ineq.terms
    )
    party_kets = tuple(tuple(tuple(np.asarray(k, dtype=complex) for k in kets)
                             for kets in dictionaries[i]) for i in range(sc.n))
    labels = tuple(tuple((t.x[i], t.a[i]) for i in range(sc.n)) for t in ineq.terms)
    return ProductVectorSet(dims=tuple(dims), members=members,
                            subsets=SubsetAnnotation(party_kets=party_kets, labels=labels))


# --- canonicalization under relabeling -----------------------------------

def _orbit_size(sc: Scenario) -> int:
    import math
    size = math.factorial(sc.n)
    for i in range(sc.n):
        size *= math.factorial(sc.inputs[i])
        for r in sc.outputs[i]:
            size *= math.factorial(r)
    return size


def _local_relabelings(sc: Scenario, party: int):
    """All (input_perm, output_perms) pairs for one party, as lookup tuples."""
    out = []
    for in_perm in permutations(range(sc.inputs[party])):
        per_input = [list(permutations(range(r))) for r in sc.outputs[party]]
        for out_combo in product(*per_input):
            out.append((in_perm, out_combo))
    return out


def relabel_canonical(ineq: BellInequality, brute_force: bool | None = None) -> BellInequality:
    """Deterministic canonical form under local relabeling and party swaps.

    Minimizes (scenario, sorted terms) lexicographically over all party
    permutations, per-party input permutations and per-input output
    permutations.  Exhaustive search is used up to CANONICAL_ORBIT_CAP
    candidates (pass brute_force=True to override); beyond the cap a
    CapacityError points at canonical_key for invariant-level comparison.
    """
    sc = ineq.scenario
    if brute_force is None:
        brute_force = _orbit_size(sc) <= CANONICAL_ORBIT_CAP
    if not brute_force:
        raise CapacityError(
            f"canonical orbit has {_orbit_size(sc)} elements; "
            "use canonical_key for invariant comparison")

    n = sc.n
    locals_per_party = [_local_relabelings(sc, i) for i in range(n)]
    term_data = [(t.x, t.a, (t.q.numerator, t.q.denominator)) for t in ineq.terms]
    best = None
    for party_perm in permutations(range(n)):
        new_sc_inputs = [0] * n
        for i in range(n):
            new_sc_inputs[party_perm[i]] = sc.inputs[i]
        for local_combo in product(*locals_per_party):
            new_outputs = [None] * n
            for i in range(n):
                in_perm, out_combo = local_combo[i]
                row = [0] * sc.inputs[i]
                for x in range(sc.inputs[i]):
                    row[in_perm[x]] = sc.outputs[i][x]
                new_outputs[party_perm[i]] = tuple(row)
            terms = []
            for tx, ta, tq in term_data:
                x = [0] * n
                a = [0] * n
                for i in range(n):
                    in_perm, out_combo = local_combo[i]
                    x[party_perm[i]] = in_perm[tx[i]]
                    a[party_perm[i]] = out_combo[tx[i]][ta[i]]
                terms.append((tuple(x), tuple(a), tq))
            terms.sort()
            key = (tuple(new_sc_inputs), tuple(new_outputs), tuple(terms))
            if best is None or key < best:
                best = key
    inputs, outputs, terms = best
    new_terms = tuple(BellTerm(x=x, a=a, q=Fraction(*q)) for x, a, q in terms)
    return BellInequality(scenario=Scenario(inputs=inputs, outputs=outputs),
                          terms=new_terms, classical_bound=ineq.classical_bound)


def canonical_key(ineq: BellInequality, rounds: int = 2) -> tuple:
    """Relabel-invariant fingerprint (hash-grade, not a proof of equivalence).

    Term colors start from weights and local scenario shape and are refined
    by each term's relations to all others (which parties share the input,
    and whether the shared input carries the same output).  Equivalent
    inequalities always produce equal keys; distinct ones may in principle
    collide, so exact claims should go through relabel_canonical.
    """
    sc = ineq.scenario
    n = sc.n
    terms = list(ineq.terms)
    tcol = [
        (t.q.numerator, t.q.denominator,
         tuple(sorted((sc.inputs[i], tuple(sorted(sc.outputs[i])), sc.outputs[i][t.x[i]])
                      for i in range(n))))
        for t in terms
    ]
    for _ in range(rounds):
        refined = []
        for s_idx, s in enumerate(terms):
            rel = []
            for t_idx, t in enumerate(terms):
                if t_idx == s_idx:
                    continue
                pair = tuple(sorted(
                    (s.x[i] == t.x[i], s.a[i] == t.a[i] if s.x[i] == t.x[i] else None)
                    for i in range(n)))
                rel.append((tcol[t_idx], pair))
            refined.append((tcol[s_idx], tuple(sorted(rel))))
        tcol = refined
    return tuple(sorted(map(repr, tcol)))


def equivalent(a: BellInequality, b: BellInequality) -> bool:
    """Exact equivalence under relabeling (desk-scale scenarios)."""
    if _orbit_size(a.scenario) > CANONICAL_ORBIT_CAP or _orbit_size(b.scenario) > CANONICAL_ORBIT_CAP:
        raise CapacityError("scenario too large for exact equivalence; compare canonical_key")
    ca = relabel_canonical(a)
    cb = relabel_canonical(b)
    return ca.scenario == cb.scenario and ca.sorted_terms() == cb.sorted_terms()
