"""Sets of multipartite product vectors and their measurement structure.

A set S of product vectors induces, at every party i, the collection of
local rays that occur there.  When each connected component of the local
orthogonality graph is a clique, the components form a canonical partition
into measurements (inputs), with the rays inside one component acting as
outcomes.  That clique condition is what the rest of the library relies on;
it holds automatically for qubit sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import ORTHOGONALITY_TOL, overlap

RAY_EQUALITY_TOL = 1e-9  # same ray iff |<u|v>| >= 1 - this
PHASE_TOL = 1e-9


def canonical_ray(v: np.ndarray) -> np.ndarray:
    """Normalize and rotate the first significant amplitude to real positive."""
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n < 1e-14:
        raise ValueError("zero vector has no canonical ray")
    v = v / n
    for amp in v:
        if abs(amp) > PHASE_TOL:
            return v * (amp.conjugate() / abs(amp))
    raise ValueError("vector has no significant amplitude")


def same_ray(u: np.ndarray, v: np.ndarray, tol: float = RAY_EQUALITY_TOL) -> bool:
    return abs(overlap(u, v)) >= 1.0 - tol


def orthocomplement_qubit(v: np.ndarray) -> np.ndarray:
    """The unique ray orthogonal to a qubit ray, in canonical phase."""
    if v.shape != (2,):
        raise ValueError("orthocomplement_qubit needs a qubit ket")
    return canonical_ray(np.array([-v[1].conjugate(), v[0].conjugate()]))


@dataclass
class SubsetAnnotation:
    """Declared per-party measurement subsets carried by generated families.

    party_kets[i][k][p] is the p-th ket of subset k at party i;
    labels[j][i] = (k, p) locates member j's party-i ket inside them.
    """

    party_kets: tuple
    labels: tuple

    def ket_for(self, party: int, label: tuple[int, int]) -> np.ndarray:
        k, p = label
        return self.party_kets[party][k][p]


@dataclass
class ProductVectorSet:
    dims: tuple
    members: tuple  # member -> party -> ket
    subsets: SubsetAnnotation | None = None

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        members = []
        for j, member in enumerate(self.members):
            if len(member) != self.n:
                raise ValueError(f"member {j} has {len(member)} factors, expected {self.n}")
            kets = []
            for i, (k, d) in enumerate(zip(member, self.dims)):
                k = np.asarray(k, dtype=complex).reshape(-1)
                if k.shape != (d,):
                    raise ValueError(f"member {j}, party {i}: dimension {k.shape[0]} != {d}")
                if abs(float(np.vdot(k, k).real) - 1.0) > 1e-12:
                    raise ValueError(f"member {j}, party {i}: local ket not normalized")
                kets.append(k)
            members.append(tuple(kets))
        self.members = tuple(members)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass
class RayTable:
    """Distinct local rays at one party, with the member -> ray map."""

    party: int
    rays: list
    member_map: list


@dataclass
class MeasurementPartition:
    """Per-party split of local rays into measurements.

    party_subsets[i] lists ray-index tuples (one tuple per measurement);
    assignments[j][i] = (input, output) for member j at party i.
    """

    ray_tables: tuple
    party_subsets: tuple
    assignments: tuple

    def input_count(self, party: int) -> int:
        return len(self.party_subsets[party])

    def output_count(self, party: int, inp: int) -> int:
        return len(self.party_subsets[party][inp])

    def measurement_kets(self, party: int, inp: int) -> list:
        table = self.ray_tables[party]
        return [table.rays[r] for r in self.party_subsets[party][inp]]


@dataclass
class PropertyPViolation:
    party: int
    ray_u: int
    ray_v: int
    overlap_modulus: float

    def __str__(self):
        return (f"party {self.party}: rays {self.ray_u} and {self.ray_v} share an "
                f"orthogonality component but are not orthogonal "
                f"(|overlap| = {self.overlap_modulus:.3e})")


def distinct_local_rays(pset: ProductVectorSet, party: int) -> RayTable:
    """Deduplicate party-local kets up to phase into canonical rays."""
    if not 0 <= party < pset.n:
        raise ValueError(f"party {party} out of range")
    rays: list[np.ndarray] = []
    member_map: list[int] = []
    for member in pset.members:
        k = member[party]
        for idx, r in enumerate(rays):
            if same_ray(k, r):
                member_map.append(idx)
                break
        else:
            rays.append(canonical_ray(k))
            member_map.append(len(rays) - 1)
    return RayTable(party=party, rays=rays, member_map=member_map)


def orthogonality_graph(table: RayTable, tol: float = ORTHOGONALITY_TOL) -> np.ndarray:
    """Boolean adjacency matrix: edge iff rays are orthogonal within tol."""
    c = len(table.rays)
    adj = np.zeros((c, c), dtype=bool)
    for u in range(c):
        for v in range(u + 1, c):
            if abs(overlap(table.rays[u], table.rays[v])) <= tol:
                adj[u, v] = adj[v, u] = True
    return adj


def _components(adj: np.ndarray) -> list[list[int]]:
    c = adj.shape[0]
    seen = [False] * c
    comps = []
    for start in range(c):
        if seen[start]:
            continue
        comp, stack = [], [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in range(c):
                if adj[u, v] and not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def check_property_p(pset: ProductVectorSet, tol: float = ORTHOGONALITY_TOL):
    """Partition each party's rays into measurements, or report why not.

    Succeeds iff every connected component of every per-party orthogonality
    graph is a clique.  Components become measurements, ordered by the
    smallest member index occurring in them; outcomes within a measurement
    are ordered by first occurrence.  Returns a MeasurementPartition on
    success and a PropertyPViolation otherwise.
    """
    tables = tuple(distinct_local_rays(pset, i) for i in range(pset.n))
    party_subsets = []
    for i, table in enumerate(tables):
        adj = orthogonality_graph(table, tol)
        comps = _components(adj)
        for comp in comps:
            for a in range(len(comp)):
                for b in range(a + 1, len(comp)):
                    if not adj[comp[a], comp[b]]:
                        ov = abs(overlap(table.rays[comp[a]], table.rays[comp[b]]))
                        return PropertyPViolation(i, comp[a], comp[b], ov)
        first_member = {}
        for j, r in enumerate(table.member_map):
            first_member.setdefault(r, j)
        # Measurement order: smallest member index in the component.
        comps.sort(key=lambda comp: min(first_member.get(r, pset.size + r) for r in comp))
        ordered = []
        for comp in comps:
            ordered.append(tuple(sorted(comp, key=lambda r: first_member.get(r, pset.size + r))))
        party_subsets.append(tuple(ordered))

    assignments = []
    for j in range(pset.size):
        per_party = []
        for i, table in enumerate(tables):
            r = table.member_map[j]
            for k, comp in enumerate(party_subsets[i]):
                if r in comp:
                    per_party.append((k, comp.index(r)))
                    break
        assignments.append(tuple(per_party))
    return MeasurementPartition(ray_tables=tables,
                                party_subsets=tuple(party_subsets),
                                assignments=tuple(assignments))


def gram_orthogonality_check(pset: ProductVectorSet, tol: float = ORTHOGONALITY_TOL):
    """Check pairwise global orthogonality of all members.

    Returns (ok, worst_pair, worst_value) where worst_value is the largest
    product over parties of local overlap moduli among member pairs.
    """
    worst = 0.0
    worst_pair = None
    for j in range(pset.size):
        for k in range(j + 1, pset.size):
            prod = 1.0
            for i in range(pset.n):
                prod *= abs(overlap(pset.members[j][i], pset.members[k][i]))
                if prod == 0.0:
                    break
            if prod > worst:
                worst = prod
                worst_pair = (j, k)
    return worst <= tol, worst_pair, worst


def member_fingerprint(member: Sequence[np.ndarray], decimals: int = 9) -> tuple:
    """Order- and phase-insensitive fingerprint of one product vector."""
    parts = []
    for k in member:
        c = canonical_ray(k)
        parts.append(tuple((round(a.real, decimals), round(a.imag, decimals)) for a in c))
    return tuple(parts)


def same_set(a: ProductVectorSet, b: ProductVectorSet, decimals: int = 9) -> bool:
    """Set equality up to member ordering and per-ray global phase."""
    if a.dims != b.dims or a.size != b.size:
        return False
    fa = sorted(member_fingerprint(m, decimals) for m in a.members)
    fb = sorted(member_fingerprint(m, decimals) for m in b.members)
    return fa == fb
