"""Deciding whether a product-vector set admits an orthogonal product vector.

A set is extendible iff its members can be distributed among parties so
that every party's assigned local rays span a proper subspace: the witness
then takes, at each party, any ket orthogonal to the assigned rays.  The
qubit specialization enumerates per-party candidate kets directly (the
orthocomplement of each distinct ray, or none), which is exact on the
deduplicated ray structure.  Sets that span the whole space are reported
with their own status since no complementary subspace remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .linalg import overlap, tensor_product
from .product_sets import (
    ProductVectorSet,
    distinct_local_rays,
    gram_orthogonality_check,
    orthocomplement_qubit,
)
from .bounds import product_epsilon, span_projector

STATUS_EXTENDIBLE = "extendible"
STATUS_UNEXTENDIBLE = "unextendible"
STATUS_SPAN_COMPLETE = "span-complete"
STATUS_UNDECIDED = "undecided"

NUMERIC_EXTENDIBLE_THRESHOLD = 1e-7


@dataclass
class ExtendibilityReport:
    status: str
    method: str
    witness: tuple | None = None   # one ket per party when extendible
    nodes: int = 0

    @property
    def unextendible(self) -> bool | None:
        if self.status == STATUS_UNDECIDED:
            return None
        return self.status != STATUS_EXTENDIBLE


def _span_rank(pset: ProductVectorSet, cutoff: float = 1e-9) -> int:
    mat = np.stack([tensor_product(list(m)) for m in pset.members])
    svals = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(svals > cutoff))


def _verify_witness(pset: ProductVectorSet, witness, tol: float = 1e-9) -> None:
    for j, member in enumerate(pset.members):
        prod = 1.0
        for i in range(pset.n):
            prod *= abs(overlap(witness[i], member[i]))
        if prod > tol:
            raise AssertionError(f"claimed witness overlaps member {j} by {prod:.3e}")


def _generic_ket(rays, dim: int) -> np.ndarray:
    """A ket not orthogonal to any listed ray (free slots of a witness)."""
    rng = np.random.default_rng(12345)
    for _ in range(64):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        if all(abs(overlap(v, r)) > 1e-6 for r in rays):
            return v
    raise RuntimeError("could not find a generic local ket")


def unextendible_qubit(set_or_none: ProductVectorSet) -> ExtendibilityReport:
    """Exact qubit decision by candidate enumeration on deduplicated rays.

    On qubits a local ket either is the orthocomplement of one distinct
    ray (killing exactly that ray's members) or kills nothing at that
    party, so a depth-first sweep over per-party choices from
    {orthocomplement of ray r} + {none} decides extendibility.
    """
    pset = set_or_none
    if any(d != 2 for d in pset.dims):
        raise ValueError("unextendible_qubit needs all-qubit dimensions; use unextendible_general")
    tables = [distinct_local_rays(pset, i) for i in range(pset.n)]
    members_by_choice = []   # party -> ray index -> set of members killed
    for i, table in enumerate(tables):
        kill = [set() for _ in table.rays]
        for j, r in enumerate(table.member_map):
            kill[r].add(j)
        members_by_choice.append(kill)

    all_members = frozenset(range(pset.size))
    nodes = 0

    def dfs(party: int, remaining: frozenset, choices):
        nonlocal nodes
        nodes += 1
        if not remaining:
            return choices + [None] * (pset.n - len(choices))
        if party == pset.n:
            return None
        need = len(remaining)
        # none-choice first keeps witnesses generic where possible
        result = dfs(party + 1, remaining, choices + [None])
        if result is not None:
            return result
        for r, killed in enumerate(members_by_choice[party]):
            if killed & remaining:
                result = dfs(party + 1, remaining - killed, choices + [r])
                if result is not None:
                    return result
        return None

    found = dfs(0, all_members, [])
    if found is None:
        status = STATUS_SPAN_COMPLETE if _span_rank(pset) == pset.total_dim else STATUS_UNEXTENDIBLE
        return ExtendibilityReport(status=status, method="qubit-combinatorial", nodes=nodes)
    witness = []
    for i, choice in enumerate(found):
        if choice is None:
            witness.append(_generic_ket(tables[i].rays, 2))
        else:
            witness.append(orthocomplement_qubit(tables[i].rays[choice]))
    witness = tuple(witness)
    _verify_witness(pset, witness)
    return ExtendibilityReport(status=STATUS_EXTENDIBLE, method="qubit-combinatorial",
                               witness=witness, nodes=nodes)


def unextendible_general(pset: ProductVectorSet, node_cap: int = 10 ** 7) -> ExtendibilityReport:
    """Partition-search decision for arbitrary local dimensions.

    Depth-first assignment of every member to a killing party, pruning
    branches where a party's assigned rays would span its whole local
    space.  The span depends only on which distinct rays were assigned, so
    search states are per-party ray-index sets: ranks are cached per state
    and failed (member, state) pairs are memoized.  Beyond `node_cap`
    visited nodes the verdict is an explicit undecided.
    """
    n = pset.n
    tables = [distinct_local_rays(pset, i) for i in range(n)]
    rank_cache: dict = {}

    def rank_of(party: int, ids: frozenset) -> int:
        key = (party, ids)
        if key not in rank_cache:
            mat = np.stack([tables[party].rays[r] for r in sorted(ids)])
            svals = np.linalg.svd(mat, compute_uv=False)
            rank_cache[key] = int(np.sum(svals > 1e-9))
        return rank_cache[key]

    nodes = 0
    capped = False
    failed: set = set()
    empty = frozenset()

    def dfs(member: int, state: tuple):
        nonlocal nodes, capped
        nodes += 1
        if nodes > node_cap:
            capped = True
            return None
        if member == pset.size:
            return state
        key = (member, state)
        if key in failed:
            return None
        for i in range(n):
            rid = tables[i].member_map[member]
            ids = state[i]
            if rid not in ids:
                new_ids = ids | {rid}
                if rank_of(i, new_ids) >= pset.dims[i]:
                    continue
                new_state = state[:i] + (new_ids,) + state[i + 1:]
            else:
                new_state = state
            result = dfs(member + 1, new_state)
            if result is not None:
                return result
            if capped:
                return None
        failed.add(key)
        return None

    found = dfs(0, tuple(empty for _ in range(n)))
    if capped:
        return ExtendibilityReport(status=STATUS_UNDECIDED, method="partition-search", nodes=nodes)
    if found is None:
        status = STATUS_SPAN_COMPLETE if _span_rank(pset) == pset.total_dim else STATUS_UNEXTENDIBLE
        return ExtendibilityReport(status=status, method="partition-search", nodes=nodes)
    witness = []
    for i in range(n):
        ids = found[i]
        d = pset.dims[i]
        if not ids:
            witness.append(_generic_ket(tables[i].rays, d))
            continue
        assigned = np.stack([tables[i].rays[r] for r in sorted(ids)], axis=1)
        q, rmat = np.linalg.qr(assigned)
        basis = [q[:, k] for k in range(q.shape[1]) if abs(rmat[k, k]) > 1e-9]
        for probe in np.eye(d, dtype=complex):
            w = probe.copy()
            for b in basis:
                w -= np.vdot(b, w) * b
            norm = np.linalg.norm(w)
            if norm > 1e-6:
                witness.append(w / norm)
                break
        else:
            raise AssertionError("assigned span claimed proper but no complement found")
    witness = tuple(witness)
    _verify_witness(pset, witness)
    return ExtendibilityReport(status=STATUS_EXTENDIBLE, method="partition-search",
                               witness=witness, nodes=nodes)


def numeric_extendibility(pset: ProductVectorSet, restarts: int = 128, seed: int = 0) -> float:
    """Multistart product minimum over the span projector.

    Values at or below 1e-7 signal extendibility; clearly positive values
    corroborate (but do not prove) unextendibility.
    """
    pi = span_projector(pset)
    return product_epsilon(pi, pset.dims, restarts=restarts, seed=seed).value


def completability_search(pset: ProductVectorSet, budget: int = 10 ** 6):
    """Search for product vectors completing the set to a full basis.

    Candidates are products over the per-party vocabulary of distinct rays
    plus their orthocomplements (qubit dims only).  Depth-first with
    backtracking; returns the completing members, None when the search
    space is exhausted without a completion, or the string 'undecided'
    when the node budget runs out.
    """
    if any(d != 2 for d in pset.dims):
        raise ValueError("completability_search is specialized to qubit dimensions")
    ok, pair, worst = gram_orthogonality_check(pset)
    if not ok:
        raise ValueError(f"input set is not orthogonal (members {pair}, product {worst:.3e})")

    vocab = []
    for i in range(pset.n):
        table = distinct_local_rays(pset, i)
        kets = list(table.rays)
        for r in table.rays:
            w = orthocomplement_qubit(r)
            if all(abs(overlap(w, k)) < 1 - 1e-9 for k in kets):
                kets.append(w)
        vocab.append(kets)

    candidates = []
    for combo in product(*(range(len(v)) for v in vocab)):
        candidates.append(tuple(vocab[i][c] for i, c in enumerate(combo)))

    d = pset.total_dim
    need = d - pset.size
    if need < 0:
        raise ValueError("set has more members than the space dimension")
    if need == 0:
        return []

    current = list(pset.members)
    chosen = []
    nodes = 0
    budget_hit = False

    def orthogonal_to_all(cand):
        for member in current:
            prod = 1.0
            for i in range(pset.n):
                prod *= abs(overlap(cand[i], member[i]))
            if prod > 1e-9:
                return False
        return True

    def dfs(start: int):
        nonlocal nodes, budget_hit
        nodes += 1
        if nodes > budget:
            budget_hit = True
            return False
        if len(current) == d:
            return True
        for idx in range(start, len(candidates)):
            cand = candidates[idx]
            if orthogonal_to_all(cand):
                current.append(cand)
                chosen.append(cand)
                if dfs(idx + 1):
                    return True
                current.pop()
                chosen.pop()
            if budget_hit:
                return False
        return False

    if dfs(0):
        completion = ProductVectorSet(dims=pset.dims, members=tuple(chosen))
        full = ProductVectorSet(dims=pset.dims, members=tuple(current))
        ok, _, _ = gram_orthogonality_check(full)
        if not ok or _span_rank(full) != d:
            raise AssertionError("completion failed verification")
        return list(completion.members)
    if budget_hit:
        return "undecided"
    return None
