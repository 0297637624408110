"""Facet decision for Bell inequalities over the local deterministic polytope.

A behavior inequality is tight iff the deterministic vertices saturating it
span a face of dimension one less than the polytope's affine dimension.
Vertex selection uses exact rational dot products; affine dimensions are
ranks of integer difference matrices, computed modulo two fixed 62-bit
primes (which must agree) with fraction-free integer elimination available
as an audit path for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
import warnings

from .bounds import classical_bound
from .errors import CapacityError
from .inequalities import BellInequality, Scenario

VERTEX_CAP = 10 ** 6
# Two fixed 62-bit primes for the modular rank fast path; a bad-prime rank
# drop would have to hit both, which the agreement check rules out.
RANK_PRIMES = (3942766818157214137, 4498007652985016657)
LARGE_SCENARIO_ENTRIES = 40_000_000


@dataclass
class VertexMatrix:
    scenario: Scenario
    coords: list          # list of (x, a) pairs, fixed column order
    coord_index: dict
    rows: list            # one 0/1 list per deterministic strategy
    strategies: list


@dataclass
class TightnessReport:
    polytope_dim: int
    face_dim: int
    is_facet: bool
    saturating_count: int
    vertex_count: int
    saturating_indices: list | None = None


def _coordinates(sc: Scenario):
    coords = []
    for x in product(*(range(m) for m in sc.inputs)):
        for a in product(*(range(sc.outputs[i][x[i]]) for i in range(sc.n))):
            coords.append((x, a))
    return coords


def _strategies(sc: Scenario):
    per_party = [list(product(*(range(r) for r in sc.outputs[i]))) for i in range(sc.n)]
    return list(product(*per_party))


def local_vertices(scenario: Scenario) -> VertexMatrix:
    """All deterministic behaviors as 0/1 tables, strategy-lexicographic."""
    count = scenario.strategy_count()
    if count > VERTEX_CAP:
        raise CapacityError(f"{count} deterministic vertices exceed cap {VERTEX_CAP}")
    coords = _coordinates(scenario)
    if count * len(coords) > LARGE_SCENARIO_ENTRIES:
        raise CapacityError(
            f"vertex matrix would hold {count * len(coords)} entries; "
            "pass allow_large=True to is_tight for scenarios this size")
    coord_index = {c: k for k, c in enumerate(coords)}
    strategies = _strategies(scenario)
    rows = []
    for strategy in strategies:
        row = [0] * len(coords)
        for x in product(*(range(m) for m in scenario.inputs)):
            a = tuple(strategy[i][x[i]] for i in range(scenario.n))
            row[coord_index[(x, a)]] = 1
        rows.append(row)
    return VertexMatrix(scenario=scenario, coords=coords, coord_index=coord_index,
                        rows=rows, strategies=strategies)


def rank_mod_p(rows, p: int) -> int:
    """Gaussian elimination rank over GF(p); destructive on a copy."""
    mat = [[e % p for e in row] for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    col = 0
    while rank < len(mat) and col < ncols:
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        prow = [(e * inv) % p for e in mat[rank]]
        mat[rank] = prow
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(e - f * pe) % p for e, pe in zip(mat[r], prow)]
        rank += 1
        col += 1
    return rank


def rank_fraction_free(rows) -> int:
    """Bareiss fraction-free elimination rank over the integers."""
    mat = [[int(e) for e in row] for row in rows]
    if not mat:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    rank = 0
    prev = 1
    col = 0
    while rank < nrows and col < ncols:
        pivot = next((r for r in range(rank, nrows) if mat[r][col]), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pk = mat[rank][col]
        for r in range(rank + 1, nrows):
            frk = mat[r][col]
            mat[r] = [(pk * e - frk * pe) // prev for e, pe in zip(mat[r], mat[rank])]
        prev = pk
        rank += 1
        col += 1
    return rank


def exact_rank(rows, audit: bool = False) -> int:
    """Integer matrix rank via the two-prime modular fast path.

    The two modular ranks must agree (a disagreement aborts); with
    audit=True the fraction-free integer rank is computed as well and must
    match.
    """
    r1 = rank_mod_p(rows, RANK_PRIMES[0])
    r2 = rank_mod_p(rows, RANK_PRIMES[1])
    if r1 != r2:
        raise RuntimeError(f"modular ranks disagree ({r1} vs {r2}); primes unsuitable")
    if audit:
        ri = rank_fraction_free(rows)
        if ri != r1:
            raise RuntimeError(f"integer rank {ri} disagrees with modular rank {r1}")
    return r1


def _affine_dim(rows) -> int:
    """Affine dimension of a vertex list: rank of differences to the first."""
    if len(rows) <= 1:
        return 0
    base = rows[0]
    diffs = [[e - b for e, b in zip(row, base)] for row in rows[1:]]
    return exact_rank(diffs)


def polytope_dimension(scenario: Scenario) -> int:
    """Affine dimension of the local polytope, by exact rank."""
    vm = local_vertices(scenario)
    return _affine_dim(vm.rows)


def is_tight(ineq: BellInequality, allow_large: bool = False,
             keep_indices: bool = False) -> TightnessReport:
    """Facet test: saturating vertices must span an affine (dim-1)-face.

    The classical bound is computed exactly if the inequality does not
    already carry one; saturation is decided by exact rational dot
    products.  Scenarios beyond the default entry cap need
    allow_large=True and can take very long.
    """
    bound = ineq.classical_bound
    if bound is None:
        bound = classical_bound(ineq).value
    sc = ineq.scenario
    count = sc.strategy_count()
    entries = count * len(_coordinates(sc))
    if entries > LARGE_SCENARIO_ENTRIES:
        if not allow_large:
            raise CapacityError(
                f"scenario needs {entries} matrix entries; rerun with allow_large=True")
        warnings.warn("large tightness instance: exact rank may take a very long time",
                      RuntimeWarning, stacklevel=2)
    vm = local_vertices_unchecked(sc) if allow_large else local_vertices(sc)

    term_cols = [(vm.coord_index[(t.x, t.a)], t.q) for t in ineq.terms]
    saturating = []
    indices = []
    for idx, row in enumerate(vm.rows):
        value = sum((q for col, q in term_cols if row[col]), Fraction(0))
        if value > bound:
            raise ValueError(f"vertex {idx} exceeds the claimed classical bound")
        if value == bound:
            saturating.append(row)
            indices.append(idx)
    if not saturating:
        raise ValueError("no vertex saturates the bound; classical_bound is wrong")
    face_dim = _affine_dim(saturating)
    poly_dim = _affine_dim(vm.rows)
    return TightnessReport(
        polytope_dim=poly_dim,
        face_dim=face_dim,
        is_facet=(face_dim == poly_dim - 1),
        saturating_count=len(saturating),
        vertex_count=len(vm.rows),
        saturating_indices=indices if keep_indices else None,
    )


def local_vertices_unchecked(scenario: Scenario) -> VertexMatrix:
    """local_vertices without the entry cap (explicitly opted-in callers)."""
    coords = _coordinates(scenario)
    coord_index = {c: k for k, c in enumerate(coords)}
    strategies = _strategies(scenario)
    rows = []
    for strategy in strategies:
        row = [0] * len(coords)
        for x in product(*(range(m) for m in scenario.inputs)):
            a = tuple(strategy[i][x[i]] for i in range(scenario.n))
            row[coord_index[(x, a)]] = 1
        rows.append(row)
    return VertexMatrix(scenario=scenario, coords=coords, coord_index=coord_index,
                        rows=rows, strategies=strategies)
