"""Classical, quantum and no-signalling bounds, and the witness pipeline.

The classical bound is an exact enumeration over deterministic strategies;
the quantum bound is certified from above by the Bell-operator spectrum and
approached from below by an alternating see-saw; the no-signalling bound is
an exact rational LP over the full no-signalling polytope.  The witness
pipeline turns an unextendible set into the operator pair (W, rho) whose
trace identities exhibit the supraquantum violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import CapacityError, DegenerateWitnessError
from .inequalities import BellInequality, as_fraction
from .linalg import (
    hermitian_eigs,
    hermitize,
    max_eigenvalue,
    partial_contraction,
    partial_transpose,
    tensor_product,
)
from .product_sets import MeasurementPartition, ProductVectorSet, gram_orthogonality_check
from .rational_lp import maximize as lp_maximize

STRATEGY_CAP = 10 ** 8
NS_TABLE_CAP = 10 ** 5


# --- classical bound ------------------------------------------------------

@dataclass
class ClassicalBoundResult:
    value: Fraction
    strategy: tuple  # per party: tuple input -> output


def _party_strategies(outputs_row):
    return list(product(*(range(r) for r in outputs_row)))


def classical_bound(ineq: BellInequality) -> ClassicalBoundResult:
    """Exact maximum over products of per-party deterministic maps."""
    sc = ineq.scenario
    count = sc.strategy_count()
    if count > STRATEGY_CAP:
        raise CapacityError(f"{count} deterministic strategies exceed cap {STRATEGY_CAP}")
    per_party = [_party_strategies(sc.outputs[i]) for i in range(sc.n)]
    terms = [(t.x, t.a, t.q) for t in ineq.terms]
    best = None
    best_strategy = None
    for strategy in product(*per_party):
        value = Fraction(0)
        for x, a, q in terms:
            if all(strategy[i][x[i]] == a[i] for i in range(sc.n)):
                value += q
        if best is None or value > best:
            best = value
            best_strategy = strategy
    return ClassicalBoundResult(value=best, strategy=best_strategy)


# --- Bell operator and spectral bound -------------------------------------

def projectors_from_partition(partition: MeasurementPartition):
    """Rank-1 projectors onto the partition's own rays, per party per input."""
    out = []
    for i, table in enumerate(partition.ray_tables):
        per_input = []
        for k in range(partition.input_count(i)):
            kets = partition.measurement_kets(i, k)
            per_input.append([np.outer(v, v.conj()) for v in kets])
        out.append(per_input)
    return out


def _validate_projectors(projectors, scenario, tol=1e-9):
    dims = []
    for i in range(scenario.n):
        if len(projectors[i]) != scenario.inputs[i]:
            raise ValueError(f"party {i}: need {scenario.inputs[i]} measurements")
        d = np.asarray(projectors[i][0][0]).shape[0]
        for x, povm in enumerate(projectors[i]):
            if len(povm) != scenario.outputs[i][x]:
                raise ValueError(f"party {i}, input {x}: need {scenario.outputs[i][x]} projectors")
            total = np.zeros((d, d), dtype=complex)
            for a, p in enumerate(povm):
                p = np.asarray(p, dtype=complex)
                if p.shape != (d, d):
                    raise ValueError(f"party {i}: inconsistent local dimension")
                if np.max(np.abs(p @ p - p)) > tol or np.max(np.abs(p - p.conj().T)) > tol:
                    raise ValueError(f"party {i}, input {x}, output {a}: not a projector")
                for b in range(a):
                    if np.max(np.abs(np.asarray(povm[b]) @ p)) > tol:
                        raise ValueError(f"party {i}, input {x}: outputs {b},{a} not orthogonal")
                total += p
            if max_eigenvalue(hermitize(total)) > 1 + tol:
                raise ValueError(f"party {i}, input {x}: projectors exceed identity")
        dims.append(d)
    return dims


def bell_operator(ineq: BellInequality, projectors) -> np.ndarray:
    """B = sum_j q_j (x)_i P(party i, x_i, a_i), validated Hermitian."""
    _validate_projectors(projectors, ineq.scenario)
    b = None
    for t in ineq.terms:
        factor = tensor_product([projectors[i][t.x[i]][t.a[i]] for i in range(ineq.n)])
        term = float(t.q) * factor
        b = term if b is None else b + term
    return hermitize(b)


def quantum_spectral_bound(ineq: BellInequality, projectors) -> float:
    """Largest eigenvalue of the Bell operator for the given measurements."""
    return max_eigenvalue(bell_operator(ineq, projectors))


def degenerate_projectors_from_partition(partition: MeasurementPartition,
                                         rng: np.random.Generator,
                                         extra_dim: int = 1):
    """Degenerate projective reassignment on enlarged local dimensions.

    Embeds each party's rays into d + extra_dim dimensions, hands the extra
    directions to one randomly chosen output per input, and conjugates by a
    random local unitary.  Outputs within an input stay orthogonal, so the
    spectral bound argument applies unchanged.
    """
    out = []
    for i, table in enumerate(partition.ray_tables):
        d0 = table.rays[0].shape[0]
        d = d0 + extra_dim
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        u, _ = np.linalg.qr(g)
        comp = np.zeros((d, d), dtype=complex)
        comp[d0:, d0:] = np.eye(extra_dim)
        per_input = []
        for k in range(partition.input_count(i)):
            kets = partition.measurement_kets(i, k)
            chosen = int(rng.integers(len(kets)))
            projs = []
            for a, v in enumerate(kets):
                vd = np.zeros(d, dtype=complex)
                vd[:d0] = v
                p = np.outer(vd, vd.conj())
                if a == chosen:
                    p = p + comp
                projs.append(u @ p @ u.conj().T)
            per_input.append(projs)
        out.append(per_input)
    return out


# --- see-saw lower bound ---------------------------------------------------

def _random_pvm(rng, d, r):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, _ = np.linalg.qr(m)
    cols = [q[:, k] for k in range(d)]
    povm = []
    for a in range(r):
        block = cols[a::r]
        povm.append(sum(np.outer(v, v.conj()) for v in block))
    return povm


def _best_two_outcome_pvm(m0, m1):
    """Exact maximizer of Tr(P0 m0) + Tr(P1 m1) over PVMs with P0 + P1 = I."""
    vals, vecs = hermitian_eigs(m0 - m1)
    d = m0.shape[0]
    p0 = np.zeros((d, d), dtype=complex)
    for v, w in zip(vals, vecs):
        if v >= 0:
            p0 += np.outer(w, w.conj())
    return [hermitize(p0), hermitize(np.eye(d) - p0)]


def _improve_pvm(effective, povm):
    """Pairwise exact spectral exchanges until no two outcomes can improve."""
    r = len(effective)
    if r == 2:
        return _best_two_outcome_pvm(effective[0], effective[1])
    improved = True
    while improved:
        improved = False
        for a in range(r):
            for b in range(a + 1, r):
                block = hermitize(povm[a] + povm[b])
                vals, vecs = hermitian_eigs(block)
                basis = [w for v, w in zip(vals, vecs) if v > 0.5]
                if not basis:
                    continue
                bmat = np.column_stack(basis)
                delta = bmat.conj().T @ (effective[a] - effective[b]) @ bmat
                dvals, dvecs = hermitian_eigs(hermitize(delta))
                pa = np.zeros_like(povm[a])
                for v, w in zip(dvals, dvecs):
                    if v >= 0:
                        lifted = bmat @ w
                        pa += np.outer(lifted, lifted.conj())
                pb = block - pa
                old = float(np.trace(povm[a] @ effective[a]).real
                            + np.trace(povm[b] @ effective[b]).real)
                new = float(np.trace(pa @ effective[a]).real
                            + np.trace(pb @ effective[b]).real)
                if new > old + 1e-13:
                    povm[a], povm[b] = hermitize(pa), hermitize(pb)
                    improved = True
    return povm


def seesaw_quantum_bound(ineq: BellInequality, local_dims: Sequence[int],
                         restarts: int = 8, max_iters: int = 200,
                         seed: int = 0) -> float:
    """Heuristic lower bound on the quantum value by alternating ascent.

    The state is always the top eigenvector of the current Bell operator;
    each party's measurements are then re-optimized against its effective
    operators (exact spectral split for two outcomes).  Deterministic for a
    fixed seed; the best restart wins, earlier restarts win ties.
    """
    sc = ineq.scenario
    dims = [int(d) for d in local_dims]
    if len(dims) != sc.n or any(d < 1 for d in dims):
        raise ValueError("need one positive local dimension per party")
    for i in range(sc.n):
        if max(sc.outputs[i]) > dims[i]:
            raise ValueError(f"party {i}: more outputs than local dimension")
    rng = np.random.default_rng(seed)
    qs = [float(t.q) for t in ineq.terms]
    best = -np.inf
    for _ in range(max(1, restarts)):
        meas = [[_random_pvm(rng, dims[i], sc.outputs[i][x])
                 for x in range(sc.inputs[i])] for i in range(sc.n)]
        value = -np.inf
        for _ in range(max_iters):
            b = hermitize(sum(
                q * tensor_product([meas[i][t.x[i]][t.a[i]] for i in range(sc.n)])
                for q, t in zip(qs, ineq.terms)))
            vals, vecs = hermitian_eigs(b)
            new_value, state = float(vals[0]), vecs[0]
            if new_value <= value + 1e-12:
                value = max(value, new_value)
                break
            value = new_value
            rho = np.outer(state, state.conj())
            for i in range(sc.n):
                for x in range(sc.inputs[i]):
                    effective = []
                    for a in range(sc.outputs[i][x]):
                        acc = np.zeros((dims[i], dims[i]), dtype=complex)
                        for q, t in zip(qs, ineq.terms):
                            if t.x[i] != x or t.a[i] != a:
                                continue
                            slots = [meas[k][t.x[k]][t.a[k]] if k != i else None
                                     for k in range(sc.n)]
                            acc += q * _effective_operator(rho, dims, slots, i)
                        effective.append(hermitize(acc))
                    meas[i][x] = _improve_pvm(effective, meas[i][x])
        if value > best:
            best = value
    return float(best)


def _effective_operator(rho, dims, slots, free):
    """d_i x d_i operator M with Tr(P M) = Tr(rho (ops with P at slot `free`))."""
    n = len(dims)
    t = rho.reshape(tuple(dims) + tuple(dims))
    # contract from the back so lower parties keep their axis positions
    for p in range(n - 1, -1, -1):
        if p == free:
            continue
        op = slots[p]
        live = t.ndim // 2
        t = np.tensordot(t, op, axes=([live + p, p], [0, 1]))
    return hermitize(t)


# --- no-signalling bound ----------------------------------------------------

@dataclass
class NSBoundResult:
    value: Fraction
    behavior: dict  # (x, a) -> Fraction
    iterations: int


def _strict_subsets(n):
    parties = list(range(n))
    out = []
    for size in range(1, n):
        from itertools import combinations
        out.extend(combinations(parties, size))
    return out


def ns_bound(ineq: BellInequality) -> NSBoundResult:
    """Exact maximum over the full no-signalling polytope, by rational LP.

    Variables are all entries p(a|x); constraints are nonnegativity,
    per-input normalization, and independence of every strict subset's
    marginal from the complementary inputs (anchored at all-zero inputs).
    """
    sc = ineq.scenario
    if sc.table_size() > NS_TABLE_CAP:
        raise CapacityError(f"behavior table size {sc.table_size()} exceeds cap {NS_TABLE_CAP}")

    xs = list(product(*(range(m) for m in sc.inputs)))
    var_index = {}
    for x in xs:
        for a in product(*(range(sc.outputs[i][x[i]]) for i in range(sc.n))):
            var_index[(x, a)] = len(var_index)
    nv = len(var_index)

    rows, rhs = [], []

    def zero_row():
        return [Fraction(0)] * nv

    for x in xs:
        row = zero_row()
        for a in product(*(range(sc.outputs[i][x[i]]) for i in range(sc.n))):
            row[var_index[(x, a)]] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))

    def marginal_row(keep, x, a_keep, sign, row):
        rest = [i for i in range(sc.n) if i not in keep]
        for a_rest in product(*(range(sc.outputs[i][x[i]]) for i in rest)):
            a = [0] * sc.n
            for i, ai in zip(keep, a_keep):
                a[i] = ai
            for i, ai in zip(rest, a_rest):
                a[i] = ai
            row[var_index[(x, tuple(a))]] += sign

    for keep in _strict_subsets(sc.n):
        rest = [i for i in range(sc.n) if i not in keep]
        for x_keep in product(*(range(sc.inputs[i]) for i in keep)):
            for a_keep in product(*(range(sc.outputs[i][x_keep[keep.index(i)]]) for i in keep)):
                base_x = [0] * sc.n
                for i, xi in zip(keep, x_keep):
                    base_x[i] = xi
                for x_rest in product(*(range(sc.inputs[i]) for i in rest)):
                    if all(xi == 0 for xi in x_rest):
                        continue
                    x_other = list(base_x)
                    for i, xi in zip(rest, x_rest):
                        x_other[i] = xi
                    row = zero_row()
                    marginal_row(keep, tuple(x_other), a_keep, Fraction(1), row)
                    marginal_row(keep, tuple(base_x), a_keep, Fraction(-1), row)
                    rows.append(row)
                    rhs.append(Fraction(0))

    objective = zero_row()
    for t in ineq.terms:
        objective[var_index[(t.x, t.a)]] += t.q
    res = lp_maximize(objective, rows, rhs)
    behavior = {key: res.solution[idx] for key, idx in var_index.items()}
    return NSBoundResult(value=res.value, behavior=behavior, iterations=res.iterations)


# --- reports ----------------------------------------------------------------

@dataclass
class BoundsReport:
    beta_c: Fraction
    beta_q_spectral: float | None
    beta_q_seesaw: float | None
    beta_n: Fraction | None
    seed: int
    restarts: int

    def __post_init__(self):
        if self.beta_q_spectral is not None and float(self.beta_c) > self.beta_q_spectral + 1e-9:
            raise ValueError("classical bound exceeds spectral quantum bound")
        if (self.beta_q_seesaw is not None and self.beta_q_spectral is not None
                and self.beta_q_seesaw > self.beta_q_spectral + 1e-6):
            raise ValueError("see-saw value exceeds spectral bound")
        if self.beta_n is not None and self.beta_c > self.beta_n:
            raise ValueError("classical bound exceeds no-signalling bound")


# --- product-state minimum and the witness pipeline ------------------------

@dataclass
class ProductEpsilonResult:
    value: float
    argmin: tuple  # one ket per party
    status: str = "heuristic-upper-bound"


def product_epsilon(pi: np.ndarray, dims: Sequence[int], restarts: int = 64,
                    seed: int = 0, max_iters: int = 500) -> ProductEpsilonResult:
    """Heuristic min over product states of <psi|pi|psi> by alternating descent.

    Each pass replaces one party's ket with the bottom eigenvector of the
    partially contracted operator; the multistart minimum is an upper bound
    on the true product minimum (status records that).  Deterministic for a
    fixed seed.
    """
    pi = np.asarray(pi, dtype=complex)
    dims = [int(d) for d in dims]
    vals, _ = hermitian_eigs(pi)
    if vals[-1] < -1e-9:
        raise ValueError(f"operator not positive semidefinite (min eig {vals[-1]:.3e})")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        kets = []
        for d in dims:
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            kets.append(v / np.linalg.norm(v))
        value = float(np.vdot(tensor_product(kets), pi @ tensor_product(kets)).real)
        for _ in range(max_iters):
            for i in range(len(dims)):
                slots = [k if j != i else None for j, k in enumerate(kets)]
                a = partial_contraction(pi, dims, slots)
                avals, avecs = hermitian_eigs(a)
                kets[i] = avecs[-1]
            new_value = float(np.vdot(tensor_product(kets), pi @ tensor_product(kets)).real)
            if value - new_value <= 1e-12:
                value = min(value, new_value)
                break
            value = new_value
        if best is None or value < best[0]:
            best = (value, tuple(kets))
    return ProductEpsilonResult(value=best[0], argmin=best[1])


def span_projector(pset: ProductVectorSet) -> np.ndarray:
    """Projector onto the span of the set's (orthogonal) members."""
    ok, pair, worst = gram_orthogonality_check(pset)
    if not ok:
        raise ValueError(f"members {pair} are not orthogonal (|overlap product| {worst:.3e})")
    d = pset.total_dim
    pi = np.zeros((d, d), dtype=complex)
    for member in pset.members:
        v = tensor_product(list(member))
        pi += np.outer(v, v.conj())
    return hermitize(pi)


def bipartitions(n: int):
    """All bipartitions of n parties, as the side not containing party 0."""
    from itertools import combinations
    out = []
    for size in range(1, n):
        for side in combinations(range(1, n), size):
            out.append(side)
    return out


@dataclass
class WitnessReport:
    epsilon: float
    epsilon_status: str
    witness: np.ndarray
    trace_bw: float
    formula_value: float
    state: np.ndarray
    trace_w_rho: float
    ppt_flags: dict
    ppt_min_eigs: dict
    seed: int
    restarts: int
    set_size: int
    total_dim: int


def upb_witness(pset: ProductVectorSet, epsilon: float | None = None,
                restarts: int = 64, seed: int = 0) -> WitnessReport:
    """Witness and complementary state for an unextendible set.

    W = (Pi - eps)/( |S| - eps D ) has unit trace and nonnegative product
    expectations; rho = (1 - Pi)/(D - |S|) is the complementary state.  The
    report carries Tr(Pi W) both directly and through the closed formula
    |S|(1-eps)/(|S|-eps D), Tr(W rho), and PPT data for rho across all
    bipartitions.
    """
    pi = span_projector(pset)
    d = pset.total_dim
    size = pset.size
    if size >= d:
        raise ValueError("set spans the whole space; no complementary state exists")
    if epsilon is None:
        eps_res = product_epsilon(pi, pset.dims, restarts=restarts, seed=seed)
        epsilon = eps_res.value
    if size - epsilon * d <= 1e-12:
        raise ValueError(f"|S| = {size} must exceed eps*D = {epsilon * d:.6f}")
    witness = (pi - epsilon * np.eye(d)) / (size - epsilon * d)
    rho = (np.eye(d) - pi) / (d - size)
    trace_bw = float(np.trace(pi @ witness).real)
    formula = size * (1 - epsilon) / (size - epsilon * d)
    trace_w_rho = float(np.trace(witness @ rho).real)
    flags, min_eigs = {}, {}
    for side in bipartitions(pset.n):
        pt = partial_transpose(rho, pset.dims, side)
        vals, _ = hermitian_eigs(pt)
        flags[side] = bool(vals[-1] >= -1e-10)
        min_eigs[side] = float(vals[-1])
    return WitnessReport(
        epsilon=float(epsilon), epsilon_status="heuristic-upper-bound",
        witness=witness, trace_bw=trace_bw, formula_value=formula,
        state=rho, trace_w_rho=trace_w_rho,
        ppt_flags=flags, ppt_min_eigs=min_eigs,
        seed=seed, restarts=restarts, set_size=size, total_dim=d,
    )


def witness_value_check(b: np.ndarray, w: np.ndarray, tol: float = 1e-10) -> float:
    """Tr(BW) for a unit-trace witness; used by the no-violation harness."""
    tr = float(np.trace(w).real)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"witness trace {tr} is not 1 within {tol}")
    return float(np.trace(b @ w).real)


def witness_from_projector(pi: np.ndarray, dims: Sequence[int],
                           restarts: int = 64, seed: int = 0) -> tuple[np.ndarray, float]:
    """Unit-trace operator (Pi - eps)/(rank - eps D) from any projector."""
    pi = np.asarray(pi, dtype=complex)
    d = pi.shape[0]
    rank = int(round(float(np.trace(pi).real)))
    if rank == d:
        return np.eye(d) / d, 1.0
    eps = product_epsilon(pi, dims, restarts=restarts, seed=seed).value
    denom = rank - eps * d
    if denom <= 1e-9:
        raise DegenerateWitnessError(f"rank {rank} does not exceed eps*D = {eps * d:.6f}")
    return (pi - eps * np.eye(d)) / denom, eps


def sample_normalized_witness(dims: Sequence[int], seed: int,
                              restarts: int = 32) -> np.ndarray:
    """Random unit-trace witness from a random-subspace projector.

    Draws a rank in [1, D-1], projects onto a Haar-random subspace and
    applies the projector-to-witness recipe; degenerate draws resample with
    a shifted seed.
    """
    dims = [int(d) for d in dims]
    d = int(np.prod(dims))
    attempt = 0
    while True:
        rng = np.random.default_rng((seed, attempt))
        rank = int(rng.integers(1, d))
        m = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
        q, _ = np.linalg.qr(m)
        pi = hermitize(q @ q.conj().T)
        try:
            w, _ = witness_from_projector(pi, dims, restarts=restarts,
                                          seed=int(rng.integers(2 ** 31)))
            return w
        except DegenerateWitnessError:
            attempt += 1
            if attempt > 16:
                raise
