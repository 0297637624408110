"""Dense complex linear algebra on small multipartite Hilbert spaces.

Everything downstream works with plain numpy arrays: kets are 1-D complex
vectors, operators are 2-D complex matrices.  Party 1 is the leftmost
(most significant) tensor factor, matching `np.kron` order.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-9


def ket(amplitudes) -> np.ndarray:
    """Build a ket from an amplitude sequence, rejecting non-finite entries."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0:
        raise ValueError("ket needs at least one amplitude")
    if not np.all(np.isfinite(v.view(float))):
        raise ValueError("ket amplitudes must be finite")
    return v


def basis_ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def normalize(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < 1e-14:
        raise ValueError("cannot normalize a (near-)zero vector")
    return v / n


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_normalized(v: np.ndarray, tol: float = 1e-12) -> bool:
    return abs(float(np.vdot(v, v).real) - 1.0) <= tol


def overlap(u: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.vdot(u, v))


def tensor_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of kets or of operators, left factor most significant.

    All factors must be of the same kind (all 1-D or all 2-D); mixing raises
    TypeError, an empty list raises ValueError.
    """
    if len(factors) == 0:
        raise ValueError("tensor_product needs at least one factor")
    ndims = {np.asarray(f).ndim for f in factors}
    if ndims == {1}:
        out = np.asarray(factors[0], dtype=complex)
        for f in factors[1:]:
            out = np.kron(out, np.asarray(f, dtype=complex))
        return out
    if ndims == {2}:
        out = np.asarray(factors[0], dtype=complex)
        for f in factors[1:]:
            out = np.kron(out, np.asarray(f, dtype=complex))
        return out
    raise TypeError("tensor_product factors must be all kets (1-D) or all operators (2-D)")


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def assert_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian within {tol} (defect {defect:.3e})")


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def hermitian_eigs(m: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Returns (eigenvalues, eigenvectors) with eigenvectors[k] the unit ket for
    eigenvalues[k].  Raises if the input fails the Hermiticity precondition.
    """
    m = np.asarray(m, dtype=complex)
    assert_hermitian(m, tol)
    vals, vecs = np.linalg.eigh(hermitize(m))
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    return vals, [vecs[:, k] for k in range(vecs.shape[1])]


def max_eigenvalue(m: np.ndarray) -> float:
    vals, _ = hermitian_eigs(m)
    return float(vals[0])


def min_eigenvalue(m: np.ndarray) -> float:
    vals, _ = hermitian_eigs(m)
    return float(vals[-1])


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (total, total):
        raise ValueError(f"operator shape {m.shape} does not match dims {dims}")
    return dims

def partial_transpose(m: np.ndarray, dims: Sequence[int], subset: Sequence[int]) -> np.ndarray:
    """Transpose the tensor indices of the parties in `subset` (0-based)."""
    m = np.asarray(m, dtype=complex)
    dims = _check_dims(m, dims)
    n = len(dims)
    subset = sorted(set(int(i) for i in subset))
    if subset and (subset[0] < 0 or subset[-1] >= n):
        raise ValueError(f"party subset {subset} out of range for {n} parties")
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    for p in subset:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    return t.transpose(axes).reshape(m.shape)


def partial_contraction(m: np.ndarray, dims: Sequence[int],
                        kets: Sequence[np.ndarray | None]) -> np.ndarray:
    """Contract all parties but one with fixed kets.

    `kets` holds one normalized ket per party with exactly one slot set to
    None (the free party i).  Returns the d_i x d_i matrix A with
    <phi|A|phi> = <psi_prod|m|psi_prod> when slot i holds phi.
    """
    m = np.asarray(m, dtype=complex)
    dims = _check_dims(m, dims)
    n = len(dims)
    if len(kets) != n:
        raise ValueError(f"need one ket slot per party ({n}), got {len(kets)}")
    free = [i for i, k in enumerate(kets) if k is None]
    if len(free) != 1:
        raise ValueError(f"exactly one free slot required, got {len(free)}")
    t = m.reshape(dims + dims)
    # Contract fixed parties from the back so earlier axis numbers stay valid.
    for p in range(n - 1, -1, -1):
        if kets[p] is None:
            continue
        v = np.asarray(kets[p], dtype=complex)
        if v.shape != (dims[p],):
            raise ValueError(f"ket at party {p} has wrong dimension")
        live = t.ndim // 2
        t = np.tensordot(t, v, axes=([live + p], [0]))        # column side
        t = np.tensordot(v.conj(), t, axes=([0], [p]))        # row side
    return hermitize(t)
