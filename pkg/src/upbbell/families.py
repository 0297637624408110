"""Generators for the concrete qubit product-vector families.

Every party carries two declared measurements: the computational pair
S_0 = {|0>, |1>} and a rotated pair S_1 = {|e>, |e_perp>} with |e> distinct
from both computational kets.  Members are assembled purely from those four
local kets, so each generated set ships with an explicit SubsetAnnotation
recording which subset and position every local ket came from.

Local-ket labels are (subset, position):
    (0,0) = |0>   (0,1) = |1>   (1,0) = |e>   (1,1) = |e_perp>
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .linalg import basis_ket, ket, overlap
from .product_sets import (
    ProductVectorSet,
    SubsetAnnotation,
    canonical_ray,
    orthocomplement_qubit,
)

K0 = basis_ket(2, 0)
K1 = basis_ket(2, 1)
DEFAULT_E = ket([1, 1]) / np.sqrt(2)

# (sigma applied?, rotation applied?) -> local ket label
_LABEL = {(False, False): (0, 0), (True, False): (0, 1),
          (False, True): (1, 0), (True, True): (1, 1)}


@dataclass
class LocalPairChoice:
    """Per-party choice of the rotated ray |e_i> defining S_1."""

    e_rays: tuple

    def __post_init__(self):
        rays = []
        for i, e in enumerate(self.e_rays):
            e = canonical_ray(np.asarray(e, dtype=complex))
            if e.shape != (2,):
                raise ValueError(f"party {i}: e-ray must be a qubit ket")
            if abs(overlap(e, K0)) >= 1 - 1e-9 or abs(overlap(e, K1)) >= 1 - 1e-9:
                raise ValueError(f"party {i}: |e> must differ from |0> and |1>")
            rays.append(e)
        self.e_rays = tuple(rays)

    @classmethod
    def uniform(cls, n: int, e=None) -> "LocalPairChoice":
        e = DEFAULT_E if e is None else e
        return cls(tuple(np.asarray(e, dtype=complex) for _ in range(n)))

    @classmethod
    def from_angles(cls, angles: Sequence[float]) -> "LocalPairChoice":
        """Real Bloch-circle rays |e_i> = cos(t)|0> + sin(t)|1>."""
        return cls(tuple(ket([np.cos(t), np.sin(t)]) for t in angles))

    def pair(self, party: int):
        e = self.e_rays[party]
        return e, orthocomplement_qubit(e)

    def rotation(self, party: int) -> np.ndarray:
        """Unitary with V|0> = |e>, V|1> = |e_perp>."""
        e, ep = self.pair(party)
        return np.column_stack([e, ep])

    def local_kets(self, party: int):
        e, ep = self.pair(party)
        return ((K0, K1), (e, ep))


def _resolve_pairs(n: int, e_rays) -> LocalPairChoice:
    if e_rays is None:
        return LocalPairChoice.uniform(n)
    if isinstance(e_rays, LocalPairChoice):
        if len(e_rays.e_rays) != n:
            raise ValueError(f"LocalPairChoice covers {len(e_rays.e_rays)} parties, need {n}")
        return e_rays
    return LocalPairChoice.uniform(n, e_rays)


def _assemble(n: int, pairs: LocalPairChoice, labels: Iterable) -> ProductVectorSet:
    party_kets = tuple(pairs.local_kets(i) for i in range(n))
    labels = tuple(tuple(member) for member in labels)
    members = tuple(
        tuple(party_kets[i][k][p] for i, (k, p) in enumerate(member))
        for member in labels
    )
    return ProductVectorSet(
        dims=(2,) * n,
        members=members,
        subsets=SubsetAnnotation(party_kets=party_kets, labels=labels),
    )


def shifts_upb(e_rays=None) -> ProductVectorSet:
    """The canonical four-member three-qubit UPB.

    Members, in order: |000>, |1 e2 e3>, |e1 1 e3p>, |e1p e2p 1>.
    """
    pairs = _resolve_pairs(3, e_rays)
    labels = [
        ((0, 0), (0, 0), (0, 0)),
        ((0, 1), (1, 0), (1, 0)),
        ((1, 0), (0, 1), (1, 1)),
        ((1, 1), (1, 1), (0, 1)),
    ]
    return _assemble(3, pairs, labels)


def even_subsets(lo: int, n: int):
    """Even-size subsets of {lo..n}, ordered by size then lexicographically."""
    out = []
    for k in range(0, n - lo + 2, 2):
        out.extend(combinations(range(lo, n + 1), k))
    return out


def _flip_positions(flips: Sequence[int], n: int):
    """Map flip set I to sigma positions {i-1}, with 1 wrapping to n."""
    return [(i - 1) if i > 1 else n for i in flips]


def _family_labels(n: int):
    """Member labels for the 2^(n-1)-element family, ordered by (seed, I)."""
    members = []
    if n % 2 == 1:
        for flips in even_subsets(1, n):
            sig = set(_flip_positions(flips, n))
            rot = set(flips)
            members.append(tuple(_LABEL[(i in sig, i in rot)] for i in range(1, n + 1)))
    else:
        for extra_sig, extra_rot in (((), ()), ((n,), (1,))):
            for flips in even_subsets(2, n):
                sig = set(_flip_positions(flips, n)) | set(extra_sig)
                rot = set(flips) | set(extra_rot)
                members.append(tuple(_LABEL[(i in sig, i in rot)] for i in range(1, n + 1)))
    return members


def gyni_upb(n: int, e_rays=None) -> ProductVectorSet:
    """The 2^(n-1)-member n-qubit UPB underlying the parity-flip inequalities.

    Each member applies bit flips at positions {i-1 : i in I} (1 wrapping
    to n) followed by the S_0 -> S_1 rotation at positions I, to |0...0>;
    I runs over even-size subsets of {1..n} for odd n and of {2..n} for
    even n, the latter with a companion member carrying an extra flip at
    position n and rotation at position 1.
    """
    if n < 3:
        raise ValueError("family needs at least 3 parties")
    pairs = _resolve_pairs(n, e_rays)
    return _assemble(n, pairs, _family_labels(n))


def _orthogonalize_label(label):
    k, p = label
    return (k, 1 - p)


def _swap_pairs_label(label):
    # |0> <-> |e_perp>, |1> <-> |e>
    k, p = label
    return (1 - k, 1 - p)


def recursive_extend(pset: ProductVectorSet, e_ray=None) -> ProductVectorSet:
    """Extend an n-qubit family of the declared-subset form by one party.

    A companion copy of the input is built by orthogonalizing the last
    qubit (odd n), or by orthogonalizing the penultimate qubit and swapping
    |0> <-> |e_perp>, |1> <-> |e> on the last one (even n).  Both copies are
    split by first-qubit subset membership and interleaved with the four
    local kets of the new leading party.
    """
    if pset.subsets is None:
        raise ValueError("recursive_extend needs declared subset metadata")
    n = pset.n
    ann = pset.subsets
    for member in ann.labels:
        if len(member) != n:
            raise ValueError("subset labels malformed")
        for k, p in member:
            if k not in (0, 1) or p not in (0, 1):
                raise ValueError("recursive_extend needs two 2-element subsets per party")

    u1 = [tuple(member) for member in ann.labels]
    if n % 2 == 1:
        u2 = [member[:-1] + (_orthogonalize_label(member[-1]),) for member in u1]
    else:
        u2 = [member[:-2] + (_orthogonalize_label(member[-2]), _swap_pairs_label(member[-1]))
              for member in u1]

    def split(group):
        block0 = [m for m in group if m[0][0] == 0]
        block1 = [m for m in group if m[0][0] == 1]
        return block0, block1

    u1_s0, u1_s1 = split(u1)
    u2_s0, u2_s1 = split(u2)

    new_labels = (
        [((0, 0),) + m for m in u1_s0]
        + [((0, 1),) + m for m in u2_s1]
        + [((1, 0),) + m for m in u2_s0]
        + [((1, 1),) + m for m in u1_s1]
    )

    new_e = DEFAULT_E if e_ray is None else np.asarray(e_ray, dtype=complex)
    pairs = LocalPairChoice((new_e,) + tuple(
        ann.party_kets[i][1][0] for i in range(n)
    ))
    return _assemble(n + 1, pairs, new_labels)


def random_property_p_set(n: int, rng: np.random.Generator) -> ProductVectorSet:
    """Random n-qubit set with the clique-partition property, family-patterned.

    Per party, two random orthonormal bases with all mutual overlap moduli
    in [0.1, 0.99] replace the computational and rotated pairs; members
    follow the same labels as gyni_upb(n).
    """
    if n < 3:
        raise ValueError("family pattern needs at least 3 parties")
    party_kets = []
    for _ in range(n):
        while True:
            b0 = _random_basis(rng)
            b1 = _random_basis(rng)
            ovs = [abs(overlap(u, w)) for u in b0 for w in b1]
            if all(0.1 <= o <= 0.99 for o in ovs):
                party_kets.append((tuple(b0), tuple(b1)))
                break
    labels = tuple(tuple(member) for member in _family_labels(n))
    members = tuple(
        tuple(party_kets[i][k][p] for i, (k, p) in enumerate(member))
        for member in labels
    )
    return ProductVectorSet(
        dims=(2,) * n,
        members=members,
        subsets=SubsetAnnotation(party_kets=tuple(party_kets), labels=labels),
    )


def _random_basis(rng: np.random.Generator):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, _ = np.linalg.qr(m)
    return [canonical_ray(q[:, 0]), canonical_ray(q[:, 1])]
