import numpy as np
import pytest

from upbbell.families import shifts_upb
from upbbell.linalg import basis_ket, ket
from upbbell.product_sets import (
    MeasurementPartition,
    ProductVectorSet,
    PropertyPViolation,
    canonical_ray,
    check_property_p,
    distinct_local_rays,
    gram_orthogonality_check,
    orthocomplement_qubit,
    orthogonality_graph,
    same_ray,
    same_set,
)

K0 = basis_ket(2, 0)
K1 = basis_ket(2, 1)
E = ket([1, 1]) / np.sqrt(2)
EP = ket([1, -1]) / np.sqrt(2)


def product_set(members, dims=None):
    members = tuple(tuple(m) for m in members)
    dims = dims or tuple(len(k) for k in members[0])
    return ProductVectorSet(dims=dims, members=members)


class TestCanonicalRay:
    def test_phase_removed(self):
        v = np.exp(1j * np.pi / 3) * K0
        assert np.allclose(canonical_ray(v), K0)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            v = rng.normal(size=3) + 1j * rng.normal(size=3)
            c = canonical_ray(v)
            assert np.allclose(canonical_ray(c), c, atol=1e-14)

    def test_orthocomplement(self):
        w = orthocomplement_qubit(E)
        assert abs(np.vdot(w, E)) <= 1e-12
        assert np.allclose(w, EP)


class TestDistinctLocalRays:
    def test_shifts_party_one(self):
        table = distinct_local_rays(shifts_upb(), 0)
        assert len(table.rays) == 4
        assert table.member_map == [0, 1, 2, 3]

    def test_all_same_up_to_phase(self):
        members = [[np.exp(1j * t) * K0, K0] for t in (0.0, 0.4, 2.2)]
        table = distinct_local_rays(product_set(members), 0)
        assert len(table.rays) == 1
        assert table.member_map == [0, 0, 0]

    def test_same_ray_phase_invariance(self):
        assert same_ray(K0, np.exp(1j * np.pi / 3) * K0)
        assert not same_ray(K0, K1)


class TestOrthogonalityGraph:
    def test_basis_pair(self):
        table = distinct_local_rays(product_set([[K0, K0], [K1, K0]]), 0)
        adj = orthogonality_graph(table)
        assert adj[0, 1] and adj[1, 0]

    def test_shifts_two_disjoint_edges(self):
        table = distinct_local_rays(shifts_upb(), 0)
        adj = orthogonality_graph(table)
        # rays in member order: |0>, |1>, |e>, |ep>
        expected = np.zeros((4, 4), dtype=bool)
        expected[0, 1] = expected[1, 0] = True
        expected[2, 3] = expected[3, 2] = True
        assert np.array_equal(adj, expected)

    def test_qutrit_path(self):
        r1 = ket([1, 0, 0])
        r2 = ket([0, 1, 0])
        r3 = ket([0, 1, 1]) / np.sqrt(2)
        members = [[r1, r1], [r2, r1], [r3, r1]]
        table = distinct_local_rays(product_set(members), 0)
        adj = orthogonality_graph(table)
        assert adj[0, 1] and adj[0, 2] and not adj[1, 2]


class TestPropertyP:
    def test_shifts_passes_with_expected_subsets(self):
        part = check_property_p(shifts_upb())
        assert isinstance(part, MeasurementPartition)
        for i in range(3):
            assert part.input_count(i) == 2
            assert part.output_count(i, 0) == 2
            assert part.output_count(i, 1) == 2
        # party 1: S_0 = {|0>,|1>}, S_1 = {|e>,|ep>} in first-occurrence order
        kets0 = part.measurement_kets(0, 0)
        assert np.allclose(kets0[0], K0) and np.allclose(kets0[1], K1)
        kets1 = part.measurement_kets(0, 1)
        assert abs(np.vdot(kets1[0], E)) >= 1 - 1e-12

    def test_qubit_sets_always_pass(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            members = []
            for _ in range(5):
                kets = []
                for _ in range(3):
                    v = rng.normal(size=2) + 1j * rng.normal(size=2)
                    kets.append(v / np.linalg.norm(v))
                members.append(kets)
            assert isinstance(check_property_p(product_set(members)), MeasurementPartition)

    def test_qutrit_path_fails(self):
        r1 = ket([1, 0, 0])
        r2 = ket([0, 1, 0])
        r3 = ket([0, 1, 1]) / np.sqrt(2)
        members = [[r1, K0], [r2, K0], [r3, K0]]
        result = check_property_p(product_set(members, dims=(3, 2)))
        assert isinstance(result, PropertyPViolation)
        assert result.party == 0
        assert {result.ray_u, result.ray_v} == {1, 2}

    def test_partition_order_free(self):
        base = shifts_upb()
        perm = ProductVectorSet(dims=base.dims,
                                members=tuple(base.members[j] for j in (2, 0, 3, 1)))
        p1 = check_property_p(base)
        p2 = check_property_p(perm)
        # same subsets as ray multisets, independent of member order
        for i in range(3):
            s1 = {frozenset(map(tuple, (np.round(r, 9) for r in p1.measurement_kets(i, k))))
                  for k in range(2)}
            s2 = {frozenset(map(tuple, (np.round(r, 9) for r in p2.measurement_kets(i, k))))
                  for k in range(2)}
            assert s1 == s2

    def test_success_matches_pairwise_orthogonality(self):
        pset = shifts_upb()
        part = check_property_p(pset)
        ok, _, _ = gram_orthogonality_check(pset)
        assert ok
        for j in range(pset.size):
            for k in range(j + 1, pset.size):
                same_input_diff_output = any(
                    part.assignments[j][i][0] == part.assignments[k][i][0]
                    and part.assignments[j][i][1] != part.assignments[k][i][1]
                    for i in range(pset.n)
                )
                assert same_input_diff_output


class TestGramCheck:
    def test_shifts_orthogonal(self):
        ok, pair, worst = gram_orthogonality_check(shifts_upb())
        assert ok and worst <= 1e-12

    def test_non_orthogonal_pair_reported(self):
        ok, pair, worst = gram_orthogonality_check(product_set([[K0, K0], [K0, E]]))
        assert not ok
        assert pair == (0, 1)
        assert worst == pytest.approx(1 / np.sqrt(2))


class TestSameSet:
    def test_permutation_and_phase(self):
        base = shifts_upb()
        scrambled = ProductVectorSet(
            dims=base.dims,
            members=tuple(
                tuple(np.exp(1j * 0.7 * (i + j)) * k for i, k in enumerate(base.members[j]))
                for j in (3, 1, 0, 2)
            ),
        )
        assert same_set(base, scrambled)

    def test_distinct_sets_differ(self):
        a = product_set([[K0, K0]])
        b = product_set([[K0, K1]])
        assert not same_set(a, b)


def test_normalization_enforced():
    with pytest.raises(ValueError):
        product_set([[ket([1, 1]), K0]])
