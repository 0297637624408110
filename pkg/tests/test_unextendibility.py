import numpy as np
import pytest

from upbbell.families import LocalPairChoice, gyni_upb, shifts_upb
from upbbell.linalg import basis_ket, ket, overlap
from upbbell.product_sets import ProductVectorSet
from upbbell.unextendibility import (
    STATUS_EXTENDIBLE,
    STATUS_SPAN_COMPLETE,
    STATUS_UNEXTENDIBLE,
    completability_search,
    numeric_extendibility,
    unextendible_general,
    unextendible_qubit,
)

K0 = basis_ket(2, 0)
K1 = basis_ket(2, 1)
E = ket([1, 1]) / np.sqrt(2)


def qubit_set(members):
    return ProductVectorSet(dims=(2,) * len(members[0]), members=tuple(tuple(m) for m in members))


PARITY_SET = qubit_set([[K0, K0, K0], [K0, K1, K1], [K1, K0, K1], [K1, K1, K0]])
FULL_BASIS_2Q = qubit_set([(a, b) for a in (K0, K1) for b in (K0, K1)])


class TestQubitMethod:
    def test_shifts_unextendible(self):
        assert unextendible_qubit(shifts_upb()).status == STATUS_UNEXTENDIBLE

    def test_parity_set_extendible_with_witness(self):
        report = unextendible_qubit(PARITY_SET)
        assert report.status == STATUS_EXTENDIBLE
        # |111> kills every member at its first 1-vs-0 slot
        for i in range(3):
            assert abs(overlap(report.witness[i], K1)) >= 1 - 1e-9

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_family_unextendible(self, n):
        assert unextendible_qubit(gyni_upb(n)).status == STATUS_UNEXTENDIBLE

    def test_per_party_angles_unextendible(self):
        pairs = LocalPairChoice.from_angles([np.pi / 4, np.pi / 3, np.pi / 5])
        assert unextendible_qubit(shifts_upb(pairs)).status == STATUS_UNEXTENDIBLE

    def test_full_basis_flagged_span_complete(self):
        assert unextendible_qubit(FULL_BASIS_2Q).status == STATUS_SPAN_COMPLETE

    def test_non_qubit_rejected(self):
        r = ket([1, 0, 0])
        pset = ProductVectorSet(dims=(3, 2), members=((r, K0),))
        with pytest.raises(ValueError):
            unextendible_qubit(pset)


class TestGeneralMethod:
    def test_single_member(self):
        report = unextendible_general(qubit_set([[K0, K0]]))
        assert report.status == STATUS_EXTENDIBLE
        prod = abs(overlap(report.witness[0], K0)) * abs(overlap(report.witness[1], K0))
        assert prod <= 1e-9

    def test_full_basis_span_complete(self):
        assert unextendible_general(FULL_BASIS_2Q).status == STATUS_SPAN_COMPLETE

    def test_agrees_with_qubit_method(self):
        sets = [
            shifts_upb(),
            gyni_upb(3),
            gyni_upb(4),
            PARITY_SET,
            FULL_BASIS_2Q,
            qubit_set([[K0, K0]]),
            qubit_set([[K0, K0], [K0, K1]]),
            qubit_set([[K0, K0, K0], [K0, K1, K1]]),
        ]
        for pset in sets:
            a = unextendible_qubit(pset)
            b = unextendible_general(pset)
            assert a.status == b.status, pset.members

    def test_qutrit_extendible(self):
        r0 = ket([1, 0, 0])
        r1 = ket([0, 1, 0])
        pset = ProductVectorSet(dims=(3, 3), members=((r0, r0), (r1, r1)))
        report = unextendible_general(pset)
        assert report.status == STATUS_EXTENDIBLE

    def test_node_cap_gives_undecided(self):
        report = unextendible_general(gyni_upb(5), node_cap=3)
        assert report.status == "undecided"
        assert report.unextendible is None


class TestNumericMethod:
    def test_shifts_positive(self):
        assert numeric_extendibility(shifts_upb(), restarts=64, seed=0) > 1e-3

    def test_parity_set_zero(self):
        assert numeric_extendibility(PARITY_SET, restarts=16, seed=0) <= 1e-9

    def test_gyni5_positive(self):
        assert numeric_extendibility(gyni_upb(5), restarts=32, seed=0) > 1e-4


class TestMethodAgreementCorpus:
    def corpus(self):
        sets = [
            shifts_upb(),
            shifts_upb(LocalPairChoice.from_angles([np.pi / 4, np.pi / 3, np.pi / 5])),
            shifts_upb(LocalPairChoice.uniform(3, ket([np.cos(0.7), np.sin(0.7)]))),
            gyni_upb(3),
            gyni_upb(4),
            gyni_upb(5),
            gyni_upb(6),
            gyni_upb(4, LocalPairChoice.from_angles([0.5, 0.9, 1.2, 0.4])),
            gyni_upb(5, LocalPairChoice.from_angles([0.5, 0.9, 1.2, 0.4, 1.0])),
            PARITY_SET,
            FULL_BASIS_2Q,
            qubit_set([[K0, K0]]),
            qubit_set([[K0, K0], [K0, K1]]),
            qubit_set([[K0, K0, K0], [K0, K1, K1]]),
            qubit_set([[K0, E], [K1, E]]),
            qubit_set([[K0, K0, K0], [K0, K0, K1], [K0, K1, K0]]),
            qubit_set([(a, b) for a in (K0, K1) for b in (E, ket([1, -1]) / np.sqrt(2))]),
            qubit_set([(a, b, c) for a in (K0, K1) for b in (K0, K1) for c in (K0, K1)]),
            qubit_set([[E, K0], [ket([1, -1]) / np.sqrt(2), K0]]),
            qubit_set([[K0, K0, K0, K0], [K1, K1, K0, K0]]),
        ]
        return sets

    def test_corpus_size(self):
        assert len(self.corpus()) >= 20

    def test_three_methods_agree(self):
        for idx, pset in enumerate(self.corpus()):
            qr = unextendible_qubit(pset)
            gr = unextendible_general(pset)
            nv = numeric_extendibility(pset, restarts=64, seed=idx)
            assert qr.status == gr.status, f"set {idx}"
            numeric_extendible = nv <= 1e-7
            assert numeric_extendible == (qr.status == STATUS_EXTENDIBLE), \
                f"set {idx}: numeric {nv} vs {qr.status}"

    def test_witnesses_verified_orthogonal(self):
        for pset in self.corpus():
            report = unextendible_qubit(pset)
            if report.status != STATUS_EXTENDIBLE:
                continue
            for member in pset.members:
                prod = 1.0
                for i in range(pset.n):
                    prod *= abs(overlap(report.witness[i], member[i]))
                assert prod <= 1e-9


class TestCompletability:
    def test_two_member_completion(self):
        pset = qubit_set([[K0, K0], [K0, K1]])
        completion = completability_search(pset)
        assert completion is not None and completion != "undecided"
        assert len(completion) == 2

    def test_shifts_has_no_completion(self):
        assert completability_search(shifts_upb()) is None

    def test_three_qubit_pair_completes(self):
        pset = qubit_set([[K0, K0, K0], [K0, K1, K1]])
        completion = completability_search(pset)
        assert completion is not None and completion != "undecided"
        assert len(completion) == 6
        full = ProductVectorSet(dims=(2, 2, 2),
                                members=pset.members + tuple(completion))
        from upbbell.product_sets import gram_orthogonality_check
        ok, _, _ = gram_orthogonality_check(full)
        assert ok

    def test_budget_exhaustion(self):
        pset = qubit_set([[K0, K0, K0], [K0, K1, K1]])
        assert completability_search(pset, budget=2) == "undecided"

    def test_full_basis_needs_nothing(self):
        assert completability_search(FULL_BASIS_2Q) == []

    def test_non_orthogonal_input_rejected(self):
        with pytest.raises(ValueError):
            completability_search(qubit_set([[K0, K0], [K0, E]]))
