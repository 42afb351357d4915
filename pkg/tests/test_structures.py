"""Finite structures, Paley graphs, group constructors, sequences, JSON files."""

import random

import pytest

from helpers import oracle_degrees, oracle_extension
from keislerlab.errors import StructureError
from keislerlab.fol import Signature
from keislerlab.structures import (
    FiniteStructure,
    StructureSequence,
    cyclic_group,
    dihedral_group,
    extension_property,
    group_from_table,
    is_prime,
    load_structure,
    paley,
    paley_sequence,
    quaternion_group,
    save_structure,
    structure_from_json_dict,
    structure_to_json_dict,
    symmetric_group,
)

ADMISSIBLE_Q = [q for q in range(5, 201) if is_prime(q) and q % 4 == 1]


class TestFiniteStructure:
    def test_relation_tuple_out_of_range(self):
        sig = Signature.make(relations={"R": 2})
        with pytest.raises(StructureError):
            FiniteStructure(sig, 3, relations={"R": {(0, 5)}})

    def test_function_table_must_be_total(self):
        sig = Signature.make(functions={"f": 1})
        with pytest.raises(StructureError):
            FiniteStructure(sig, 3, functions={"f": {(0,): 1}})

    def test_constants_required(self):
        sig = Signature.make(constants=("c",))
        with pytest.raises(StructureError):
            FiniteStructure(sig, 3)

    def test_undeclared_relation_rejected(self):
        sig = Signature.make(relations={"R": 2})
        with pytest.raises(StructureError):
            FiniteStructure(sig, 3, relations={"R": set(), "S": set()})

    def test_equality_is_structural(self):
        a = paley(5)
        b = paley(5)
        assert a == b and a is not b


class TestPaley:
    def test_paley5_is_the_5_cycle(self):
        # squares mod 5 are {1, 4}, so edges join consecutive residues
        g = paley(5)
        expected = {(a, b) for a in range(5) for b in range(5) if (a - b) % 5 in {1, 4}}
        assert g.relations["R"] == expected

    def test_paley13_degree_from_fact(self):
        g = paley(13)
        assert set(oracle_degrees(g).values()) == {6}

    def test_inadmissible_inputs(self):
        with pytest.raises(StructureError):
            paley(7)  # 7 = 3 mod 4
        with pytest.raises(StructureError):
            paley(9)  # not prime
        with pytest.raises(StructureError):
            paley(4)

    def test_regularity_all_admissible_up_to_200(self):
        for q in ADMISSIBLE_Q:
            degrees = set(oracle_degrees(paley(q)).values())
            assert degrees == {(q - 1) // 2}, q

    def test_symmetric_irreflexive(self):
        for q in (5, 13, 17, 29):
            edges = paley(q).relations["R"]
            assert all((b, a) in edges for a, b in edges)
            assert all(a != b for a, b in edges)


class TestGroups:
    def test_trivial_group(self):
        g = cyclic_group(1)
        assert g.universe_size == 1 and g.identity == 0

    def test_cyclic_mul(self):
        z4 = cyclic_group(4)
        assert z4.mul(2, 3) == 1

    def test_two_by_two_table_is_z2(self):
        g = group_from_table([[0, 1], [1, 0]])
        assert g.identity == 0 and g.inv(1) == 1

    def test_non_associative_rejected(self):
        # right-zero band of size 2 with a tweak: not a group (no identity)
        with pytest.raises(StructureError):
            group_from_table([[0, 0], [0, 0]])

    def test_missing_inverse_rejected(self):
        # monoid on {0,1,2}: 0 identity, but 1*1 = 1 means 1 has no inverse... build a table
        table = [[0, 1, 2], [1, 1, 2], [2, 2, 2]]
        with pytest.raises(StructureError):
            group_from_table(table)

    def test_group_laws_exhaustive_small(self):
        groups = [cyclic_group(n) for n in range(1, 13)]
        groups += [dihedral_group(k) for k in (3, 4, 5, 6)]
        groups += [quaternion_group(), symmetric_group(3)]
        for g in groups:
            n = g.universe_size
            assert n <= 16
            e = g.identity
            for a in range(n):
                assert g.mul(e, a) == a and g.mul(a, e) == a
                assert g.mul(a, g.inv(a)) == e
                for b in range(n):
                    for c in range(n):
                        assert g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))

    def test_dihedral_orders(self):
        for k, order in [(3, 6), (4, 8), (5, 10), (6, 12)]:
            assert dihedral_group(k).universe_size == order

    def test_dihedral_is_nonabelian_from_3(self):
        d3 = dihedral_group(3)
        assert any(d3.mul(a, b) != d3.mul(b, a) for a in range(6) for b in range(6))

    def test_quaternion_relations(self):
        q8 = quaternion_group()
        # -1 is central and squares of non-central elements equal -1
        minus_one = next(
            a for a in range(8) if a != q8.identity and all(q8.mul(a, b) == q8.mul(b, a) for b in range(8))
        )
        for a in range(8):
            if a not in (q8.identity, minus_one):
                assert q8.mul(a, a) == minus_one

    def test_symmetric_group_order(self):
        assert symmetric_group(3).universe_size == 6
        assert symmetric_group(4).universe_size == 24


class TestExtensionProperty:
    def test_paley5_s1_t0(self):
        assert extension_property(paley(5), 1, 0)

    def test_paley5_s1_t1_matches_oracle(self):
        # the brute-force oracle decides; pinned as a regression value
        g = paley(5)
        value = oracle_extension(g, 1, 1)
        assert extension_property(g, 1, 1) == value
        assert value is True

    def test_paley5_s2_t0_fails(self):
        assert not extension_property(paley(5), 2, 0)
        assert not oracle_extension(paley(5), 2, 0)

    def test_complete_graph_fails_t1(self):
        sig = Signature.make(relations={"R": 2})
        k4 = FiniteStructure(sig, 4, relations={"R": {(a, b) for a in range(4) for b in range(4) if a != b}})
        assert not extension_property(k4, 0, 1)

    def test_oracle_agreement_random_graphs(self):
        rng = random.Random(17)
        for _ in range(15):
            n = rng.randint(3, 7)
            edges = set()
            for a in range(n):
                for b in range(a + 1, n):
                    if rng.random() < 0.5:
                        edges.add((a, b))
                        edges.add((b, a))
            g = FiniteStructure(Signature.make(relations={"R": 2}), n, relations={"R": edges})
            for s, t in [(1, 0), (0, 1), (1, 1), (2, 1)]:
                if s + t <= n:
                    assert extension_property(g, s, t) == oracle_extension(g, s, t)

    def test_antitone_in_s_and_t(self):
        # failure propagates to larger (s, t)
        rng = random.Random(29)
        for _ in range(10):
            n = rng.randint(4, 7)
            edges = set()
            for a in range(n):
                for b in range(a + 1, n):
                    if rng.random() < 0.5:
                        edges.add((a, b))
                        edges.add((b, a))
            g = FiniteStructure(Signature.make(relations={"R": 2}), n, relations={"R": edges})
            results = {}
            for s in range(0, 3):
                for t in range(0, 3):
                    if 1 <= s + t <= n:
                        results[(s, t)] = extension_property(g, s, t)
            for (s, t), ok in results.items():
                if not ok:
                    for (s2, t2), ok2 in results.items():
                        if s2 >= s and t2 >= t:
                            assert not ok2

    def test_not_symmetric_rejected(self):
        g = FiniteStructure(Signature.make(relations={"R": 2}), 3, relations={"R": {(0, 1)}})
        with pytest.raises(StructureError):
            extension_property(g, 1, 0)

    def test_irreflexive_required(self):
        g = FiniteStructure(Signature.make(relations={"R": 2}), 3, relations={"R": {(0, 0)}})
        with pytest.raises(StructureError):
            extension_property(g, 1, 0)


class TestSequences:
    def test_labels_strictly_increasing(self):
        with pytest.raises(StructureError):
            StructureSequence(((5, paley(5)), (5, paley(5))))

    def test_shared_signature_required(self):
        z4 = cyclic_group(4)
        with pytest.raises(StructureError):
            StructureSequence(((1, paley(5)), (2, z4)))

    def test_paley_sequence(self):
        seq = paley_sequence([5, 13, 17])
        assert seq.labels == (5, 13, 17)
        assert len(seq) == 3


class TestJson:
    def test_round_trip_structure(self, tmp_path):
        g = paley(13)
        path = tmp_path / "p13.json"
        save_structure(g, path)
        loaded = load_structure(path)
        assert loaded == g

    def test_round_trip_group(self, tmp_path):
        z4 = cyclic_group(4)
        path = tmp_path / "z4.json"
        save_structure(z4, path)
        loaded = load_structure(path)
        assert loaded == z4
        from keislerlab.structures import group_from_structure

        assert group_from_structure(loaded).mul(2, 3) == 1

    def test_file_format_shape(self):
        z2 = cyclic_group(2)
        data = structure_to_json_dict(z2)
        assert data["signature"]["functions"] == {"inv": 1, "mul": 2}
        assert data["functions"]["mul"] == [[0, 1], [1, 0]]
        assert data["constants"] == {"e": 0}
        assert data["universe"] == 2

    def test_malformed_rejected(self):
        with pytest.raises(StructureError):
            structure_from_json_dict({"universe": 3})

    def test_function_table_wrong_shape(self):
        data = structure_to_json_dict(cyclic_group(2))
        data["functions"]["mul"] = [[0, 1]]
        with pytest.raises(StructureError):
            structure_from_json_dict(data)
