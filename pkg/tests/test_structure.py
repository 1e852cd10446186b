import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posetsat.detect import DIAMOND, find_diamond
from posetsat.families import SetFamily, complement_family, elements_of, maximal_sets, minimal_sets
from posetsat.saturate import Verdict, chain_family, empty_plus_singletons, greedy_saturate
from posetsat.structure import (
    NotDiamondFreeError,
    cover_bound_check,
    decompose,
    f_of,
    nested_sequence,
    verify_structure_invariants,
    w_of,
)

import oracles


def sets_of(fam):
    return {frozenset(elements_of(m)) for m in fam.members}


def test_decompose_chain_n3():
    dec = decompose(chain_family(3))
    assert sets_of(dec.A) == {frozenset()}
    assert dec.W == 0b111
    assert len(dec.B0) == 0 and len(dec.B) == 0 and len(dec.GB) == 0
    assert dec.mA == 0
    assert sets_of(dec.X) == {frozenset({1, 2, 3})}
    assert dec.Wbar == 0b111


def test_decompose_two_level_example():
    dec = decompose(SetFamily.of(3, [(1,), (2,), (1, 3), (2, 3)]))
    assert sets_of(dec.A) == {frozenset({1}), frozenset({2})}
    assert dec.W == 0b100


def test_decompose_rejects_non_free():
    with pytest.raises(NotDiamondFreeError):
        decompose(SetFamily(2, (0, 1, 2, 3)))


def test_decompose_respects_cap():
    with pytest.raises(ValueError):
        decompose(SetFamily(21))


def test_f_of_and_w_of_examples():
    g = SetFamily.of(3, [(1, 2), (1, 3)])
    assert f_of(1, g) == g
    assert f_of(2, g) == SetFamily.of(3, [(1, 2)])
    assert w_of(g) == 0
    assert w_of(SetFamily.of(3, [(1,)])) == 0b110
    with pytest.raises(ValueError):
        f_of(4, g)


@st.composite
def free_families(draw, max_n=4, max_size=7):
    n = draw(st.integers(2, max_n))
    size = draw(st.integers(0, min(max_size, 1 << n)))
    masks = draw(
        st.lists(st.integers(0, (1 << n) - 1), min_size=size, max_size=size, unique=True)
    )
    f = SetFamily(n, tuple(masks))
    if find_diamond(f) is not None:
        # drop a top element of some diamond until free
        while find_diamond(f) is not None:
            emb = find_diamond(f)
            f = f.without(emb.image_masks()[3])
    return f


@given(free_families())
@settings(max_examples=120, deadline=None)
def test_b0_matches_definitional_scan(f):
    dec = decompose(f)
    assert set(dec.B0.members) == oracles.bottom_of_diamond_masks(f)
    assert set(dec.Y0.members) == oracles.top_of_diamond_masks(f)


@given(free_families())
@settings(max_examples=120, deadline=None)
def test_decomposition_invariants(f):
    dec = decompose(f)
    # antichains
    for fam in (dec.A, dec.X, dec.B1, dec.Y1):
        assert minimal_sets(fam) == fam and maximal_sets(fam) == fam
    # GB and A disjoint (dually HY and X)
    assert not set(dec.GB.members) & set(dec.A.members)
    assert not set(dec.HY.members) & set(dec.X.members)
    # B1 = maximal elements of B0, B excludes subsets of minimal members
    assert dec.B1 == maximal_sets(dec.B0)
    for b in dec.B.members:
        assert not any(b & a == b for a in dec.A.members)
    # every retained witness forms a diamond over its B member
    for b, (c, d, e) in dec.b_witnesses.items():
        assert oracles.diamond_quadruple((b, c, d, e))
        assert all(m in f for m in (c, d, e))
    for y, (c, d, e) in dec.y_witnesses.items():
        assert oracles.diamond_quadruple((e, c, d, y))
        assert all(m in f for m in (c, d, e))
    assert set(dec.b_witnesses) == set(dec.B.members)
    assert set(dec.y_witnesses) == set(dec.Y.members)


@given(free_families())
@settings(max_examples=120, deadline=None)
def test_dual_coherence(f):
    dec = decompose(f)
    fc = complement_family(f)
    dec_c = decompose(fc)
    full = f.full_mask
    comp = lambda fam: {full ^ m for m in fam.members}
    assert set(dec.X.members) == comp(dec_c.A)
    assert set(dec.HY.members) == comp(dec_c.GB)
    assert dec.Wbar == dec_c.W
    # and X agrees with the direct maximal-member computation
    assert dec.X == maximal_sets(f)
    assert dec.A == minimal_sets(f)


def test_nested_sequence_hand_example():
    seq = nested_sequence(SetFamily.of(3, [(1, 2), (1, 3)]))
    assert seq.k == 2
    assert seq.singletons == (2, 1)
    assert [tuple(elements_of(c)) for c in seq.classes] == [(2,), (1, 3)]
    union = 0
    for c in seq.classes:
        union |= c
    assert union == 0b111  # W is empty here


def test_nested_sequence_singleton():
    seq = nested_sequence(SetFamily.of(2, [(1,)]))
    assert seq.k == 1 and seq.singletons == (1,) and seq.classes == (1,)


def test_nested_sequence_errors():
    with pytest.raises(ValueError):
        nested_sequence(SetFamily(3))
    with pytest.raises(ValueError):
        nested_sequence(SetFamily.of(3, [(1,), (1, 2)]))  # not an antichain
    with pytest.raises(ValueError):
        nested_sequence(SetFamily.of(3, [()]))  # empty member


@st.composite
def antichains(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    size = draw(st.integers(1, min(8, 1 << n)))
    masks = draw(
        st.lists(st.integers(1, (1 << n) - 1), min_size=size, max_size=size, unique=True)
    )
    fam = minimal_sets(SetFamily(n, tuple(masks)))
    return fam


@given(antichains())
@settings(max_examples=200, deadline=None)
def test_nested_sequence_invariants(a_family):
    seq = nested_sequence(a_family)
    # strictly shrinking stages, first equals input, all nonempty
    assert seq.families[0] == a_family
    for i in range(1, seq.k):
        assert set(seq.families[i].members) < set(seq.families[i - 1].members)
    assert all(fam.members for fam in seq.families)
    # classes are pairwise disjoint and cover exactly the non-W arena
    union = 0
    total = 0
    for c in seq.classes:
        union |= c
        total += c.bit_count()
    assert total == union.bit_count()
    assert union == a_family.full_mask & ~w_of(a_family)
    # each chosen element belongs to its class
    for a, cls in zip(seq.singletons, seq.classes):
        assert cls >> (a - 1) & 1
    # the incidence family of each chosen element matches its whole class
    for i, (a, cls) in enumerate(zip(seq.singletons, seq.classes)):
        stage = seq.families[i]
        base = frozenset(f_of(a, stage).members)
        for j in elements_of(cls):
            assert frozenset(f_of(j, stage).members) == base
    # members at stage j avoid all earlier classes
    for j, fam in enumerate(seq.families):
        for t in fam.members:
            for l in range(j):
                assert not seq.classes[l] & t


def test_cover_bound_examples():
    res = cover_bound_check(3, [0b1, 0b10, 0b100], 2)
    assert res.hypothesis_holds and res.k == 3 and res.bound == 2 and res.ok
    res = cover_bound_check(3, [0b1, 0b10], 2)
    assert res.hypothesis_holds and res.k == 2 and res.ok
    res = cover_bound_check(4, [0b1100], 2)
    assert not res.hypothesis_holds and res.ok


def test_cover_bound_errors():
    with pytest.raises(ValueError):
        cover_bound_check(3, [0], 2)
    with pytest.raises(ValueError):
        cover_bound_check(3, [1], 5)


def test_cover_bound_random_scan_never_violated():
    rng = random.Random(1)
    for _ in range(300):
        n = rng.randint(1, 5)
        k = rng.randint(1, 4)
        sets = [rng.randint(1, (1 << n) - 1) for _ in range(k)]
        for h in range(1, n + 1):
            assert cover_bound_check(n, sets, h).ok


def test_verify_chain_gates_standing_checks():
    rep = verify_structure_invariants(chain_family(4))
    assert not rep.vacuous
    by_id = {c.id: c.status for c in rep.checks}
    assert by_id["L2.1"] == "pass"
    assert all(v == "n/a" for k, v in by_id.items() if k != "L2.1")


def test_verify_empty_plus_singletons():
    rep = verify_structure_invariants(empty_plus_singletons(3))
    by_id = {c.id: c.status for c in rep.checks}
    assert by_id["L2.1"] == "pass"
    assert len(rep.family) == 4  # n + 1, consistent with the bound
    assert not rep.failures()


def test_verify_middle_levels_family():
    f = SetFamily.of(3, [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)])
    rep = verify_structure_invariants(f)
    assert not rep.vacuous and rep.standing
    by_id = {c.id: c.status for c in rep.checks}
    assert not rep.failures()
    assert by_id["L2.2"] == "pass"
    assert by_id["L2.3"] == "pass"
    assert by_id["C3.5"] == "pass"
    # W is empty, so the W-gated checks are not applicable
    assert by_id["L2.4"] == "n/a" and by_id["C3.7"] == "n/a"
    # size 6 > 3n/2 = 4.5 and > n = 3: hypotheses of the size-gated checks fail
    assert by_id["P4.1"] == "n/a" and by_id["P4.3"] == "n/a"


def test_verify_vacuous_on_unsaturated():
    rep = verify_structure_invariants(SetFamily.of(2, [(1,)]))
    assert rep.vacuous and rep.checks == ()
    assert rep.saturation.verdict is Verdict.FREE_NOT_SATURATED


def test_verify_greedy_families_no_failures():
    for n, seed in [(4, 0), (5, 1), (5, 2), (6, 3)]:
        g = greedy_saturate(SetFamily(n), DIAMOND, order="shuffle", seed=seed)
        rep = verify_structure_invariants(g)
        assert not rep.vacuous
        assert rep.failures() == ()


def test_report_json_shape():
    f = SetFamily.of(3, [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)])
    blob = verify_structure_invariants(f).to_json()
    assert blob["n"] == 3
    assert {c["status"] for c in blob["lemmas"]} <= {"pass", "fail", "n/a"}
    assert blob["decomposition"]["A"] == [[1], [2], [3]]
    assert blob["nested"]["k"] == 3
