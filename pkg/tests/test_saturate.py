import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posetsat.detect import find_induced
from posetsat.families import SetFamily, complement_family, member_key
from posetsat.posets import make_chain, make_diamond, make_hypercube, make_v
from posetsat.saturate import (
    Verdict,
    chain_family,
    empty_plus_singletons,
    full_plus_cosingletons,
    greedy_saturate,
    is_free,
    is_saturated,
    q3_construction,
    upper_bound_catalog,
)

import oracles

D = make_diamond()


def test_is_free_examples():
    assert is_free(chain_family(3), D) is True
    assert is_free(SetFamily(2, (0, 1, 2, 3)), D) is False


def test_empty_plus_singletons_saturated():
    rep = is_saturated(empty_plus_singletons(3), D, mode="full")
    assert rep.verdict is Verdict.SATURATED
    assert rep.exhaustive


def test_single_member_family_not_saturated():
    rep = is_saturated(SetFamily.of(2, [(1,)]), D, mode="full")
    assert rep.verdict is Verdict.FREE_NOT_SATURATED
    # evidence re-validates: adding it creates no copy
    assert not oracles.diamond_through(SetFamily.of(2, [(1,)]), rep.missing)
    # first failure is selected by canonical order, which puts {} first
    assert rep.missing == 0


def test_maximal_chain_saturated_for_small_n():
    for n in range(1, 7):
        rep = is_saturated(chain_family(n), D, mode="full")
        assert rep.verdict is Verdict.SATURATED, n


def test_not_free_report_carries_witness():
    rep = is_saturated(SetFamily(2, (0, 1, 2, 3)), D, mode="full")
    assert rep.verdict is Verdict.NOT_FREE
    assert rep.embedding is not None and rep.validate() is None


def test_full_certificate_covers_every_missing_set():
    f = empty_plus_singletons(3)
    rep = is_saturated(f, D, mode="full", certificate=True)
    assert rep.verdict is Verdict.SATURATED
    assert len(rep.certificate) == (1 << 3) - len(f)
    assert rep.validate() is None
    for m, emb in rep.certificate.items():
        assert emb.uses(m)


def test_spot_mode_is_labeled_probabilistic():
    f = chain_family(4)
    rep = is_saturated(f, D, mode="spot", spot=5, seed=11)
    assert rep.verdict is Verdict.SATURATED
    assert rep.exhaustive is False
    assert rep.checked == 5 and rep.seed == 11
    again = is_saturated(f, D, mode="spot", spot=5, seed=11)
    assert rep.to_json() == again.to_json()


def test_full_mode_cap():
    with pytest.raises(ValueError):
        is_saturated(SetFamily(25), D, mode="full")


def test_thread_count_does_not_change_report():
    fams = [
        chain_family(4),
        SetFamily.of(3, [(1,), (2,), (1, 3), (2, 3)]),
        SetFamily.of(4, [(1,), (1, 2), (1, 2, 3)]),
    ]
    for f in fams:
        for p in (D, make_v()):
            solo = is_saturated(f, p, mode="full", threads=1)
            multi = is_saturated(f, p, mode="full", threads=3)
            assert json.dumps(solo.to_json(), sort_keys=True) == json.dumps(
                multi.to_json(), sort_keys=True
            )


def brute_verdict(f, p):
    return oracles.saturation_verdict(f, p)


def test_verdicts_match_oracle_exhaustively_n2():
    for r in range(5):
        for combo in itertools.combinations(range(4), r):
            f = SetFamily(2, combo)
            rep = is_saturated(f, D, mode="full")
            assert rep.verdict.value == brute_verdict(f, D)


def test_verdicts_match_oracle_exhaustively_n3_diamond():
    universe = list(range(8))
    for r in range(9):
        for combo in itertools.combinations(universe, r):
            f = SetFamily(3, combo)
            rep = is_saturated(f, D, mode="full")
            assert rep.verdict.value == brute_verdict(f, D)


def test_saturation_equals_maximality():
    # saturated <=> free with no free strict superfamily (single additions suffice:
    # freeness is closed downward)
    for r in range(9):
        for combo in itertools.combinations(range(8), r):
            f = SetFamily(3, combo)
            rep = is_saturated(f, D, mode="full")
            free = not oracles.has_induced(f, D)
            maximal = free and all(
                oracles.has_induced(f.add(m), D) for m in range(8) if m not in f
            )
            assert (rep.verdict is Verdict.SATURATED) == maximal


def test_greedy_canonical_from_empty_n2():
    g = greedy_saturate(SetFamily(2), D, order="canonical")
    assert g == SetFamily(2, (0, 1, 2))
    assert len(g) >= 3
    assert is_saturated(g, D, mode="full").verdict is Verdict.SATURATED


def test_greedy_keeps_seed_members():
    g = greedy_saturate(SetFamily.of(3, [()]), D, order="canonical")
    assert 0 in g
    assert is_saturated(g, D, mode="full").verdict is Verdict.SATURATED


def test_greedy_idempotent_on_saturated_input():
    g = greedy_saturate(SetFamily(3), D, order="canonical")
    assert greedy_saturate(g, D, order="canonical") == g


def test_greedy_rejects_non_free_input():
    with pytest.raises(ValueError):
        greedy_saturate(SetFamily(2, (0, 1, 2, 3)), D)


def test_greedy_orders_and_determinism():
    a = greedy_saturate(SetFamily(4), D, order="shuffle", seed=3)
    b = greedy_saturate(SetFamily(4), D, order="shuffle", seed=3)
    c = greedy_saturate(SetFamily(4), D, order="reverse")
    assert a == b
    for fam in (a, c):
        assert is_saturated(fam, D, mode="full").verdict is Verdict.SATURATED


@given(st.integers(3, 6), st.integers(0, 99))
@settings(max_examples=25, deadline=None)
def test_greedy_outputs_are_saturated(n, seed):
    g = greedy_saturate(SetFamily(n), D, order="shuffle", seed=seed)
    assert is_saturated(g, D, mode="full").verdict is Verdict.SATURATED


def test_greedy_generic_pattern():
    g = greedy_saturate(SetFamily(3), make_v(), order="canonical")
    assert is_saturated(g, make_v(), mode="full").verdict is Verdict.SATURATED


def test_catalog_diamond_n4():
    entries = upper_bound_catalog(4, D)
    assert [e.name for e in entries] == ["chain", "empty+singletons", "full+cosingletons"]
    assert all(e.emitted for e in entries)
    assert all(len(e.family) == 5 for e in entries)
    assert all(e.report.verdict is Verdict.SATURATED for e in entries)


def test_catalog_diamond_n3_sizes():
    entries = upper_bound_catalog(3, D)
    assert [len(e.family) for e in entries] == [4, 4, 4]


def test_catalog_q3_n5():
    entries = upper_bound_catalog(5, make_hypercube(3))
    assert len(entries) == 1 and entries[0].name == "q3-grid"
    assert entries[0].emitted and len(entries[0].family) == 13


def test_catalog_q3_too_small_reported_not_emitted():
    entries = upper_bound_catalog(3, make_hypercube(3))
    assert len(entries) == 1
    assert not entries[0].emitted and entries[0].reason


def test_catalog_unknown_pattern_empty():
    assert upper_bound_catalog(4, make_v()) == []


def test_q3_construction_shape():
    fam = q3_construction(4)
    assert len(fam) == 10
    assert 0 in fam and fam.full_mask in fam


def test_extreme_members_force_size_bound():
    # catalog families that contain {} or [n] all have size >= n+1
    for n in range(3, 8):
        for e in upper_bound_catalog(n, D):
            f = e.family
            if 0 in f or f.full_mask in f:
                assert len(f) >= n + 1


def test_complements_of_catalog_families_saturated():
    for n in range(3, 7):
        for e in upper_bound_catalog(n, D):
            comp = complement_family(e.family)
            assert is_saturated(comp, D, mode="full").verdict is Verdict.SATURATED
