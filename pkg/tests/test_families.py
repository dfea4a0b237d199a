import numpy as np
import pytest

from cptk.codec import seq_code
from cptk.families import (LAW_IDS, canonical_index, check_law, close_b,
                           close_cc, close_co, close_s, close_u, dc_members,
                           family_from_json, finite_family, length_family,
                           list_family, regular_family, regular_index_decode,
                           regular_index_encode, word_e)
from cptk.langs import (FULL, Complement, LeftMark, Predicate, is_finite,
                        member_batch, step_budget, to_automaton)
from cptk.words import ord_, window, window_for_horizon


def test_regular_enumeration_trivia(reg_ab, ab):
    # the one-state block: index 0 is empty, index 1 is everything
    packed = window(ab, 50)
    assert not member_batch(reg_ab.expr(0), packed).any()
    assert member_batch(reg_ab.expr(1), packed).all()


def test_regular_index_roundtrip(ab):
    for i in list(range(300)) + [5897, 5898, 123456]:
        dfa = regular_index_decode(i, 2)
        assert regular_index_encode(dfa) == i


def test_canonical_index_decodes_to_same_language(ab):
    rng = np.random.default_rng(6)
    from .conftest import random_dfa
    for _ in range(60):
        d = random_dfa(rng, 2)
        i = canonical_index(d)
        assert regular_index_decode(i, 2).same_language(d)


def test_first_indices_pairwise_consistent(reg_ab, ab):
    """Canonical-automaton equality must coincide with window agreement."""
    packed = window_for_horizon(ab, 300)
    keys = [reg_ab.canonical(i) for i in range(100)]
    rows = [reg_ab.window_row(i, packed) for i in range(100)]
    for i in range(100):
        for j in range(i + 1, 100):
            if keys[i] == keys[j]:
                assert (rows[i] == rows[j]).all()
            # 300 words are enough to separate every automaton this small
            elif (rows[i] == rows[j]).all():
                pytest.fail(f"indices {i},{j} agree on the window but differ canonically")


def test_regular_family_semantically_closed_under_union(reg_ab, ab):
    rng = np.random.default_rng(7)
    for _ in range(20):
        i, j = int(rng.integers(0, 300)), int(rng.integers(0, 300))
        di = to_automaton(reg_ab.expr(i), ab)
        dj = to_automaton(reg_ab.expr(j), ab)
        k = canonical_index(di.union(dj))
        assert k < 10 ** 6
        assert regular_index_decode(k, 2).same_language(di.union(dj))


def test_word_e(reg_ab, ab):
    assert word_e(reg_ab, 1, 0) is True
    assert word_e(reg_ab, 0, 0) is False
    lf = length_family(ab)
    assert word_e(lf, 2, ord_(ab, "ab")) is True
    assert word_e(lf, 2, ord_(ab, "abb")) is False


def test_word_e_total_under_step_budget(ab):
    fams = [regular_family(ab), length_family(ab), finite_family(ab)]
    rng = np.random.default_rng(8)
    for fam in fams:
        with step_budget(10 ** 7):
            for _ in range(60):
                i = int(rng.integers(0, 10 ** 4))
                j = int(rng.integers(0, 10 ** 4))
                assert word_e(fam, i, j) in (True, False)


def test_closures_preserve_totality(reg_ab, ab):
    rng = np.random.default_rng(9)
    closures = [close_u(reg_ab), close_s(reg_ab), close_co(reg_ab),
                close_cc(reg_ab), close_b(reg_ab)]
    with step_budget(10 ** 7):
        for fam in closures:
            for _ in range(25):
                i = int(rng.integers(0, 10 ** 4))
                j = int(rng.integers(0, 2000))
                assert word_e(fam, i, j) in (True, False)


def test_close_u_singleton_identity(reg_ab, ab):
    packed = window(ab, 300)
    fu = close_u(reg_ab)
    for i in [0, 1, 17, 100]:
        code = seq_code([i])
        assert (member_batch(fu.expr(code), packed)
                == member_batch(reg_ab.expr(i), packed)).all()


def test_close_cc_even_odd(reg_ab, ab):
    packed = window(ab, 500)
    cc = close_cc(reg_ab)
    for i in [0, 3, 42, 77]:
        assert (member_batch(cc.expr(2 * i), packed)
                == member_batch(reg_ab.expr(i), packed)).all()
        assert (member_batch(cc.expr(2 * i + 1), packed)
                == ~member_batch(reg_ab.expr(i), packed)).all()


def test_co_involution_membership(reg_ab, ab):
    packed = window(ab, 501)
    coco = close_co(close_co(reg_ab))
    for i in range(0, 120, 7):
        assert (member_batch(coco.expr(i), packed)
                == member_batch(reg_ab.expr(i), packed)).all()


def test_dc_members_regular(reg_ab, ab):
    pairs = dc_members(reg_ab, 66, horizon=300)
    assert all(m.status == "exact" for m in pairs)
    assert (1, 0) in {(m.i, m.j) for m in pairs}  # everything = complement of empty
    for m in pairs[:40]:
        vi = to_automaton(reg_ab.expr(m.i), ab)
        vj = to_automaton(reg_ab.expr(m.j), ab)
        assert vi.same_language(vj.complement())


def test_dc_members_length_family_empty(ab):
    assert dc_members(length_family(ab), 40, horizon=200) == []


def test_dc_members_finite_family_empty(ab):
    assert dc_members(finite_family(ab), 60, horizon=200) == []


def test_dc_members_of_cc_nonempty(reg_ab, ab):
    cc = close_cc(reg_ab)
    pairs = dc_members(cc, 8, horizon=300)
    assert pairs  # each language sits next to its complement by construction
    assert {(m.i, m.j) for m in pairs} >= {(0, 1), (1, 0)}


def test_dc_members_opaque_horizon(ab):
    sq = Predicate("square-length")
    fam = list_family("u", ab, [sq, Complement(sq), LeftMark("a", FULL)])
    pairs = dc_members(fam, 3, horizon=300)
    assert {(m.i, m.j) for m in pairs} == {(0, 1), (1, 0)}
    assert all(m.status == "horizon" for m in pairs)


def test_finite_family_all_finite(ab):
    fam = finite_family(ab)
    for i in range(0, 200, 13):
        v = is_finite(fam.expr(i), ab)
        assert v.is_finite and v.exact


def test_length_family_exact(ab):
    fam = length_family(ab)
    for i in range(6):
        v = is_finite(fam.expr(i), ab)
        assert v.is_finite and v.count == 2 ** i


@pytest.mark.parametrize("law", LAW_IDS)
def test_laws_hold_on_regular_family(reg_ab, law):
    report = check_law(law, reg_ab, index_samples=25, horizon=200, seed=1)
    assert report["disagreements"] == 0
    assert report["first_counterexample"] is None


def test_check_law_rejects_unknown(reg_ab):
    with pytest.raises(ValueError):
        check_law("associativity", reg_ab, 5, 100)


def test_family_from_json(ab):
    fam = family_from_json({"alphabet": "ab", "builtin": "regular"})
    assert fam.exact and fam.flags.nontrivial
    fam = family_from_json({"alphabet": "ab", "builtin": "length", "closure": ["cc"]})
    assert fam.name == "cc(length)"
    expr = {"op": "leftmark", "symbol": "a", "arg": {"predicate": "square-length"}}
    fam = family_from_json({"alphabet": "ab", "list": [expr],
                            "flags": {"nontrivial": True}})
    assert not fam.exact and fam.flags.nontrivial
    with pytest.raises(ValueError):
        family_from_json({"alphabet": "ab", "builtin": "contextfree"})
    with pytest.raises(ValueError):
        family_from_json({"alphabet": "ab"})


def test_list_family_periodic(ab):
    fam = list_family("two", ab, [FULL, Complement(FULL)])
    packed = window(ab, 50)
    assert member_batch(fam.expr(0), packed).all()
    assert member_batch(fam.expr(4), packed).all()
    assert not member_batch(fam.expr(3), packed).any()
