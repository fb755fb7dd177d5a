import json
from itertools import product

import pytest

from bellnl.core import Scenario
from bellnl.symmetry import bell_group, canonical_form
from bellnl.zeros import (CntzOptions, TableOfZeros, enumerate_cntz,
                          generate_zpb, is_critical, is_lhv_realizable,
                          load_fixture, fixture_path, table_from_dict,
                          table_to_dict, zeros_from_behavior)


def realizable_oracle(t: TableOfZeros):
    """Exhaustive scan over all deterministic assignments."""
    sc = t.scenario
    for alice in product(range(sc.nA_outcomes), repeat=sc.nA_settings):
        for bob in product(range(sc.nB_outcomes), repeat=sc.nB_settings):
            if all((x, alice[x], y, bob[y]) not in t.cells
                   for x in range(sc.nA_settings)
                   for y in range(sc.nB_settings)):
                return (alice, bob)
    return None


def assignment_avoids_zeros(t, alice, bob):
    sc = t.scenario
    return all((x, alice[x], y, bob[y]) not in t.cells
               for x in range(sc.nA_settings)
               for y in range(sc.nB_settings))


@pytest.mark.parametrize("seed", range(30))
def test_realizability_matches_exhaustive_oracle(seed):
    import random
    rng = random.Random(seed)
    sc = Scenario(rng.choice([2, 3]), rng.choice([2, 3]),
                  rng.choice([2, 3]), rng.choice([2, 3]))
    cells = [(x, a, y, b) for x in range(sc.nA_settings)
             for a in range(sc.nA_outcomes)
             for y in range(sc.nB_settings)
             for b in range(sc.nB_outcomes)]
    chosen = frozenset(rng.sample(cells, rng.randint(0, len(cells) // 2)))
    t = TableOfZeros(sc, chosen)
    got = is_lhv_realizable(t)
    oracle = realizable_oracle(t)
    assert (got is None) == (oracle is None)
    if got is not None:
        assert assignment_avoids_zeros(t, got.alice, got.bob)


def test_empty_table_is_realizable():
    t = TableOfZeros(Scenario(2, 2, 2, 2), frozenset())
    assert is_lhv_realizable(t) is not None


def test_full_table_is_nonlocal_but_not_critical():
    sc = Scenario(2, 2, 2, 2)
    cells = frozenset((x, a, y, b) for x in range(2) for a in range(2)
                      for y in range(2) for b in range(2))
    t = TableOfZeros(sc, cells)
    assert is_lhv_realizable(t) is None
    assert not is_critical(t)


def test_criticality_definition_minimal_under_removal():
    t = load_fixture("cntz_3233")
    assert is_lhv_realizable(t) is None
    assert is_critical(t)
    for c in t.sorted_cells():
        assert is_lhv_realizable(t.without(c)) is not None


def test_party_swap_preserves_realizability():
    t = load_fixture("cntz_3233")
    s = t.swapped()
    assert s.scenario.as_tuple() == (3, 3, 3, 2)
    assert is_lhv_realizable(s) is None
    assert is_critical(s)


def test_zeros_from_behavior_extracts_support_complement(ms_behavior):
    from bellnl.numerics import rationalize_behavior
    t = zeros_from_behavior(rationalize_behavior(ms_behavior))
    assert t.cells == load_fixture("avn_3434").cells


def test_table_round_trip_preserves_bytes(tmp_path):
    t = load_fixture("hardy")
    blob = json.dumps(table_to_dict(t), sort_keys=True)
    t2 = table_from_dict(json.loads(blob))
    assert json.dumps(table_to_dict(t2), sort_keys=True) == blob
    assert t2.cells == t.cells


def test_fixture_files_round_trip_byte_identical():
    for name in ("hardy", "cntz_3233", "avn_3434"):
        raw = open(fixture_path(name), "rb").read()
        d = json.loads(raw)
        assert table_to_dict(table_from_dict(d)) == d


def test_generate_zpb_produces_nonlocal_completions():
    # start from one zero in a (2,2;2,2) pretable and complete over the
    # full region: every output must block all assignments
    sc = Scenario(2, 2, 2, 2)
    pre = TableOfZeros(sc, frozenset({(0, 0, 0, 0)}))
    region = [(x, a, y, b) for x in range(2) for a in range(2)
              for y in range(2) for b in range(2)]
    tables = list(generate_zpb(pre, region, seed=0))
    assert tables
    for t in tables:
        assert pre.cells <= t.cells
        assert is_lhv_realizable(t) is None


def test_cntz_enumeration_matches_brute_force(cntz_2222, cntz_2222_oracle):
    grp = bell_group(Scenario(2, 2, 2, 2))
    got = {canonical_form(t, grp) for t in cntz_2222}
    want = {canonical_form(t, grp) for t in cntz_2222_oracle}
    assert got == want
    assert len(cntz_2222) == len(got)
    assert sorted(len(t.cells) for t in cntz_2222) == [4, 4, 4, 5, 6, 6, 6, 8]


def test_cntz_enumeration_output_is_critical_and_seed_stable(cntz_2222):
    for t in cntz_2222:
        assert is_critical(t)
    again = enumerate_cntz(Scenario(2, 2, 2, 2), CntzOptions(seed=5))
    grp = bell_group(Scenario(2, 2, 2, 2))
    assert {canonical_form(t, grp) for t in again} == \
        {canonical_form(t, grp) for t in cntz_2222}


def test_shipped_cntz_samples_are_critical():
    d = json.load(open(fixture_path("cntz_3332_samples")))
    sc = Scenario(*d["scenario"])
    grp = bell_group(sc)
    forms = set()
    for cells in d["tables"]:
        t = TableOfZeros(sc, frozenset(tuple(c) for c in cells))
        assert is_lhv_realizable(t) is None
        assert is_critical(t)
        forms.add(canonical_form(t, grp))
    assert len(forms) == len(d["tables"])
