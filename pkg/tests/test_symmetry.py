import random
from itertools import product
from math import factorial

import pytest

from bellnl.core import Scenario
from bellnl.symmetry import (act, bell_group, canonical_form,
                             enumerate_elements, group_reduce, orbit,
                             outputs_only_subgroup, subgroup_for_region)
from bellnl.zeros import TableOfZeros, is_lhv_realizable, load_fixture


def wreath_order(m, k):
    return factorial(k) ** m * factorial(m)


def small_scenarios(max_order=10 ** 4):
    out = []
    for m1, k1, m2, k2 in product(range(1, 5), repeat=4):
        sc = Scenario(m1, k1, m2, k2)
        order = wreath_order(m1, k1) * wreath_order(m2, k2)
        if order <= max_order:
            out.append((sc, order))
    return out


def test_group_order_formula_matches_bfs_closure():
    cases = small_scenarios()
    assert len(cases) >= 10
    for sc, order in cases:
        grp = bell_group(sc)
        assert grp.order == order
        assert len(enumerate_elements(grp)) == order


def test_two_generators_per_wreath_factor():
    for sc, _ in small_scenarios():
        grp = bell_group(sc)
        # one or two generators per party factor
        assert len(grp.generators) <= 4


def test_action_preserves_realizability_and_size():
    rng = random.Random(0)
    sc = Scenario(2, 2, 2, 3)
    grp = bell_group(sc)
    elements = list(enumerate_elements(grp))
    cells = [(x, a, y, b) for x in range(2) for a in range(2)
             for y in range(2) for b in range(3)]
    for _ in range(20):
        t = TableOfZeros(sc, frozenset(rng.sample(cells, 5)))
        base = is_lhv_realizable(t) is None
        g = rng.choice(elements)
        img = act(g, t)
        assert len(img.cells) == len(t.cells)
        assert (is_lhv_realizable(img) is None) == base


def test_canonical_form_constant_on_orbits():
    rng = random.Random(1)
    sc = Scenario(2, 2, 2, 2)
    grp = bell_group(sc)
    cells = [(x, a, y, b) for x in range(2) for a in range(2)
             for y in range(2) for b in range(2)]
    for _ in range(10):
        t = TableOfZeros(sc, frozenset(rng.sample(cells, 4)))
        forms = {canonical_form(s, grp) for s in orbit(t, grp)}
        assert len(forms) == 1
        assert canonical_form(t, grp) in forms


def test_orbit_size_divides_group_order():
    sc = Scenario(2, 2, 2, 2)
    grp = bell_group(sc)
    t = load_fixture("hardy")
    # hardy lives in (2,2;2,2)
    assert t.scenario == sc
    n = len(orbit(t, grp))
    assert grp.order % n == 0


def test_group_reduce_keeps_one_representative_per_class():
    sc = Scenario(2, 2, 2, 2)
    grp = bell_group(sc)
    t = load_fixture("hardy")
    tables = list(orbit(t, grp)) + [t]
    reduced = group_reduce(tables, grp)
    assert len(reduced) == 1
    assert canonical_form(reduced[0], grp) == canonical_form(t, grp)
    # idempotent
    assert group_reduce(reduced, grp) == reduced


def test_group_reduce_drops_orbit_subsets():
    # a table whose orbit image is a subset of another table is redundant
    sc = Scenario(2, 2, 2, 2)
    grp = bell_group(sc)
    small = TableOfZeros(sc, frozenset({(0, 0, 0, 0), (1, 1, 1, 1)}))
    big = TableOfZeros(sc, small.cells | {(0, 1, 1, 0)})
    reduced = group_reduce([small, big], grp)
    assert reduced == [small]


def test_outputs_only_subgroup_fixes_settings():
    sc = Scenario(2, 3, 2, 2)
    sub = outputs_only_subgroup(sc)
    assert sub.order == (factorial(3) ** 2) * (factorial(2) ** 2)
    t = TableOfZeros(sc, frozenset({(0, 0, 1, 1)}))
    for s in orbit(t, sub):
        (x, a, y, b), = s.cells
        assert (x, y) == (0, 1)


def test_region_subgroup_preserves_alice_outcome_split():
    sc = Scenario(2, 4, 2, 2)
    grp = bell_group(sc)
    sub = subgroup_for_region(grp, alice_outcomes=(0, 1))
    elements = enumerate_elements(sub)
    assert len(elements) == sub.order
    # outcomes 0,1 never mix with 2,3 under the region subgroup
    low = TableOfZeros(sc, frozenset({(0, 1, 0, 0)}))
    high = TableOfZeros(sc, frozenset({(1, 3, 1, 1)}))
    for g in elements:
        (x, a, y, b), = act(g, low).cells
        assert a in (0, 1)
        (x, a, y, b), = act(g, high).cells
        assert a in (2, 3)
