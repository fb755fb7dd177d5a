import random
from fractions import Fraction

import pytest

from bellnl.core import (Behavior, DeterministicStrategy, Scenario,
                         induced_behavior, mix, uniform_behavior)
from bellnl.polytope import (BellExpression, admissible_vertices,
                             enumerate_local_vertices, indicator_expression,
                             local_content, local_value, ns_value,
                             saturating_vertices, tightness_verdict)
from bellnl.zeros import TableOfZeros, zeros_from_behavior
from conftest import pr_box, random_ns_behavior

F = Fraction


def test_vertex_count():
    assert len(enumerate_local_vertices(Scenario(2, 2, 2, 2))) == 16
    assert len(enumerate_local_vertices(Scenario(2, 3, 2, 2))) == 36


def test_admissible_vertices_prune_on_support():
    sc = Scenario(2, 2, 2, 2)
    p = induced_behavior(DeterministicStrategy((0, 0), (0, 0)), sc)
    assert len(admissible_vertices(p)) == 1
    assert len(admissible_vertices(uniform_behavior(sc))) == 16


def test_local_behavior_has_full_local_content():
    sc = Scenario(2, 2, 2, 2)
    rng = random.Random(4)
    for _ in range(5):
        p = mix(induced_behavior(DeterministicStrategy((0, 1), (1, 0)), sc),
                uniform_behavior(sc), F(rng.randint(0, 10), 10))
        res = local_content(p)
        assert res.q_local_max == 1
        assert res.q_nonlocal_min == 0


def test_pr_box_has_no_local_part():
    res = local_content(pr_box())
    assert res.q_local_max == 0
    assert res.q_nonlocal_min == 1
    # the dual certificate is supported on the zero cells
    t = zeros_from_behavior(pr_box())
    expr = res.dual_expression
    for x, y, a, b in pr_box().scenario.cells():
        if expr.coeffs[x][y][a][b]:
            assert (x, a, y, b) in t.cells


@pytest.mark.parametrize("num,den", [(0, 1), (1, 4), (1, 2), (3, 4), (9, 10)])
def test_isotropic_pr_mixture_local_content(num, den):
    v = F(num, den)
    p = mix(pr_box(), uniform_behavior(pr_box().scenario), v)
    res = local_content(p)
    assert res.q_local_max == min(1, 2 * (1 - v))


@pytest.mark.parametrize("seed", range(25))
def test_local_content_strong_duality_random_behaviors(seed):
    rng = random.Random(seed)
    sc = rng.choice([Scenario(2, 2, 2, 2), Scenario(2, 2, 2, 3),
                     Scenario(3, 2, 2, 2)])
    p = random_ns_behavior(sc, rng)
    res = local_content(p)
    # dual expression evaluates to exactly the primal optimum at p ...
    assert res.dual_expression.value_at(p) == res.q_local_max
    # ... and is >= 1 on every deterministic vertex
    for s in enumerate_local_vertices(sc):
        assert res.dual_expression.value_at_strategy(s) >= 1
    # the optimal decomposition reaches the claimed weight
    assert sum(res.weights.values()) == res.q_local_max


def test_chsh_expression_values():
    sc = Scenario(2, 2, 2, 2)
    coeffs = [[[[F(1, 4) if (a ^ b) == (x & y) else F(0)
                 for b in (0, 1)] for a in (0, 1)]
               for y in (0, 1)] for x in (0, 1)]
    expr = BellExpression(sc, coeffs)
    assert local_value(expr) == F(3, 4)
    assert ns_value(expr) == 1
    sats = saturating_vertices(expr, F(3, 4))
    assert len(sats) == 8
    rep = tightness_verdict(expr, F(3, 4), saturating=sats)
    assert rep.rank == 8
    assert rep.required_rank == 8
    assert rep.tight


def test_indicator_expression_counts_zero_cell_mass():
    sc = Scenario(2, 2, 2, 2)
    t = TableOfZeros(sc, frozenset({(0, 0, 0, 0), (1, 1, 1, 1)}))
    expr = indicator_expression(t)
    u = uniform_behavior(sc)
    assert expr.value_at(u) == F(1, 2)  # two cells of mass 1/4 each
