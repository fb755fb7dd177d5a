import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from bellnl.solvers import (LinearProgram, SdpFeasibilityProblem, lp_solve,
                            sdp_max_min_eigenvalue, sdp_maximize)

F = Fraction


def brute_force_lp_vertices(lp: LinearProgram):
    """Oracle for tiny LPs: enumerate basic feasible points on a grid of
    constraint intersections by solving all square subsystems exactly."""
    n = len(lp.objective)
    # rows: constraints plus x_j >= 0
    rows = [list(r) for r in lp.matrix] + \
        [[F(1 if j == k else 0) for j in range(n)] for k in range(n)]
    rhs = [F(v) for v in lp.rhs] + [F(0)] * n
    best = None
    for combo in product(range(len(rows)), repeat=n):
        if len(set(combo)) != n:
            continue
        a = [[F(rows[i][j]) for j in range(n)] for i in combo]
        b = [rhs[i] for i in combo]
        x = solve_square(a, b)
        if x is None:
            continue
        if not feasible(lp, x):
            continue
        v = sum(F(c) * xi for c, xi in zip(lp.objective, x))
        if best is None or (v > best if lp.maximize else v < best):
            best = v
    return best


def solve_square(a, b):
    n = len(b)
    m = [row[:] + [bv] for row, bv in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def feasible(lp, x):
    if any(xi < 0 for xi in x):
        return False
    for row, sense, b in zip(lp.matrix, lp.senses, lp.rhs):
        lhs = sum(F(c) * xi for c, xi in zip(row, x))
        if sense == "<=" and lhs > b:
            return False
        if sense == ">=" and lhs < b:
            return False
        if sense == "=" and lhs != b:
            return False
    return True


@pytest.mark.parametrize("seed", range(20))
def test_lp_matches_vertex_enumeration_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    m = rng.randint(1, 3)
    lp = LinearProgram(
        objective=[F(rng.randint(-4, 4)) for _ in range(n)],
        matrix=[[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)],
        senses=[rng.choice(["<=", ">="]) for _ in range(m)],
        rhs=[F(rng.randint(0, 6)) for _ in range(m)],
        maximize=bool(rng.randint(0, 1)))
    res = lp_solve(lp)
    oracle = brute_force_lp_vertices(lp)
    if res.status == "optimal":
        assert oracle is not None
        # oracle may miss unbounded rays; when both agree the value matches
        if lp.maximize:
            assert res.value >= oracle
        else:
            assert res.value <= oracle
        assert feasible(lp, res.x)
        # objective value consistent with the solution vector
        v = sum(c * xi for c, xi in zip(lp.objective, res.x))
        assert v == res.value


def test_lp_exact_duality_on_transportation_problem():
    # max x1 + 2 x2 s.t. x1 + x2 <= 4, x2 <= 3
    lp = LinearProgram(objective=[F(1), F(2)],
                       matrix=[[F(1), F(1)], [F(0), F(1)]],
                       senses=["<=", "<="], rhs=[F(4), F(3)])
    res = lp_solve(lp)
    assert res.status == "optimal"
    assert res.value == 7
    assert res.x == [F(1), F(3)]
    # strong duality: y.b == value with y >= 0 and A^T y >= c
    y = res.dual
    assert sum(yi * bi for yi, bi in zip(y, lp.rhs)) == res.value
    assert all(yi >= 0 for yi in y)
    for j in range(2):
        assert sum(y[i] * lp.matrix[i][j] for i in range(2)) >= lp.objective[j]


def test_lp_infeasible_and_unbounded_detected():
    lp = LinearProgram(objective=[F(1)], matrix=[[F(1)], [F(1)]],
                       senses=["<=", ">="], rhs=[F(1), F(2)])
    assert lp_solve(lp).status == "infeasible"
    lp = LinearProgram(objective=[F(1)], matrix=[[F(-1)]],
                       senses=["<="], rhs=[F(1)])
    assert lp_solve(lp).status == "unbounded"


def test_sdp_feasibility_sign_of_min_eigenvalue():
    # X = [[1, t], [t, 1]] with t = 1: PSD, min eigenvalue 0; the free
    # slack lets lambda reach 1 at t = 0.
    prob = SdpFeasibilityProblem(n=2)
    prob.add([(0, 0, 1.0)], 1.0)
    prob.add([(1, 1, 1.0)], 1.0)
    res = sdp_max_min_eigenvalue(prob)
    assert res.verdict == "feasible"
    assert res.lambda_star == pytest.approx(1.0, abs=1e-6)

    # forcing an off-diagonal entry of 2 on a unit-diagonal 2x2 matrix
    # makes the minimum eigenvalue -1
    prob = SdpFeasibilityProblem(n=2)
    prob.add([(0, 0, 1.0)], 1.0)
    prob.add([(1, 1, 1.0)], 1.0)
    prob.add([(0, 1, 1.0)], 2.0)
    res = sdp_max_min_eigenvalue(prob)
    assert res.verdict == "infeasible-with-margin"
    assert res.lambda_star == pytest.approx(-1.0, abs=1e-6)


def test_sdp_maximize_known_optimum():
    # max X01 over PSD 2x2 with unit diagonal -> 1
    prob = SdpFeasibilityProblem(n=2)
    prob.add([(0, 0, 1.0)], 1.0)
    prob.add([(1, 1, 1.0)], 1.0)
    prob.objective = [(0, 1, 1.0)]
    res = sdp_maximize(prob)
    assert res.verdict == "feasible"
    assert res.value == pytest.approx(1.0, abs=1e-7)
