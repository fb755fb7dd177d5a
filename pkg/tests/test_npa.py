from fractions import Fraction

import numpy as np
import pytest

from bellnl.core import Scenario
from bellnl.npa import (build_moment_structure, moment_matrix_of_strategy,
                        npa_feasible, npa_upper_bound)
from bellnl.polytope import BellExpression
from bellnl.quantum import (ch_expression, magic_square_strategy,
                            pentagram_strategy, seesaw_optimize)
from bellnl.zeros import TableOfZeros, load_fixture

SQRT2 = float(np.sqrt(2.0))


def chsh_correlation_expression():
    """sum_{xy} (-1)^{xy} E_xy with E = p(a=b) - p(a!=b)."""
    sc = Scenario(2, 2, 2, 2)
    coeffs = [[[[Fraction(0)] * 2 for _ in range(2)] for _ in range(2)]
              for _ in range(2)]
    for x in range(2):
        for y in range(2):
            s = -1 if x == 1 and y == 1 else 1
            for a in range(2):
                for b in range(2):
                    coeffs[x][y][a][b] = Fraction(s if a == b else -s)
    return BellExpression(sc, coeffs)


def test_moment_structure_sizes():
    sc = Scenario(2, 2, 2, 2)
    assert build_moment_structure(sc, "one").size == 1 + 2 + 2
    assert build_moment_structure(sc, "one+ab").size == 1 + 2 + 2 + 4
    sc = Scenario(3, 4, 3, 4)
    assert build_moment_structure(sc, "one").size == 1 + 9 + 9


def test_ch_bound_reaches_quantum_optimum_at_level_one():
    got = npa_upper_bound(ch_expression(), level="one")
    assert got == pytest.approx((SQRT2 - 1) / 2, abs=1e-3)


def test_chsh_correlation_bound_is_tsirelson():
    got = npa_upper_bound(chsh_correlation_expression(), level="one")
    assert got == pytest.approx(2 * SQRT2, abs=1e-3)


def test_realizable_zero_tables_are_feasible():
    rep = npa_feasible(load_fixture("hardy"))
    assert rep.verdict == "feasible"
    rep = npa_feasible(load_fixture("avn_3434"))
    assert rep.verdict == "feasible"


def test_unrealizable_quantum_zero_table_is_refuted():
    rep = npa_feasible(load_fixture("cntz_3233"))
    assert rep.verdict == "infeasible-with-margin"


def test_moment_matrices_of_explicit_strategies_are_psd():
    cases = [
        (magic_square_strategy(), "one+ab"),
        (pentagram_strategy(), "one"),
        (seesaw_optimize(ch_expression(), 2, 2, restarts=2, seed=0).strategy,
         "one+ab"),
    ]
    for strategy, level in cases:
        dA = strategy.psi.shape[0]
        sc_map = {4: Scenario(3, 4, 3, 4), 8: Scenario(5, 8, 5, 8),
                  2: Scenario(2, 2, 2, 2)}
        ms = build_moment_structure(sc_map[dA], level)
        g = moment_matrix_of_strategy(ms, strategy)
        w = np.linalg.eigvalsh((g + g.T) / 2)
        assert w.min() > -1e-9
        # structural constants respected
        for (i, j), (kind, val) in ms.entries.items():
            if kind == "const":
                assert g[i, j] == pytest.approx(float(val), abs=1e-9)


def test_empty_table_is_feasible():
    t = TableOfZeros(Scenario(2, 2, 2, 2), frozenset())
    assert npa_feasible(t).verdict == "feasible"
