import random
from fractions import Fraction

import pytest

from bellnl.core import (Behavior, Scenario, induced_behavior, mix,
                         uniform_behavior)
from bellnl.games import builtin_game, classical_value
from bellnl.polytope import enumerate_local_vertices
from bellnl.quantum import (behavior_from_strategy, ch_optimal_behavior,
                            hardy_behavior, magic_square_strategy,
                            pentagram_strategy)
from bellnl.zeros import brute_force_cntz, enumerate_cntz


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def chsh_value():
    return classical_value(builtin_game("chsh"))


@pytest.fixture(scope="session")
def ms_value():
    return classical_value(builtin_game("magic_square"))


@pytest.fixture(scope="session")
def pentagram_value():
    return classical_value(builtin_game("pentagram"))


@pytest.fixture(scope="session")
def ms_behavior():
    return behavior_from_strategy(magic_square_strategy())


@pytest.fixture(scope="session")
def pentagram_behavior():
    return behavior_from_strategy(pentagram_strategy())


@pytest.fixture(scope="session")
def ch_behavior():
    return ch_optimal_behavior()


@pytest.fixture(scope="session")
def hardy():
    """(behavior, paradox probability) pair."""
    return hardy_behavior()


@pytest.fixture(scope="session")
def cntz_2222():
    return enumerate_cntz(Scenario(2, 2, 2, 2))


@pytest.fixture(scope="session")
def cntz_2222_oracle():
    return brute_force_cntz(Scenario(2, 2, 2, 2))


def pr_box():
    sc = Scenario(2, 2, 2, 2)
    table = [[[[Fraction(1, 2) if (a ^ b) == (x & y) else Fraction(0)
                for b in (0, 1)] for a in (0, 1)]
              for y in (0, 1)] for x in (0, 1)]
    return Behavior(sc, table, mode="rational")


def random_local_mixture(sc: Scenario, rng: random.Random,
                         n_terms: int = 4) -> Behavior:
    """Random rational convex mixture of deterministic behaviors."""
    vertices = enumerate_local_vertices(sc)
    weights = [rng.randint(1, 20) for _ in range(n_terms)]
    total = sum(weights)
    # mix() folds terms pairwise, keeping everything rational
    picks = [induced_behavior(rng.choice(vertices), sc)
             for _ in range(n_terms)]
    acc = picks[0]
    run = weights[0]
    for w, p in zip(weights[1:], picks[1:]):
        run += w
        acc = mix(acc, p, Fraction(run - w, run))
    assert run == total
    return acc


def random_ns_behavior(sc: Scenario, rng: random.Random) -> Behavior:
    """Random rational nonsignaling behavior (local + PR-box slice)."""
    p = random_local_mixture(sc, rng)
    if sc.as_tuple() == (2, 2, 2, 2) and rng.random() < 0.7:
        v = Fraction(rng.randint(0, 20), 20)
        p = mix(p, pr_box(), 1 - v)
    return p
