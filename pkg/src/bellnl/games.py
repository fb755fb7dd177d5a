"""Nonlocal games: values, optimal strategies, liftings, and builtins.

A game is a setting distribution pi(x, y) plus a winning predicate
W(a, b | x, y).  The classical value scans Alice's deterministic
responses; given a full Alice assignment the score decomposes over Bob's
settings, so each scan step only needs a per-setting best response.  That
makes scenarios like (5,8;5,8) (8^5 Alice assignments) cheap and yields
the complete optimal-strategy list as a product of per-setting argmax
sets.

Builtins:

* ``chsh``: win when a XOR b == x AND y;
* ``magic_square``: a 3x3 sign square, rows multiply to +1 on Alice's
  side and columns to -1 on Bob's, win when the shared cell agrees;
* ``pentagram``: five four-observable measurement contexts arranged so
  any two share one observable; outcomes are sign 4-tuples with a fixed
  context parity, win when the shared observable's signs agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np

from .core import (Behavior, BellError, DeterministicStrategy, Scenario,
                   parse_fraction, _frac_to_str)
from .polytope import BellExpression, ns_value
from .zeros import TableOfZeros


class GameCapError(BellError):
    pass


@dataclass
class Game:
    """pi[x][y] (rational) and wins[x][y][a][b] (bool)."""

    scenario: Scenario
    pi: list
    wins: list
    name: str | None = None

    def __post_init__(self):
        sc = self.scenario
        total = sum(self.pi[x][y] for x in range(sc.nA_settings)
                    for y in range(sc.nB_settings))
        if total != 1:
            raise BellError(f"setting distribution sums to {total}, not 1")

    def win(self, a, b, x, y) -> bool:
        return bool(self.wins[x][y][a][b])


def uniform_pi(sc: Scenario):
    q = Fraction(1, sc.nA_settings * sc.nB_settings)
    return [[q] * sc.nB_settings for _ in range(sc.nA_settings)]


def game_from_predicate(sc: Scenario, predicate, pi=None, name=None) -> Game:
    """Materialize a predicate W(a, b, x, y) into an explicit table."""
    wins = [[[[bool(predicate(a, b, x, y)) for b in range(sc.nB_outcomes)]
              for a in range(sc.nA_outcomes)]
             for y in range(sc.nB_settings)]
            for x in range(sc.nA_settings)]
    return Game(sc, pi or uniform_pi(sc), wins, name=name)


def winning_probability(g: Game, p: Behavior):
    """omega = sum pi(x,y) W(a,b|x,y) p(a,b|x,y)."""
    sc = g.scenario
    acc = 0
    for x, y, a, b in sc.cells():
        if g.wins[x][y][a][b]:
            acc += g.pi[x][y] * p.table[x][y][a][b]
    return acc


def expression_from_game(g: Game) -> BellExpression:
    sc = g.scenario
    coeffs = [[[[g.pi[x][y] if g.wins[x][y][a][b] else Fraction(0)
                 for b in range(sc.nB_outcomes)]
                for a in range(sc.nA_outcomes)]
               for y in range(sc.nB_settings)]
              for x in range(sc.nA_settings)]
    return BellExpression(sc, coeffs)


def game_from_zeros(t: TableOfZeros) -> Game:
    """Uniform-pi game losing exactly on the asserted zero cells."""
    cells = t.cells
    return game_from_predicate(
        t.scenario, lambda a, b, x, y: (x, a, y, b) not in cells)


@dataclass
class GameValueReport:
    omega_classical: Fraction
    optimal_strategies: list          # complete list of DeterministicStrategy
    omega_ns: Fraction | None = None


def classical_value(g: Game, strategy_cap: int = 2**22,
                    with_ns: bool = False) -> GameValueReport:
    """Exact classical value with the complete optimizer list.

    The per-Alice-assignment score is sum_y max_b sum_x pi(x,y) W; the
    integer arithmetic runs over a common denominator of pi so values
    stay exact, with numpy doing the per-assignment reductions.
    """
    sc = g.scenario
    n_alice = sc.nA_outcomes ** sc.nA_settings
    if n_alice > strategy_cap:
        raise GameCapError(f"{n_alice} Alice assignments exceeds the cap")

    den = 1
    for x in range(sc.nA_settings):
        for y in range(sc.nB_settings):
            d = Fraction(g.pi[x][y]).denominator
            den = den * d // gcd(den, d)
    w = np.zeros((sc.nA_settings, sc.nB_settings, sc.nA_outcomes,
                  sc.nB_outcomes), dtype=np.int64)
    for x, y, a, b in sc.cells():
        if g.wins[x][y][a][b]:
            f = Fraction(g.pi[x][y]) * den
            w[x, y, a, b] = int(f)

    best = -1
    best_alice = []
    for alice in product(range(sc.nA_outcomes), repeat=sc.nA_settings):
        # score[y, b] = sum_x pi W with Alice's outcomes fixed
        score = w[0, :, alice[0], :].copy()
        for x in range(1, sc.nA_settings):
            score += w[x, :, alice[x], :]
        per_y = score.max(axis=1)
        total = int(per_y.sum())
        if total > best:
            best = total
            best_alice = []
        if total == best:
            argmax = [tuple(int(b) for b in np.flatnonzero(score[y] == per_y[y]))
                      for y in range(sc.nB_settings)]
            best_alice.append((alice, argmax))

    optimal = []
    for alice, argmax in best_alice:
        for bob in product(*argmax):
            optimal.append(DeterministicStrategy(alice, bob))
            if len(optimal) > strategy_cap:
                raise GameCapError("optimizer list exceeds the cap")
    omega = Fraction(best, den)
    report = GameValueReport(omega_classical=omega, optimal_strategies=optimal)
    if with_ns:
        report.omega_ns = ns_value(expression_from_game(g))
    return report


def lift_game(g: Game, n: int) -> Game:
    """n-copy lifting: settings gain a copy index (copy-major order),
    mixed-copy questions always win, same-copy questions follow the base
    predicate.  The lifted classical value is 1 - (1 - omega)/n."""
    if n < 1:
        raise BellError("lifting needs n >= 1")
    sc = g.scenario
    lifted_sc = Scenario(n * sc.nA_settings, sc.nA_outcomes,
                         n * sc.nB_settings, sc.nB_outcomes)

    def predicate(a, b, x, y):
        i, u = divmod(x, sc.nA_settings)
        j, v = divmod(y, sc.nB_settings)
        if i != j:
            return True
        return g.wins[u][v][a][b]

    name = f"{g.name}-lift{n}" if g.name else None
    return game_from_predicate(lifted_sc, predicate, name=name)


# ---------------------------------------------------------------------------
# serialization

def game_to_dict(g: Game) -> dict:
    sc = g.scenario
    pi_flat = [_frac_to_str(g.pi[x][y]) for x in range(sc.nA_settings)
               for y in range(sc.nB_settings)]
    wins_flat = [1 if g.wins[x][y][a][b] else 0 for x, y, a, b in sc.cells()]
    d = {"scenario": list(sc.as_tuple()), "pi": pi_flat, "winning": wins_flat}
    if g.name:
        d["name"] = g.name
    return d


def game_from_dict(d: dict) -> Game:
    if isinstance(d.get("winning"), str):
        return builtin_game(d["winning"])
    sc = Scenario(*d["scenario"])
    pi_flat = [parse_fraction(v) for v in d["pi"]]
    pi = [[pi_flat[x * sc.nB_settings + y] for y in range(sc.nB_settings)]
          for x in range(sc.nA_settings)]
    wins_flat = d["winning"]
    if len(wins_flat) != sc.n_cells:
        raise BellError(f"expected {sc.n_cells} predicate entries")
    vals = dict(zip(sc.cells(), wins_flat))
    wins = [[[[bool(vals[(x, y, a, b)]) for b in range(sc.nB_outcomes)]
              for a in range(sc.nA_outcomes)]
             for y in range(sc.nB_settings)]
            for x in range(sc.nA_settings)]
    return Game(sc, pi, wins, name=d.get("name"))


def save_game(g: Game, path):
    with open(path, "w") as fh:
        json.dump(game_to_dict(g), fh, indent=1)
        fh.write("\n")


def load_game(path) -> Game:
    with open(path) as fh:
        return game_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# builtins

def _chsh() -> Game:
    sc = Scenario(2, 2, 2, 2)
    return game_from_predicate(sc, lambda a, b, x, y: (a ^ b) == (x & y),
                               name="chsh")


# Magic square sign conventions.  Alice's outcome a at row x is a sign
# triple with product +1; Bob's outcome b at column y has product -1.
_PLUS_TRIPLES = [t for t in product((1, -1), repeat=3)
                 if t[0] * t[1] * t[2] == 1]
_MINUS_TRIPLES = [t for t in product((1, -1), repeat=3)
                  if t[0] * t[1] * t[2] == -1]

# outcome -> sign triple, per Alice row and per Bob column; solved once so
# that the game's losing cells reproduce the shipped fixture table
_MS_ROW_CODES = (
    (0, 1, 2, 3),
    (0, 2, 1, 3),
    (3, 2, 1, 0),
)
_MS_COL_CODES = (
    (0, 1, 2, 3),
    (0, 2, 1, 3),
    (0, 1, 2, 3),
)


def magic_square_encoding():
    rows = [[_PLUS_TRIPLES[c] for c in row] for row in _MS_ROW_CODES]
    cols = [[_MINUS_TRIPLES[c] for c in col] for col in _MS_COL_CODES]
    return rows, cols


def _magic_square() -> Game:
    sc = Scenario(3, 4, 3, 4)
    rows, cols = magic_square_encoding()

    def predicate(a, b, x, y):
        return rows[x][a][y] == cols[y][b][x]

    return game_from_predicate(sc, predicate, name="magic_square")


# Pentagram contexts: observables 0..9, each context holds four, any two
# contexts share exactly one observable.
PENTAGRAM_CONTEXTS = (
    (0, 1, 2, 3),    # the four "corner" observables, parity -1
    (0, 4, 5, 6),
    (1, 4, 7, 8),
    (2, 5, 7, 9),
    (3, 6, 8, 9),
)
PENTAGRAM_PARITIES = (-1, 1, 1, 1, 1)


def pentagram_outcome_signs(x: int, a: int):
    """Sign 4-tuple of outcome a in context x.

    The first three signs run lexicographically over a's bits (bit set
    means -1); the fourth is forced by the context parity.
    """
    s = tuple(-1 if (a >> k) & 1 else 1 for k in (2, 1, 0))
    s4 = PENTAGRAM_PARITIES[x] * s[0] * s[1] * s[2]
    return s + (s4,)


def _pentagram() -> Game:
    sc = Scenario(5, 8, 5, 8)

    def predicate(a, b, x, y):
        if x == y:
            return a == b
        shared = set(PENTAGRAM_CONTEXTS[x]) & set(PENTAGRAM_CONTEXTS[y])
        v = shared.pop()
        ia = PENTAGRAM_CONTEXTS[x].index(v)
        ib = PENTAGRAM_CONTEXTS[y].index(v)
        return pentagram_outcome_signs(x, a)[ia] == \
            pentagram_outcome_signs(y, b)[ib]

    return game_from_predicate(sc, predicate, name="pentagram")


_BUILTINS = {"chsh": _chsh, "magic_square": _magic_square,
             "pentagram": _pentagram}


def builtin_game(name: str) -> Game:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise BellError(f"unknown builtin game {name!r}; "
                        f"choose from {sorted(_BUILTINS)}") from None
    return factory()
