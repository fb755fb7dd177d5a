"""Bell scenarios, behaviors, and deterministic strategies.

Conventions used throughout the package:

* a scenario is the 4-tuple (nA_settings, nA_outcomes, nB_settings,
  nB_outcomes), i.e. (|X|, |A|; |Y|, |B|);
* probability tables are indexed p[x][y][a][b] and flattened in
  (x, y, a, b) lexicographic order whenever a vector or file ordering
  is needed.

Behaviors carry a numeric mode: "rational" tables hold
``fractions.Fraction`` entries and are used by everything that must be
exact (LPs, ranks, criticality); "float" tables hold floats and are used
by the quantum / NPA side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence


class BellError(Exception):
    """Base class for errors raised by this package."""


class InvalidStrategyError(BellError):
    pass


class IncompleteTableError(BellError):
    pass


@dataclass(frozen=True)
class Scenario:
    """Bipartite Bell scenario (|X|, |A|; |Y|, |B|)."""

    nA_settings: int
    nA_outcomes: int
    nB_settings: int
    nB_outcomes: int

    def __post_init__(self):
        for v in (self.nA_settings, self.nA_outcomes,
                  self.nB_settings, self.nB_outcomes):
            if not isinstance(v, int) or v < 1:
                raise BellError(f"scenario counts must be positive integers, got {v!r}")

    @property
    def n_cells(self) -> int:
        return (self.nA_settings * self.nA_outcomes
                * self.nB_settings * self.nB_outcomes)

    def cells(self):
        """All (x, y, a, b) indices in lexicographic order."""
        return product(range(self.nA_settings), range(self.nB_settings),
                       range(self.nA_outcomes), range(self.nB_outcomes))

    def cell_index(self, x: int, y: int, a: int, b: int) -> int:
        """Flat index of a cell under the canonical (x, y, a, b) ordering."""
        return ((x * self.nB_settings + y) * self.nA_outcomes + a) \
            * self.nB_outcomes + b

    def as_tuple(self):
        return (self.nA_settings, self.nA_outcomes,
                self.nB_settings, self.nB_outcomes)

    def swapped(self) -> "Scenario":
        """Scenario with the parties' roles exchanged."""
        return Scenario(self.nB_settings, self.nB_outcomes,
                        self.nA_settings, self.nA_outcomes)


def ns_dimension(sc: Scenario) -> int:
    """Affine dimension of the nonsignaling polytope.

    Equals (|X|(|A|-1)+1)(|Y|(|B|-1)+1) - 1; the local polytope has the
    same affine dimension.
    """
    da = sc.nA_settings * (sc.nA_outcomes - 1) + 1
    db = sc.nB_settings * (sc.nB_outcomes - 1) + 1
    return da * db - 1


@dataclass(frozen=True)
class DeterministicStrategy:
    """A pair of local deterministic response functions."""

    alice: tuple  # alice[x] = a
    bob: tuple    # bob[y] = b

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))


class Behavior:
    """A joint conditional probability table p(a,b|x,y).

    ``table`` is a nested list indexed [x][y][a][b].  ``mode`` is either
    "rational" (Fraction entries) or "float".
    """

    def __init__(self, scenario: Scenario, table, mode: str = "rational"):
        if mode not in ("rational", "float"):
            raise BellError(f"unknown numeric mode {mode!r}")
        self.scenario = scenario
        self.mode = mode
        self.table = table
        self._check_shape()

    def _check_shape(self):
        sc = self.scenario
        try:
            for x in range(sc.nA_settings):
                for y in range(sc.nB_settings):
                    for a in range(sc.nA_outcomes):
                        row = self.table[x][y][a]
                        if len(row) != sc.nB_outcomes:
                            raise IncompleteTableError("short outcome row")
        except (IndexError, TypeError) as exc:
            raise IncompleteTableError(f"incomplete behavior table: {exc}") from exc

    def __getitem__(self, key):
        x, y, a, b = key
        return self.table[x][y][a][b]

    def prob(self, a, b, x, y):
        return self.table[x][y][a][b]

    def flat(self) -> list:
        """Entries in canonical (x, y, a, b) order."""
        sc = self.scenario
        return [self.table[x][y][a][b] for x, y, a, b in sc.cells()]

    def zero_cells(self, tol=0):
        """Cells (x, a, y, b) with probability <= tol."""
        out = []
        for x, y, a, b in self.scenario.cells():
            if self.table[x][y][a][b] <= tol:
                out.append((x, a, y, b))
        return out

    def alice_marginal(self, a, x, y):
        return sum(self.table[x][y][a][b]
                   for b in range(self.scenario.nB_outcomes))

    def bob_marginal(self, b, x, y):
        return sum(self.table[x][y][a][b]
                   for a in range(self.scenario.nA_outcomes))

    def to_float(self) -> "Behavior":
        if self.mode == "float":
            return self
        sc = self.scenario
        table = [[[[float(self.table[x][y][a][b])
                    for b in range(sc.nB_outcomes)]
                   for a in range(sc.nA_outcomes)]
                  for y in range(sc.nB_settings)]
                 for x in range(sc.nA_settings)]
        return Behavior(sc, table, mode="float")

    def to_rational(self) -> "Behavior":
        """Exact conversion: float entries become their exact binary Fractions."""
        if self.mode == "rational":
            return self
        sc = self.scenario
        table = [[[[Fraction(self.table[x][y][a][b])
                    for b in range(sc.nB_outcomes)]
                   for a in range(sc.nA_outcomes)]
                  for y in range(sc.nB_settings)]
                 for x in range(sc.nA_settings)]
        return Behavior(sc, table, mode="rational")


@dataclass
class ValidationReport:
    valid: bool
    violations: list  # (name, magnitude) pairs

    def worst(self, name):
        vals = [m for n, m in self.violations if n == name]
        return max(vals) if vals else 0


def validate_behavior(p: Behavior, tol=None) -> ValidationReport:
    """Check nonnegativity, normalization, and nonsignaling.

    Rational behaviors are checked exactly (tol defaults to 0); float
    behaviors default to tol=1e-9.
    """
    if tol is None:
        tol = 0 if p.mode == "rational" else 1e-9
    sc = p.scenario
    violations = []

    neg = min((p.table[x][y][a][b] for x, y, a, b in sc.cells()), default=0)
    if neg < -tol if tol else neg < 0:
        violations.append(("nonnegativity", -neg))

    for x in range(sc.nA_settings):
        for y in range(sc.nB_settings):
            s = sum(p.table[x][y][a][b]
                    for a in range(sc.nA_outcomes)
                    for b in range(sc.nB_outcomes))
            if abs(s - 1) > tol:
                violations.append(("normalization", abs(s - 1)))

    for x in range(sc.nA_settings):
        for a in range(sc.nA_outcomes):
            ref = p.alice_marginal(a, x, 0)
            for y in range(1, sc.nB_settings):
                d = abs(p.alice_marginal(a, x, y) - ref)
                if d > tol:
                    violations.append(("nonsignaling", d))
    for y in range(sc.nB_settings):
        for b in range(sc.nB_outcomes):
            ref = p.bob_marginal(b, 0, y)
            for x in range(1, sc.nA_settings):
                d = abs(p.bob_marginal(b, x, y) - ref)
                if d > tol:
                    violations.append(("nonsignaling", d))

    return ValidationReport(valid=not violations, violations=violations)


def induced_behavior(s: DeterministicStrategy, sc: Scenario) -> Behavior:
    """The local-polytope vertex produced by a deterministic strategy."""
    if len(s.alice) != sc.nA_settings or len(s.bob) != sc.nB_settings:
        raise InvalidStrategyError("strategy maps not total on setting ranges")
    for a in s.alice:
        if not 0 <= a < sc.nA_outcomes:
            raise InvalidStrategyError(f"Alice outcome {a} out of range")
    for b in s.bob:
        if not 0 <= b < sc.nB_outcomes:
            raise InvalidStrategyError(f"Bob outcome {b} out of range")
    one, zero = Fraction(1), Fraction(0)
    table = [[[[one if (a == s.alice[x] and b == s.bob[y]) else zero
                for b in range(sc.nB_outcomes)]
               for a in range(sc.nA_outcomes)]
              for y in range(sc.nB_settings)]
             for x in range(sc.nA_settings)]
    return Behavior(sc, table, mode="rational")


def uniform_behavior(sc: Scenario) -> Behavior:
    q = Fraction(1, sc.nA_outcomes * sc.nB_outcomes)
    table = [[[[q for _ in range(sc.nB_outcomes)]
               for _ in range(sc.nA_outcomes)]
              for _ in range(sc.nB_settings)]
             for _ in range(sc.nA_settings)]
    return Behavior(sc, table, mode="rational")


def mix(p: Behavior, q: Behavior, w) -> Behavior:
    """w*p + (1-w)*q, in the common numeric mode."""
    sc = p.scenario
    if q.scenario != sc:
        raise BellError("scenario mismatch in mix")
    mode = p.mode if p.mode == q.mode else "float"
    if mode == "float":
        p, q, w = p.to_float(), q.to_float(), float(w)
    table = [[[[w * p.table[x][y][a][b] + (1 - w) * q.table[x][y][a][b]
                for b in range(sc.nB_outcomes)]
               for a in range(sc.nA_outcomes)]
              for y in range(sc.nB_settings)]
             for x in range(sc.nA_settings)]
    return Behavior(sc, table, mode=mode)


# ---------------------------------------------------------------------------
# serialization

def _frac_to_str(v) -> str:
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    return Fraction(s)


def behavior_to_dict(p: Behavior) -> dict:
    sc = p.scenario
    if p.mode == "rational":
        flat = [_frac_to_str(v) for v in p.flat()]
    else:
        flat = [float(v) for v in p.flat()]
    return {"scenario": list(sc.as_tuple()), "mode": p.mode, "table": flat}


def behavior_from_dict(d: dict) -> Behavior:
    sc = Scenario(*d["scenario"])
    flat = d["table"]
    if len(flat) != sc.n_cells:
        raise IncompleteTableError(
            f"expected {sc.n_cells} entries, got {len(flat)}")
    mode = d["mode"]
    conv: Callable = parse_fraction if mode == "rational" else float
    vals = {}
    for (x, y, a, b), v in zip(sc.cells(), (conv(v) for v in flat)):
        vals[(x, y, a, b)] = v
    table = [[[[vals[(x, y, a, b)] for b in range(sc.nB_outcomes)]
               for a in range(sc.nA_outcomes)]
              for y in range(sc.nB_settings)]
             for x in range(sc.nA_settings)]
    return Behavior(sc, table, mode=mode)


def save_behavior(p: Behavior, path):
    with open(path, "w") as fh:
        json.dump(behavior_to_dict(p), fh, indent=1)
        fh.write("\n")


def load_behavior(path) -> Behavior:
    with open(path) as fh:
        return behavior_from_dict(json.load(fh))
