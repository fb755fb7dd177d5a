"""Tables of zeros: LHV realizability, criticality, and enumeration of
critical nonlocal tables.

A table of zeros asserts p(a,b|x,y) = 0 for a set of cells.  It is
realizable when some local deterministic assignment (one outcome picked
per setting on each side) never lands on an asserted zero; otherwise it
is nonlocal.  A critical nonlocal table (CNTZ) is nonlocal but becomes
realizable when any single zero is removed -- equivalently, it is a
minimal nonlocal table under set inclusion: any proper nonlocal subset
would survive a one-cell deletion, contradicting criticality.

Cells are (x, a, y, b) tuples throughout.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product

from .core import BellError, Behavior, Scenario


class RegionSplitError(BellError):
    pass


@dataclass(frozen=True)
class TableOfZeros:
    scenario: Scenario
    cells: frozenset  # of (x, a, y, b)

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))
        sc = self.scenario
        for (x, a, y, b) in self.cells:
            if not (0 <= x < sc.nA_settings and 0 <= a < sc.nA_outcomes
                    and 0 <= y < sc.nB_settings and 0 <= b < sc.nB_outcomes):
                raise BellError(f"cell {(x, a, y, b)} out of range")

    def __len__(self):
        return len(self.cells)

    def sorted_cells(self):
        return sorted(self.cells)

    def without(self, cell) -> "TableOfZeros":
        return TableOfZeros(self.scenario, self.cells - {cell})

    def with_cell(self, cell) -> "TableOfZeros":
        return TableOfZeros(self.scenario, self.cells | {cell})

    def swapped(self) -> "TableOfZeros":
        """Party-swapped table in the party-swapped scenario."""
        return TableOfZeros(self.scenario.swapped(),
                            frozenset((y, b, x, a) for (x, a, y, b) in self.cells))


@dataclass(frozen=True)
class LhvAssignment:
    """One deterministic outcome picked per setting on each side."""
    alice: tuple
    bob: tuple


def _rec_collect(sc, a_range, forbids, full_b):
    """Backtracking search for an assignment avoiding every forbidden cell.

    ``forbids`` maps (x, a) to per-setting bitmasks of Bob outcomes that the
    pick a at setting x would rule out.  Pruning happens as each Alice
    setting is assigned: any Bob setting with an empty remaining mask kills
    the branch.
    """
    nX = sc.nA_settings
    nY = sc.nB_settings
    alice = []

    def rec(x, bob_masks):
        if x == nX:
            return tuple((m & -m).bit_length() - 1 for m in bob_masks)
        for a in a_range:
            f = forbids.get((x, a))
            if f is None:
                nxt = bob_masks
            else:
                nxt = [m & ~fy for m, fy in zip(bob_masks, f)]
                if not all(nxt):
                    continue
            alice.append(a)
            res = rec(x + 1, nxt)
            if res is not None:
                return res
            alice.pop()
        return None

    bob = rec(0, [full_b] * nY)
    if bob is None:
        return None
    return LhvAssignment(alice=tuple(alice), bob=bob)


def is_lhv_realizable(t: TableOfZeros, region=None, alice_outcomes=None):
    """Exhaustive realizability check.

    Returns the witness LhvAssignment when realizable, else None.
    """
    return _rec_collect(
        t.scenario,
        range(t.scenario.nA_outcomes) if alice_outcomes is None else alice_outcomes,
        _forbids_map(t, region),
        (1 << t.scenario.nB_outcomes) - 1,
    )


def _forbids_map(t: TableOfZeros, region=None):
    forbids = {}
    for c in t.cells:
        if region is not None and c not in region:
            continue
        x, a, y, b = c
        key = (x, a)
        if key not in forbids:
            forbids[key] = [0] * t.scenario.nB_settings
        forbids[key][y] |= 1 << b
    return forbids


def is_critical(t: TableOfZeros) -> bool:
    """Nonlocal, and realizable after removing any single zero."""
    if is_lhv_realizable(t) is not None:
        return False
    return all(is_lhv_realizable(t.without(c)) is not None for c in t.cells)


def zeros_from_behavior(p: Behavior, tol=0) -> TableOfZeros:
    """Cells with probability <= tol (use tol=0 for rational behaviors)."""
    return TableOfZeros(p.scenario, frozenset(p.zero_cells(tol)))


# ---------------------------------------------------------------------------
# serialization

def table_to_dict(t: TableOfZeros) -> dict:
    return {"scenario": list(t.scenario.as_tuple()),
            "cells": [list(c) for c in t.sorted_cells()]}


def table_from_dict(d: dict) -> TableOfZeros:
    return TableOfZeros(Scenario(*d["scenario"]),
                        frozenset(tuple(c) for c in d["cells"]))


def save_table(t: TableOfZeros, path):
    with open(path, "w") as fh:
        json.dump(table_to_dict(t), fh, indent=1)
        fh.write("\n")


def load_table(path) -> TableOfZeros:
    with open(path) as fh:
        return table_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# CNTZ enumeration (blue/red split + zero-pattern branching + group reduction)

def generate_zpb(pretable: TableOfZeros, region, seed=0,
                 alice_outcomes=None):
    """Yield minimal nonlocal completions of ``pretable`` inside ``region``.

    Branches on the cells of one blocking deterministic assignment: any
    nonlocal completion must kill every feasible assignment, in particular
    the picked one, so adding each of its region cells in turn covers all
    completions.  Cells already tried at a branch point are banned in the
    later siblings, so each inclusion-minimal completion is visited once
    (completions needing a banned cell were covered when that cell was
    chosen).  Streaming keeps memory independent of the completion count;
    a non-minimal completion may be yielded more than once, so callers
    needing a duplicate-free list must dedupe on ``cells``.  The random
    pick only affects traversal order, not the output set, but is seeded
    for reproducible runs.
    """
    region = frozenset(region)
    if not pretable.cells <= region:
        raise BellError("pretable must be contained in the region")
    rng = random.Random(seed)
    sc = pretable.scenario

    def assignment_cells(assign):
        cells = set()
        for x, a in enumerate(assign.alice):
            for y, b in enumerate(assign.bob):
                c = (x, a, y, b)
                if c in region:
                    cells.add(c)
        return cells

    def rec(cells, banned):
        t = TableOfZeros(sc, cells)
        witness = is_lhv_realizable(t, region=region,
                                    alice_outcomes=alice_outcomes)
        if witness is None:
            yield t
            return
        branch = sorted(assignment_cells(witness) - banned)
        rng.shuffle(branch)
        tried = set()
        for e in branch:
            yield from rec(cells | {e}, banned | tried)
            tried.add(e)

    yield from rec(frozenset(pretable.cells), frozenset())


@dataclass
class CntzOptions:
    seed: int = 0
    subgroup: str | None = None      # None or "outputs-only" for the cheap pass
    max_group_order: int = 10**7


def _blue_red_split(sc: Scenario):
    """Alice-outcome split into two exchangeable halves."""
    if sc.nA_outcomes % 2 != 0:
        raise RegionSplitError(
            "region split needs an even Alice outcome count")
    half = sc.nA_outcomes // 2
    blue_out = tuple(range(half))
    red_out = tuple(range(half, sc.nA_outcomes))
    blue = frozenset((x, a, y, b)
                     for x in range(sc.nA_settings) for a in blue_out
                     for y in range(sc.nB_settings) for b in range(sc.nB_outcomes))
    red = frozenset((x, a, y, b)
                    for x in range(sc.nA_settings) for a in red_out
                    for y in range(sc.nB_settings) for b in range(sc.nB_outcomes))
    return blue_out, red_out, blue, red


def enumerate_cntz(sc: Scenario, options: CntzOptions | None = None) -> list:
    """All CNTZ equivalence classes under the Bell symmetric group.

    The table is split on an even outcome set: Alice's when possible,
    otherwise the computation runs on the party-swapped scenario and the
    results are swapped back (the two halves must be exchangeable by an
    output relabeling, which an odd split cannot provide).
    """
    from . import symmetry

    options = options or CntzOptions()
    if sc.nA_outcomes < 2:
        raise RegionSplitError("region split undefined for |A| < 2")
    if sc.nA_outcomes % 2 != 0:
        if sc.nB_outcomes % 2 != 0:
            raise RegionSplitError(
                "need an even outcome count on one side for the blue/red split")
        swapped = enumerate_cntz(sc.swapped(), options)
        grp = symmetry.bell_group(sc)
        reps = [t.swapped() for t in swapped]
        return symmetry.group_reduce(reps, grp)

    blue_out, red_out, blue, red = _blue_red_split(sc)
    grp = symmetry.bell_group(sc)
    blue_sc = Scenario(sc.nA_settings, len(blue_out),
                       sc.nB_settings, sc.nB_outcomes)
    blue_grp_local = symmetry.bell_group(blue_sc)

    # step 1: CNTZs confined to the blue half (a sub-scenario on Alice's side)
    empty = TableOfZeros(sc, frozenset())
    zt_blue = {t.cells for t in generate_zpb(empty, blue, seed=options.seed,
                                             alice_outcomes=blue_out)}
    # blue tables use Alice outcomes 0..half-1, so the sub-scenario group
    # acts on them with identical labels
    blue_tabs = [TableOfZeros(blue_sc, c) for c in zt_blue]
    czt_blue = symmetry.group_reduce(blue_tabs, blue_grp_local)

    # step 2: pre-tables = blue class member + red image of a blue class member
    czt_blue_full = [TableOfZeros(sc, t.cells) for t in czt_blue]
    red_set = set()
    for t in czt_blue_full:
        for img in symmetry.orbit(t, grp):
            if img.cells <= red:
                red_set.add(img.cells)
    blue_members = set()
    for t in czt_blue_full:
        for img in symmetry.orbit(t, symmetry.subgroup_for_region(grp, blue_out)):
            if img.cells <= blue:
                blue_members.add(img.cells)
    pretables = []
    seen = set()
    for cb in sorted(blue_members, key=lambda s: (len(s), sorted(s))):
        for cr in sorted(red_set, key=lambda s: (len(s), sorted(s))):
            cells = frozenset(cb | cr)
            if cells not in seen:
                seen.add(cells)
                pretables.append(TableOfZeros(sc, cells))
    sub = None
    if options.subgroup == "outputs-only":
        sub = symmetry.outputs_only_subgroup(sc)
    pretables = symmetry.group_reduce(pretables, grp, subgroup=sub)

    # step 3: complete pre-tables to full-table CNTZs.  Completions are
    # streamed: each critical completion either lands in an already-seen
    # orbit (skip) or opens a new class, whose whole orbit is absorbed
    # into a packed-bitmask seen-set.  Memory stays at one packed word
    # per orbit member instead of one frozenset per completion, and no
    # quadratic orbit-versus-candidate reduction is ever run.
    full_region = sorted(
        (x, a, y, b)
        for x in range(sc.nA_settings) for a in range(sc.nA_outcomes)
        for y in range(sc.nB_settings) for b in range(sc.nB_outcomes))
    bit = {c: 1 << i for i, c in enumerate(full_region)}

    def pack(cells):
        m = 0
        for c in cells:
            m |= bit[c]
        return m

    seen_orbits = set()     # packed members of every accepted class orbit
    checked = set()         # packed completions already rejected/accepted
    final = []
    for pre in pretables:
        for t in generate_zpb(pre, frozenset(full_region),
                              seed=options.seed):
            m = pack(t.cells)
            if m in seen_orbits or m in checked:
                continue
            if len(checked) >= 20_000_000:   # bound memory; only a cache
                checked.clear()
            checked.add(m)
            if not is_critical(t):
                continue
            members = symmetry.orbit(t, grp)
            seen_orbits.update(pack(s.cells) for s in members)
            # deterministic class representative: lex-minimal orbit member
            final.append(TableOfZeros(sc, min(
                (s.cells for s in members),
                key=lambda cs: tuple(sorted(cs)))))
    final.sort(key=lambda t: (len(t), t.sorted_cells()))
    return final


def brute_force_cntz(sc: Scenario) -> list:
    """Independent oracle: filter every table, then reduce by the group.

    Only sensible for tiny scenarios such as (2,2;2,2).
    """
    from . import symmetry

    cells = [(x, a, y, b)
             for x in range(sc.nA_settings) for a in range(sc.nA_outcomes)
             for y in range(sc.nB_settings) for b in range(sc.nB_outcomes)]
    n = len(cells)
    if n > 20:
        raise BellError("brute-force oracle limited to tiny scenarios")
    grp = symmetry.bell_group(sc)
    critical = []
    for mask in range(1 << n):
        subset = frozenset(c for i, c in enumerate(cells) if mask >> i & 1)
        t = TableOfZeros(sc, subset)
        if is_critical(t):
            critical.append(t)
    reduced = symmetry.group_reduce(critical, grp)
    reduced.sort(key=lambda t: (len(t), t.sorted_cells()))
    return reduced


# ---------------------------------------------------------------------------
# fixtures shipped with the package

def fixture_path(name: str):
    from importlib.resources import files
    return files("bellnl") / "fixtures" / f"{name}.json"


def load_fixture(name: str) -> TableOfZeros:
    return table_from_dict(json.loads(fixture_path(name).read_text()))
