"""Bell symmetric group: per-party wreath products of symmetric groups.

The group is (S_|A| wr S_|X|) x (S_|B| wr S_|Y|): independent output
relabelings per setting combined with setting relabelings, one wreath
factor per party.  Party swap is deliberately not included.

Elements act on cells as (x, a, y, b) -> (sx[x], ax[x][a], sy[y], by[y][b])
with the output permutation indexed by the source setting.  Orbits of
tables of zeros are computed by generator-closure BFS, so only a
generating set is needed; each wreath factor is emitted with at most two
generators (verified by closure counting on small scenarios).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .core import BellError, Scenario
from .zeros import TableOfZeros


@dataclass(frozen=True)
class WreathElement:
    """One wreath factor: a setting permutation plus per-setting output
    permutations, stored as tuples."""

    setting: tuple          # setting[x] = image setting
    outputs: tuple          # outputs[x] = tuple, output perm applied at source x

    def apply(self, x, a):
        return self.setting[x], self.outputs[x][a]

    def compose(self, other):
        """self after other (apply ``other`` first)."""
        m = len(self.setting)
        setting = tuple(self.setting[other.setting[x]] for x in range(m))
        outputs = tuple(
            tuple(self.outputs[other.setting[x]][other.outputs[x][a]]
                  for a in range(len(self.outputs[0])))
            for x in range(m))
        return WreathElement(setting, outputs)


@dataclass(frozen=True)
class BellGroupElement:
    alice: WreathElement
    bob: WreathElement

    def apply_cell(self, cell):
        x, a, y, b = cell
        x2, a2 = self.alice.apply(x, a)
        y2, b2 = self.bob.apply(y, b)
        return (x2, a2, y2, b2)

    def compose(self, other):
        return BellGroupElement(self.alice.compose(other.alice),
                                self.bob.compose(other.bob))


def _identity_wreath(m, k):
    return WreathElement(tuple(range(m)), tuple(tuple(range(k)) for _ in range(m)))


def _cycle(n):
    return tuple((i + 1) % n for i in range(n))


def _transposition(n, i=0, j=1):
    p = list(range(n))
    p[i], p[j] = p[j], p[i]
    return tuple(p)


def _perm_sign(p):
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, L = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            L += 1
        if L % 2 == 0:
            sign = -sign
    return sign


def _wreath_generators(m, k):
    """Generators of S_k wr S_m, at most two.

    For m, k >= 2: a setting m-cycle carrying the outcome k-cycle at
    setting 0, and a setting transposition carrying the outcome
    transposition at setting 0.  Conjugation by the first element spreads
    the outcome permutations across the settings, but the pair can land
    in an index-2 subgroup when both generators map to the same element
    of the abelianization C2 x C2 (sign of the setting permutation,
    product of output signs).  An extra outcome transposition at setting
    1 toggles the second sign, and is attached to whichever generator
    makes the two images span C2 x C2.  The closure count is checked
    against the order formula in the tests.
    """
    ident_out = tuple(tuple(range(k)) for _ in range(m))
    gens = []
    if m == 1:
        if k >= 2:
            gens.append(WreathElement((0,), (_cycle(k),)))
            if k >= 3:
                gens.append(WreathElement((0,), (_transposition(k),)))
        return gens
    if k == 1:
        gens.append(WreathElement(_cycle(m), ident_out))
        if m >= 3:
            gens.append(WreathElement(_transposition(m), ident_out))
        return gens

    ident = tuple(range(k))
    c, tau = _cycle(k), _transposition(k)

    def _perm_sign_prod(outs):
        s = 1
        for o in outs:
            s *= _perm_sign(o)
        return s

    def img(setting_perm, outs):
        return (_perm_sign(setting_perm), _perm_sign_prod(outs))

    base1 = [c] + [ident] * (m - 1)
    base2 = [tau] + [ident] * (m - 1)
    for extra1 in (False, True):
        for extra2 in (False, True):
            o1 = list(base1)
            o2 = list(base2)
            if extra1:
                o1[1] = tau
            if extra2:
                o2[1] = tau
            i1 = img(_cycle(m), o1)
            i2 = img(_transposition(m), o2)
            if len({(1, 1), i1, i2,
                    (i1[0] * i2[0], i1[1] * i2[1])}) == 4:
                return [WreathElement(_cycle(m), tuple(o1)),
                        WreathElement(_transposition(m), tuple(o2))]
    raise BellError("no generating pair found")  # pragma: no cover


@dataclass(frozen=True)
class GroupHandle:
    scenario: Scenario
    generators: tuple       # of BellGroupElement
    order: int


def _wreath_order(m, k):
    return factorial(k) ** m * factorial(m)


def bell_group(sc: Scenario) -> GroupHandle:
    """The Bell symmetric group of a scenario with its generating set."""
    ga = _wreath_generators(sc.nA_settings, sc.nA_outcomes)
    gb = _wreath_generators(sc.nB_settings, sc.nB_outcomes)
    ia = _identity_wreath(sc.nA_settings, sc.nA_outcomes)
    ib = _identity_wreath(sc.nB_settings, sc.nB_outcomes)
    gens = [BellGroupElement(a, ib) for a in ga]
    gens += [BellGroupElement(ia, b) for b in gb]
    order = (_wreath_order(sc.nA_settings, sc.nA_outcomes)
             * _wreath_order(sc.nB_settings, sc.nB_outcomes))
    return GroupHandle(scenario=sc, generators=tuple(gens), order=order)


def outputs_only_subgroup(sc: Scenario) -> GroupHandle:
    """Output relabelings only (settings fixed); used as a cheap first
    reduction pass."""
    ia = _identity_wreath(sc.nA_settings, sc.nA_outcomes)
    ib = _identity_wreath(sc.nB_settings, sc.nB_outcomes)
    gens = []
    for x in range(sc.nA_settings):
        for p in (_cycle(sc.nA_outcomes), _transposition(sc.nA_outcomes)) \
                if sc.nA_outcomes >= 2 else ():
            outs = [tuple(range(sc.nA_outcomes))] * sc.nA_settings
            outs[x] = p
            gens.append(BellGroupElement(
                WreathElement(tuple(range(sc.nA_settings)), tuple(outs)), ib))
    for y in range(sc.nB_settings):
        for p in (_cycle(sc.nB_outcomes), _transposition(sc.nB_outcomes)) \
                if sc.nB_outcomes >= 2 else ():
            outs = [tuple(range(sc.nB_outcomes))] * sc.nB_settings
            outs[y] = p
            gens.append(BellGroupElement(
                ia, WreathElement(tuple(range(sc.nB_settings)), tuple(outs))))
    order = (factorial(sc.nA_outcomes) ** sc.nA_settings
             * factorial(sc.nB_outcomes) ** sc.nB_settings)
    return GroupHandle(scenario=sc, generators=tuple(gens), order=order)


def subgroup_for_region(grp: GroupHandle, alice_outcomes) -> GroupHandle:
    """Subgroup whose Alice output permutations fix an outcome subset.

    Setting permutations and Bob's full wreath factor are kept; Alice
    output permutations are restricted to those mapping the given outcome
    set to itself.
    """
    sc = grp.scenario
    keep = frozenset(alice_outcomes)
    rest = tuple(sorted(set(range(sc.nA_outcomes)) - keep))
    sub = tuple(sorted(keep))
    nk, nr = len(sub), len(rest)

    def lift(perm, idx):
        p = list(range(sc.nA_outcomes))
        for i, j in enumerate(perm):
            p[idx[i]] = idx[j]
        return tuple(p)

    ident = tuple(range(sc.nA_outcomes))
    a_gens = []
    for block, idx in ((range(nk), sub), (range(nr), rest)):
        n = len(list(block))
        if n >= 2:
            for p in (_cycle(n), _transposition(n)):
                a_gens.append(WreathElement(
                    tuple(range(sc.nA_settings)),
                    tuple([lift(p, idx)] + [ident] * (sc.nA_settings - 1))))
    if sc.nA_settings >= 2:
        a_gens.append(WreathElement(_cycle(sc.nA_settings),
                                    tuple([ident] * sc.nA_settings)))
        a_gens.append(WreathElement(_transposition(sc.nA_settings),
                                    tuple([ident] * sc.nA_settings)))
    ib = _identity_wreath(sc.nB_settings, sc.nB_outcomes)
    ia = _identity_wreath(sc.nA_settings, sc.nA_outcomes)
    gens = [BellGroupElement(a, ib) for a in a_gens]
    gens += [BellGroupElement(ia, g.bob) for g in grp.generators
             if g.bob != ib]
    order = ((factorial(nk) * factorial(nr)) ** sc.nA_settings
             * factorial(sc.nA_settings)
             * _wreath_order(sc.nB_settings, sc.nB_outcomes))
    return GroupHandle(scenario=sc, generators=tuple(gens), order=order)


# ---------------------------------------------------------------------------
# actions and orbits

def act(g: BellGroupElement, t: TableOfZeros) -> TableOfZeros:
    return TableOfZeros(t.scenario,
                        frozenset(g.apply_cell(c) for c in t.cells))


def orbit(t: TableOfZeros, grp: GroupHandle):
    """Full orbit of a table under the group, by generator-closure BFS."""
    seen = {t.cells}
    frontier = [t.cells]
    while frontier:
        nxt = []
        for cells in frontier:
            for g in grp.generators:
                img = frozenset(g.apply_cell(c) for c in cells)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return {TableOfZeros(grp.scenario, c) for c in seen}


def canonical_form(t: TableOfZeros, grp: GroupHandle) -> tuple:
    """Lexicographically minimal sorted cell vector over the orbit."""
    best = tuple(sorted(t.cells))
    for s in orbit(t, grp):
        cand = tuple(sorted(s.cells))
        if cand < best:
            best = cand
    return best


def enumerate_elements(grp: GroupHandle):
    """All group elements by BFS closure of the generators.

    Only sensible for small orders; used to verify the order formula.
    """
    sc = grp.scenario
    ident = BellGroupElement(
        _identity_wreath(sc.nA_settings, sc.nA_outcomes),
        _identity_wreath(sc.nB_settings, sc.nB_outcomes))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for g in grp.generators:
                h = g.compose(e)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def group_reduce(tables, grp: GroupHandle, subgroup: GroupHandle | None = None):
    """Orbit-and-subset reduction.

    Tables are sorted by size; each survivor's orbit removes every later
    table that contains an orbit image as a subset (itself included).
    With ``subgroup`` given, a cheap pass under the subgroup runs first
    and the full-group pass reduces the survivors.
    """
    if subgroup is not None:
        tables = group_reduce(tables, subgroup)
    pending = sorted({t.cells for t in tables}, key=lambda s: (len(s), sorted(s)))
    sc = grp.scenario
    out = []
    while pending:
        head = pending.pop(0)
        out.append(head)
        images = {s.cells for s in orbit(TableOfZeros(sc, head), grp)}
        survivors = []
        for cells in pending:
            if not any(img <= cells for img in images):
                survivors.append(cells)
        pending = survivors
    return [TableOfZeros(sc, c) for c in out]
