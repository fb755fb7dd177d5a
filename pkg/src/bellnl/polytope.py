"""Local and nonsignaling polytope computations.

The central quantity is the local content of a behavior: the largest
weight q such that p = q * p_L + (1-q) * p_NS with p_L local.  It is the
optimum of an LP over the deterministic vertices whose support fits
inside the support of p, and its dual is a Bell expression that certifies
the value.  A behavior has local content zero exactly when its zero set
is a nonlocal table of zeros; in that case the 0/1 indicator of the zero
set is already an optimal dual certificate, so the vertex enumeration can
be skipped entirely (essential in scenarios with ~1e9 vertices).

All LP work is exact over the rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .core import (Behavior, BellError, DeterministicStrategy, Scenario,
                   ns_dimension, parse_fraction, _frac_to_str)
from .numerics import exact_rank
from .solvers import LinearProgram, lp_solve
from .zeros import TableOfZeros, is_lhv_realizable, zeros_from_behavior


class EnumerationCapError(BellError):
    pass


@dataclass
class BellExpression:
    """A linear functional sum_{abxy} c(a,b,x,y) p(a,b|x,y).

    ``coeffs`` is indexed [x][y][a][b] like behavior tables.  ``bounds``
    optionally records known local / quantum / nonsignaling bounds.
    """

    scenario: Scenario
    coeffs: list
    mode: str = "rational"
    bounds: dict = field(default_factory=dict)

    def value_at(self, p: Behavior):
        sc = self.scenario
        return sum(self.coeffs[x][y][a][b] * p.table[x][y][a][b]
                   for x, y, a, b in sc.cells())

    def value_at_strategy(self, s: DeterministicStrategy):
        sc = self.scenario
        return sum(self.coeffs[x][y][s.alice[x]][s.bob[y]]
                   for x in range(sc.nA_settings)
                   for y in range(sc.nB_settings))

    def flat(self):
        sc = self.scenario
        return [self.coeffs[x][y][a][b] for x, y, a, b in sc.cells()]


def expression_from_flat(sc: Scenario, flat, mode="rational", bounds=None):
    if len(flat) != sc.n_cells:
        raise BellError(f"expected {sc.n_cells} coefficients, got {len(flat)}")
    vals = dict(zip(sc.cells(), flat))
    coeffs = [[[[vals[(x, y, a, b)] for b in range(sc.nB_outcomes)]
                for a in range(sc.nA_outcomes)]
               for y in range(sc.nB_settings)]
              for x in range(sc.nA_settings)]
    return BellExpression(sc, coeffs, mode=mode, bounds=bounds or {})


def expression_to_dict(e: BellExpression) -> dict:
    if e.mode == "rational":
        flat = [_frac_to_str(v) for v in e.flat()]
    else:
        flat = [float(v) for v in e.flat()]
    d = {"scenario": list(e.scenario.as_tuple()), "mode": e.mode,
         "coefficients": flat}
    if e.bounds:
        d["bounds"] = {k: (_frac_to_str(v) if isinstance(v, Fraction) else v)
                       for k, v in e.bounds.items()}
    return d


def expression_from_dict(d: dict) -> BellExpression:
    sc = Scenario(*d["scenario"])
    mode = d.get("mode", "rational")
    conv = parse_fraction if mode == "rational" else float
    bounds = {}
    for k, v in d.get("bounds", {}).items():
        bounds[k] = parse_fraction(v) if isinstance(v, str) else v
    return expression_from_flat(sc, [conv(v) for v in d["coefficients"]],
                                mode=mode, bounds=bounds)


def save_expression(e: BellExpression, path):
    with open(path, "w") as fh:
        json.dump(expression_to_dict(e), fh, indent=1)
        fh.write("\n")


def load_expression(path) -> BellExpression:
    with open(path) as fh:
        return expression_from_dict(json.load(fh))


def indicator_expression(t: TableOfZeros) -> BellExpression:
    """The 0/1 indicator of a table of zeros, as a Bell expression."""
    sc = t.scenario
    one, zero = Fraction(1), Fraction(0)
    coeffs = [[[[one if (x, a, y, b) in t.cells else zero
                 for b in range(sc.nB_outcomes)]
                for a in range(sc.nA_outcomes)]
               for y in range(sc.nB_settings)]
              for x in range(sc.nA_settings)]
    return BellExpression(sc, coeffs)


# ---------------------------------------------------------------------------
# vertices

def enumerate_local_vertices(sc: Scenario, cap: int = 2**31):
    """All deterministic strategies, lexicographic, |A|^|X| * |B|^|Y| many."""
    total = (sc.nA_outcomes ** sc.nA_settings
             * sc.nB_outcomes ** sc.nB_settings)
    if total > cap:
        raise EnumerationCapError(
            f"{total} vertices exceeds the cap {cap}")
    out = []
    for alice in product(range(sc.nA_outcomes), repeat=sc.nA_settings):
        for bob in product(range(sc.nB_outcomes), repeat=sc.nB_settings):
            out.append(DeterministicStrategy(alice, bob))
    return out


def admissible_vertices(p: Behavior, cap: int = 2**22):
    """Deterministic strategies whose support lies inside supp(p).

    Enumerated by backtracking: a partial Alice assignment prunes the
    per-setting Bob outcome sets, so the output is produced without
    touching the full vertex set.
    """
    sc = p.scenario
    nY, nB = sc.nB_settings, sc.nB_outcomes
    full = [frozenset(range(nB))] * nY
    out = []

    def rec(x, alice, allowed):
        if len(out) > cap:
            raise EnumerationCapError(
                f"more than {cap} support-admissible vertices")
        if x == sc.nA_settings:
            for bob in product(*[sorted(s) for s in allowed]):
                out.append(DeterministicStrategy(tuple(alice), bob))
                if len(out) > cap:
                    raise EnumerationCapError(
                        f"more than {cap} support-admissible vertices")
            return
        for a in range(sc.nA_outcomes):
            nxt = []
            ok = True
            for y in range(nY):
                s = frozenset(b for b in allowed[y]
                              if p.table[x][y][a][b] > 0)
                if not s:
                    ok = False
                    break
                nxt.append(s)
            if ok:
                rec(x + 1, alice + [a], nxt)

    rec(0, [], full)
    return out


# ---------------------------------------------------------------------------
# local content

@dataclass
class LocalContentResult:
    q_local_max: Fraction
    q_nonlocal_min: Fraction
    weights: dict                  # DeterministicStrategy -> Fraction, nonzero
    dual_expression: BellExpression
    n_vertices_used: int
    shortcut: str | None = None    # "nonlocal-zeros" when the LP was skipped


def local_content(p: Behavior, cap: int = 2**22) -> LocalContentResult:
    """Maximal local weight of a behavior, with an optimal dual certificate.

    Exact rational computation; float behaviors are converted exactly
    first.  The returned dual expression I satisfies I(P) >= 1 on every
    deterministic vertex, I(p) == q_local_max, and vanishes on supp(p)'s
    complement only through the zero cells of p.
    """
    p = p.to_rational()
    sc = p.scenario
    for v in p.flat():
        if v < 0:
            raise BellError("behavior has negative entries")

    zeros = zeros_from_behavior(p)
    if zeros.cells and is_lhv_realizable(zeros) is None:
        # every deterministic vertex hits a zero of p, so no local part
        # exists and the indicator of the zero set is an optimal dual:
        # it is 1 on at least one cell of every vertex and 0 on supp(p)
        dual = indicator_expression(zeros)
        dual.bounds["local_lower"] = Fraction(1)
        return LocalContentResult(
            q_local_max=Fraction(0), q_nonlocal_min=Fraction(1),
            weights={}, dual_expression=dual, n_vertices_used=0,
            shortcut="nonlocal-zeros")

    verts = admissible_vertices(p, cap=cap)
    support = [(x, y, a, b) for x, y, a, b in sc.cells()
               if p.table[x][y][a][b] > 0]
    # maximize sum(q_i) s.t. sum_i q_i P_i <= p on supp(p); on the zero
    # cells the constraint is 0 <= 0 for every admissible vertex
    idx = {c: i for i, c in enumerate(support)}
    matrix = []
    rhs = []
    for (x, y, a, b) in support:
        row = [Fraction(0)] * len(verts)
        matrix.append(row)
        rhs.append(p.table[x][y][a][b])
    for j, s in enumerate(verts):
        for x in range(sc.nA_settings):
            for y in range(sc.nB_settings):
                c = (x, y, s.alice[x], s.bob[y])
                matrix[idx[c]][j] = Fraction(1)
    lp = LinearProgram(objective=[Fraction(1)] * len(verts),
                       matrix=matrix,
                       senses=["<="] * len(support),
                       rhs=rhs, maximize=True)
    res = lp_solve(lp)
    if res.status != "optimal":
        raise BellError(f"local content LP came back {res.status}")

    q = res.value
    weights = {verts[j]: res.x[j] for j in range(len(verts)) if res.x[j]}
    # dual: y >= 0 per support cell with sum_c y_c P_i(c) >= 1 for each
    # admissible vertex; extend by 1 on the zero cells so pruned vertices
    # (which hit a zero) also satisfy the bound
    coeffs = [[[[Fraction(0) for _ in range(sc.nB_outcomes)]
                for _ in range(sc.nA_outcomes)]
               for _ in range(sc.nB_settings)]
              for _ in range(sc.nA_settings)]
    for i, (x, y, a, b) in enumerate(support):
        coeffs[x][y][a][b] = res.dual[i]
    for (x, a, y, b) in zeros.cells:
        coeffs[x][y][a][b] = Fraction(1)
    dual = BellExpression(sc, coeffs, bounds={"local_lower": Fraction(1)})
    assert dual.value_at(p) == q
    return LocalContentResult(q_local_max=q, q_nonlocal_min=1 - q,
                              weights=weights, dual_expression=dual,
                              n_vertices_used=len(verts))


# ---------------------------------------------------------------------------
# nonsignaling value

def _ns_lp(sc: Scenario, objective):
    n = sc.n_cells
    matrix = []
    senses = []
    rhs = []

    def row_of(cells_with_coeffs):
        row = [Fraction(0)] * n
        for (x, y, a, b), c in cells_with_coeffs:
            row[sc.cell_index(x, y, a, b)] += c
        return row

    for x in range(sc.nA_settings):
        for y in range(sc.nB_settings):
            matrix.append(row_of([((x, y, a, b), Fraction(1))
                                  for a in range(sc.nA_outcomes)
                                  for b in range(sc.nB_outcomes)]))
            senses.append("=")
            rhs.append(Fraction(1))
    for x in range(sc.nA_settings):
        for a in range(sc.nA_outcomes):
            for y in range(1, sc.nB_settings):
                matrix.append(row_of(
                    [((x, y, a, b), Fraction(1)) for b in range(sc.nB_outcomes)]
                    + [((x, 0, a, b), Fraction(-1)) for b in range(sc.nB_outcomes)]))
                senses.append("=")
                rhs.append(Fraction(0))
    for y in range(sc.nB_settings):
        for b in range(sc.nB_outcomes):
            for x in range(1, sc.nA_settings):
                matrix.append(row_of(
                    [((x, y, a, b), Fraction(1)) for a in range(sc.nA_outcomes)]
                    + [((0, y, a, b), Fraction(-1)) for a in range(sc.nA_outcomes)]))
                senses.append("=")
                rhs.append(Fraction(0))
    return LinearProgram(objective=objective, matrix=matrix,
                         senses=senses, rhs=rhs, maximize=True)


def ns_value(expr: BellExpression):
    """Exact maximum of the expression over the nonsignaling polytope."""
    sc = expr.scenario
    obj = [Fraction(v) for v in expr.flat()]
    res = lp_solve(_ns_lp(sc, obj))
    if res.status != "optimal":
        raise BellError(f"nonsignaling LP came back {res.status}")
    return res.value


def local_value(expr: BellExpression, cap: int = 2**31):
    """Exact maximum over deterministic strategies (the local bound)."""
    best = None
    for s in enumerate_local_vertices(expr.scenario, cap=cap):
        v = expr.value_at_strategy(s)
        if best is None or v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# tightness

@dataclass
class TightnessReport:
    n_saturating: int
    rank: int
    required_rank: int             # ns_dimension + 1
    tight: bool


def saturating_vertices(expr: BellExpression, bound, candidates=None,
                        cap: int = 2**22):
    """Deterministic strategies achieving the given value exactly.

    ``candidates`` replaces full enumeration for large scenarios (the
    caller must guarantee it contains every saturating strategy).
    """
    bound = Fraction(bound)
    if candidates is None:
        candidates = enumerate_local_vertices(expr.scenario, cap=cap)
    out = []
    for s in candidates:
        if Fraction(expr.value_at_strategy(s)) == bound:
            out.append(s)
    return out


def strategy_matrix(sc: Scenario, strategies):
    """0/1 rows: each strategy's induced behavior in canonical cell order."""
    rows = []
    for s in strategies:
        row = [0] * sc.n_cells
        for x in range(sc.nA_settings):
            for y in range(sc.nB_settings):
                row[sc.cell_index(x, y, s.alice[x], s.bob[y])] = 1
        rows.append(row)
    return rows


def tightness_verdict(expr: BellExpression, bound, candidates=None,
                      cap: int = 2**22, saturating=None) -> TightnessReport:
    """Is the inequality (expression >= bound over vertices) a facet?

    The inequality is tight (a facet of the local polytope) when the 0/1
    behavior vectors of the saturating strategies have linear rank equal
    to the nonsignaling dimension: the facet's affine hull has dimension
    ns_dimension - 1 and does not contain the origin, so its linear span
    has dimension ns_dimension (one less than the span of the full
    vertex set).
    """
    sc = expr.scenario
    if saturating is None:
        saturating = saturating_vertices(expr, bound, candidates=candidates,
                                         cap=cap)
    rows = strategy_matrix(sc, saturating)
    rank = exact_rank(rows) if rows else 0
    required = ns_dimension(sc)
    return TightnessReport(n_saturating=len(saturating), rank=rank,
                           required_rank=required, tight=rank == required)
