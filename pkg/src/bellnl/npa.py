"""Moment-matrix relaxations for quantum realizability and bounds.

The moment matrix is indexed by monomials in the parties' projectors
(identity, E_{a|x} for a < |A|-1, F_{b|y} for b < |B|-1, and at level
"one+ab" their products).  Entries are expectation values of reduced
words; words that reduce to zero (same-setting orthogonality) pin
entries to 0, equal reduced words share one variable, and the reversed
word shares it too since the matrix is real symmetric.

Quantum realizability of a table of zeros is decided by the sign of the
maximal minimum eigenvalue over the affine slice: behaviors with the
asserted zeros and nonnegative cell expectations.  An
indeterminate band between the feasibility thresholds keeps float
arithmetic from flipping verdicts; level escalation ("one" to "one+ab")
is applied when the cheap level is inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BellError, Scenario
from .polytope import BellExpression
from .solvers import (SdpFeasibilityProblem, SdpResult,
                      sdp_max_min_eigenvalue, sdp_maximize)
from .zeros import TableOfZeros

LEVELS = ("one", "one+ab")


def _reduce_word(word):
    """Collapse adjacent same-setting projectors; None marks the zero
    operator."""
    out = []
    for (x, a) in word:
        if out and out[-1][0] == x:
            if out[-1][1] != a:
                return None
            continue
        out.append((x, a))
    return tuple(out)


def _entry_word(row, col):
    """Reduced word of O_row^dag O_col; words are (alice, bob) pairs."""
    ra, rb = row
    ca, cb = col
    aw = _reduce_word(tuple(reversed(ra)) + ca)
    if aw is None:
        return None
    bw = _reduce_word(tuple(reversed(rb)) + cb)
    if bw is None:
        return None
    return (aw, bw)


def _canonical(word):
    aw, bw = word
    rev = (tuple(reversed(aw)), tuple(reversed(bw)))
    return min(word, rev)


@dataclass
class MomentStructure:
    scenario: Scenario
    level: str
    monomials: list                 # (alice_word, bob_word) pairs
    entries: dict                   # (i, j) i<=j -> ("const", c) | ("var", id)
    var_rep: dict                   # var id -> representative (i, j)
    n_vars: int

    @property
    def size(self):
        return len(self.monomials)

    def p_terms(self, x, a, y, b):
        """Expansion of p(a,b|x,y) as (constant, [(var_id, coef), ...]).

        Dropped outcomes are rewritten through completeness:
        E_{last|x} = I - sum of the kept projectors.
        """
        sc = self.scenario
        if a < sc.nA_outcomes - 1:
            ea = [(1, ((x, a),))]
        else:
            ea = [(1, ())] + [(-1, ((x, aa),))
                              for aa in range(sc.nA_outcomes - 1)]
        if b < sc.nB_outcomes - 1:
            fb = [(1, ((y, b),))]
        else:
            fb = [(1, ())] + [(-1, ((y, bb),))
                              for bb in range(sc.nB_outcomes - 1)]
        const = 0
        terms = {}
        for ca, aw in ea:
            for cb, bw in fb:
                c = ca * cb
                if not aw and not bw:
                    const += c
                    continue
                key = _canonical((aw, bw))
                vid = self._var_of(key)
                terms[vid] = terms.get(vid, 0) + c
        return const, [(v, c) for v, c in terms.items() if c]

    def _var_of(self, key):
        try:
            return self._var_index[key]
        except KeyError:
            raise BellError(f"moment {key} missing from level {self.level!r} "
                            "structure") from None


def build_moment_structure(sc: Scenario, level: str = "one") -> MomentStructure:
    if level not in LEVELS:
        raise BellError(f"unknown NPA level {level!r}; choose from {LEVELS}")
    alice_ops = [((x, a),) for x in range(sc.nA_settings)
                 for a in range(sc.nA_outcomes - 1)]
    bob_ops = [((y, b),) for y in range(sc.nB_settings)
               for b in range(sc.nB_outcomes - 1)]
    monomials = [((), ())]
    monomials += [(aw, ()) for aw in alice_ops]
    monomials += [((), bw) for bw in bob_ops]
    if level == "one+ab":
        monomials += [(aw, bw) for aw in alice_ops for bw in bob_ops]

    entries = {}
    var_index = {}
    var_rep = {}
    n = len(monomials)
    for i in range(n):
        for j in range(i, n):
            w = _entry_word(monomials[i], monomials[j])
            if w is None:
                entries[(i, j)] = ("const", 0)
                continue
            if w == ((), ()):
                entries[(i, j)] = ("const", 1)
                continue
            key = _canonical(w)
            if key not in var_index:
                var_index[key] = len(var_index)
                var_rep[var_index[key]] = (i, j)
            entries[(i, j)] = ("var", var_index[key])

    ms = MomentStructure(scenario=sc, level=level, monomials=monomials,
                         entries=entries, var_rep=var_rep,
                         n_vars=len(var_index))
    ms._var_index = var_index
    return ms


def _structural_problem(ms: MomentStructure) -> SdpFeasibilityProblem:
    prob = SdpFeasibilityProblem(n=ms.size)
    for (i, j), (kind, val) in ms.entries.items():
        if kind == "const":
            prob.add([(i, j, 1.0)], float(val))
        else:
            rep = ms.var_rep[val]
            if (i, j) != rep:
                prob.add([(i, j, 1.0), (rep[0], rep[1], -1.0)], 0.0)
    return prob


def _terms_of(ms, const_and_terms):
    const, terms = const_and_terms
    out = []
    for vid, c in terms:
        i, j = ms.var_rep[vid]
        out.append((i, j, float(c)))
    return const, out


@dataclass
class NpaReport:
    verdict: str                 # "feasible" | "infeasible-with-margin" | "indeterminate"
    level: str
    lambda_star: float | None
    size: int
    solver_status: str = ""


def npa_feasible(t: TableOfZeros, level: str = "auto") -> NpaReport:
    """Can a quantum behavior carry all the asserted zeros?

    A negative verdict at any level certifies that no quantum behavior
    (of any dimension) has the zero set, hence the table supports no
    pseudotelepathy strategy.  ``level="auto"`` escalates from "one" to
    "one+ab" when the cheap level is indeterminate.
    """
    levels = LEVELS if level == "auto" else (level,)
    report = None
    for lv in levels:
        ms = build_moment_structure(t.scenario, lv)
        prob = _structural_problem(ms)
        sc = t.scenario
        for x in range(sc.nA_settings):
            for a in range(sc.nA_outcomes):
                for y in range(sc.nB_settings):
                    for b in range(sc.nB_outcomes):
                        const, terms = _terms_of(
                            ms, ms.p_terms(x, a, y, b))
                        if (x, a, y, b) in t.cells:
                            prob.add(terms, -float(const))
                        else:
                            prob.add(terms, -float(const), sense=">=")
        res = sdp_max_min_eigenvalue(prob)
        verdict = res.verdict
        if verdict == "infeasible":
            # affine inconsistency counts as a margin-free refutation
            verdict = "infeasible-with-margin"
        report = NpaReport(verdict=verdict, level=lv,
                           lambda_star=res.lambda_star, size=ms.size,
                           solver_status=res.solver_status)
        if verdict != "indeterminate":
            return report
    return report


def npa_upper_bound(expr: BellExpression, level: str = "one+ab"):
    """Upper bound on the quantum maximum of a Bell expression."""
    sc = expr.scenario
    ms = build_moment_structure(sc, level)
    prob = _structural_problem(ms)
    # cell expectations are probabilities
    const_total = 0.0
    obj = {}
    for x in range(sc.nA_settings):
        for a in range(sc.nA_outcomes):
            for y in range(sc.nB_settings):
                for b in range(sc.nB_outcomes):
                    coef = float(expr.coeffs[x][y][a][b])
                    const, terms = _terms_of(ms, ms.p_terms(x, a, y, b))
                    prob.add(terms, -float(const), sense=">=")
                    if coef:
                        const_total += coef * const
                        for (i, j, c) in terms:
                            obj[(i, j)] = obj.get((i, j), 0.0) + coef * c
    prob.objective = [(i, j, c) for (i, j), c in obj.items()]
    res = sdp_maximize(prob)
    if res.verdict != "feasible":
        raise BellError(f"NPA bound SDP came back {res.verdict}")
    return res.value + const_total


def moment_matrix_of_strategy(ms: MomentStructure, strategy) -> np.ndarray:
    """Moment matrix of an explicit quantum strategy.

    Used to generate feasible instances in tests: the result satisfies
    the structural constraints and is PSD up to float rounding.
    """
    psi = strategy.psi
    dA, dB = psi.shape

    def op_of(word, projs, d):
        m = np.eye(d, dtype=complex)
        for (x, a) in word:
            m = m @ projs[x][a]
        return m

    n = ms.size
    g = np.zeros((n, n))
    ops = []
    for (aw, bw) in ms.monomials:
        ops.append((op_of(aw, strategy.alice, dA),
                    op_of(bw, strategy.bob, dB)))
    for i in range(n):
        for j in range(n):
            pa = ops[i][0].conj().T @ ops[j][0]
            pb = ops[i][1].conj().T @ ops[j][1]
            v = np.trace(psi.conj().T @ pa @ psi @ pb.T)
            if abs(v.imag) > 1e-9:
                raise BellError("moment came out complex")
            g[i, j] = v.real
    return g
