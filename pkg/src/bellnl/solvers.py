"""Linear programming (exact rational simplex) and small dense SDPs.

The simplex solver works entirely in ``fractions.Fraction`` with Bland's
anti-cycling rule, so optima of rational LPs are exact: local content
values like 0 or sqrt(2)-1-free rational data come out bit-reliable.
Float LPs are converted to their exact binary rationals and solved the
same way, which makes the reported primal/dual gap identically zero.

Semidefinite problems are delegated to cvxpy with an interior-point
backend (CLARABEL, falling back to SCS); problems here are dense and
small (n <= ~120).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BellError


class StructuralError(BellError):
    pass


class UnboundedError(BellError):
    pass


# ---------------------------------------------------------------------------
# linear programming

@dataclass
class LinearProgram:
    """max/min c.x subject to A x (<=,=,>=) b, x >= 0."""

    objective: list
    matrix: list           # list of rows
    senses: list           # "<=", "=", ">=" per row
    rhs: list
    maximize: bool = True

    def __post_init__(self):
        n = len(self.objective)
        if len(self.matrix) != len(self.rhs) or len(self.matrix) != len(self.senses):
            raise StructuralError("row count mismatch")
        for row in self.matrix:
            if len(row) != n:
                raise StructuralError("column count mismatch")
        for s in self.senses:
            if s not in ("<=", "=", ">="):
                raise StructuralError(f"bad sense {s!r}")


@dataclass
class LpResult:
    status: str                  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: list | None = None
    dual: list | None = None     # one multiplier per constraint
    iterations: int = 0


def _pivot(tab, basis, r, c):
    piv = tab[r][c]
    row = tab[r]
    inv = 1 / piv
    tab[r] = [v * inv for v in row]
    prow = tab[r]
    for i, other in enumerate(tab):
        if i == r:
            continue
        f = other[c]
        if f:
            tab[i] = [v - f * p for v, p in zip(other, prow)]
    basis[r] = c


def _simplex_phase(tab, basis, cost, allowed, max_iter=200000):
    """Maximize with reduced costs kept in the last row; Bland's rule.

    ``cost`` is mutated in place as the objective row (reduced costs).
    Returns ("optimal" | "unbounded", iterations).
    """
    m = len(tab)
    it = 0
    while True:
        it += 1
        if it > max_iter:
            raise BellError("simplex iteration cap exceeded")
        enter = None
        for j in range(len(cost) - 1):
            if allowed[j] and cost[j] > 0:
                enter = j
                break
        if enter is None:
            return "optimal", it
        leave = None
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return "unbounded", it
        _pivot(tab, basis, leave, enter)
        # update objective row
        f = cost[enter]
        if f:
            prow = tab[leave]
            for j in range(len(cost)):
                cost[j] -= f * prow[j]


def lp_solve(lp: LinearProgram) -> LpResult:
    """Two-phase primal simplex, exact over the rationals."""
    n = len(lp.objective)
    m = len(lp.matrix)
    obj = [Fraction(v) for v in lp.objective]
    if not lp.maximize:
        obj = [-v for v in obj]

    rows = []
    senses = []
    rhs = []
    flipped = []
    for i in range(m):
        row = [Fraction(v) for v in lp.matrix[i]]
        b = Fraction(lp.rhs[i])
        s = lp.senses[i]
        if b < 0:
            row = [-v for v in row]
            b = -b
            s = {"<=": ">=", ">=": "<=", "=": "="}[s]
            flipped.append(True)
        else:
            flipped.append(False)
        rows.append(row)
        senses.append(s)
        rhs.append(b)

    # columns: n vars | slack/surplus per inequality | artificial per =/>= row
    slack_col = {}
    art_col = {}
    ncols = n
    for i, s in enumerate(senses):
        if s in ("<=", ">="):
            slack_col[i] = ncols
            ncols += 1
    for i, s in enumerate(senses):
        if s in ("=", ">="):
            art_col[i] = ncols
            ncols += 1

    zero = Fraction(0)
    tab = []
    basis = [0] * m
    for i in range(m):
        row = rows[i] + [zero] * (ncols - n) + [rhs[i]]
        if i in slack_col:
            row[slack_col[i]] = Fraction(1) if senses[i] == "<=" else Fraction(-1)
        if i in art_col:
            row[art_col[i]] = Fraction(1)
            basis[i] = art_col[i]
        else:
            basis[i] = slack_col[i]
        tab.append(row)

    total_it = 0
    art_set = set(art_col.values())
    if art_set:
        # phase 1: maximize -sum(artificials)
        cost = [zero] * (ncols + 1)
        for i in art_col:
            # reduced costs for basis of artificials: add their rows
            for j in range(ncols + 1):
                cost[j] += tab[i][j]
        for j in art_set:
            cost[j] = zero
        allowed = [True] * ncols
        status, it = _simplex_phase(tab, basis, cost, allowed)
        total_it += it
        if cost[-1] > 0:
            return LpResult(status="infeasible", iterations=total_it)
        # pivot remaining artificials out of the basis where possible
        for i in range(m):
            if basis[i] in art_set:
                for j in range(ncols):
                    if j not in art_set and tab[i][j] != 0:
                        _pivot(tab, basis, i, j)
                        break

    # phase 2
    cost = [zero] * (ncols + 1)
    for j in range(n):
        cost[j] = obj[j]
    for i in range(m):
        cj = cost[basis[i]]
        if cj:
            for j in range(ncols + 1):
                cost[j] -= cj * tab[i][j]
    allowed = [j not in art_set for j in range(ncols)]
    status, it = _simplex_phase(tab, basis, cost, allowed)
    total_it += it
    if status == "unbounded":
        return LpResult(status="unbounded", iterations=total_it)

    x = [zero] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    value = sum(o * v for o, v in zip(obj, x))

    # duals: y_i = -reduced cost of the unit column of row i
    dual = []
    for i in range(m):
        if i in art_col:       # "=" and ">=" rows
            y = -cost[art_col[i]]
        else:                  # "<=" rows read off their slack column
            y = -cost[slack_col[i]]
        if flipped[i]:
            y = -y
        dual.append(y)

    if not lp.maximize:
        value = -value
        dual = [-y for y in dual]
    return LpResult(status="optimal", value=value, x=x, dual=dual,
                    iterations=total_it)


# ---------------------------------------------------------------------------
# semidefinite programming

@dataclass
class SdpFeasibilityProblem:
    """Find a PSD n x n symmetric matrix satisfying affine constraints.

    Each constraint is (terms, sense, rhs) with ``terms`` a list of
    (i, j, coef) over upper-triangle indices i <= j; a term touches the
    single symmetric entry G[i, j] (== G[j, i]).
    """

    n: int
    constraints: list = field(default_factory=list)
    objective: list | None = None   # list of (i, j, coef), maximized

    def add(self, terms, rhs, sense="="):
        for (i, j, _) in terms:
            if not (0 <= i <= j < self.n):
                raise StructuralError(f"index ({i},{j}) outside upper triangle")
        if sense not in ("=", "<=", ">="):
            raise StructuralError(f"bad sense {sense!r}")
        self.constraints.append((terms, sense, rhs))


@dataclass
class SdpResult:
    verdict: str             # "feasible" | "infeasible-with-margin" | "indeterminate" | "infeasible"
    lambda_star: float | None
    matrix: np.ndarray | None
    value: float | None = None
    solver_status: str = ""


def _expr(G, terms):
    return sum(c * G[i, j] for (i, j, c) in terms)


def _solve(problem, solvers=("CLARABEL", "SCS")):
    import cvxpy as cp
    last = None
    for name in solvers:
        try:
            kwargs = {}
            if name == "SCS":
                kwargs = {"eps": 1e-9, "max_iters": 200000}
            with warnings.catch_warnings():
                # inaccurate-solution warnings are handled via the status
                warnings.simplefilter("ignore", UserWarning)
                problem.solve(solver=name, **kwargs)
            last = problem.status
            if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE,
                                  cp.INFEASIBLE, cp.UNBOUNDED):
                return problem.status
        except cp.SolverError:
            continue
    return last or "failed"


FEASIBLE_TOL = -1e-7
INFEASIBLE_TOL = -1e-5


def sdp_max_min_eigenvalue(prob: SdpFeasibilityProblem,
                           lam_cap: float = 10.0) -> SdpResult:
    """Maximize lam with G - lam*I PSD under the affine constraints.

    The sign of lam_star decides feasibility of "PSD G satisfying the
    constraints", with an indeterminate band between the thresholds so
    float arithmetic cannot flip a verdict.
    """
    import cvxpy as cp
    n = prob.n
    G = cp.Variable((n, n), symmetric=True)
    lam = cp.Variable()
    cons = [G - lam * np.eye(n) >> 0, lam <= lam_cap]
    for terms, sense, rhs in prob.constraints:
        e = _expr(G, terms)
        if sense == "=":
            cons.append(e == rhs)
        elif sense == "<=":
            cons.append(e <= rhs)
        else:
            cons.append(e >= rhs)
    problem = cp.Problem(cp.Maximize(lam), cons)
    status = _solve(problem)
    if status == cp.INFEASIBLE:
        # the affine system itself is inconsistent
        return SdpResult(verdict="infeasible", lambda_star=None, matrix=None,
                         solver_status=status)
    if lam.value is None:
        return SdpResult(verdict="indeterminate", lambda_star=None,
                         matrix=None, solver_status=str(status))
    lam_star = float(lam.value)
    if lam_star >= FEASIBLE_TOL:
        verdict = "feasible"
    elif lam_star < INFEASIBLE_TOL:
        verdict = "infeasible-with-margin"
    else:
        verdict = "indeterminate"
    return SdpResult(verdict=verdict, lambda_star=lam_star,
                     matrix=None if G.value is None else np.array(G.value),
                     solver_status=str(status))


def sdp_maximize(prob: SdpFeasibilityProblem) -> SdpResult:
    """Maximize the linear objective over PSD matrices meeting the constraints."""
    import cvxpy as cp
    if prob.objective is None:
        raise StructuralError("sdp_maximize needs an objective")
    n = prob.n
    G = cp.Variable((n, n), symmetric=True)
    cons = [G >> 0]
    for terms, sense, rhs in prob.constraints:
        e = _expr(G, terms)
        if sense == "=":
            cons.append(e == rhs)
        elif sense == "<=":
            cons.append(e <= rhs)
        else:
            cons.append(e >= rhs)
    objective = _expr(G, prob.objective)
    problem = cp.Problem(cp.Maximize(objective), cons)
    status = _solve(problem)
    if status == cp.UNBOUNDED:
        raise UnboundedError("SDP objective unbounded")
    if status == cp.INFEASIBLE:
        return SdpResult(verdict="infeasible", lambda_star=None, matrix=None,
                         solver_status=status)
    if G.value is None:
        return SdpResult(verdict="indeterminate", lambda_star=None,
                         matrix=None, solver_status=str(status))
    return SdpResult(verdict="feasible", lambda_star=None,
                     matrix=np.array(G.value),
                     value=float(problem.value), solver_status=str(status))


def affine_residual(prob: SdpFeasibilityProblem, G: np.ndarray) -> float:
    """Worst-case violation of the affine constraints by a candidate matrix."""
    worst = 0.0
    for terms, sense, rhs in prob.constraints:
        v = sum(c * G[i, j] for (i, j, c) in terms)
        if sense == "=":
            worst = max(worst, abs(v - rhs))
        elif sense == "<=":
            worst = max(worst, max(0.0, v - rhs))
        else:
            worst = max(worst, max(0.0, rhs - v))
    return worst
