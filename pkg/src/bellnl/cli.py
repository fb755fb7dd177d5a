"""Command-line interface.

Every analysis is a subcommand taking JSON files and emitting a JSON
run report (to stdout or ``--output``).  Exit codes: 0 for success or a
positive verdict, 2 for a negative verdict on yes/no queries, 1 for
errors or inconclusive solver output.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import time
from fractions import Fraction

import click

from . import __version__
from .core import (Behavior, BellError, behavior_from_dict, behavior_to_dict,
                   load_behavior, ns_dimension, Scenario)
from .games import (Game, builtin_game, classical_value, expression_from_game,
                    game_from_dict, game_from_zeros, game_to_dict, lift_game,
                    winning_probability)
from .npa import npa_feasible, npa_upper_bound
from .polytope import (expression_from_dict, expression_to_dict, local_content,
                       local_value, ns_value, tightness_verdict)
from .numerics import rationalize_behavior
from .zeros import (CntzOptions, TableOfZeros, enumerate_cntz, is_critical,
                    is_lhv_realizable, load_table, table_from_dict,
                    table_to_dict, zeros_from_behavior)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _num(v):
    """Numbers as exact rational plus 12-significant-digit decimal."""
    if isinstance(v, Fraction) or isinstance(v, int):
        f = Fraction(v)
        return {"rational": f"{f.numerator}/{f.denominator}",
                "decimal": f"{float(f):.12g}"}
    return {"decimal": f"{float(v):.12g}"}


class Report:
    def __init__(self, command, inputs):
        self.t0 = time.monotonic()
        self.doc = {
            "command": command,
            "inputs": {p: _digest(p) for p in inputs},
            "version": __version__,
            "results": {},
        }

    def emit(self, output, code):
        self.doc["timing_seconds"] = round(time.monotonic() - self.t0, 6)
        text = json.dumps(self.doc, indent=1) + "\n"
        if output:
            with open(output, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
        sys.exit(code)


def _load_expression_or_game(path):
    with open(path) as fh:
        d = json.load(fh)
    if "coefficients" in d:
        return expression_from_dict(d), None
    g = game_from_dict(d)
    return expression_from_game(g), g


def _scenario_arg(text) -> Scenario:
    try:
        parts = [int(v) for v in text.replace(";", ",").split(",")]
        return Scenario(*parts)
    except (ValueError, TypeError) as exc:
        raise BellError(f"scenario must be 4 integers like 2,2,2,2: {exc}")


output_option = click.option("--output", type=click.Path(), default=None,
                             help="Write the report file (default stdout).")
threads_option = click.option("--threads", type=int,
                              default=lambda: int(os.environ.get(
                                  "BELLNL_THREADS", "0")) or None,
                              help="Cap worker threads (advisory).")


@click.group()
@click.version_option(__version__)
def main():
    """Local content, nonlocal games, tables of zeros, and NPA bounds."""


def _run(func):
    """Shared error handling: domain errors exit 1 with a diagnostic."""
    try:
        func()
    except (BellError, OSError, ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)


@main.command("local-content")
@click.argument("behavior", type=click.Path())
@output_option
@threads_option
def cmd_local_content(behavior, output, threads):
    """Maximal local weight of a behavior."""
    def go():
        rep = Report(["local-content", behavior], [behavior])
        p = load_behavior(behavior)
        res = local_content(p)
        rep.doc["results"] = {
            "q_local_max": _num(res.q_local_max),
            "q_nonlocal_min": _num(res.q_nonlocal_min),
            "n_vertices_used": res.n_vertices_used,
            "n_weights": len(res.weights),
            "shortcut": res.shortcut,
        }
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("dual-expression")
@click.argument("behavior", type=click.Path())
@output_option
@threads_option
def cmd_dual_expression(behavior, output, threads):
    """Bell expression certifying the local content."""
    def go():
        rep = Report(["dual-expression", behavior], [behavior])
        p = load_behavior(behavior)
        res = local_content(p)
        rep.doc["results"] = {
            "q_local_max": _num(res.q_local_max),
            "expression": expression_to_dict(res.dual_expression),
        }
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("classical-value")
@click.argument("game", type=click.Path())
@click.option("--with-ns", is_flag=True, help="Also compute the NS value.")
@output_option
@threads_option
def cmd_classical_value(game, with_ns, output, threads):
    """Exact classical value of a game with the optimizer count."""
    def go():
        rep = Report(["classical-value", game], [game])
        g = game_from_dict(json.load(open(game)))
        res = classical_value(g, with_ns=with_ns)
        rep.doc["results"] = {
            "omega_classical": _num(res.omega_classical),
            "n_optimal_strategies": len(res.optimal_strategies),
        }
        if with_ns:
            rep.doc["results"]["omega_ns"] = _num(res.omega_ns)
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("ns-value")
@click.argument("path", type=click.Path())
@output_option
@threads_option
def cmd_ns_value(path, output, threads):
    """Nonsignaling maximum of an expression or game."""
    def go():
        rep = Report(["ns-value", path], [path])
        expr, _ = _load_expression_or_game(path)
        rep.doc["results"] = {"ns_value": _num(ns_value(expr))}
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("npa-bound")
@click.argument("expr", type=click.Path())
@click.option("--level", default="one+ab",
              type=click.Choice(["one", "one+ab"]))
@output_option
@threads_option
def cmd_npa_bound(expr, level, output, threads):
    """Moment-matrix upper bound on the quantum value."""
    def go():
        rep = Report(["npa-bound", expr, "--level", level], [expr])
        e, _ = _load_expression_or_game(expr)
        rep.doc["results"] = {"upper_bound": _num(npa_upper_bound(e, level)),
                              "level": level}
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("npa-feasible")
@click.argument("zeros", type=click.Path())
@click.option("--level", default="auto",
              type=click.Choice(["auto", "one", "one+ab"]))
@output_option
@threads_option
def cmd_npa_feasible(zeros, level, output, threads):
    """Quantum realizability of a table of zeros."""
    def go():
        rep = Report(["npa-feasible", zeros, "--level", level], [zeros])
        t = load_table(zeros)
        r = npa_feasible(t, level=level)
        rep.doc["results"] = {
            "verdict": r.verdict,
            "level": r.level,
            "lambda_star": r.lambda_star,
            "matrix_size": r.size,
        }
        if r.verdict == "feasible":
            rep.emit(output, EXIT_OK)
        elif r.verdict == "infeasible-with-margin":
            rep.emit(output, EXIT_NEGATIVE)
        rep.emit(output, EXIT_ERROR)
    _run(go)


@main.command("realizable")
@click.argument("zeros", type=click.Path())
@output_option
@threads_option
def cmd_realizable(zeros, output, threads):
    """LHV realizability of a table of zeros (witness on success)."""
    def go():
        rep = Report(["realizable", zeros], [zeros])
        t = load_table(zeros)
        w = is_lhv_realizable(t)
        if w is None:
            rep.doc["results"] = {"realizable": False}
            rep.emit(output, EXIT_NEGATIVE)
        rep.doc["results"] = {"realizable": True,
                              "witness": {"alice": list(w.alice),
                                          "bob": list(w.bob)}}
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("critical")
@click.argument("zeros", type=click.Path())
@output_option
@threads_option
def cmd_critical(zeros, output, threads):
    """Criticality (minimal nonlocality) of a table of zeros."""
    def go():
        rep = Report(["critical", zeros], [zeros])
        t = load_table(zeros)
        if is_lhv_realizable(t) is not None:
            rep.doc["results"] = {"critical": False, "reason": "realizable"}
            rep.emit(output, EXIT_NEGATIVE)
        removable = [list(c) for c in t.sorted_cells()
                     if is_lhv_realizable(t.without(c)) is None]
        if removable:
            rep.doc["results"] = {"critical": False,
                                  "removable_cells": removable}
            rep.emit(output, EXIT_NEGATIVE)
        rep.doc["results"] = {"critical": True}
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("cntz-enum")
@click.argument("scenario")
@click.option("--seed", type=int, default=0)
@click.option("--subgroup", type=click.Choice(["outputs-only"]), default=None,
              help="Cheap first reduction pass under a subgroup.")
@output_option
@threads_option
def cmd_cntz_enum(scenario, seed, subgroup, output, threads):
    """All critical nonlocal tables of zeros, up to relabelings."""
    def go():
        rep = Report(["cntz-enum", scenario, "--seed", str(seed)], [])
        sc = _scenario_arg(scenario)
        classes = enumerate_cntz(sc, CntzOptions(seed=seed, subgroup=subgroup))
        rep.doc["results"] = {
            "n_classes": len(classes),
            "classes": [table_to_dict(t) for t in classes],
        }
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("lift")
@click.argument("game", type=click.Path())
@click.option("-n", "copies", type=int, required=True)
@click.option("--game-out", type=click.Path(), default=None,
              help="Write the lifted game file here.")
@output_option
@threads_option
def cmd_lift(game, copies, game_out, output, threads):
    """n-copy lifting of a game."""
    def go():
        rep = Report(["lift", game, "-n", str(copies)], [game])
        g = game_from_dict(json.load(open(game)))
        lifted = lift_game(g, copies)
        d = game_to_dict(lifted)
        if game_out:
            with open(game_out, "w") as fh:
                json.dump(d, fh, indent=1)
                fh.write("\n")
            rep.doc["results"] = {"game_file": game_out,
                                  "scenario": d["scenario"]}
        else:
            rep.doc["results"] = {"game": d}
        rep.emit(output, EXIT_OK)
    _run(go)


@main.command("tightness")
@click.argument("path", type=click.Path())
@output_option
@threads_option
def cmd_tightness(path, output, threads):
    """Facet test: rank of the saturating vertex set."""
    def go():
        rep = Report(["tightness", path], [path])
        expr, g = _load_expression_or_game(path)
        if g is not None:
            res = classical_value(g)
            bound = res.omega_classical
            report = tightness_verdict(expr, bound,
                                       saturating=res.optimal_strategies)
        else:
            bound = local_value(expr)
            report = tightness_verdict(expr, bound)
        rep.doc["results"] = {
            "local_bound": _num(bound),
            "n_saturating": report.n_saturating,
            "rank": report.rank,
            "required_rank": report.required_rank,
            "tight": report.tight,
        }
        rep.emit(output, EXIT_OK if report.tight else EXIT_NEGATIVE)
    _run(go)


def _strategy_to_dict(s):
    def mat(m):
        return [[[float(v.real), float(v.imag)] for v in row] for row in m]
    return {"psi": mat(s.psi),
            "alice": [[mat(p) for p in setting] for setting in s.alice],
            "bob": [[mat(p) for p in setting] for setting in s.bob]}


@main.command("builtin")
@click.argument("name",
                type=click.Choice(["chsh", "magic_square", "pentagram"]))
@click.option("--dir", "outdir", type=click.Path(), default=".",
              help="Directory for the emitted files.")
@output_option
@threads_option
def cmd_builtin(name, outdir, output, threads):
    """Emit a builtin game with its quantum strategy and behavior."""
    def go():
        from . import quantum
        rep = Report(["builtin", name], [])
        os.makedirs(outdir, exist_ok=True)
        g = builtin_game(name)
        files = {}
        path = os.path.join(outdir, f"{name}_game.json")
        with open(path, "w") as fh:
            json.dump(game_to_dict(g), fh, indent=1)
            fh.write("\n")
        files["game"] = path
        if name == "magic_square":
            strat = quantum.magic_square_strategy()
        elif name == "pentagram":
            strat = quantum.pentagram_strategy()
        else:
            strat = None
        if strat is not None:
            p = quantum.behavior_from_strategy(strat)
            path = os.path.join(outdir, f"{name}_strategy.json")
            with open(path, "w") as fh:
                json.dump(_strategy_to_dict(strat), fh)
                fh.write("\n")
            files["strategy"] = path
            path = os.path.join(outdir, f"{name}_behavior.json")
            with open(path, "w") as fh:
                json.dump(behavior_to_dict(p), fh, indent=1)
                fh.write("\n")
            files["behavior"] = path
        rep.doc["results"] = {"files": files}
        rep.emit(output, EXIT_OK)
    _run(go)


def equivalence_report(p: Behavior) -> dict:
    """The four-verdict chain on one behavior.

    Face nonsignaling (no local part, face witness), full nonlocality,
    nonlocal zeros, and pseudotelepathy for the game losing on the zero
    cells.  For extreme behaviors the four verdicts agree.
    """
    try:
        pr = rationalize_behavior(p.to_float())
    except BellError:
        pr = p.to_rational()
    t = zeros_from_behavior(pr)
    avn = bool(t.cells) and is_lhv_realizable(t) is None

    g = game_from_zeros(t)
    gv = classical_value(g)
    omega_q = float(winning_probability(g, p.to_float()))
    pt = gv.omega_classical < 1 and omega_q >= 1 - 1e-9

    lc = local_content(pr)
    fns = lc.q_local_max == 0
    fn = lc.q_nonlocal_min == 1

    return {
        "fns": {"verdict": fns, "q_local_max": _num(lc.q_local_max),
                "face_witness_cells": len(t.cells) if fns else 0},
        "fn": {"verdict": fn, "q_nonlocal_min": _num(lc.q_nonlocal_min)},
        "avn": {"verdict": avn, "n_zeros": len(t.cells)},
        "pt": {"verdict": bool(pt),
               "omega_classical": _num(gv.omega_classical),
               "omega_quantum": omega_q},
        "all_equivalent": fns == fn == avn == pt,
        "extreme": bool(fns and fn and avn and pt),
    }


@main.command("verify-equivalence")
@click.argument("behavior", type=click.Path())
@output_option
@threads_option
def cmd_verify_equivalence(behavior, output, threads):
    """Run the four-verdict chain on a behavior."""
    def go():
        rep = Report(["verify-equivalence", behavior], [behavior])
        p = load_behavior(behavior)
        res = equivalence_report(p)
        rep.doc["results"] = res
        rep.emit(output, EXIT_OK if res["extreme"] else EXIT_NEGATIVE)
    _run(go)


if __name__ == "__main__":
    main()
