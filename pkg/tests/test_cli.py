import json
import shutil

import pytest
from click.testing import CliRunner

from bellnl.cli import main
from bellnl.zeros import fixture_path


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    return result


def report_of(result):
    return json.loads(result.output)


def test_builtin_emits_game_strategy_behavior(runner, tmp_path):
    r = invoke(runner, ["builtin", "magic_square", "--dir", str(tmp_path)])
    assert r.exit_code == 0
    files = report_of(r)["results"]["files"]
    assert set(files) == {"game", "strategy", "behavior"}
    for p in files.values():
        json.load(open(p))


def test_classical_value_report_and_exit(runner, tmp_path):
    invoke(runner, ["builtin", "chsh", "--dir", str(tmp_path)])
    r = invoke(runner, ["classical-value",
                        str(tmp_path / "chsh_game.json"), "--with-ns"])
    assert r.exit_code == 0
    res = report_of(r)["results"]
    assert res["omega_classical"]["rational"] == "3/4"
    assert res["omega_classical"]["decimal"] == "0.75"
    assert res["n_optimal_strategies"] == 8
    assert res["omega_ns"]["rational"] == "1/1"


def test_report_is_deterministic_up_to_timing(runner, tmp_path):
    invoke(runner, ["builtin", "chsh", "--dir", str(tmp_path)])
    docs = []
    for _ in range(2):
        r = invoke(runner, ["classical-value",
                            str(tmp_path / "chsh_game.json")])
        d = report_of(r)
        d.pop("timing_seconds")
        docs.append(d)
    assert docs[0] == docs[1]
    assert "version" in docs[0] and "inputs" in docs[0]


def test_realizable_exit_codes(runner, tmp_path):
    hardy = tmp_path / "hardy.json"
    shutil.copy(fixture_path("hardy"), hardy)
    r = invoke(runner, ["realizable", str(hardy)])
    assert r.exit_code == 0
    assert report_of(r)["results"]["realizable"] is True

    cntz = tmp_path / "cntz.json"
    shutil.copy(fixture_path("cntz_3233"), cntz)
    r = invoke(runner, ["realizable", str(cntz)])
    assert r.exit_code == 2
    assert report_of(r)["results"]["realizable"] is False
    r = invoke(runner, ["critical", str(cntz)])
    assert r.exit_code == 0


def test_npa_feasible_exit_codes(runner, tmp_path):
    cntz = tmp_path / "cntz.json"
    shutil.copy(fixture_path("cntz_3233"), cntz)
    r = invoke(runner, ["npa-feasible", str(cntz)])
    assert r.exit_code == 2
    assert report_of(r)["results"]["verdict"] == "infeasible-with-margin"


def test_missing_file_exits_one(runner):
    r = invoke(runner, ["realizable", "no_such_file.json"])
    assert r.exit_code == 1


def test_lift_and_tightness(runner, tmp_path):
    invoke(runner, ["builtin", "chsh", "--dir", str(tmp_path)])
    game = str(tmp_path / "chsh_game.json")
    out = str(tmp_path / "lift2.json")
    r = invoke(runner, ["lift", game, "-n", "2", "--game-out", out])
    assert r.exit_code == 0
    assert json.load(open(out))["scenario"] == [4, 2, 4, 2]

    r = invoke(runner, ["tightness", game])
    assert r.exit_code == 0
    assert report_of(r)["results"]["tight"] is True
    r = invoke(runner, ["tightness", out])
    assert r.exit_code == 2
    res = report_of(r)["results"]
    assert res["rank"] == 23 and res["tight"] is False


def test_local_content_and_dual_expression(runner, tmp_path):
    invoke(runner, ["builtin", "magic_square", "--dir", str(tmp_path)])
    behavior = str(tmp_path / "magic_square_behavior.json")
    r = invoke(runner, ["local-content", behavior])
    assert r.exit_code == 0
    assert report_of(r)["results"]["q_local_max"]["rational"] == "0/1"
    r = invoke(runner, ["dual-expression", behavior])
    assert r.exit_code == 0
    assert "coefficients" in report_of(r)["results"]["expression"]


def test_verify_equivalence_exit_codes(runner, tmp_path):
    invoke(runner, ["builtin", "magic_square", "--dir", str(tmp_path)])
    behavior = str(tmp_path / "magic_square_behavior.json")
    r = invoke(runner, ["verify-equivalence", behavior])
    assert r.exit_code == 0
    res = report_of(r)["results"]
    assert res["extreme"] is True and res["all_equivalent"] is True


def test_cntz_enum_subcommand(runner, tmp_path):
    out = str(tmp_path / "classes.json")
    r = invoke(runner, ["cntz-enum", "2,2,2,2", "--output", out])
    assert r.exit_code == 0
    doc = json.load(open(out))
    assert doc["results"]["n_classes"] == 8


def test_output_flag_writes_file(runner, tmp_path):
    invoke(runner, ["builtin", "chsh", "--dir", str(tmp_path)])
    out = str(tmp_path / "report.json")
    r = invoke(runner, ["classical-value", str(tmp_path / "chsh_game.json"),
                        "--output", out])
    assert r.exit_code == 0
    assert r.output == ""
    assert json.load(open(out))["results"]["omega_classical"]["rational"] \
        == "3/4"
