"""CLI surface: exit codes, file outputs, table round trips."""

import json

import pytest

from bpliveness.cli import main
from bpliveness.models.sokoban import load_board


@pytest.fixture
def unreal_board(tmp_path):
    path = tmp_path / "unreal.txt"
    path.write_text(load_board("unreal"))
    return str(path)


def test_explore_list(capsys):
    assert main(["explore", "--list"]) == 0
    out = capsys.readouterr().out
    assert "lc-classic" in out and "sokoban-warehouse" in out


def test_explore_writes_graph_files(tmp_path, capsys):
    jpath, dpath = tmp_path / "g.json", tmp_path / "g.dot"
    code = main(
        ["explore", "lc-requesters-2", "--json", str(jpath), "--dot", str(dpath)]
    )
    assert code == 0
    assert "states: 11  transitions: 14" in capsys.readouterr().out
    graph = json.loads(jpath.read_text())
    assert graph["schema"] == "bpliveness/lts/1"
    assert dpath.read_text().startswith("digraph")


def test_solve_exit_codes(unreal_board, capsys):
    assert main(["solve", "lc-requesters-2"]) == 0
    assert main(["solve", f"board:{unreal_board}"]) == 2
    assert "realizable: no" in capsys.readouterr().out


def test_verify_report(tmp_path, capsys):
    jpath = tmp_path / "report.json"
    assert main(["verify", "lc-classic", "--json", str(jpath)]) == 0
    assert "starvation witnesses: 7" in capsys.readouterr().out
    report = json.loads(jpath.read_text())
    assert report["schema"] == "bpliveness/report/1"
    assert len(report["witnesses"]) == 7


def test_run_random(capsys):
    assert main(["run", "sokoban-corridor", "--steps", "30"]) == 0
    assert "terminated: step-limit" in capsys.readouterr().out


def test_run_gba_on_unrealizable(unreal_board, capsys):
    assert main(["run", f"board:{unreal_board}", "--arbiter", "gba"]) == 2
    assert "unrealizable" in capsys.readouterr().err


def test_run_qstar_table_round_trip(tmp_path, capsys):
    table = tmp_path / "trap.qtable"
    args = ["run", "sokoban-trap", "--arbiter", "qstar", "--steps", "60", "--seed", "5"]
    assert main(args + ["--save-qtable", str(table)]) == 0
    first = capsys.readouterr().out
    assert main(args + ["--qtable", str(table)]) == 0
    second = capsys.readouterr().out
    # the loaded table drives the identical run
    assert [l for l in first.splitlines() if l.startswith("steps:")] == [
        l for l in second.splitlines() if l.startswith("steps:")
    ]
    header = json.loads(table.read_text().splitlines()[0])
    assert header["schema"] == "bpliveness/qtable/1"


def test_run_trace_jsonl(tmp_path):
    tpath = tmp_path / "run.jsonl"
    assert main(["run", "lc-classic", "--steps", "20", "--trace", str(tpath)]) == 0
    lines = [json.loads(l) for l in tpath.read_text().splitlines()]
    assert lines[0]["schema"] == "bpliveness/trace/1"
    assert lines[-1]["steps"] == 20


def test_run_board_with_liveness_mode(tmp_path, capsys):
    path = tmp_path / "b.txt"
    path.write_text(load_board("two_boxes"))
    assert main(["run", f"board:{path}:per_box", "--steps", "10"]) == 0
    assert "terminated:" in capsys.readouterr().out


def test_parameterized_crossing_models(capsys):
    assert main(["explore", "requesters:1,1,1"]) == 0
    assert "states: 4" in capsys.readouterr().out
    assert main(["explore", "crossing:3,3,2"]) == 0
    assert "states: 520" in capsys.readouterr().out
    assert main(["explore", "requesters:1,1,1,9"]) == 1


def test_patterns_check(capsys):
    code = main(["patterns-check", "--pattern", "existence", "--stem", "2", "--loop", "2"])
    assert code == 0
    assert "0 mismatches" in capsys.readouterr().out


def test_bench_csv(tmp_path):
    cpath = tmp_path / "bench.csv"
    assert main(["bench", "--models", "lc-requesters-2", "--csv", str(cpath)]) == 0
    rows = cpath.read_text().splitlines()
    assert rows[0] == "model,family,states,transitions,backend,explore_ms,gba_ms,mdp_ms"
    assert len(rows) >= 2  # one per available backend


def test_noise_exp_csv(tmp_path, capsys):
    cpath = tmp_path / "noise.csv"
    code = main(
        [
            "noise-exp",
            "--models",
            "sokoban-corridor",
            "--sigmas",
            "0,0.1",
            "--runs",
            "3",
            "--steps",
            "40",
            "--csv",
            str(cpath),
        ]
    )
    assert code == 0
    rows = cpath.read_text().splitlines()
    assert rows[0] == "model,sigma,runs,live"
    assert len(rows) == 3


def test_kernel_bench(capsys):
    assert main(["kernel-bench", "--models", "lc-requesters-2", "--sweeps", "20"]) == 0
    assert "scc" in capsys.readouterr().out


def test_usage_errors(capsys):
    assert main(["explore", "nonsense"]) == 1
    assert "unknown model" in capsys.readouterr().err
    assert main([]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["run"])  # missing model argument
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["run", "lc-classic", "--no-such-flag"])
    assert exc.value.code == 1
