"""End-to-end checks of the command line tool."""

import os
import subprocess

import pytest

CLI = os.environ.get("PATHGAMES_CLI")

pytestmark = pytest.mark.skipif(
    CLI is None or not os.path.exists(CLI or ""),
    reason="PATHGAMES_CLI not set",
)


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert proc.returncode == expect, (
        f"args={args} rc={proc.returncode}\nstdout={proc.stdout}\n"
        f"stderr={proc.stderr}"
    )
    return proc


def test_scenarios_lists_builtins():
    proc = run("scenarios")
    assert proc.stdout.split() == [
        "opposing", "parallel", "intersection2", "intersection3",
    ]


def test_plan_reports_minimum_time():
    proc = run("plan", "--scenario", "opposing", "--agent", "0",
               "--lambda", "1", "--horizon", "12")
    assert "T_goal=9" in proc.stdout


def test_usage_errors_are_exit_2():
    proc = run("plan", "--scenario", "nonsense", expect=2)
    assert proc.stderr.startswith("pathgames: error:")
    proc = run("plan", "--bogus-flag", expect=2)
    assert proc.stderr.startswith("pathgames: error: usage:")


def test_infeasible_setup_is_exit_3():
    proc = run("plan", "--scenario", "opposing", "--agent", "0",
               "--lambda", "0.5", "--obstacle", "12,50,3,3", expect=3)
    assert "pathgames: error: infeasible:" in proc.stderr


def test_limit_without_incumbent_is_exit_4():
    proc = run("plan", "--scenario", "opposing", "--agent", "0",
               "--lambda", "0.5", "--node-limit", "0", expect=4)
    assert "pathgames: error: solver-limit:" in proc.stderr


def test_missing_profile_is_exit_5():
    proc = run("simulate", "--scenario", "opposing",
               "--profile", "/nonexistent/x.profile", expect=5)
    assert "pathgames: error: io:" in proc.stderr


def test_pipeline_round_trip(tmp_path):
    profile = tmp_path / "eq.profile"
    svg = tmp_path / "eq.svg"
    run("equilibrium", "--scenario", "parallel", "--lambda", "0.5",
        "--horizon", "12", "--out", str(profile))
    assert profile.exists()
    proc = run("simulate", "--scenario", "parallel", "--lambda", "0.5",
               "--horizon", "12", "--profile", str(profile),
               "--trials", "300", "--seed", "9")
    assert "bound_holds=yes" in proc.stdout
    run("render", "--scenario", "parallel", "--profile", str(profile),
        "--out", str(svg))
    assert svg.read_text().startswith("<svg")
    proc = run("respond", "--scenario", "parallel", "--agent", "0",
               "--lambda", "0.5", "--horizon", "12",
               "--profile", str(profile))
    assert "agent 0:" in proc.stdout


def test_sweep_csv_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    scenario = tmp_path / "tiny.scn"
    base = run("plan", "--scenario", "parallel", "--agent", "0",
               "--lambda", "1")  # warm the binary path; no file output
    assert base.returncode == 0
    text = subprocess.run(
        [CLI, "scenarios"], capture_output=True, text=True
    )
    assert text.returncode == 0
    scenario.write_text(
        "format_version 1\n"
        "name tiny\n"
        "workspace 0 0 100 100\n"
        "horizon 12\n"
        "lambda_grid 0.5\n"
        "agent\n  start 10 70\n  goal 95 70\nend\n"
        "agent\n  start 10 35\n  goal 95 35\nend\n"
    )
    for path in (a, b):
        run("sweep", "--scenario", str(scenario), "--trials", "100",
            "--seed", "4", "--out", str(path))
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == ("scenario,lambda,mode,feedback_gain,agent_id,T_goal,G,J,"
                      "risk_bound,empirical_rate,rounds,solver_status")


def test_dump_lp(tmp_path):
    lp = tmp_path / "model.lp"
    run("plan", "--scenario", "opposing", "--agent", "0", "--lambda", "0.5",
        "--horizon", "12", "--obstacle", "50,47,6,6", "--dump-lp", str(lp))
    text = lp.read_text()
    assert "Minimize" in text and "Subject To" in text and "Binary" in text
