import json
import subprocess
import sys
from pathlib import Path

import pytest

from gwlc.cli import run_command

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_binary_two_leaves(capsys):
    code, out, _ = run(capsys, "subtree-law", "--dist", "binary", "--ell", "2", "--mode", "exact-binary")
    assert code == 0
    assert out.splitlines() == [
        "ell,t,mass_num,mass_den,mass_float",
        "2,1,2,3,0.6666666666666666",
        "2,2,1,3,0.3333333333333333",
    ]


@pytest.mark.parametrize(
    "argv, golden",
    [
        (["subtree-law", "--dist", "binary", "--ell", "3", "--mode", "exact-binary"],
         "subtree_law_binary_3.csv"),
        (["leaf-law", "--dist", "p1demo", "--max-ell", "4"], "leaf_law_p1demo_4.csv"),
    ],
)
def test_golden_files(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out == (GOLDEN / golden).read_text()


def test_distribution_file(capsys, tmp_path):
    path = tmp_path / "binary.json"
    path.write_text('{"probs": [["1","2"],["0","1"],["1","2"]]}')
    code, out, _ = run(capsys, "subtree-law", "--dist", str(path), "--ell", "2", "--mode", "exact-binary")
    assert code == 0 and "2,1,2,3," in out


def test_exact_binary_refuses_other_laws(capsys):
    code, out, err = run(capsys, "subtree-law", "--dist", "p1demo", "--ell", "2", "--mode", "exact-binary")
    assert code == 2 and out == "" and err.count("\n") == 1


def test_plugin_oracle_ratio_json(capsys):
    for mode in ("plugin", "ratio", "oracle"):
        code, out, _ = run(capsys, "subtree-law", "--dist", "ternary", "--ell", "4", "--mode", mode,
                           "--format", "json")
        payload = json.loads(out)
        assert code == 0 and len(payload["rows"]) == 4
        assert payload["kind"] in ("plugin", "ratio", "oracle-enumeration")


def test_simulate_is_byte_identical(capsys, tmp_path):
    argv = ["simulate", "--dist", "p1demo", "--ell", "4", "--accepted", "500", "--seed", "12"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0 and first[1] == second[1]
    assert first[1].splitlines()[0] == "ell,t,point,stderr,accepted,trials,overflowed,seed"
    out = tmp_path / "mc.csv"
    assert run(capsys, *argv, "--out", str(out))[0] == 0
    assert out.read_text() == first[1]


def test_seed_from_environment(capsys, monkeypatch):
    argv = ["subtree-law", "--mode", "mc", "--dist", "binary", "--ell", "4", "--accepted", "200"]
    monkeypatch.setenv("GWLC_SEED", "31")
    env_run = run(capsys, *argv)[1]
    flag_run = run(capsys, *argv, "--seed", "31")[1]
    assert env_run == flag_run and env_run.splitlines()[1].endswith(",31")
    monkeypatch.setenv("GWLC_SEED", "x")
    assert run(capsys, *argv)[0] == 2


def test_enumerate_with_dump(capsys, tmp_path):
    dump = tmp_path / "trees.jsonl"
    code, out, err = run(capsys, "enumerate", "--dist", "binary", "--ell", "3", "--dump", str(dump))
    assert code == 0 and "residual=0" in err
    assert len(dump.read_text().splitlines()) == 2
    assert out.splitlines()[2] == "3,2,1,5,0.2"


def test_v_moments(capsys):
    code, out, _ = run(capsys, "v-moments", "--dist", "p1demo", "--ell", "1,100")
    rows = out.splitlines()
    assert code == 0 and rows[1].startswith("1,5,3,") and rows[2].startswith("100,995,3,")


def test_tail_trajectory(capsys):
    code, out, _ = run(capsys, "tail", "--dist", "p1demo", "--ell-grid", "100,1000,10000")
    rows = [r.split(",") for r in out.splitlines()]
    assert code == 0 and rows[0][-1] == "plugin_tail"
    assert [float(r[-1]) for r in rows[1:]] == pytest.approx([1.0, 1.0, 0.7])


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--dist", "p1demo", "--level", "quick")
    assert code == 0 and "FAIL" not in out and out.strip().endswith("checks passed")


def test_verify_failure_exit_code(capsys, monkeypatch):
    from gwlc import verify

    monkeypatch.setattr(verify, "CHECKS", [("always-fails", lambda d, cfg: (False, "forced"))])
    code, out, _ = run(capsys, "verify", "--dist", "binary")
    assert code == 1 and "FAIL always-fails: forced" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["leaf-law", "--dist", "binary"],
        ["leaf-law", "--dist", "binary", "--max-ell", "0"],
        ["leaf-law", "--dist", "nope", "--max-ell", "3"],
        ["tail", "--dist", "binary", "--ell-grid", "2"],
        ["tail", "--dist", "binary", "--ell-grid", "a,b"],
        ["simulate", "--dist", "binary", "--ell", "3", "--workers", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_not_critical_rejected(capsys, tmp_path):
    path = tmp_path / "sub.json"
    path.write_text('{"probs": [["1","2"],["1","2"]]}')
    assert run(capsys, "leaf-law", "--dist", str(path), "--max-ell", "3")[0] == 2
    code, _, err = run(capsys, "simulate", "--dist", str(path), "--ell", "1", "--accepted", "50")
    assert code == 0 and "subcritical" in err
    # no vertex has two children, so two leaves can never be accepted
    assert run(capsys, "simulate", "--dist", str(path), "--ell", "2", "--accepted", "50")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gwlc", "subtree-law", "--dist", "binary", "--ell", "1",
         "--mode", "exact-binary"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[1] == "1,1,1,1,1.0"
