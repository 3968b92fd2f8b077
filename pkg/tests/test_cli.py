import csv
import glob
import json
import os

import yaml

from treecolor.cli import main

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def write_cfg(tmp_path, doc, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def test_gap_command(tmp_path):
    cfg = write_cfg(tmp_path, {
        "command": "gap",
        "tree": {"shape": "path", "n_edges": 1},
        "q": 3, "lists": "uniform", "kind": "HEATBATH_GLAUBER",
    })
    out = str(tmp_path / "out")
    assert main(["gap", "--config", cfg, "--out", out]) == 0
    doc = json.load(open(os.path.join(out, "gap.json")))
    assert abs(doc["t_rel"] - 1.0) < 1e-9
    assert doc["t_mix_quarter"] == 1
    assert "tree_hash" in doc and "config" in doc


def test_config_errors(tmp_path):
    cfg = write_cfg(tmp_path, {"tree": {"shape": "mystery"}, "q": 3})
    assert main(["gap", "--config", cfg]) == 2

    cfg2 = write_cfg(tmp_path, {"tree": {"shape": "path", "n_edges": 2},
                                "q": 3, "bogus_field": 1}, "c2.yaml")
    assert main(["gap", "--config", cfg2]) == 2

    cfg3 = write_cfg(tmp_path, {"command": "count",
                                "tree": {"shape": "path", "n_edges": 2},
                                "q": 3}, "c3.yaml")
    assert main(["gap", "--config", cfg3]) == 2  # declared command mismatch

    assert main(["gap", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert main(["gap", "--config", cfg3, "--jobs", "0"]) == 2


def test_capacity_error_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, {
        "tree": {"shape": "complete_regular", "delta": 3, "depth": 2},
        "q": 5, "lists": "uniform",
        "caps": {"sparse": 100},
    })
    assert main(["gap", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_lowerbound_strict_exit_code(tmp_path):
    tree_file = tmp_path / "dstar.txt"
    tree_file.write_text("6 0\n1 0\n2 0\n3 0\n4 1\n5 1\n")
    cfg = write_cfg(tmp_path, {
        "tree": {"shape": "file", "file": str(tree_file)},
        "q": 5, "edge": 0, "strict": True,
    })
    out = str(tmp_path / "out")
    # the closed-form probability disagrees with enumeration -> exit 4
    assert main(["lowerbound", "--config", cfg, "--out", out]) == 4
    doc = json.load(open(os.path.join(out, "lowerbound.json")))
    assert "verification_error" in doc

    cfg_ok = write_cfg(tmp_path, {
        "tree": {"shape": "file", "file": str(tree_file)},
        "q": 5, "edge": 0, "strict": False,
    }, "ok.yaml")
    assert main(["lowerbound", "--config", cfg_ok, "--out", out]) == 0


def test_tensorize_with_root_certificate(tmp_path):
    cfg = write_cfg(tmp_path, {
        "command": "tensorize",
        "tree": {"shape": "hanging_root", "delta": 2, "depth": 1},
        "q": 4, "lists": "star_root",
        "alpha": [22.0, 12.0],
    })
    out = str(tmp_path / "out")
    assert main(["tensorize", "--config", cfg, "--out", out]) == 0
    doc = json.load(open(os.path.join(out, "tensorize.json")))
    assert doc["root_tensorization"]["verdict"] == "pass"

    cfg_bad = write_cfg(tmp_path, {
        "command": "tensorize",
        "tree": {"shape": "hanging_root", "delta": 2, "depth": 1},
        "q": 4, "lists": "star_root",
        "alpha": [0.0, 0.0],
    }, "bad.yaml")
    assert main(["tensorize", "--config", cfg_bad, "--out", out]) == 4


def test_sweep_outputs_increasing_ratio(tmp_path):
    cfg = write_cfg(tmp_path, {
        "tree": {"shape": "path", "n_edges": 4},
        "q": 3, "lists": "uniform", "kind": "HEATBATH_GLAUBER",
        "sweep": {"param": "n_edges", "values": [4, 6], "command": "gap"},
    })
    out = str(tmp_path / "out")
    assert main(["sweep", "--config", cfg, "--out", out]) == 0
    with open(os.path.join(out, "sweep.csv")) as fh:
        rows = list(csv.DictReader(fh))
    ratios = [float(r["t_rel_per_edge"]) for r in rows]
    assert ratios[0] < ratios[1]


def test_installed_entry_point(tmp_path):
    import subprocess
    import sys

    cfg = write_cfg(tmp_path, {
        "command": "count",
        "tree": {"shape": "path", "n_edges": 5},
        "q": 3, "lists": "uniform",
    })
    proc = subprocess.run(
        [sys.executable, "-m", "treecolor.cli", "count", "--config", cfg,
         "--out", str(tmp_path / "o")],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "48" in proc.stdout


def test_bundled_acceptance_configs_run_clean(tmp_path):
    configs = sorted(glob.glob(os.path.join(REPO, "configs", "acceptance", "*.yaml")))
    assert len(configs) >= 10
    os.chdir(REPO)  # the lowerbound config points at a repo-relative tree file
    for path in configs:
        doc = yaml.safe_load(open(path))
        command = doc["command"]
        out = str(tmp_path / os.path.basename(path).replace(".yaml", ""))
        code = main([command, "--config", path, "--out", out])
        assert code == 0, f"{path} exited {code}"
