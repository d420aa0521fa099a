import json
from pathlib import Path

from twclab.cli import ExperimentConfig, main

BERN01 = {"kind": "iid", "q": 2, "pmf": [0.9, 0.1]}


def _write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _read_json(outdir, name):
    return json.loads((Path(outdir) / name).read_text())


def test_region_2twc(tmp_path):
    cfg = _write_config(tmp_path, {"kind": "2twc", "q": 2, "noise1": BERN01, "noise2": BERN01, "seed": 1})
    out = str(tmp_path / "out")
    assert main(["region", "--config", cfg, "--out", out]) == 0
    d = _read_json(out, "region.json")
    assert d["schema_version"] == 1
    assert abs(d["c1"] - 0.53101) < 1e-4
    assert (Path(out) / "region.csv").exists()


def test_region_delayed_pair(tmp_path):
    cfg = _write_config(tmp_path, {"kind": "2twc", "q": 2, "noise": {"kind": "delayed_copy"}, "seed": 1})
    out = str(tmp_path / "out")
    assert main(["region", "--config", cfg, "--out", out]) == 0
    d = _read_json(out, "region.json")
    assert d["c1"] == 0.0 and d["c2"] == 0.0


def test_region_madbc(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "kind": "madbc",
            "q": 2,
            "z1": [0.9, 0.1],
            "z2": [0.9, 0.1],
            "z3": BERN01,
            "lambda_points": 3,
            "starts": 2,
        },
    )
    out = str(tmp_path / "out")
    assert main(["region", "--config", cfg, "--seed", "4", "--out", out]) == 0
    d = _read_json(out, "region.json")
    assert abs(d["sum_rate"] - 0.53101) < 1e-4
    assert len(d["boundary"]) >= 2
    lines = (Path(out) / "boundary.csv").read_text().strip().splitlines()
    assert lines[0] == "r31,r32,lambda"
    assert len(lines) == len(d["boundary"]) + 1


def test_simulate_coupled(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "mode": "coupled_2twc",
            "trials": 2000,
            "q": 2,
            "n": 6,
            "noise1": BERN01,
            "noise2": BERN01,
            "code1": {"kind": "coset", "M": 4, "seed": 7},
            "code2": {"kind": "coset", "M": 4, "seed": 8},
        },
    )
    out = str(tmp_path / "out")
    assert main(["simulate", "--config", cfg, "--seed", "9", "--out", out]) == 0
    d = _read_json(out, "report.json")
    assert d["mismatch_count"] == 0
    assert d["trials"] == 2000


def test_simulate_negative_control(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "mode": "coupled_2twc",
            "trials": 2000,
            "negative_control": True,
            "q": 2,
            "n": 6,
            "noise1": BERN01,
            "noise2": BERN01,
            "code1": {"kind": "coset", "M": 4, "seed": 7},
            "code2": {"kind": "coset", "M": 4, "seed": 8},
        },
    )
    out = str(tmp_path / "out")
    assert main(["simulate", "--config", cfg, "--seed", "9", "--out", out]) == 0
    assert _read_json(out, "report.json")["mismatch_count"] > 0


def test_simulate_feedback_cancel(tmp_path):
    cfg = _write_config(tmp_path, {"mode": "feedback_cancel", "n": 32, "trials": 500, "seed": 2})
    out = str(tmp_path / "out")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    d = _read_json(out, "report.json")
    assert d["errors"] == {"w1_at_user2": 0, "w2_at_user1": 0}


def test_simulate_transcript_dump(tmp_path):
    cfg = _write_config(
        tmp_path,
        {"mode": "feedback_cancel", "n": 8, "trials": 50, "dump_transcripts": 3, "seed": 5},
    )
    out = str(tmp_path / "out")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    ts = _read_json(out, "transcripts.json")["transcripts"]
    assert len(ts) == 3
    for tr in ts:
        assert set(tr) >= {"x1", "x2", "y1", "y2", "z1", "z2", "messages", "reconstructions"}
        assert tr["reconstructions"]["what1"] == tr["messages"]["w1"]


def test_simulate_coupled_madbc(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "mode": "coupled_madbc",
            "trials": 1000,
            "q": 2,
            "n": 6,
            "z1": [0.9, 0.1],
            "z2": [0.9, 0.1],
            "z3": BERN01,
            "mac": {"M1": 4, "M2": 4, "seed": 5},
            "dbc": {"M31": 4, "M32": 2, "seed": 6},
        },
    )
    out = str(tmp_path / "out")
    assert main(["simulate", "--config", cfg, "--seed", "1", "--out", out]) == 0
    assert _read_json(out, "report.json")["mismatch_count"] == 0


def test_search_command(tmp_path):
    cfg = _write_config(tmp_path, {"n": 2, "M1": 4, "M2": 1, "noise": {"kind": "delayed_copy"}})
    out = str(tmp_path / "out")
    assert main(["search", "--config", cfg, "--seed", "1", "--out", out]) == 0
    d = _read_json(out, "search.json")
    assert d["best_adaptive_error"] == 0.0
    assert d["best_adaptive_error"] < d["best_nonadaptive_error"]
    assert d["witness_adaptive"] is not None


def test_search_cap_exit_code(tmp_path):
    cfg = _write_config(tmp_path, {"n": 2, "M1": 12, "M2": 12, "noise1": BERN01, "noise2": BERN01})
    assert main(["search", "--config", cfg, "--seed", "1", "--out", str(tmp_path / "o")]) == 3


def test_sweep_command(tmp_path):
    cfg = _write_config(
        tmp_path,
        {"q": 2, "noise": BERN01, "rates": [0.25], "n_list": [4, 8],
         "codebooks": 10, "trials_per_codebook": 20},
    )
    out = str(tmp_path / "out")
    assert main(["sweep", "--config", cfg, "--seed", "2", "--out", out]) == 0
    d = _read_json(out, "sweep.json")
    assert len(d["rows"]) == 2
    lines = (Path(out) / "sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 3


def test_config_errors_exit_2(tmp_path):
    assert main(["region", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2

    bad = tmp_path / "bad.json"
    bad.write_text("{\n  broken\n}")
    assert main(["region", "--config", str(bad), "--out", str(tmp_path)]) == 2

    cfg = _write_config(tmp_path, {"kind": "2twc", "q": 2, "noise1": BERN01, "noise2": BERN01})
    assert main(["region", "--config", cfg, "--out", str(tmp_path)]) == 2  # no seed anywhere

    cfg = _write_config(tmp_path, {"kind": "2twc", "q": 3, "noise1": BERN01, "noise2": BERN01, "seed": 1})
    assert main(["region", "--config", cfg, "--out", str(tmp_path)]) == 2  # q mismatch

    cfg = _write_config(tmp_path, {"mode": "warp", "trials": 10, "seed": 1})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_format_flag(tmp_path):
    cfg = _write_config(tmp_path, {"kind": "2twc", "q": 2, "noise1": BERN01, "noise2": BERN01, "seed": 1})
    out_json = str(tmp_path / "oj")
    assert main(["region", "--config", cfg, "--out", out_json, "--format", "json"]) == 0
    assert (Path(out_json) / "region.json").exists()
    assert not (Path(out_json) / "region.csv").exists()
    out_csv = str(tmp_path / "oc")
    assert main(["region", "--config", cfg, "--out", out_csv, "--format", "csv"]) == 0
    assert not (Path(out_csv) / "region.json").exists()
    assert (Path(out_csv) / "region.csv").exists()


def test_byte_identical_reruns(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "mode": "coupled_2twc",
            "trials": 1500,
            "q": 2,
            "n": 6,
            "noise1": BERN01,
            "noise2": BERN01,
            "code1": {"kind": "coset", "M": 4, "seed": 7},
            "code2": {"kind": "coset", "M": 4, "seed": 8},
        },
    )
    outs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        assert main(["simulate", "--config", cfg, "--seed", "3", "--out", out]) == 0
        outs.append(out)
    for fname in ("report.json", "report.csv"):
        assert (Path(outs[0]) / fname).read_bytes() == (Path(outs[1]) / fname).read_bytes()


def test_parallel_flag_does_not_change_output(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "mode": "coupled_2twc",
            "trials": 3000,
            "q": 2,
            "n": 6,
            "noise1": BERN01,
            "noise2": BERN01,
            "code1": {"kind": "coset", "M": 4, "seed": 7},
            "code2": {"kind": "coset", "M": 4, "seed": 8},
        },
    )
    out1 = str(tmp_path / "p1")
    out4 = str(tmp_path / "p4")
    assert main(["simulate", "--config", cfg, "--seed", "3", "--out", out1, "--parallel", "1"]) == 0
    assert main(["simulate", "--config", cfg, "--seed", "3", "--out", out4, "--parallel", "4"]) == 0
    assert (Path(out1) / "report.json").read_bytes() == (Path(out4) / "report.json").read_bytes()


def test_experiment_config_round_trip():
    cfg = ExperimentConfig(
        command="region",
        payload={"kind": "2twc", "q": 2},
        seed=42,
        out="out",
        fmt="both",
        parallel=2,
    )
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
