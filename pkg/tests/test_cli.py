import csv
import json

import pytest

from hubnet.cli import main
from hubnet.dataio import write_flows, write_sites
from hubnet.synth import generate

SMALL_GA = "population_size = 20\ngenerations = 15\nhub_count_min = 2\nhub_count_max = 4\n"


@pytest.fixture
def inst(tmp_path):
    sites, flows = generate(12, 3, 21, "peak")
    write_sites(tmp_path / "sites.csv", sites)
    write_flows(tmp_path / "flows.csv", flows)
    (tmp_path / "config.txt").write_text(SMALL_GA)
    return tmp_path


def args(d, *extra, out="out"):
    return ["--sites", str(d / "sites.csv"), "--flows", str(d / "flows.csv"),
            "--config", str(d / "config.txt"), "--out", str(d / out), *extra]


def load(path):
    return json.loads(path.read_text())


def test_solve_writes_reports(inst, capsys):
    assert main(["solve", *args(inst)]) == 0
    out = inst / "out"
    design = load(out / "design.json")
    assert design["solver"] == "ga" and 2 <= design["hub_count"] <= 4
    assert set(design["cost"]) >= {"total", "line_haul", "tat_penalty"}
    with open(out / "assignment.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    geo = load(out / "network.geojson")
    kinds = [f["properties"]["kind"] for f in geo["features"]]
    assert kinds.count("hub") == design["hub_count"]
    assert kinds.count("spoke") == 12 - design["hub_count"]
    assert "total=" in capsys.readouterr().out


def test_solve_is_byte_identical_across_runs_and_workers(inst):
    assert main(["solve", *args(inst, out="a")]) == 0
    assert main(["solve", *args(inst, "--workers", "3", out="b")]) == 0
    assert (inst / "a" / "design.json").read_bytes() == (inst / "b" / "design.json").read_bytes()


def test_evaluate_round_trips_solve(inst):
    main(["solve", *args(inst, out="s")])
    solved = load(inst / "s" / "design.json")
    hubs = ",".join(h["id"] for h in solved["open_hubs"])
    assert main(["evaluate", *args(inst, "--hubs", hubs, out="e")]) == 0
    assert load(inst / "e" / "design.json")["cost"] == solved["cost"]


def test_oracle_and_rationalize(inst):
    assert main(["oracle", *args(inst, out="o")]) == 0
    assert load(inst / "o" / "design.json")["solver"] == "oracle"
    assert main(["rationalize", *args(inst, "--design", str(inst / "o" / "design.json"), out="r")]) == 0
    plan = load(inst / "r" / "plan.json")
    assert plan["hub_count"] == len(plan["final_hubs"])
    assert {"substitutions", "hubs_to_open", "hubs_to_close", "breach_reduction_pct"} <= set(plan)


def test_sweep(inst, capsys):
    assert main(["sweep", *args(inst, "--scale-factors", "1,3", out="w")]) == 0
    with open(inst / "w" / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["milkrun_scale"] for r in rows] == ["1", "3"]
    assert "milkrun_breach_count" in capsys.readouterr().out


def test_generate(tmp_path):
    assert main(["generate", "--n-sites", "30", "--n-clusters", "3", "--seed", "4", "--out", str(tmp_path)]) == 0
    assert main(["evaluate", "--sites", str(tmp_path / "sites.csv"), "--flows", str(tmp_path / "flows.csv"),
                 "--config", str(tmp_path / "config.txt"), "--hubs", "S0000", "--out", str(tmp_path / "e")]) == 0


def test_exit_codes(inst, capsys):
    assert main(["evaluate", *args(inst, "--hubs", "NOPE", out="x")]) == 2
    (inst / "config.txt").write_text("bogus = 1\n")
    assert main(["solve", *args(inst, out="x")]) == 2
    (inst / "config.txt").write_text("hub_count_min = 2\nhub_count_max = 4\nmin_inter_hub_km = 100000\n")
    assert main(["oracle", *args(inst, out="x")]) == 3
    sites, flows = generate(25, 3, 0)
    write_sites(inst / "sites.csv", sites)
    write_flows(inst / "flows.csv", flows)
    (inst / "config.txt").write_text("")
    assert main(["oracle", *args(inst, out="x")]) == 4
    err = capsys.readouterr().err
    assert err.count("error:") == 4
