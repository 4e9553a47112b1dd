from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from urysohn_forge.cli import VERBS, main


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main(list(argv))
        out = capsys.readouterr().out
        return code, out

    return _run


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


PATH = {"points": ["a", "b", "c"], "dist": [[1, 1], [2, 1], [1, 1]]}
BAD = {"points": ["a", "b", "c"], "dist": [[1, 1], [1, 1], [3, 1]]}
SWAP = {
    "group": {"variant": "cyclic", "order": 2},
    "space": {"points": ["a", "b"], "dist": [[1, 1]]},
    "gen_maps": {"1": [1, 0]},
}


def test_every_verb_is_registered():
    expected = (
        "validate katetov exvalues truncate amalgam sum saturate check-sat extend-iso uspenskii closure "
        "action-sum amalgamate globalize root conjugate solecki approx-action hnf lattice-member "
        "separate-lattice stallings product-member separate suite export-dot"
    ).split()
    assert sorted(VERBS) == sorted(expected)


def test_validate(run, tmp_path):
    code, out = run("validate", "--space", write(tmp_path, "s.json", PATH))
    assert code == 0 and json.loads(out)["ok"] is True
    code, out = run("validate", "--space", write(tmp_path, "b.json", BAD))
    err = json.loads(out)
    assert code == 2 and err["violation"] == {"axiom": "triangle", "witness": ["b", "a", "c"]}


def test_exit_codes(run, tmp_path):
    assert run("frobnicate")[0] == 64
    assert run("validate")[0] == 64
    bad = tmp_path / "m.json"
    bad.write_text("{nope")
    assert run("validate", "--space", str(bad))[0] == 65
    assert run("validate", "--space", write(tmp_path, "x.json", {"pts": []}))[0] == 65


def test_metric_verbs(run, tmp_path):
    s = write(tmp_path, "s.json", PATH)
    code, out = run("exvalues", "--space", s)
    assert json.loads(out) == {"values": [[0, 1], [1, 1], [2, 1]]}
    code, out = run("katetov", "--space", s, "--r", write(tmp_path, "r.json", {"a": 1}), "--id", "y")
    assert json.loads(out)["new"] == "y"
    code, out = run("truncate", "--space", s, "--subset", "a,b")
    assert json.loads(out)["dist"] == [[1, 1], [1, 1], [1, 1]]
    x = write(tmp_path, "x.json", {"points": ["b", "x"], "dist": [[1, 1]]})
    y = write(tmp_path, "y.json", {"points": ["b", "y"], "dist": [[2, 1]]})
    bb = write(tmp_path, "bb.json", {"points": ["b"], "dist": []})
    code, out = run("amalgam", "--x", x, "--y", y, "--b", bb)
    assert json.loads(out)["space"]["dist"][-1] == [3, 1]
    code, out = run("sum", "--x", x, "--y", y)
    assert code == 0 and json.loads(out)["embed_y"] == {"b": "b.1", "y": "y"}


def test_saturation_verbs(run, tmp_path):
    code, out = run("saturate", "--dset", "1..2", "--k", "2", "--seed", "3")
    level = json.loads(out)
    assert code == 0 and level["k"] == 2
    code, out = run("check-sat", "--space", write(tmp_path, "lvl.json", level["space"]), "--dset", "1..2", "--k", "2")
    assert json.loads(out)["ok"] is True
    p0 = level["space"]["points"][0]
    code, out = run(
        "extend-iso",
        "--level", write(tmp_path, "L.json", level),
        "--partial", write(tmp_path, "p.json", {p0: p0}),
        "--targets", level["space"]["points"][1],
    )
    assert code == 0 and len(json.loads(out)["map"]) == 2
    code, out = run("saturate", "--dset", "1..2", "--k", "3", "--cap", "5")
    assert code == 2 and json.loads(out)["error"] == "SaturationError"


def test_action_verbs(run, tmp_path):
    a = write(tmp_path, "a.json", SWAP)
    ext = write(tmp_path, "e.json", {"points": ["a", "b", "s"], "dist": [[1, 1], [1, 1], [2, 1]]})
    code, out = run("uspenskii", "--action", a, "--ext", ext)
    assert code == 0 and len(json.loads(out)["space"]["points"]) == 4
    code, out = run("closure", "--action", a, "--points", write(tmp_path, "n.json", [["s", {"a": 1}]]))
    assert code == 0
    code, out = run("action-sum", "--pi", a, "--sigma", a)
    assert len(json.loads(out)["action"]["space"]["points"]) == 4
    code, out = run("amalgamate", "--sigma", a, "--tau", a, "--pi", a)
    action = json.loads(out)["action"]
    assert action["space"] == SWAP["space"] and action["gen_maps"] == SWAP["gen_maps"]
    code, out = run("conjugate", "--action", a, "--other", a)
    assert json.loads(out)["conjugate"] is True
    z = dict(SWAP, group={"variant": "free_abelian", "rank": 1}, gen_maps={"a": [1, 0]})
    code, out = run("root", "--action", write(tmp_path, "z.json", z), "--m", "2")
    assert code == 0 and json.loads(out)["m"] == 2
    empty = {"group": {"variant": "cyclic", "order": 2}, "space": {"points": [], "dist": []}, "gen_maps": {"1": []}}
    code, out = run("globalize", "--pi", write(tmp_path, "pi.json", empty), "--sigma", a, "--cap", "2")
    assert code == 0 and json.loads(out)["iota"] == {"a": "a", "b": "b"}


def test_search_verbs(run, tmp_path):
    flip = write(tmp_path, "f.json", {"points": ["x", "y"], "dist": [[1, 1]]})
    path = write(tmp_path, "p.json", PATH)
    code, out = run("solecki", "--space", flip, "--partial", write(tmp_path, "q.json", {"x": "y"}))
    assert code == 0 and len(json.loads(out)["B"]["points"]) == 2
    code, out = run(
        "solecki", "--space", path, "--partial", write(tmp_path, "r.json", {"a": "b", "b": "c"}), "--max-points", "3"
    )
    report = json.loads(out)
    assert code == 3 and report["exhausted"] and report["complete"]
    code, out = run(
        "approx-action",
        "--space", flip,
        "--group", write(tmp_path, "g.json", {"variant": "free_abelian", "rank": 2}),
        "--constraint", write(tmp_path, "c.json", {"anchors": ["x"], "required": {"a": {"x": "y"}, "b": {"x": "x"}}}),
    )
    assert code == 0 and json.loads(out)["action"]["gen_maps"] == {"a": [1, 0], "b": [0, 1]}


def test_separability_verbs(run, tmp_path):
    L = write(tmp_path, "L.json", {"rank": 2, "basis": [[2, 0], [0, 2]]})
    assert json.loads(run("hnf", "--lattice", L)[1]) == {"hnf": [[2, 0], [0, 2]]}
    assert json.loads(run("lattice-member", "--lattice", L, "--vector", "2,4")[1]) == {"member": True}
    assert json.loads(run("separate-lattice", "--lattice", L, "--vector", "1,3")[1])["m"] == 2
    assert run("separate-lattice", "--lattice", L, "--vector", "2,2")[0] == 2
    code, out = run("stallings", "--gens", "a^2,b", "--member", "a^2 b")
    assert json.loads(out)["member"] is True
    assert json.loads(run("product-member", "--subgroups", "a;b", "--word", "ab")[1]) == {"member": True}
    assert json.loads(run("product-member", "--subgroups", "a;b", "--word", "ba")[1]) == {"member": False}
    code, out = run("separate", "--subgroups", "a;b", "--word", "ba")
    assert code == 0 and json.loads(out)["degree"] == 3
    code, out = run("separate", "--subgroups", "a^7", "--word", "a^6", "--max-degree", "2")
    assert code == 3
    assert run("separate", "--subgroups", "a;b", "--word", "ab")[0] == 2


def test_export_dot(run, tmp_path):
    code, out = run("export-dot", "--space", write(tmp_path, "s.json", PATH))
    assert out.startswith("graph") and '"a" -- "c" [label="2"]' in out
    code, out = run("export-dot", "--gens", "a^2,b")
    assert out.startswith("digraph")


def test_out_flag_and_determinism(run, tmp_path):
    target = tmp_path / "out.json"
    assert run("saturate", "--k", "2", "--out", str(target))[0] == 0
    first = target.read_bytes()
    run("saturate", "--k", "2", "--out", str(target))
    assert target.read_bytes() == first
    assert json.loads(first)["k"] == 2


def test_round_trip_is_canonical(run, tmp_path):
    code, out = run("uspenskii", "--action", write(tmp_path, "a.json", SWAP),
                    "--ext", write(tmp_path, "e.json", {"points": ["a", "b", "s"], "dist": [[1, 1], [1, 1], [2, 1]]}))
    data = json.loads(out)
    assert json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n" == out


def test_suite_verb(run):
    code, out = run("suite", "--name", "C9")
    data = json.loads(out)
    assert code == 0 and data["ok"] and data["results"][0]["name"] == "C9"
    assert run("suite", "--name", "nope")[0] == 64


@pytest.mark.skipif(shutil.which("forge") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["forge", "stallings", "--gens", "a^2,b", "--member", "a"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["member"] is False
