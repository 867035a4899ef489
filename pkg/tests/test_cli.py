import json
import subprocess
import sys

import numpy as np
import pytest

from lks import cli, textio
from lks.catalog import random_tree
from lks.errors import InvariantViolation
from lks.graphs import Graph, RootedTree


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


@pytest.fixture(scope="module")
def host_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("host") / "host.json"
    assert cli.main(["gen-host", "--N", "16", "--s", "100", "--density", "0.8", "--seed", "1",
                     "--out", str(path)]) == 0
    return path


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_gen_host_roundtrip(host_file):
    g, part = textio.read_host(host_file)
    assert g.n == 1600 and part.N == 16 and part.s == 100
    meta = json.loads(host_file.read_text())["meta"]
    assert meta["seed"] == 1 and len(meta["config_hash"]) == 16


def test_embed_success_and_determinism(host_file, tmp_path, capsys):
    T = random_tree(641, np.random.default_rng(0))
    tree = write(tmp_path, "t.txt", textio.format_tree(T))
    argv = ["embed", "--host", host_file, "--tree", tree, "--seed", "0"]
    code, first = run(argv, capsys)
    assert code == 0 and first["certificate"]["verdict"] == "pass"
    code, again = run(argv, capsys)
    assert code == 0 and again["embedding"]["phi"] == first["embedding"]["phi"]
    phi = write(tmp_path, "phi.json", json.dumps(first["embedding"]["phi"]))
    g, _ = textio.read_host(host_file)
    code, out = run(["verify", "--pattern", tree, "--host", host_file, "--phi", phi], capsys)
    assert code == 0 and out["certificate"]["verdict"] == "pass"
    assert all(g.has_edge(first["embedding"]["phi"][u][1], first["embedding"]["phi"][v][1]) for u, v in T.edges())


def test_embed_infeasible_exit_1(host_file, tmp_path, capsys):
    tree = write(tmp_path, "t.txt", textio.format_tree(RootedTree.path(1201)))
    code, out = run(["embed", "--host", host_file, "--tree", tree], capsys)
    assert code == 1 and out["error"]["kind"] == "Infeasible"


def test_verify_rejects_bad_map(tmp_path, capsys):
    pattern = write(tmp_path, "p.txt", "3 0\n-1 0 1\n")
    host = write(tmp_path, "h.txt", textio.format_graph(Graph(3, [(0, 1)])))
    phi = write(tmp_path, "phi.json", "[0, 1, 2]")
    code, out = run(["verify", "--pattern", pattern, "--host", host, "--phi", phi], capsys)
    assert code == 1 and out["certificate"]["details"]["non_edges"] == [[1, 2]]


def test_input_errors_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.txt", "3 2\n0 1\n")
    assert cli.main(["decompose", "--tree", str(bad)]) == 2
    assert cli.main(["decompose", "--tree", str(tmp_path / "missing.txt")]) == 2
    phi = write(tmp_path, "phi.json", "{\"nothing\": 1}")
    good = write(tmp_path, "p.txt", "2 1\n0 1\n")
    assert cli.main(["verify", "--pattern", str(good), "--host", str(good), "--phi", str(phi)]) == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["batch"])
    assert e.value.code == 2
    capsys.readouterr()


def test_invariant_violation_exit_3(tmp_path, capsys, monkeypatch):
    def broken(*a, **k):
        raise InvariantViolation("decompose", "a stated invariant", where="test")

    monkeypatch.setattr(cli, "decompose", broken)
    tree = write(tmp_path, "t.txt", textio.format_tree(RootedTree.path(5)))
    code, out = run(["decompose", "--tree", tree], capsys)
    assert code == 3 and out["error"]["stage"] == "decompose"


def test_decompose(tmp_path, capsys):
    tree = write(tmp_path, "t.txt", textio.format_tree(RootedTree.path(11)))
    code, out = run(["decompose", "--tree", tree, "--beta", "3/10", "--switch"], capsys)
    assert code == 0 and not out["violated"] and not out["violated_switched"]


def test_ramsey_path3(tmp_path, capsys):
    p3 = write(tmp_path, "p3.txt", "3 0\n-1 0 1\n")
    code, out = run(["ramsey", "--t1", p3, "--t2", p3, "--nmax", 6], capsys)
    assert code == 0 and out["ramsey"]["r"] == 3 and out["ramsey"]["witness_n"] == 2


def test_lks_check(capsys):
    code, out = run(["lks-check", "--n", 5, "--exhaustive"], capsys)
    assert code == 0 and [r["k"] for r in out["reports"]] == [0, 1, 2, 3, 4]
    assert all(r["verdict"] == "pass" for r in out["reports"])


def test_structure_and_partition(host_file, tmp_path, capsys):
    code, out = run(["structure", "--host", host_file, "--k", 640], capsys)
    assert code == 0 and out["setup"]["case"] == 1
    tree = write(tmp_path, "t.txt", textio.format_tree(random_tree(641, np.random.default_rng(2))))
    code, out = run(["partition", "--host", host_file, "--tree", tree], capsys)
    assert code == 0 and out["case"] == 1 and out["partition"]["side_A"]


def test_batch_zero_trials_and_tsv(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", json.dumps([{"N": 16, "s": 100, "density": 0.8, "k": 640, "trials": 0}]))
    code, out = run(["batch", "--config", cfg], capsys)
    assert code == 0 and out["summary"][0]["rate"] is None and out["summary"][0]["ok"] == 0
    code, out = run(["batch", "--N", 16, "--s", 100, "--k", 640, "--trials", 3, "--seed", 1,
                     "--format", "tsv"], capsys)
    head, row = out.strip().split("\n")
    fields = dict(zip(head.split("\t"), row.split("\t")))
    assert code == 0 and fields["violation"] == "0" and int(fields["ok"]) + int(fields["infeasible"]) == 3


def test_console_script(tmp_path):
    p3 = write(tmp_path, "p3.txt", "3 0\n-1 0 1\n")
    res = subprocess.run([sys.executable, "-m", "lks.cli", "ramsey", "--t1", str(p3), "--t2", str(p3)],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["ramsey"]["r"] == 3
