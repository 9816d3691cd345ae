import json
import shutil
import subprocess
import sys

import pytest

from hyperstream.cli import main
from hyperstream.generators import grid_graph, powerlaw_hgr
from hyperstream.io import parse_hgr, parse_vstream, read_assignment, write_hgr, write_metis_graph


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    write_hgr(powerlaw_hgr(800, 800, seed=5), d / "p.hgr")
    write_metis_graph(grid_graph(8, 8), d / "g.graph")
    assert main(["convert", "--from", "hgr", "--to", "vstream", str(d / "p.hgr"), str(d / "p.vstream")]) == 0
    return d


@pytest.mark.parametrize("alg", ["freight", "hashing", "minmax-n2p"])
@pytest.mark.parametrize("obj", ["cutnet", "connectivity"])
def test_partition_is_byte_identical(files, alg, obj):
    outs = []
    for i, name in enumerate(["p.hgr", "p.vstream", "p.hgr"]):
        out = files / f"{alg}-{obj}-{i}.part"
        rc = main(["partition", str(files / name), "--algorithm", alg, "--k", "8", "--objective", obj,
                   "--seed", "3", "--output", str(out)])
        assert rc == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_partition_graph_and_metadata(files):
    out, meta = files / "g.part", files / "g.json"
    assert main(["partition", str(files / "g.graph"), "--k", "4", "--output", str(out),
                 "--metadata", str(meta)]) == 0
    assert len(read_assignment(out)) == 64
    info = json.loads(meta.read_text())
    assert info["k"] == 4 and info["params"]["l_max"] == 17


def test_evaluate_prints_csv(files, capsys):
    out = files / "e.part"
    main(["partition", str(files / "p.hgr"), "--k", "4", "--output", str(out)])
    capsys.readouterr()
    assert main(["evaluate", str(files / "p.hgr"), str(out), "--k", "4"]) == 0
    header, line = capsys.readouterr().out.strip().splitlines()
    assert header == "cutnet,connectivity,imbalance,max_load,l_max,balanced"
    assert line.endswith(",1")
    main(["partition", str(files / "g.graph"), "--k", "2", "--output", str(files / "g2.part")])
    capsys.readouterr()
    main(["evaluate", str(files / "g.graph"), str(files / "g2.part"), "--k", "2"])
    assert capsys.readouterr().out.startswith("edge_cut,imbalance,balanced\n")


def test_convert_round_trip(files):
    back = files / "back.hgr"
    assert main(["convert", "--from", "vstream", "--to", "hgr", str(files / "p.vstream"), str(back)]) == 0
    assert parse_hgr(back) == parse_hgr(files / "p.hgr")
    assert parse_vstream(files / "p.vstream").num_vertices == 800


def test_generate_is_deterministic(tmp_path):
    for name in ("a.hgr", "b.hgr"):
        assert main(["generate", "random-hgr", str(tmp_path / name), "--seed", "1",
                     "--param", "n=10", "--param", "m=5", "--param", "avg_pins=3"]) == 0
    assert (tmp_path / "a.hgr").read_bytes() == (tmp_path / "b.hgr").read_bytes()
    main(["generate", "grid-graph", str(tmp_path / "g.graph"), "--param", "rows=3", "--param", "cols=3"])
    assert (tmp_path / "g.graph").read_text().splitlines()[0] == "9 12"


def test_bench_and_profile(files, tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(f"instances = {files / 'p.hgr'}\nalgorithms = freight-con, hashing\nk = 2, 4\n"
                   "repetitions = 2\n")
    res = tmp_path / "res.csv"
    assert main(["bench", "--config", str(cfg), "--out", str(res)]) == 0
    assert "8 rows written" in capsys.readouterr().out
    prof = tmp_path / "prof.csv"
    assert main(["profile", str(res), "--metric", "connectivity", "--out", str(prof),
                 "--baseline", "hashing"]) == 0
    err = capsys.readouterr().err
    assert "k=2: freight-con=" in err
    lines = prof.read_text().splitlines()
    assert lines[0] == "algorithm,tau,fraction"
    assert any(ln.startswith("freight-con,1.0,1.0") for ln in lines)


def test_errors_exit_with_code_2(files, tmp_path, capsys):
    bad = tmp_path / "bad.hgr"
    bad.write_text("1 2\n1 3\n")
    assert main(["partition", str(bad), "--k", "2", "--output", str(tmp_path / "o")]) == 2
    assert "line 2: pin id 3 out of range [1,2]" in capsys.readouterr().err
    assert main(["evaluate", str(files / "p.hgr"), str(tmp_path / "nope"), "--k", "2"]) == 2
    with pytest.raises(SystemExit):
        main(["partition", str(files / "p.hgr")])


def test_console_script(files, tmp_path):
    exe = shutil.which("hyperstream")
    cmd = [exe] if exe else [sys.executable, "-m", "hyperstream"]
    out = tmp_path / "s.part"
    subprocess.run(cmd + ["partition", str(files / "p.hgr"), "--k", "4", "--output", str(out)], check=True)
    assert len(out.read_text().splitlines()) == 800
