import subprocess
import sys

import pytest

from graphssl.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def tiny(tmp_path):
    (tmp_path / "a.tsv").write_text("x\ty\t1\ny\tz\t1\n")
    (tmp_path / "b.tsv").write_text("x\tz\t1\nz\ty\t2\n")
    (tmp_path / "path.tsv").write_text("p\tq\t1\nq\tr\t1\n")
    (tmp_path / "pair.tsv").write_text("a\tb\t1.0\n")
    (tmp_path / "pair_labels.tsv").write_text("node\ttrain\tc\na\t1\t+1\nb\t0\t0\n")
    return tmp_path


@pytest.fixture
def synthetic(tmp_path, capsys):
    out = tmp_path / "syn"
    assert main(["gen-synthetic", "--out-dir", str(out), "-n", "60", "--clusters", "2",
                 "--retention", "0.5", "--seed", "1"]) == 0
    capsys.readouterr()
    return sorted(str(p) for p in out.glob("network_*.tsv")), str(out / "nodes.txt"), str(out / "annotations.tsv")


def parse_kv(text):
    return dict(line.split("\t") for line in text.strip().splitlines())


def test_integrate_rw_row_sums(tiny, capsys):
    code, out, _ = run(["integrate", str(tiny / "a.tsv"), str(tiny / "b.tsv"), "--method", "rw"], capsys)
    stats = parse_kv(out)
    assert code == 0
    assert (stats["n"], stats["m"], stats["symmetric"]) == ("3", "2", "false")
    assert abs(float(stats["row_sum_min"]) - 1) <= 1e-12
    assert abs(float(stats["row_sum_max"]) - 1) <= 1e-12


def test_integrate_sym_symmetric(tiny, capsys):
    code, out, _ = run(["integrate", str(tiny / "path.tsv"), "--method", "sym"], capsys)
    assert code == 0 and parse_kv(out)["symmetric"] == "true"


def test_integrate_missing_file(tiny, capsys):
    code, _, err = run(["integrate", str(tiny / "nope.tsv")], capsys)
    assert code == 1 and "nope.tsv" in err


def test_integrate_bad_line(tiny, capsys):
    (tiny / "bad.tsv").write_text("x\ty\t1\nx\tx\t1\n")
    code, _, err = run(["integrate", str(tiny / "bad.tsv")], capsys)
    assert code == 1 and "bad.tsv:2" in err


@pytest.mark.parametrize("method,extra", [("rw", ["--alpha", "0.5"]), ("sym", ["--alpha", "0.5"]),
                                          ("unnorm", ["--gamma", "1"]), ("sym-reg", ["--gamma", "1"])])
def test_predict_two_node(tiny, capsys, method, extra):
    code, out, _ = run(["predict", str(tiny / "pair.tsv"), "--labels", str(tiny / "pair_labels.tsv"),
                        "--method", method] + extra, capsys)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines() if not line.startswith("#")]
    assert rows[0] == ["node", "class", "score", "prediction"]
    assert rows[1:] == [["a", "c", "0.6667", "+1"], ["b", "c", "0.3333", "+1"]]


def test_predict_iterative_flag(tiny, capsys):
    code, out, _ = run(["predict", str(tiny / "pair.tsv"), "--labels", str(tiny / "pair_labels.tsv"),
                        "--method", "rw", "--alpha", "0.5", "--iterative"], capsys)
    assert code == 0 and "b\tc\t0.3333\t+1" in out


def test_predict_all_labeled_clamped(synthetic, capsys):
    nets, nodes, ann = synthetic
    code, out, _ = run(["predict", *nets, "--nodes", nodes, "--labels", ann, "--method", "rw-clamped"],
                       capsys)
    assert code == 0
    truth = {}
    with open(ann) as fh:
        header = fh.readline().rstrip("\n").split("\t")
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            for cls, v in zip(header[1:], parts[1:]):
                truth[parts[0], cls] = int(v)
    rows = [line.split("\t") for line in out.splitlines() if not line.startswith("#")][1:]
    assert len(rows) == len(truth)
    assert all(int(p) == truth[node, cls] for node, cls, _, p in rows)


def test_predict_unknown_method(tiny, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["predict", str(tiny / "pair.tsv"), "--labels", str(tiny / "pair_labels.tsv"),
              "--method", "foo"])
    assert exc.value.code == 2


def test_predict_bad_alpha_is_usage_error(tiny):
    with pytest.raises(SystemExit) as exc:
        main(["predict", str(tiny / "pair.tsv"), "--labels", str(tiny / "pair_labels.tsv"),
              "--alpha", "1.0"])
    assert exc.value.code == 2


def test_evaluate_all_methods(synthetic, capsys, tmp_path):
    nets, nodes, ann = synthetic
    out_file = tmp_path / "report.tsv"
    code, _, _ = run(["evaluate", *nets, "--nodes", nodes, "--annotations", ann, "--all-methods",
                      "-o", str(out_file)], capsys)
    assert code == 0
    lines = [ln for ln in out_file.read_text().splitlines() if not ln.startswith("#")]
    assert lines[0] == "class\tnormalized\trandom_walk\tunnormalized"
    for line in lines[1:]:
        qs = [float(x) for x in line.split("\t")[1:]]
        assert len(qs) == 3 and min(qs) >= 90.0


def test_evaluate_single_method_report(synthetic, capsys):
    nets, nodes, ann = synthetic
    code, out, _ = run(["evaluate", *nets, "--nodes", nodes, "--annotations", ann, "--method", "unnorm",
                        "--each-network"], capsys)
    assert code == 0
    assert out.count("class\ttp\ttn\tfp\tfn\tQ_percent") == 1 + len(nets)


def test_evaluate_header_lists_config(synthetic, capsys):
    nets, nodes, ann = synthetic
    _, out, _ = run(["evaluate", *nets, "--nodes", nodes, "--annotations", ann, "--seed", "7"], capsys)
    header = [ln for ln in out.splitlines() if ln.startswith("# ")]
    keys = {ln[2:].split(" = ")[0] for ln in header if " = " in ln}
    assert {"method", "alpha", "gamma", "tol", "max_iter", "folds", "seed", "sigma",
            "kernel_exponent", "affinity_floor", "networks", "annotations"} <= keys
    assert "# seed = 7" in header


def test_evaluate_folds_one_is_usage_error(synthetic):
    nets, nodes, ann = synthetic
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", *nets, "--nodes", nodes, "--annotations", ann, "--folds", "1"])
    assert exc.value.code == 2


def test_evaluate_deterministic_bytes(synthetic, capsys, tmp_path):
    nets, nodes, ann = synthetic
    outs = []
    for name in ("r1.tsv", "r2.tsv"):
        p = tmp_path / name
        assert main(["evaluate", *nets, "--nodes", nodes, "--annotations", ann, "--all-methods",
                     "--seed", "3", "-o", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_config_file_precedence(synthetic, capsys, tmp_path):
    nets, nodes, ann = synthetic
    cfg = tmp_path / "run.toml"
    cfg.write_text('method = "rw"\nalpha = 0.6\nseed = 5\n')
    _, out, _ = run(["evaluate", *nets, "--nodes", nodes, "--annotations", ann,
                     "--config", str(cfg), "--seed", "9"], capsys)
    assert "# method = rw" in out and "# alpha = 0.6" in out and "# seed = 9" in out
    cfg.write_text("bogus = 1\n")
    with pytest.raises(SystemExit):
        main(["evaluate", *nets, "--annotations", ann, "--config", str(cfg)])


def test_features_become_affinity_network(tmp_path, capsys):
    (tmp_path / "feat.tsv").write_text("u\t0\t0\nv\t3\t4\nw\t0\t0\n")
    code, out, _ = run(["integrate", "--features", str(tmp_path / "feat.tsv"), "--method", "unnorm"],
                       capsys)
    stats = parse_kv(out)
    assert code == 0 and stats["n"] == "3" and stats["nnz"] == "9"


def test_module_entry_point_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "graphssl", "predict", "x.tsv", "--labels", "y",
                           "--method", "foo"], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "graphssl", "integrate", str(tmp_path / "none.tsv")],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "none.tsv" in proc.stderr
