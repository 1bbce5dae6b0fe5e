"""CLI workflow against the in-process service."""

import pytest
from click.testing import CliRunner

from rangelab.bench import AGGREGATE_HEADER, BUILD_STATS_HEADER, TUNE_HEADER
from rangelab.cli import cli


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args))


def gen_dataset(runner, path, n=3000, seed=5, fmt="binary"):
    res = invoke(runner, "generate", "--out", str(path), "--n", str(n),
                 "--seed", str(seed), "--format", fmt)
    assert res.exit_code == 0, res.output
    return res


def gen_workload(runner, ds_path, wl_path, selectivity="1e-3", count=15, seed=6):
    res = invoke(runner, "generate", "--workload", "skewed",
                 "--dataset", str(ds_path), "--out", str(wl_path),
                 "--selectivity", selectivity, "--count", str(count),
                 "--seed", str(seed))
    assert res.exit_code == 0, res.output
    return res


def test_generate_dataset_deterministic(runner, tmp_path):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    gen_dataset(runner, a)
    gen_dataset(runner, b)
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_bytes()) == 8 + 16 * 3000


def test_generate_dataset_csv(runner, tmp_path):
    p = tmp_path / "pts.csv"
    res = gen_dataset(runner, p, n=200, fmt="csv")
    assert "wrote 200 clusters points" in res.output
    assert p.read_text().startswith("# points=200")


def test_generate_workload_deterministic(runner, tmp_path):
    ds = tmp_path / "d.bin"
    gen_dataset(runner, ds)
    w1 = tmp_path / "w1.csv"
    w2 = tmp_path / "w2.csv"
    gen_workload(runner, ds, w1)
    gen_workload(runner, ds, w2)
    assert w1.read_bytes() == w2.read_bytes()
    head = w1.read_text().splitlines()[0]
    assert head == "# selectivity=0.001 kind=skewed seed=6"


def test_workload_requires_dataset(runner, tmp_path):
    res = invoke(runner, "generate", "--workload", "skewed",
                 "--out", str(tmp_path / "w.csv"))
    assert res.exit_code == 1


def test_run_produces_aggregate_csv(runner, tmp_path):
    ds = tmp_path / "d.bin"
    wl = tmp_path / "w.csv"
    gen_dataset(runner, ds)
    gen_workload(runner, ds, wl)
    out = tmp_path / "agg.csv"
    pq = tmp_path / "pq.csv"
    res = invoke(runner, "run", "--dataset", str(ds), "--workload", str(wl),
                 "--index", "fixed", "--index", "quadtree", "--param", "32",
                 "--param", "64", "--reps", "1", "--warmup", "0",
                 "--out", str(out), "--per-query", str(pq))
    assert res.exit_code == 0, res.output
    lines = out.read_text().splitlines()
    assert lines[0] == AGGREGATE_HEADER
    assert len(lines) == 5  # 2 kinds x 2 modes
    checksums = {ln.rsplit(",", 1)[1] for ln in lines[1:]}
    assert len(checksums) == 1
    assert pq.read_text().splitlines()[0].startswith("index,mode,param,rep")


def test_run_param_arity_checked(runner, tmp_path):
    ds = tmp_path / "d.bin"
    wl = tmp_path / "w.csv"
    gen_dataset(runner, ds)
    gen_workload(runner, ds, wl)
    res = invoke(runner, "run", "--dataset", str(ds), "--workload", str(wl),
                 "--index", "fixed", "--param", "8", "--param", "16",
                 "--param", "32")
    assert res.exit_code == 1


def test_tune_reports_best(runner, tmp_path):
    ds = tmp_path / "d.bin"
    wl = tmp_path / "w.csv"
    gen_dataset(runner, ds)
    gen_workload(runner, ds, wl)
    out = tmp_path / "tune.csv"
    res = invoke(runner, "tune", "--dataset", str(ds), "--workload", str(wl),
                 "--index", "fixed", "--sweep", "16:64", "--reps", "1",
                 "--warmup", "0", "--out", str(out))
    assert res.exit_code == 0, res.output
    lines = out.read_text().splitlines()
    assert lines[0] == TUNE_HEADER
    assert len(lines) == 4
    assert sum(ln.endswith(",1") for ln in lines[1:]) == 1
    assert "best param for fixed (binary):" in res.output


def test_tune_rejects_bad_sweep(runner, tmp_path):
    ds = tmp_path / "d.bin"
    wl = tmp_path / "w.csv"
    gen_dataset(runner, ds)
    gen_workload(runner, ds, wl)
    res = invoke(runner, "tune", "--dataset", str(ds), "--workload", str(wl),
                 "--index", "fixed", "--sweep", "16-64")
    assert res.exit_code == 1


def test_build_stats_csv(runner, tmp_path):
    ds = tmp_path / "d.bin"
    gen_dataset(runner, ds)
    out = tmp_path / "builds.csv"
    res = invoke(runner, "build-stats", "--dataset", str(ds),
                 "--index", "str", "--index", "adaptive", "--reps", "1",
                 "--out", str(out))
    assert res.exit_code == 0, res.output
    lines = out.read_text().splitlines()
    assert lines[0] == BUILD_STATS_HEADER
    assert len(lines) == 3


def test_missing_dataset_file_exits_2(runner, tmp_path):
    res = invoke(runner, "run", "--dataset", str(tmp_path / "nope.bin"),
                 "--workload", str(tmp_path / "nope.csv"), "--index", "fixed")
    assert res.exit_code == 2


def test_corrupt_workload_exits_2(runner, tmp_path):
    ds = tmp_path / "d.bin"
    gen_dataset(runner, ds)
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,workload\n")
    res = invoke(runner, "run", "--dataset", str(ds), "--workload", str(bad),
                 "--index", "fixed")
    assert res.exit_code == 2


def test_unknown_option_exits_1(runner):
    res = invoke(runner, "run", "--frobnicate")
    assert res.exit_code == 1


def test_help_shows_subcommands(runner):
    res = invoke(runner, "--help")
    assert res.exit_code == 0
    for name in ("generate", "tune", "run", "build-stats", "serve"):
        assert name in res.output
