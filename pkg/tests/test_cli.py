import csv
import io
import json

import pytest

from lsgan_lab.cli import main
from lsgan_lab.config import lsgan_toy_config

TINY = dict(g_hidden=[8], d_hidden=[8], batch_size=16, latent_dim=4, total_g_steps=4,
            snapshot_every=2, eval_samples=64)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(lsgan_toy_config(**TINY).to_json())
    return p


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestTrain:
    def test_outputs(self, capsys, tmp_path, cfg_path):
        code, out, _ = run(capsys, "train", cfg_path, tmp_path / "run", "--resolution", 16)
        assert code == 0 and "modes_covered" in out
        for name in ("steps.csv", "run.json", "checkpoint_final.json", "kde.csv", "kde.ppm",
                     "snapshots/step_0000004.json"):
            assert (tmp_path / "run" / name).exists()
        assert (tmp_path / "run" / "kde.ppm").read_bytes().startswith(b"P6\n16 16\n")

    def test_repeatable(self, capsys, tmp_path, cfg_path):
        run(capsys, "train", cfg_path, tmp_path / "a")
        run(capsys, "train", cfg_path, tmp_path / "b")
        assert (tmp_path / "a/steps.csv").read_bytes() == (tmp_path / "b/steps.csv").read_bytes()

    def test_refuses_overwrite(self, capsys, tmp_path, cfg_path):
        assert run(capsys, "train", cfg_path, tmp_path / "a")[0] == 0
        code, _, err = run(capsys, "train", cfg_path, tmp_path / "a")
        assert code == 2 and "--force" in err
        assert run(capsys, "train", cfg_path, tmp_path / "a", "--force")[0] == 0

    def test_resume(self, capsys, tmp_path, cfg_path):
        run(capsys, "train", cfg_path, tmp_path / "full")
        half = dict(lsgan_toy_config(**TINY).to_dict(), total_g_steps=2)
        (tmp_path / "half.json").write_text(json.dumps(half))
        run(capsys, "train", tmp_path / "half.json", tmp_path / "half")
        code, _, _ = run(capsys, "train", cfg_path, tmp_path / "rest",
                         "--resume", tmp_path / "half/checkpoint_final.json")
        assert code == 0
        assert ((tmp_path / "full/checkpoint_final.json").read_bytes()
                == (tmp_path / "rest/checkpoint_final.json").read_bytes())

    def test_negative_batch_size(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(dict(lsgan_toy_config().to_dict(), batch_size=-3)))
        code, _, err = run(capsys, "train", p, tmp_path / "out")
        assert code == 2 and "batch_size" in err

    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert run(capsys, "train", p, tmp_path / "out")[0] == 2

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "train", tmp_path / "nope.json", tmp_path / "out")[0] == 2


class TestDivergenceCheck:
    def test_defaults_pass(self, capsys):
        code, out, _ = run(capsys, "divergence-check")
        table = rows(out)
        assert code == 0 and table[0] == ["pair", "K", "two_c_g", "chi2", "abs_diff"]
        assert len(table) == 101

    def test_zero_one_scheme_fails(self, capsys):
        code, _, err = run(capsys, "divergence-check", "--scheme", 0, 1, 1)
        assert code == 1 and "FAIL" in err

    def test_support_size_one(self, capsys):
        code, out, _ = run(capsys, "divergence-check", "--support-size", 1, "--num-pairs", 5)
        assert code == 0
        assert all(float(r[3]) == 0.0 for r in rows(out)[1:])


class TestProbe:
    def test_columns(self, capsys):
        code, out, _ = run(capsys, "probe")
        table = rows(out)
        assert code == 0 and table[0] == ["distance", "sigmoid_ce", "least_squares"]
        ce = [float(r[1]) for r in table[1:]]
        ls = [float(r[2]) for r in table[1:]]
        assert all(a > b for a, b in zip(ce, ce[1:]))
        assert ls[1] == 0.0 and ls[10] == 9.0

    def test_single_family(self, capsys):
        code, out, _ = run(capsys, "probe", "--family", "least_squares", "--distances", 2, 3)
        assert code == 0 and rows(out) == [["distance", "least_squares"], ["2.0", "1.0"], ["3.0", "2.0"]]


class TestCompare:
    def test_identical_configs(self, capsys, cfg_path):
        code, out, _ = run(capsys, "compare", "--lsgan-config", cfg_path, "--gan-config", cfg_path,
                           "--seeds", 1, 2)
        table = rows(out)
        assert code == 0 and len(table) == 1 + 4 + 2
        assert table[-1][2] == table[-2][2]

    def test_single_seed_median(self, capsys, cfg_path):
        _, out, _ = run(capsys, "compare", "--lsgan-config", cfg_path, "--gan-config", cfg_path,
                        "--seeds", 3)
        table = rows(out)
        assert table[1][2:] == table[3][2:]


class TestEmitAndRender:
    def test_emit_stdout(self, capsys):
        code, out, _ = run(capsys, "emit-data", "--n", 10, "--seed", 1)
        assert code == 0 and len(rows(out)) == 11
        assert out == run(capsys, "emit-data", "--n", 10, "--seed", 1)[1]

    def test_emit_file_force(self, capsys, tmp_path):
        f = tmp_path / "d" / "pts.csv"
        assert run(capsys, "emit-data", "--out", f)[0] == 0
        assert run(capsys, "emit-data", "--out", f)[0] == 2
        assert run(capsys, "emit-data", "--out", f, "--force")[0] == 0

    def test_emit_overlapping_modes(self, capsys):
        assert run(capsys, "emit-data", "--sigma", 1.0)[0] == 2

    def test_render(self, capsys, tmp_path):
        (tmp_path / "g.csv").write_text("# x_min=0,x_max=1,y_min=0,y_max=1,resolution=3\n"
                                        + "0,0,0\n" * 3)
        assert run(capsys, "render", tmp_path / "g.csv", tmp_path / "a.ppm")[0] == 0
        assert run(capsys, "render", tmp_path / "g.csv", tmp_path / "b.ppm")[0] == 0
        a = (tmp_path / "a.ppm").read_bytes()
        assert a == (tmp_path / "b.ppm").read_bytes()
        assert a == b"P6\n3 3\n255\n" + bytes(27)

    def test_render_bad_input(self, capsys, tmp_path):
        (tmp_path / "g.csv").write_text("garbage\n")
        assert run(capsys, "render", tmp_path / "g.csv", tmp_path / "a.ppm")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "--help")[0] == 0
