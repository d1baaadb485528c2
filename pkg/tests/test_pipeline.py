import csv
import json
import os

import numpy as np
import pytest

from softsel.cli import main
from softsel.imaging import read_pgm, write_pgm
from softsel.pipeline import (ConfigError, PipelineConfig, PipelineError, bundled_fixture_dir,
                              run_pipeline)
from softsel.synthetic import FIXTURE_COUNT, fixture_images, lung_phantom
from softsel.texture import DATASETS


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bundled_fixtures_match_generator():
    names = sorted(os.listdir(bundled_fixture_dir()))
    assert len(names) == FIXTURE_COUNT
    for name, img in zip(names, fixture_images()):
        assert read_pgm(os.path.join(bundled_fixture_dir(), name)) == img


def test_default_pipeline(tmp_path):
    report = run_pipeline(PipelineConfig(output_dir=str(tmp_path)))
    assert [r["dataset"] for r in report.feature_counts] == list(DATASETS)
    for row in report.feature_counts:
        assert row["extracted"] == 19
        for m in ("usqr", "urr", "ssusqr"):
            assert 1 <= row[m] <= 19
    methods = {(r["dataset"], r["method"]) for r in report.validity}
    assert len(methods) == 5 * 4
    for stage in ("denoise", "segment", "extract", "discretize", "reduce", "evaluate"):
        assert os.listdir(tmp_path / stage)
        assert stage in report.timing
    counts = read_csv(tmp_path / "feature_counts.csv")
    assert [r["extracted"] for r in counts] == ["19"] * 5
    reduct = json.loads((tmp_path / "reduce" / "gldm_ssusqr.json").read_text())
    assert reduct["method"] == "ssusqr" and reduct["trace"]


def test_pipeline_without_reduction(tmp_path):
    cfg = PipelineConfig.from_mapping({"output_dir": str(tmp_path), "methods": ""})
    report = run_pipeline(cfg)
    assert {r["method"] for r in report.validity} == {"unreduced"}
    header = (tmp_path / "feature_counts.csv").read_text().splitlines()[0]
    assert header == "dataset,extracted"


def test_empty_input_dir(tmp_path):
    empty = tmp_path / "in"
    empty.mkdir()
    out = tmp_path / "out"
    with pytest.raises(ConfigError):
        run_pipeline(PipelineConfig(input_dir=str(empty), output_dir=str(out)))
    assert not out.exists()


def test_stage_failure_names_stage_and_object(tmp_path):
    cfg = PipelineConfig(output_dir=str(tmp_path), seeds=((500, 500),))
    with pytest.raises(PipelineError) as err:
        run_pipeline(cfg)
    assert err.value.stage == "segment"
    assert err.value.object_id == "phantom01"
    assert len(os.listdir(tmp_path / "denoise")) == FIXTURE_COUNT  # partial output kept


def test_config_file(tmp_path):
    src = tmp_path / "imgs"
    src.mkdir()
    for n in range(3):
        write_pgm(lung_phantom(n)[0], src / f"p{n}.pgm")
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("# comment\ninput_dir = imgs\noutput_dir = result\nbins = 3\n"
                        "seeds = 32,17 ; 32,46\nmethods = ssusqr\nsegment = yes\nsigma = 1.5\n")
    cfg = PipelineConfig.from_file(cfg_path)
    assert cfg.input_dir == str(src) and cfg.bins == 3 and cfg.methods == ("ssusqr",)
    assert cfg.seeds == ((32, 17), (32, 46)) and cfg.segment is True and cfg.sigma == 1.5
    report = run_pipeline(cfg)
    assert len(report.feature_counts) == 5
    assert (tmp_path / "result" / "report.csv").exists()


@pytest.mark.parametrize("text", ["bogus = 1\n", "no equals sign\n"])
def test_config_errors(tmp_path, text):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(p)


@pytest.mark.parametrize("key,value", [("window", 4), ("k", 1), ("bins", 1), ("filter", "x"),
                                       ("methods", ("nope",)), ("connectivity", 6)])
def test_config_validation(tmp_path, key, value):
    cfg = PipelineConfig(output_dir=str(tmp_path))
    setattr(cfg, key, value)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_shipped_config_parses():
    from importlib import resources
    cfg = PipelineConfig.from_file(resources.files("softsel") / "data" / "pipeline.cfg")
    cfg.validate()
    assert cfg.input_dir == bundled_fixture_dir()
    assert cfg.seeds == PipelineConfig().seeds


# --- CLI ------------------------------------------------------------------

def test_cli_image_commands(tmp_path, capsys):
    src = tmp_path / "a.pgm"
    write_pgm(lung_phantom(1)[0], src)
    assert main(["noise", "--in", str(src), "--out", str(tmp_path / "n.pgm"), "--kind", "sp",
                 "--level", "0.05", "--seed", "3"]) == 0
    n = read_pgm(tmp_path / "n.pgm")
    assert (n.pixels != read_pgm(src).pixels).sum() == 205
    for f in ("mean", "gaussian", "median"):
        assert main(["denoise", "--in", str(tmp_path / "n.pgm"), "--out", str(tmp_path / f"{f}.pgm"),
                     "--filter", f, "--window", "5"]) == 0
    capsys.readouterr()
    assert main(["snr", "--original", str(src), "--processed", str(tmp_path / "median.pgm")]) == 0
    assert float(capsys.readouterr().out) > 0
    assert main(["snr", "--original", str(src), "--processed", str(src)]) == 0
    assert capsys.readouterr().out.strip() == "inf"
    assert main(["segment", "--in", str(src), "--out", str(tmp_path / "s.pgm"), "--seed", "32,17",
                 "--seed", "32,46", "--threshold", "40", "--connectivity", "4",
                 "--mask-out", str(tmp_path / "s_mask.pgm")]) == 0
    mask = read_pgm(tmp_path / "s_mask.pgm").pixels
    assert set(np.unique(mask)) == {0, 255}


def test_cli_table_commands(tmp_path, capsys):
    imgs = tmp_path / "imgs"
    imgs.mkdir()
    for n, img in enumerate(fixture_images(6)):
        write_pgm(img, imgs / f"p{n}.pgm")
    feats = tmp_path / "feats"
    assert main(["extract", "--in-dir", str(imgs), "--levels", "16", "--distance", "1",
                 "--out-dir", str(feats)]) == 0
    assert sorted(os.listdir(feats)) == sorted(f"{d}.csv" for d in DATASETS)
    header = (feats / "glcm_0.csv").read_text().splitlines()[0]
    assert header == "object_id," + ",".join(f"f{i}" for i in range(1, 20))
    cat = tmp_path / "cat.csv"
    assert main(["discretize", "--in", str(feats / "glcm_0.csv"), "--out", str(cat),
                 "--bins", "4"]) == 0
    subsets = []
    for m in ("ssusqr", "usqr", "urr"):
        out = tmp_path / f"{m}.json"
        assert main(["reduce", "--method", m, "--in", str(cat), "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["reduct"] and payload["target_cardinality"] >= 1
        subsets.append(str(out))
    assert main(["cluster", "--in", str(feats / "glcm_0.csv"), "--algo", "kmeans", "--k", "2",
                 "--seed", "1", "--out", str(tmp_path / "labels.csv")]) == 0
    assert len(read_csv(tmp_path / "labels.csv")) == 6
    assert main(["cluster", "--in", str(feats / "glcm_0.csv"), "--algo", "som"]) == 0
    report = tmp_path / "report.csv"
    assert main(["evaluate", "--table", str(feats / "glcm_0.csv"), "--subsets", *subsets,
                 "--out", str(report), "--dataset", "glcm_0"]) == 0
    rows = read_csv(report)
    assert {r["method"] for r in rows} == {"unreduced", "ssusqr", "usqr", "urr"}


def test_cli_reduce_table2(tmp_path, capsys):
    from importlib import resources
    table = resources.files("softsel") / "data" / "table2.csv"
    out = tmp_path / "r.json"
    assert main(["reduce", "--method", "ssusqr", "--in", str(table), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["reduct"] == ["a4", "a2", "a1"]
    assert [r["cardinality"] for r in payload["trace"]] == [3, 7, 8]
    assert payload["trace"][0]["significance"]["a4"]["value"] == pytest.approx(1 / 3)


def test_cli_worked_example(capsys):
    assert main(["worked-example"]) == 0
    out = capsys.readouterr().out
    assert "verdict: PASS" in out
    assert "[DISCREPANCY-DOCUMENTED] Sig(a3)" in out


def test_cli_pipeline(tmp_path, capsys):
    assert main(["pipeline", "--out-dir", str(tmp_path / "o")]) == 0
    assert "extracted=19" in capsys.readouterr().out
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["pipeline", "--input-dir", str(empty), "--out-dir", str(tmp_path / "x")]) == 2


def test_cli_bad_input_exit_code(tmp_path, capsys):
    assert main(["snr", "--original", str(tmp_path / "no.pgm"),
                 "--processed", str(tmp_path / "no.pgm")]) == 2
