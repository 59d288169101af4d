import json

import pytest

from streamextract.cli import main
from streamextract.recognize import read_candidates


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Full pipeline artifacts built once through the CLI itself."""
    root = tmp_path_factory.mktemp("cli")
    synth = root / "synth"
    steps = [
        ["synth", "--out", str(synth), "--docs", "120", "--seed", "0"],
        ["stats", "--corpus", str(synth / "corpus.jsonl"),
         "--out", str(root / "stats.json")],
        ["embed", "--corpus", str(synth / "corpus.jsonl"),
         "--stats", str(root / "stats.json"), "--out", str(root / "store.tsv")],
        ["recognize", "--corpus", str(synth / "corpus.jsonl"),
         "--gazetteer", f"city={synth / 'gazetteer_city.txt'}",
         "--out", str(root / "candidates.jsonl")],
        ["train", "--corpus", str(synth / "corpus.jsonl"),
         "--stats", str(root / "stats.json"), "--store", str(root / "store.tsv"),
         "--candidates", str(synth / "gold.jsonl"), "--attribute", "city",
         "--out", str(root / "model.json")],
        ["predict", "--corpus", str(synth / "corpus.jsonl"),
         "--stats", str(root / "stats.json"), "--store", str(root / "store.tsv"),
         "--candidates", str(root / "candidates.jsonl"),
         "--model", str(root / "model.json"), "--out", str(root / "labeled.jsonl")],
    ]
    for argv in steps:
        assert main(argv) == 0, argv
    return root


class TestPipeline:
    def test_artifacts_exist(self, workdir):
        for name in ["stats.json", "store.tsv", "candidates.jsonl",
                     "model.json", "labeled.jsonl"]:
            assert (workdir / name).exists()

    def test_predictions_are_labeled_with_scores(self, workdir):
        labeled = read_candidates(workdir / "labeled.jsonl")
        assert labeled
        assert all(c.label in ("correct", "incorrect") for c in labeled)
        first = json.loads((workdir / "labeled.jsonl").read_text().splitlines()[0])
        assert 0.0 <= first["score"] <= 1.0

    def test_rerun_byte_identical(self, workdir, tmp_path, capsys):
        synth2 = tmp_path / "synth"
        run(capsys, "synth", "--out", str(synth2), "--docs", "120", "--seed", "0")
        run(capsys, "stats", "--corpus", str(synth2 / "corpus.jsonl"),
            "--out", str(tmp_path / "stats.json"))
        run(capsys, "embed", "--corpus", str(synth2 / "corpus.jsonl"),
            "--stats", str(tmp_path / "stats.json"),
            "--out", str(tmp_path / "store.tsv"))
        for name in ["stats.json", "store.tsv"]:
            assert (tmp_path / name).read_bytes() == (workdir / name).read_bytes()
        assert (synth2 / "corpus.jsonl").read_bytes() == \
               (workdir / "synth" / "corpus.jsonl").read_bytes()

    def test_featurize_tsv(self, workdir, tmp_path, capsys):
        out = tmp_path / "features.tsv"
        code, _, _ = run(capsys, "featurize",
                         "--corpus", str(workdir / "synth" / "corpus.jsonl"),
                         "--stats", str(workdir / "stats.json"),
                         "--store", str(workdir / "store.tsv"),
                         "--candidates", str(workdir / "synth" / "gold.jsonl"),
                         "--attribute", "city", "--out", str(out))
        assert code == 0
        line = out.read_text().splitlines()[0].split("\t")
        assert line[1] == "city"
        assert len(line) == 5 + 200  # metadata columns + d values

    def test_nn_output_format(self, workdir, capsys):
        # Query a context-pool word; output is unit<TAB>score lines.
        code, out, _ = run(capsys, "nn", "--store", str(workdir / "store.tsv"),
                           "--unit", "cityposa", "--k", "3")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        for line in lines:
            unit, score = line.split("\t")
            assert -1.0 <= float(score) <= 1.0


class TestEmbedAppend:
    def test_streaming_matches_one_shot(self, tmp_path, capsys):
        synth = tmp_path / "synth"
        run(capsys, "synth", "--out", str(synth), "--docs", "40", "--seed", "1")
        corpus = synth / "corpus.jsonl"
        stats = tmp_path / "stats.json"
        run(capsys, "stats", "--corpus", str(corpus), "--out", str(stats))

        lines = corpus.read_text().splitlines()
        half_a, half_b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        half_a.write_text("\n".join(lines[:20]) + "\n")
        half_b.write_text("\n".join(lines[20:]) + "\n")

        run(capsys, "embed", "--corpus", str(corpus), "--stats", str(stats),
            "--out", str(tmp_path / "oneshot.tsv"))
        run(capsys, "embed", "--corpus", str(half_a), "--stats", str(stats),
            "--no-freeze", "--out", str(tmp_path / "part.tsv"))
        run(capsys, "embed", "--corpus", str(half_b), "--stats", str(stats),
            "--append", str(tmp_path / "part.tsv"),
            "--out", str(tmp_path / "streamed.tsv"))
        assert (tmp_path / "streamed.tsv").read_bytes() == \
               (tmp_path / "oneshot.tsv").read_bytes()

    def test_append_to_frozen_store_fails(self, tmp_path, capsys):
        synth = tmp_path / "synth"
        run(capsys, "synth", "--out", str(synth), "--docs", "10", "--seed", "0")
        corpus, stats = synth / "corpus.jsonl", tmp_path / "stats.json"
        run(capsys, "stats", "--corpus", str(corpus), "--out", str(stats))
        run(capsys, "embed", "--corpus", str(corpus), "--stats", str(stats),
            "--out", str(tmp_path / "frozen.tsv"))
        code, _, err = run(capsys, "embed", "--corpus", str(corpus),
                           "--stats", str(stats),
                           "--append", str(tmp_path / "frozen.tsv"),
                           "--out", str(tmp_path / "x.tsv"))
        assert code == 1 and "frozen" in err


class TestEval:
    def test_trials_writes_csv(self, workdir, tmp_path, capsys):
        out = tmp_path / "trials.csv"
        code, stdout, _ = run(capsys, "eval", "trials",
                              "--corpus", str(workdir / "synth" / "corpus.jsonl"),
                              "--stats", str(workdir / "stats.json"),
                              "--store", str(workdir / "store.tsv"),
                              "--candidates", str(workdir / "synth" / "gold.jsonl"),
                              "--n-trials", "2", "--n-trees", "5",
                              "--out", str(out))
        assert code == 0
        assert "F1=" in stdout
        header = out.read_text().splitlines()[0]
        assert header == "experiment,corpus,attribute,k,trial,precision,recall,f1"

    def test_benchmark_runs(self, capsys, tmp_path):
        plot = tmp_path / "plot.tsv"
        code, stdout, _ = run(capsys, "eval", "benchmark",
                              "--sizes", "2000,4000",
                              "--emit-plot-data", str(plot))
        assert code == 0
        assert "linear fit" in stdout
        assert len(plot.read_text().splitlines()) == 2


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "stats", "--corpus",
                           str(tmp_path / "nope.jsonl"),
                           "--out", str(tmp_path / "s.json"))
        assert code == 1 and "error:" in err

    def test_recognize_without_recognizers(self, workdir, capsys, tmp_path):
        code, _, err = run(capsys, "recognize",
                           "--corpus", str(workdir / "synth" / "corpus.jsonl"),
                           "--out", str(tmp_path / "c.jsonl"))
        assert code == 1 and "no recognizers" in err

    def test_config_file_overrides_defaults(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"d": 100}))
        synth = tmp_path / "synth"
        run(capsys, "synth", "--out", str(synth), "--docs", "10", "--seed", "0")
        run(capsys, "stats", "--corpus", str(synth / "corpus.jsonl"),
            "--out", str(tmp_path / "stats.json"))
        code, stdout, _ = run(capsys, "--config", str(cfg), "embed",
                              "--corpus", str(synth / "corpus.jsonl"),
                              "--stats", str(tmp_path / "stats.json"),
                              "--out", str(tmp_path / "store.tsv"))
        assert code == 0 and "d=100" in stdout
