import json

import pytest

from datarel.cli import main
from datarel.graph import read_edges
from datarel.model import Relation


def write_ndjson(path, objs, extra_lines=()):
    lines = [json.dumps(o) for o in objs] + list(extra_lines)
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


THREE = [
    {"name": "a", "url": "https://a.org/1", "identifier": "doi:10.1/a"},
    {"name": "b", "url": "https://b.org/2"},
    {"name": "c", "url": "https://c.org/3"},
]


def test_ingest_three(tmp_path, capsys):
    src = write_ndjson(tmp_path / "in.ndjson", THREE)
    code, out, err = run(capsys, "ingest", "--input", src, "--out", tmp_path / "c.json")
    assert code == 0
    assert json.loads(err)["accepted"] == 3
    assert json.loads(out)["records"] == 3


def test_ingest_all_malformed(tmp_path, capsys):
    src = write_ndjson(tmp_path / "in.ndjson", [], ["{bad", "nope"])
    code, _, _ = run(capsys, "ingest", "--input", src, "--out", tmp_path / "c.json")
    assert code != 0
    assert not (tmp_path / "c.json").exists()


def test_ingest_citable_only(tmp_path, capsys):
    src = write_ndjson(tmp_path / "in.ndjson", THREE)
    man = tmp_path / "m.json"
    code, out, _ = run(capsys, "ingest", "--input", src, "--citable-only",
                       "--manifest", man, "--out", tmp_path / "c.json")
    assert code == 0 and json.loads(out)["records"] == 1
    assert json.loads(man.read_text())["citable"] == 1


def test_infer_markup_replica(tmp_path, capsys):
    src = write_ndjson(tmp_path / "in.ndjson", [
        {"name": "Rain", "url": "https://a.org/r", "sameAs": "https://b.org/r"},
        {"name": "Rain gauge", "url": "https://b.org/r"},
    ])
    out = tmp_path / "e.tsv"
    code, _, _ = run(capsys, "infer", "--corpus", src, "--methods", "markup", "--out", out)
    assert code == 0
    edges = read_edges(str(out))
    assert [(e.src_id, e.dst_id, e.rel) for e in edges] == \
        [("https://a.org/r", "https://b.org/r", Relation.REPLICA)]
    assert json.loads((tmp_path / "e.tsv.stats.json").read_text())["total_edges"] == 1


def test_infer_heuristic_year_subset(tmp_path, capsys):
    src = write_ndjson(tmp_path / "in.ndjson", [
        {"name": "Survey of Earned Doctorates - 2019", "url": "https://nsf.gov/sed2019"},
        {"name": "Survey of Earned Doctorates", "url": "https://nsf.gov/sed"},
        {"name": "Weather Stations Ohio", "url": "https://noaa.gov/ohio"},
    ])
    out = tmp_path / "e.jsonl"
    code, _, _ = run(capsys, "infer", "--corpus", src, "--methods", "heuristic", "--out", out)
    assert code == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert rows == [{"src_id": "https://nsf.gov/sed2019", "dst_id": "https://nsf.gov/sed",
                     "type": "subset", "direction": "directed", "method": "heuristic",
                     "confidence": 1.0}]


def test_infer_gbdt_needs_model(tmp_path, capsys):
    src = write_ndjson(tmp_path / "in.ndjson", THREE)
    with pytest.raises(SystemExit) as info:
        main(["infer", "--corpus", src, "--methods", "gbdt", "--out", str(tmp_path / "e.tsv")])
    assert info.value.code != 0


def test_bad_methods_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["eval", "--corpus", "x", "--gold", "y", "--methods", "magic"])


def test_pipeline_end_to_end_is_deterministic(tmp_path, capsys):
    outputs = []
    d = tmp_path
    for _ in range(2):
        cfg = d / "cfg.json"
        cfg.write_text(json.dumps({"seed": 0, "base_count": 150}))
        steps = [
            ("synth", "--config", cfg, "--seed", 8, "--out-corpus", d / "c.ndjson",
             "--out-gold", d / "g.tsv"),
            ("ingest", "--input", d / "c.ndjson", "--manifest", d / "m.json",
             "--out", d / "c.json"),
            ("train", "--corpus", d / "c.json", "--gold", d / "g.tsv", "--seed", 8,
             "--out", d / "model.json", "--max-rounds", 40),
            ("infer", "--corpus", d / "c.json", "--methods", "markup,heuristic,gbdt",
             "--model", d / "model.json", "--k", 5, "--out", d / "e.tsv", "--threads", 2),
            ("stats", "--corpus", d / "c.json", "--edges", d / "e.tsv", "--out", d / "s.json"),
            ("eval", "--corpus", d / "c.json", "--gold", d / "g.tsv", "--model",
             d / "model.json", "--seed", 8, "--out", d / "r.json"),
        ]
        stdout = []
        for step in steps:
            code, out, _ = run(capsys, *step)
            assert code == 0, step
            stdout.append(out)
        files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
        outputs.append((files, stdout))
    assert outputs[0][0].keys() == outputs[1][0].keys()
    for name in outputs[0][0]:
        assert outputs[0][0][name] == outputs[1][0][name], name
    assert outputs[0][1] == outputs[1][1]
    train_report = json.loads(outputs[0][1][2])["report"]
    assert train_report["valid_loss"]
    eval_doc = json.loads(outputs[0][1][5])
    assert eval_doc["format"] == "datarel-result" and eval_doc["version"] == 1
    assert "Relationship" in eval_doc["table"]


def test_eval_table_output(tmp_path, capsys):
    code, _, _ = run(capsys, "synth", "--seed", 1, "--zero-noise", "--out-corpus",
                     tmp_path / "c.ndjson", "--out-gold", tmp_path / "g.tsv")
    assert code == 0
    code, out, _ = run(capsys, "eval", "--corpus", tmp_path / "c.ndjson", "--gold",
                       tmp_path / "g.tsv", "--methods", "markup,heuristic", "--split", "all",
                       "--table")
    assert code == 0
    assert out.splitlines()[0].startswith("Relationship")
    assert "heuristic" in out.splitlines()[0]
