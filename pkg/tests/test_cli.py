import json
import socket

import pytest

from genex.cli import build_backend, load_config_file, main
from genex.errors import ConfigError
from genex.mock_server import MockScoreServer
from genex.remote import RemoteBackend


@pytest.fixture
def data_paths(data_dir):
    return str(data_dir / "ace_schema.txt"), str(data_dir / "desk_corpus.jsonl")


def read_jsonl(path):
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def free_port():
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


def test_pipeline_then_score_round_trip(tmp_path, data_paths, capsys):
    schema, corpus = data_paths
    pred = tmp_path / "pred.jsonl"
    code = main([
        "pipeline", "--schema", schema, "--corpus", corpus,
        "--out", str(pred), "--jobs", "2",
    ])
    assert code == 0
    lines = read_jsonl(pred)
    assert len(lines) == 20
    assert lines[0]["id"] == "s01"
    assert lines[0]["records"][0]["type"] == "CONVICT"
    assert lines[0]["trace"]["x"] == 2

    code = main(["score", "--pred", str(pred), "--gold", corpus, "--schema", schema])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["trigger"]["f1"] == 1.0
    assert report["argument"]["f1"] == 1.0
    assert report["counts"]["trigger"]["gold"] == report["counts"]["trigger"]["correct"]


def test_detect_lists_types(tmp_path, data_paths):
    schema, corpus = data_paths
    out = tmp_path / "types.jsonl"
    code = main([
        "detect", "--schema", schema, "--corpus", corpus,
        "--out", str(out), "--jobs", "1",
    ])
    assert code == 0
    lines = read_jsonl(out)
    assert lines[0] == {"id": "s01", "types": ["CONVICT", "ATTACK"]}
    assert {"id": "s03", "types": []} in lines


def test_detect_writes_to_stdout_by_default(data_paths, capsys):
    schema, corpus = data_paths
    assert main(["detect", "--schema", schema, "--corpus", corpus]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 20
    assert json.loads(out.splitlines()[0])["id"] == "s01"


def test_fuzz_backend_runs_are_reproducible(tmp_path, data_paths):
    schema, corpus = data_paths
    first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    argv = ["detect", "--schema", schema, "--corpus", corpus, "--backend-etd", "fuzz:7"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_make_training_set_deterministic(tmp_path, data_paths):
    schema, corpus = data_paths
    first, second, third = (tmp_path / n for n in ("1.jsonl", "2.jsonl", "3.jsonl"))
    argv = ["make-training-set", "--schema", schema, "--corpus", corpus, "--seed", "5"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert main([
        "make-training-set", "--schema", schema, "--corpus", corpus,
        "--seed", "6", "--out", str(third),
    ]) == 0
    assert first.read_bytes() != third.read_bytes()


def test_training_set_first_line_is_gold_etd(tmp_path, data_paths):
    schema, corpus = data_paths
    out = tmp_path / "train.jsonl"
    main(["make-training-set", "--schema", schema, "--corpus", corpus, "--out", str(out)])
    first = read_jsonl(out)[0]
    assert first["stage"] == "ETD"
    assert first["target"] == "((CONVICT)(ATTACK))"


def test_config_file_supplies_settings(tmp_path, data_paths):
    schema, corpus = data_paths
    config = tmp_path / "run.cfg"
    config.write_text(
        "# settings\n"
        f"schema = {schema}\n"
        f"corpus = {corpus}\n"
        "n-trg = 0\n"
        "n_arg = 0\n"
        "seed = 5\n"
    )
    out = tmp_path / "train.jsonl"
    code = main(["make-training-set", "--config", str(config), "--out", str(out)])
    assert code == 0
    lines = read_jsonl(out)
    assert all(line["polarity"] == "positive" for line in lines)


def test_cli_flag_beats_config_file(tmp_path, data_paths):
    schema, corpus = data_paths
    config = tmp_path / "run.cfg"
    config.write_text(f"schema = {schema}\ncorpus = {corpus}\nn-trg = 0\nn-arg = 0\n")
    out = tmp_path / "train.jsonl"
    main([
        "make-training-set", "--config", str(config),
        "--n-trg", "1", "--out", str(out),
    ])
    negatives = [l for l in read_jsonl(out) if l["polarity"] == "negative"]
    assert negatives
    assert all(l["stage"] == "TRIGGER" for l in negatives)


def test_missing_schema_file_exits_2(tmp_path, data_paths, capsys):
    _, corpus = data_paths
    code = main(["detect", "--schema", str(tmp_path / "nope.txt"), "--corpus", corpus])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_backend_spec_exits_2(data_paths, capsys):
    schema, corpus = data_paths
    code = main([
        "detect", "--schema", schema, "--corpus", corpus,
        "--backend-etd", "telepathy",
    ])
    assert code == 2
    assert "telepathy" in capsys.readouterr().err


def test_bad_config_line_exits_2(tmp_path, data_paths, capsys):
    schema, corpus = data_paths
    config = tmp_path / "bad.cfg"
    config.write_text("this line has no equals sign\n")
    code = main([
        "detect", "--config", str(config), "--schema", schema, "--corpus", corpus,
    ])
    assert code == 2
    assert "bad.cfg:1" in capsys.readouterr().err


def test_unreachable_remote_backend_exits_1(tmp_path, data_paths):
    schema, corpus_path = data_paths
    small = tmp_path / "two.jsonl"
    with open(corpus_path, encoding="utf-8") as handle:
        small.write_text("".join(handle.readlines()[:2]))
    out = tmp_path / "pred.jsonl"
    code = main([
        "pipeline", "--schema", schema, "--corpus", str(small),
        "--backend-etd", f"remote:http://127.0.0.1:{free_port()}",
        "--out", str(out), "--jobs", "1", "--remote-timeout", "1",
    ])
    assert code == 1
    lines = read_jsonl(out)
    assert all("error" in line for line in lines)
    assert all("records" not in line for line in lines)


def test_remote_url_from_environment(tmp_path, data_paths, monkeypatch):
    schema, corpus_path = data_paths
    small = tmp_path / "one.jsonl"
    with open(corpus_path, encoding="utf-8") as handle:
        small.write_text(handle.readline())
    with MockScoreServer() as server:
        monkeypatch.setenv("GENEX_REMOTE_URL", server.url)
        out = tmp_path / "types.jsonl"
        code = main([
            "detect", "--schema", schema, "--corpus", str(small),
            "--backend-etd", "remote", "--out", str(out),
        ])
        assert code == 0
        assert server.requests
    assert "types" in read_jsonl(out)[0]


def test_explicit_remote_url_beats_environment(tmp_path, data_paths, monkeypatch):
    schema, corpus_path = data_paths
    small = tmp_path / "one.jsonl"
    with open(corpus_path, encoding="utf-8") as handle:
        small.write_text(handle.readline())
    monkeypatch.setenv("GENEX_REMOTE_URL", f"http://127.0.0.1:{free_port()}")
    with MockScoreServer() as server:
        code = main([
            "detect", "--schema", schema, "--corpus", str(small),
            "--backend-etd", f"remote:{server.url}",
            "--out", str(tmp_path / "types.jsonl"),
        ])
        assert code == 0
        assert server.requests


def test_remote_without_any_url_exits_2(data_paths, monkeypatch, capsys):
    schema, corpus = data_paths
    monkeypatch.delenv("GENEX_REMOTE_URL", raising=False)
    code = main([
        "detect", "--schema", schema, "--corpus", corpus, "--backend-etd", "remote",
    ])
    assert code == 2
    assert "GENEX_REMOTE_URL" in capsys.readouterr().err


def test_score_out_writes_report_file(tmp_path, data_paths, capsys):
    schema, corpus = data_paths
    pred = tmp_path / "pred.jsonl"
    main(["pipeline", "--schema", schema, "--corpus", corpus, "--out", str(pred)])
    report_path = tmp_path / "report.json"
    code = main([
        "score", "--pred", str(pred), "--gold", corpus, "--out", str(report_path),
    ])
    assert code == 0
    on_disk = json.loads(report_path.read_text())
    assert on_disk == json.loads(capsys.readouterr().out)


def test_plot_flags_render_png(tmp_path, data_paths):
    schema, corpus = data_paths
    pred = tmp_path / "pred.jsonl"
    trace_png = tmp_path / "trace.png"
    code = main([
        "pipeline", "--schema", schema, "--corpus", corpus,
        "--out", str(pred), "--plot", str(trace_png),
    ])
    assert code == 0
    assert trace_png.read_bytes().startswith(b"\x89PNG")
    metrics_png = tmp_path / "metrics.png"
    code = main([
        "score", "--pred", str(pred), "--gold", corpus,
        "--out", str(tmp_path / "report.json"), "--plot", str(metrics_png),
    ])
    assert code == 0
    assert metrics_png.read_bytes().startswith(b"\x89PNG")


def test_golden_types_flag(tmp_path, data_paths):
    schema, corpus = data_paths
    out = tmp_path / "pred.jsonl"
    code = main([
        "pipeline", "--schema", schema, "--corpus", corpus,
        "--golden-types", "--backend-etd", "uniform", "--out", str(out),
    ])
    assert code == 0
    assert read_jsonl(out)[0]["trace"]["x"] == 2


def test_subword_vocab_flag(tmp_path):
    schema = tmp_path / "schema.txt"
    schema.write_text("GO: mover\n")
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(json.dumps({
        "id": "v1",
        "tokens": ["she", "went", "home"],
        "records": [{"type": "GO", "triggers": [[1, 2]],
                     "arguments": [{"role": "mover", "span": [0, 1]}]}],
    }) + "\n")
    vocab = tmp_path / "vocab.txt"
    pieces = sorted(set("shewnthomeGO") | {"GO", "wen", "hom"})
    vocab.write_text("\n".join(pieces) + "\n")
    out = tmp_path / "pred.jsonl"
    code = main([
        "pipeline", "--schema", str(schema), "--corpus", str(corpus),
        "--vocab", str(vocab), "--out", str(out),
    ])
    assert code == 0
    record = read_jsonl(out)[0]["records"][0]
    assert record["triggers"] == [[1, 2]]
    assert record["arguments"] == [{"role": "mover", "span": [0, 1]}]


def test_build_backend_specs():
    assert isinstance(
        build_backend(
            "remote:http://x", oracle_factory=lambda: None, timeout=1.0, from_cli=True
        ),
        RemoteBackend,
    )
    with pytest.raises(ConfigError):
        build_backend(
            "fuzz:not-a-number", oracle_factory=lambda: None, timeout=1.0, from_cli=True
        )


def test_load_config_file_parses_and_normalizes(tmp_path):
    config = tmp_path / "c.cfg"
    config.write_text("# comment\n\nMax-Span-Len = 4\nsep = [SEP]\n")
    values = load_config_file(str(config))
    assert values == {"max_span_len": "4", "sep": "[SEP]"}


def test_jobs_zero_exits_2(data_paths, capsys):
    schema, corpus = data_paths
    code = main(["detect", "--schema", schema, "--corpus", corpus, "--jobs", "0"])
    assert code == 2
    assert "jobs" in capsys.readouterr().err
