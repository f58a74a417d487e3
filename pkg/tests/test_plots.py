from genex.pipeline import SentenceResult, run_corpus
from genex.plots import save_metrics_figure, save_trace_figure
from genex.scoring import Metrics, score_report

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_metrics_figure_written(tmp_path):
    report = score_report(Metrics.from_counts(1, 2, 4), Metrics.from_counts(3, 3, 3))
    path = tmp_path / "metrics.png"
    returned = save_metrics_figure(report, path)
    assert returned == str(path)
    assert path.read_bytes().startswith(PNG_MAGIC)


def test_trace_figure_written(tmp_path, desk_corpus, desk_schema, oracle_cfg):
    results = run_corpus(desk_corpus[:4], desk_schema, oracle_cfg)
    path = tmp_path / "trace.png"
    assert save_trace_figure(results, path) == str(path)
    assert path.read_bytes().startswith(PNG_MAGIC)


def test_trace_figure_skips_failed_sentences(tmp_path):
    results = [
        SentenceResult("bad", None, None, "boom"),
        SentenceResult("worse", None, None, "boom again"),
    ]
    path = tmp_path / "trace.png"
    save_trace_figure(results, path)
    assert path.read_bytes().startswith(PNG_MAGIC)
