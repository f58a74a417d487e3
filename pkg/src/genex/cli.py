"""Command-line interface.

Subcommands::

    genex detect             write detected event types per sentence
    genex pipeline           run the full extraction pipeline
    genex score              score predictions against a gold corpus
    genex make-training-set  emit training examples with negatives

Settings resolve in precedence order: command-line flag, then the
``--config`` file (``key = value`` lines), then the built-in default.
The remote scoring endpoint additionally honors the environment
variable ``GENEX_REMOTE_URL``, which beats the config file but not an
explicit ``remote:<url>`` flag.

Exit codes: 0 success, 1 when some sentences failed but the run
finished, 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Callable, Iterable

from .backends import FuzzBackend, GoldCorpusBackend, ScoringBackend, UniformBackend
from .corpus import AnnotatedSentence, load_corpus
from .errors import ConfigError, GenexError
from .pipeline import (
    PipelineConfig,
    detect_event_types,
    result_to_dict,
    run_corpus,
    serialized_config,
    type_trie,
)
from .prompts import SeparatorToken
from .remote import DEFAULT_TIMEOUT, REMOTE_URL_ENV, RemoteBackend
from .sampling import DEFAULT_N_ARG, DEFAULT_N_TRG, build_training_set, write_training_set
from .schema import load_schema
from .scoring import score_corpora, score_report
from .tokenizers import SubwordTokenizer, WordTokenizer, load_vocabulary

DEFAULTS = {
    "sep": "</s>",
    "n_trg": DEFAULT_N_TRG,
    "n_arg": DEFAULT_N_ARG,
    "beam": 1,
    "max_span_len": 8,
    "max_steps": None,
    "seed": 0,
    "backend_etd": "oracle",
    "backend_trg": "oracle",
    "backend_arg": "oracle",
    "remote_timeout": DEFAULT_TIMEOUT,
    "golden_types": False,
}


def load_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blanks skipped."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {line!r}")
            key, value = line.split("=", 1)
            values[_normalize_key(key)] = value.strip()
    return values


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def _cast_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


class Settings:
    """Flag values over config-file values over defaults."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        config_path = self._args.get("config")
        self._config = load_config_file(config_path) if config_path else {}

    def from_cli(self, key: str) -> bool:
        return self._args.get(key) is not None

    def get(self, key: str, cast: Callable = str):
        value = self._args.get(key)
        if value is not None:
            return value
        if key in self._config:
            raw = self._config[key]
            try:
                return cast(raw)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}") from None
        return DEFAULTS.get(key)


def _resolve_remote_url(explicit: str | None, from_cli: bool) -> str:
    env = os.environ.get(REMOTE_URL_ENV) or None
    if explicit and from_cli:
        return explicit
    url = env or explicit
    if not url:
        raise ConfigError(
            f"remote backend needs a URL (remote:<url> or ${REMOTE_URL_ENV})"
        )
    return url


def build_backend(
    spec: str,
    *,
    oracle_factory: Callable[[], ScoringBackend],
    timeout: float,
    from_cli: bool,
) -> ScoringBackend:
    """Construct a stage backend from ``oracle``, ``fuzz:<seed>``,
    ``remote:<url>``, ``remote``, or ``uniform``."""
    if spec == "oracle":
        return oracle_factory()
    if spec == "uniform":
        return UniformBackend()
    if spec.startswith("fuzz:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad fuzz backend spec {spec!r}; use fuzz:<seed>") from None
        return FuzzBackend(seed)
    if spec == "remote" or spec.startswith("remote:"):
        explicit = spec.split(":", 1)[1] if ":" in spec else None
        return RemoteBackend(_resolve_remote_url(explicit, from_cli), timeout=timeout)
    raise ConfigError(f"unknown backend spec {spec!r}")


def _add_common(parser: argparse.ArgumentParser, *, backends: tuple[str, ...]) -> None:
    parser.add_argument("--config", help="key = value settings file")
    parser.add_argument("--schema", help="event schema path")
    parser.add_argument("--corpus", help="annotated corpus JSONL path")
    parser.add_argument("--out", help="output path (default: stdout)")
    for name in backends:
        parser.add_argument(
            f"--backend-{name}",
            dest=f"backend_{name}",
            help="oracle | uniform | fuzz:<seed> | remote:<url>",
        )
    parser.add_argument("--sep", help="separator token (default '</s>')")
    parser.add_argument("--beam", type=int, help="beam size; 1 = greedy")
    parser.add_argument("--max-span-len", type=int, dest="max_span_len")
    parser.add_argument("--max-steps", type=int, dest="max_steps")
    parser.add_argument("--jobs", type=int, help="worker threads (default: CPU count)")
    parser.add_argument("--vocab", help="subword vocabulary file (default: word level)")
    parser.add_argument(
        "--remote-timeout", type=float, dest="remote_timeout",
        help="remote scoring timeout in seconds",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genex",
        description="Schema-guided generative event extraction with constrained decoding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="detect event types per sentence")
    _add_common(p_detect, backends=("etd",))

    p_pipe = sub.add_parser("pipeline", help="run detection, triggers, and arguments")
    _add_common(p_pipe, backends=("etd", "trg", "arg"))
    p_pipe.add_argument(
        "--golden-types", dest="golden_types",
        action=argparse.BooleanOptionalAction,
        help="skip detection and use gold event types from the corpus",
    )
    p_pipe.add_argument("--plot", help="also render decode-count figure to this path")

    p_score = sub.add_parser("score", help="score predictions against gold")
    p_score.add_argument("--config", help="key = value settings file")
    p_score.add_argument("--pred", required=True, help="prediction JSONL path")
    p_score.add_argument("--gold", required=True, help="gold corpus JSONL path")
    p_score.add_argument("--schema", help="optional schema path for validation")
    p_score.add_argument("--out", help="also write the JSON report to this path")
    p_score.add_argument("--plot", help="also render metrics figure to this path")

    p_train = sub.add_parser(
        "make-training-set", help="emit training examples with negative sampling"
    )
    p_train.add_argument("--config", help="key = value settings file")
    p_train.add_argument("--schema", help="event schema path")
    p_train.add_argument("--corpus", help="annotated corpus JSONL path")
    p_train.add_argument("--out", help="output path (default: stdout)")
    p_train.add_argument("--sep", help="separator token (default '</s>')")
    p_train.add_argument("--n-trg", type=int, dest="n_trg",
                         help="negative types per sentence, trigger stage")
    p_train.add_argument("--n-arg", type=int, dest="n_arg",
                         help="negative types per sentence, argument stage")
    p_train.add_argument("--seed", type=int, help="negative sampling seed")
    return parser


def _require(settings: Settings, key: str) -> str:
    value = settings.get(key)
    if not value:
        raise ConfigError(f"--{key.replace('_', '-')} is required")
    return value


def _tokenizer(settings: Settings):
    vocab_path = settings.get("vocab")
    if vocab_path:
        return SubwordTokenizer(load_vocabulary(vocab_path))
    return WordTokenizer()


def _load_inputs(settings: Settings):
    schema = load_schema(_require(settings, "schema"))
    sep = SeparatorToken(settings.get("sep"))
    corpus = load_corpus(_require(settings, "corpus"), schema, sep.text)
    return schema, sep, corpus


def _pipeline_config(settings: Settings, schema, sep, corpus, stages) -> PipelineConfig:
    tokenizer = _tokenizer(settings)
    oracle: list[ScoringBackend] = []

    def oracle_factory() -> ScoringBackend:
        if not oracle:
            oracle.append(GoldCorpusBackend(corpus, schema, tokenizer, sep))
        return oracle[0]

    timeout = settings.get("remote_timeout", float)
    backends = {}
    for stage in ("etd", "trg", "arg"):
        if stage in stages:
            backends[stage] = build_backend(
                settings.get(f"backend_{stage}"),
                oracle_factory=oracle_factory,
                timeout=timeout,
                from_cli=settings.from_cli(f"backend_{stage}"),
            )
        else:
            backends[stage] = UniformBackend()
    return PipelineConfig(
        etd_backend=backends["etd"],
        trigger_backend=backends["trg"],
        argument_backend=backends["arg"],
        sep=sep,
        max_span_len=settings.get("max_span_len", int),
        beam_size=settings.get("beam", int),
        max_steps=settings.get("max_steps", int),
        golden_types=bool(settings.get("golden_types", _cast_bool)),
        tokenizer=tokenizer,
    )


def _jobs(settings: Settings) -> int:
    jobs = settings.get("jobs", int)
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return jobs


def _write_lines(objs: Iterable[dict], handle: IO[str]) -> None:
    for obj in objs:
        handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _with_out(path: str | None, write: Callable[[IO[str]], None]) -> None:
    if path in (None, "-"):
        write(sys.stdout)
        return
    with open(path, "w", encoding="utf-8") as handle:
        write(handle)


def cmd_detect(settings: Settings) -> int:
    schema, sep, corpus = _load_inputs(settings)
    cfg = serialized_config(_pipeline_config(settings, schema, sep, corpus, ("etd",)))
    trie = type_trie(schema, cfg.tokenizer)

    def one(annotated: AnnotatedSentence) -> dict:
        try:
            types = detect_event_types(annotated.sentence, schema, cfg, trie)
        except GenexError as exc:
            return {"id": annotated.id, "error": str(exc)}
        return {"id": annotated.id, "types": [et.name for et in types]}

    jobs = _jobs(settings)
    if jobs == 1 or len(corpus) <= 1:
        lines = [one(annotated) for annotated in corpus]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            lines = list(pool.map(one, corpus))
    _with_out(settings.get("out"), lambda handle: _write_lines(lines, handle))
    return 1 if any("error" in line for line in lines) else 0


def cmd_pipeline(settings: Settings) -> int:
    schema, sep, corpus = _load_inputs(settings)
    cfg = _pipeline_config(settings, schema, sep, corpus, ("etd", "trg", "arg"))
    results = run_corpus(corpus, schema, cfg, jobs=_jobs(settings))
    lines = [
        result_to_dict(result, annotated.sentence.tokens)
        for result, annotated in zip(results, corpus)
    ]
    _with_out(settings.get("out"), lambda handle: _write_lines(lines, handle))
    plot_path = settings.get("plot")
    if plot_path:
        from .plots import save_trace_figure

        save_trace_figure(results, plot_path)
    return 1 if any(result.failed for result in results) else 0


def cmd_score(settings: Settings) -> int:
    schema_path = settings.get("schema")
    schema = load_schema(schema_path) if schema_path else None
    gold = load_corpus(_require(settings, "gold"), schema)
    pred = load_corpus(_require(settings, "pred"), schema)
    trigger, argument = score_corpora(pred, gold)
    report = score_report(trigger, argument)
    rendered = json.dumps(report, indent=2, ensure_ascii=False)
    print(rendered)
    out_path = settings.get("out")
    if out_path and out_path != "-":
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(rendered + "\n")
    plot_path = settings.get("plot")
    if plot_path:
        from .plots import save_metrics_figure

        save_metrics_figure(report, plot_path)
    return 0


def cmd_make_training_set(settings: Settings) -> int:
    schema, sep, corpus = _load_inputs(settings)
    examples = build_training_set(
        corpus,
        schema,
        n_trg=settings.get("n_trg", int),
        n_arg=settings.get("n_arg", int),
        sep=sep,
        rng_seed=settings.get("seed", int),
    )
    _with_out(settings.get("out"), lambda handle: write_training_set(examples, handle))
    return 0


_COMMANDS = {
    "detect": cmd_detect,
    "pipeline": cmd_pipeline,
    "score": cmd_score,
    "make-training-set": cmd_make_training_set,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        return _COMMANDS[args.command](settings)
    except GenexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
