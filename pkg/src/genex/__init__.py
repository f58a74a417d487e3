"""Schema-guided generative event extraction with constrained decoding.

The package decodes parenthesis-formatted answers to three kinds of
prompts (event type detection, trigger extraction, argument extraction)
over any token-scoring backend, keeps outputs well formed by grammar
and trie constraints, builds negatively-sampled training sets, and
scores extractions by exact span-and-label match.
"""

from .backends import (
    FuzzBackend,
    GoldCorpusBackend,
    GoldTargetBackend,
    ScoreQuery,
    ScoringBackend,
    UniformBackend,
    fuzz_backend,
    oracle_from_gold,
)
from .corpus import AnnotatedSentence, EventRecord, Sentence, Span, load_corpus
from .decoder import ConstrainedDecoder, DecodeOutput, decode_beam, decode_greedy
from .errors import GenexError
from .paren import ParenList, parse, serialize
from .pipeline import (
    PipelineConfig,
    PipelineTrace,
    SentenceResult,
    detect_event_types,
    extract_arguments,
    extract_triggers,
    run_corpus,
    run_pipeline,
)
from .prompts import (
    Prompt,
    SeparatorToken,
    argument_prompt,
    etd_prompt,
    trigger_prompt,
)
from .remote import RemoteBackend, remote_backend
from .sampling import (
    TrainingExample,
    build_training_set,
    sample_negative_types,
    write_training_set,
)
from .schema import EventSchema, EventType, RoleType, load_schema
from .scoring import (
    Metrics,
    f1,
    score_arguments,
    score_corpora,
    score_report,
    score_triggers,
)
from .tokenizers import SubwordTokenizer, WordTokenizer, load_vocabulary
from .trie import TokenTrie, build_trie, span_candidates

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence",
    "ConstrainedDecoder",
    "DecodeOutput",
    "EventRecord",
    "EventSchema",
    "EventType",
    "FuzzBackend",
    "GenexError",
    "GoldCorpusBackend",
    "GoldTargetBackend",
    "Metrics",
    "ParenList",
    "PipelineConfig",
    "PipelineTrace",
    "Prompt",
    "RemoteBackend",
    "RoleType",
    "ScoreQuery",
    "ScoringBackend",
    "Sentence",
    "SentenceResult",
    "SeparatorToken",
    "Span",
    "SubwordTokenizer",
    "TokenTrie",
    "TrainingExample",
    "UniformBackend",
    "WordTokenizer",
    "argument_prompt",
    "build_training_set",
    "build_trie",
    "decode_beam",
    "decode_greedy",
    "detect_event_types",
    "etd_prompt",
    "extract_arguments",
    "extract_triggers",
    "f1",
    "fuzz_backend",
    "load_corpus",
    "load_schema",
    "load_vocabulary",
    "oracle_from_gold",
    "parse",
    "remote_backend",
    "run_corpus",
    "run_pipeline",
    "sample_negative_types",
    "score_arguments",
    "score_corpora",
    "score_report",
    "score_triggers",
    "serialize",
    "span_candidates",
    "trigger_prompt",
    "write_training_set",
]
