from pathlib import Path

import pytest

from genex.backends import GoldCorpusBackend
from genex.corpus import load_corpus
from genex.pipeline import PipelineConfig
from genex.schema import load_schema

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def desk_schema():
    return load_schema(DATA_DIR / "ace_schema.txt")


@pytest.fixture(scope="session")
def desk_corpus(desk_schema):
    return load_corpus(DATA_DIR / "desk_corpus.jsonl", desk_schema, "</s>")


@pytest.fixture()
def oracle_cfg(desk_schema, desk_corpus):
    oracle = GoldCorpusBackend(desk_corpus, desk_schema)
    return PipelineConfig(
        etd_backend=oracle, trigger_backend=oracle, argument_backend=oracle
    )
