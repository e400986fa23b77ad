import pytest

from probcorr.cli.main import default_corpus_text
from probcorr.cli.parsing import parse_corpus


@pytest.fixture(scope="session")
def corpus():
    return {entry.name: entry.program for entry in parse_corpus(default_corpus_text())}


@pytest.fixture(scope="session")
def divergent():
    return {entry.name: entry.program
            for entry in parse_corpus(default_corpus_text("divergence.pccs"))}
