import sys

import numpy as np
import pytest

from phonebench.dataset import Corpus, PhonemeInventory, SynthSpec, generate_synthetic_dataset


@pytest.fixture(scope="session")
def default_inventory():
    return PhonemeInventory.default()


@pytest.fixture(scope="session")
def four_class():
    """(audio, annotations) of the shipped 4-class synthetic corpus, seed 0."""
    return generate_synthetic_dataset(SynthSpec.load("four-class"), seed=0)


@pytest.fixture(scope="session")
def four_class_corpus(four_class):
    audio, annotations = four_class
    return Corpus(annotations, audio)


@pytest.fixture(scope="session")
def four_class_dir(tmp_path_factory, four_class):
    from phonebench.dataset import write_synthetic_dataset
    out = tmp_path_factory.mktemp("four_class")
    write_synthetic_dataset(out, *four_class)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
