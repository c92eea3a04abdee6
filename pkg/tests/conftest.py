from pathlib import Path

import pytest

from reladp.parser import parse_relative_trs, read_trs
from reladp.prover import ProverConfig

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive checks that take a while")


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def system():
    """Load a bundled system by file stem."""

    def load(name: str):
        return read_trs(CORPUS / f"{name}.trs")

    return load


@pytest.fixture
def parse():
    return parse_relative_trs


@pytest.fixture
def quick_config() -> ProverConfig:
    return ProverConfig(timeout_seconds=60, max_coeff=2, loop_depth=6, seed_depth=2, max_seeds=60)
