from pathlib import Path

import pytest

from transformer_scorer.data import read_rows

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def train_rows():
    return read_rows(DATA_DIR / "train8.tsv")


@pytest.fixture(scope="session")
def trial_rows():
    return read_rows(DATA_DIR / "trial4.tsv")


@pytest.fixture(scope="session")
def mask_rows():
    return read_rows(DATA_DIR / "mask_targets.tsv")
