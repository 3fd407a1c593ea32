from pathlib import Path

import pytest

from lexcomplex.corpus import Split, Subtask, parse_dataset
from lexcomplex.features import EmbeddingTable, FrequencyTable
from lexcomplex.lm import SidecarScorer, UnigramScorer, read_unigram_counts

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def single_dataset():
    return parse_dataset(
        DATA_DIR / "mini_single.tsv", Subtask.SINGLE, labeled=True,
        split=Split.TRAIN,
    )


@pytest.fixture(scope="session")
def mwe_dataset():
    return parse_dataset(
        DATA_DIR / "mini_mwe.tsv", Subtask.MWE, labeled=True,
        split=Split.TRAIN,
    )


@pytest.fixture(scope="session")
def freq_table():
    return FrequencyTable.read(DATA_DIR / "freq.tsv")


@pytest.fixture(scope="session")
def emb50():
    return EmbeddingTable.read(DATA_DIR / "emb50.txt")


@pytest.fixture(scope="session")
def emb100():
    return EmbeddingTable.read(DATA_DIR / "emb100.txt")


@pytest.fixture(scope="session")
def unigram_scorer():
    counts = read_unigram_counts(DATA_DIR / "unigram_counts.tsv")
    return UnigramScorer(name="uni", counts=counts, k=1.0)


@pytest.fixture(scope="session")
def sidecar_scorer():
    return SidecarScorer.read(DATA_DIR / "sidecar_all.csv", name="ext")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(outcome, ()):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(report, "when", "call") != "call" and outcome != "skipped":
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{outcome:7s} {name}")
