import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def synthetic_corpus():
    from clusart.synthetic import generate_topic_corpus

    return generate_topic_corpus()


@pytest.fixture(scope="session")
def synthetic_split(synthetic_corpus):
    from clusart.corpus import split_corpus

    return split_corpus(synthetic_corpus)


@pytest.fixture(scope="session")
def synthetic_experiment(synthetic_split):
    """Full ClusART run with default parameters on the synthetic 160/40 split."""
    import time

    from clusart.pipeline import run_experiment

    t0 = time.perf_counter()
    result = run_experiment(synthetic_split)
    return result, time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
