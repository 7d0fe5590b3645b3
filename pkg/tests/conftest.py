import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from piecat.cli import corpus_dir
from piecat.dsl import parse

settings.register_profile("piecat", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("piecat")

CORPUS = corpus_dir()


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.cat"))


def load_corpus(stem: str):
    return parse((CORPUS / f"{stem}.cat").read_text(encoding="utf-8"))


@pytest.fixture
def rng():
    return random.Random(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
