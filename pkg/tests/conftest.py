import logging
from pathlib import Path

import pytest

from src.dsl import parse_file


def _reset_logging_state():
    for h in list(logging.root.handlers):
        try:
            h.flush()
        except Exception:
            pass
        logging.root.removeHandler(h)
    logging.root.setLevel(logging.NOTSET)


@pytest.fixture(autouse=True)
def isolate_logging():
    _reset_logging_state()
    yield
    _reset_logging_state()


FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def load_fixture():
    def _load(name: str):
        return parse_file(FIXTURES_DIR / name)

    return _load


@pytest.fixture
def example1(load_fixture):
    return load_fixture("example1.lad")
