import random
from pathlib import Path

import pytest

from odrleval.parser import parse_agreement, parse_agreements

DATA = Path(__file__).parent / "data"
GOLDENS = Path(__file__).parent / "goldens"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def load_example(name: str):
    """Parse one named agreement fixture (ex21 .. ex26)."""
    return parse_agreement((DATA / f"{name}.odrl").read_text())


def load_examples(name: str):
    return parse_agreements((DATA / f"{name}.odrl").read_text())


def load_golden(name: str) -> str:
    """Golden s-expression with its annotation comments stripped."""
    lines = (GOLDENS / f"{name}.sexp").read_text().splitlines()
    return "\n".join(l for l in lines if not l.startswith(";")).strip()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xA11CE)
