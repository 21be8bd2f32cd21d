import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tci_forge.posets import load_poset  # noqa: E402
from tci_forge.tci import load_tci  # noqa: E402

CORPUS = Path(__file__).resolve().parents[1] / "src" / "tci_forge" / "corpus"
TCI_FILES = sorted((CORPUS / "tcis").glob("*.json"))
POSET_FILES = sorted((CORPUS / "posets").glob("*.json"))


def corpus_tci(name):
    return load_tci(CORPUS / "tcis" / f"{name}.json")


def corpus_poset(name):
    return load_poset(CORPUS / "posets" / f"{name}.json")


def family_tci(name):
    return load_tci(CORPUS / "families" / f"{name}.json")


@pytest.fixture
def t_ab():
    return corpus_tci("tci_ab")


@pytest.fixture
def t_sym():
    return corpus_tci("tci_sym")
