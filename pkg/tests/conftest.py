import json
import sys
from pathlib import Path

import pytest

ROOT_DIR = Path(__file__).parent.parent.absolute()
FIXTURE_DIR = ROOT_DIR / "fixtures"
sys.path.insert(0, str(ROOT_DIR / "scripts"))

from atlas import admissible_data, enumerate_cm_types, family_groups  # noqa: E402
from cm_structures import validate_cm_type  # noqa: E402
from finite_group import make_group, make_subgroup, validate_cm_datum  # noqa: E402


def load_fixture(name: str):
    doc = json.loads((FIXTURE_DIR / f"{name}.json").read_text())
    group = make_group(doc["group"])
    datum = validate_cm_datum(group, make_subgroup(group, doc["H"]), doc["c"])
    return validate_cm_type(datum, doc["phi"])


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture
def iq():
    return load_fixture("iq")


@pytest.fixture
def c4():
    return load_fixture("c4")


@pytest.fixture
def c2xc4():
    return load_fixture("c2xc4")


@pytest.fixture
def d4():
    return load_fixture("d4")


@pytest.fixture
def all_fixtures():
    return {name: load_fixture(name) for name in ("iq", "c4", "c2xc4", "d4")}


@pytest.fixture(scope="session")
def cm_corpus():
    """Every CM type on every admissible datum of order at most 16."""
    types = []
    for family in ("cyclic", "abelian-products", "dihedral"):
        for group in family_groups(family, 16):
            for datum in admissible_data(group, all_subfields=True):
                types.extend(enumerate_cm_types(datum))
    return types
