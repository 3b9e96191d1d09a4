from pathlib import Path

import pytest

from app.core import cache
from app.core.config import get_settings
from app.services.foon_parser import (
    parse_object_spec,
    read_kitchen_file,
    read_profile_file,
    read_subgraph_file,
)
from app.services.network import merge
from app.services.retrieval import retrieve_all

FIXTURES = Path(__file__).parent / "fixtures"

POTATO_GOAL = "potato{mashed}"
TEA_GOAL = "tea cup{contains,stirred}[sugar,tea]"


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    for key in ("FOON_REDIS_URL", "FOON_TRIALS", "FOON_SEED", "FOON_WORKERS", "FOON_EPSILON"):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    monkeypatch.setattr(cache, "_redis", None)
    monkeypatch.setattr(cache, "_connected", False)
    yield
    get_settings.cache_clear()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def potato_subgraphs():
    return [
        read_subgraph_file(FIXTURES / "mashed_potato_boil.txt"),
        read_subgraph_file(FIXTURES / "mashed_potato_microwave.txt"),
    ]


@pytest.fixture
def potato_network(potato_subgraphs):
    return merge(potato_subgraphs)


@pytest.fixture
def potato_kitchen():
    return read_kitchen_file(FIXTURES / "potato_kitchen.txt")


@pytest.fixture
def potato_profile():
    return read_profile_file(FIXTURES / "potato_profile.json")


@pytest.fixture
def potato_goal():
    return parse_object_spec(POTATO_GOAL)


@pytest.fixture
def potato_trees(potato_network, potato_kitchen, potato_goal):
    return retrieve_all(potato_network, potato_goal, potato_kitchen)


@pytest.fixture
def tea_network():
    return merge([read_subgraph_file(FIXTURES / "tea.txt")])


@pytest.fixture
def tea_kitchen():
    return read_kitchen_file(FIXTURES / "tea_kitchen.txt")


@pytest.fixture
def tea_profile():
    return read_profile_file(FIXTURES / "tea_profile.json")


@pytest.fixture
def tea_goal():
    return parse_object_spec(TEA_GOAL)


@pytest.fixture
def tea_trees(tea_network, tea_kitchen, tea_goal):
    return retrieve_all(tea_network, tea_goal, tea_kitchen)
