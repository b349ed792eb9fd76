import json
import threading

import pytest

from services.fixture_registry import FIXTURE_BUILDERS, get_fixture_registry
from utils.errors import UnknownFixture


def test_fixture_names():
    assert get_fixture_registry().names() == [
        "riley-apollonian", "compression-theta3", "schottky-85", "pants-real", "pants-hexagon",
    ]


def test_unknown_fixture():
    with pytest.raises(UnknownFixture, match="riley-apollonian"):
        get_fixture_registry().get("figure-eight")


def test_registry_is_a_cache():
    registry = get_fixture_registry()
    assert registry is get_fixture_registry()
    assert registry.get("pants-real") is registry.get("pants-real")


def test_concurrent_first_use_builds_once():
    registry = get_fixture_registry()
    registry.clear()
    results = []
    threads = [threading.Thread(target=lambda: results.append(registry.get("riley-apollonian")))
               for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(results) == 8
    assert all(r is results[0] for r in results)


@pytest.mark.parametrize("name", list(FIXTURE_BUILDERS))
def test_fixture_json_is_serializable(name):
    data = get_fixture_registry().get(name).to_json()
    assert data["name"] == name
    assert len(data["viewport"]) == 3
    json.dumps(data)


def test_solver_fixture_carries_its_system():
    data = get_fixture_registry().get("schottky-85").to_json()
    assert [c["word"] for c in data["system"]["constraints"]] == ["X^-1 Y^2", "X^-1 Y^3 X^-2", "Y X^-2"]
    assert data["chain"] is None
