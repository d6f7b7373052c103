from __future__ import annotations

import json

import pytest

from foonforge.resources import data_path


@pytest.fixture(scope="session")
def sample_graph_text() -> str:
    return data_path("macaroni.foon").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def sample_tree_json() -> str:
    return data_path("examples", "mac_and_cheese.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def sample_manifest_path():
    return data_path("manifest_sample.json")


@pytest.fixture(scope="session")
def acceptance_manifest_path():
    return data_path("manifest_34.json")


@pytest.fixture(scope="session")
def runs_metadata() -> dict:
    return json.loads(data_path("fixtures", "runs.json").read_text(encoding="utf-8"))
