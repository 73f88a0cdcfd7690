from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "data"))

from goneg.annotations import parse_gaf  # noqa: E402
from goneg.ontology import parse_obo  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "data")
TOY = os.path.join(DATA, "toy")
GOLDEN = os.path.join(DATA, "golden")


def data_path(*parts: str) -> str:
    return os.path.join(DATA, *parts)


@pytest.fixture(scope="session")
def excerpt_dag():
    return parse_obo(data_path("go_excerpt.obo"))


@pytest.fixture(scope="session")
def excerpt_releases(excerpt_dag):
    old = parse_gaf(data_path("excerpt_old.gaf"), excerpt_dag, label="old")
    new = parse_gaf(data_path("excerpt_new.gaf"), excerpt_dag, label="new")
    return old, new


@pytest.fixture(scope="session")
def toy():
    dag = parse_obo(os.path.join(TOY, "go.obo"))
    old = parse_gaf(os.path.join(TOY, "old.gaf"), dag, label="old.gaf")
    new = parse_gaf(os.path.join(TOY, "new.gaf"), dag, label="new.gaf")
    return dag, old, new


_ACCEPTANCE: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
