import json
from functools import lru_cache

import pytest

from chebotarev.groups import build_group
from chebotarev.lattice import generation_profile

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def _group(spec_json: str):
    return build_group(json.loads(spec_json))


def group(**spec):
    return _group(json.dumps(spec, sort_keys=True))


@lru_cache(maxsize=None)
def _profile(spec_json: str):
    return generation_profile(_group(spec_json))


def profile(**spec):
    return _profile(json.dumps(spec, sort_keys=True))


@pytest.fixture
def G():
    return group


@pytest.fixture
def P():
    return profile


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
