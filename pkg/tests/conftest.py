from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from graphmms.its import MultipartiteGraph
from graphmms.model import parse_instance

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def k3():
    return parse_instance((FIXTURES / "k3.json").read_bytes())


def load_graph(name: str) -> MultipartiteGraph:
    import json
    return MultipartiteGraph.from_json(json.loads((FIXTURES / name).read_text()))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
