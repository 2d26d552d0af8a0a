import sys

import pytest

from lrvsim.config import config_from_dict


def grid_route(kms, speeds):
    return {
        "mode": "Grid",
        "checkpoints": [{"x": k, "y": 0, "km": k} for k in kms],
        "segment_speeds": speeds,
    }


@pytest.fixture
def make_config():
    """Scenario dict -> config, starting from a quiet straight grid road."""

    def build(**overrides):
        data = {
            "seed": 1,
            "horizon_hours": 200,
            "route": grid_route([0, 100, 200, 300], [50, 50, 50]),
            "vehicles": [{"id": "v1", "reliability": 1.0}],
            "breaks": {"meals_per_day": 0, "refreshments_per_day": 0, "fuel_stops": 0},
        }
        data.update(overrides)
        return config_from_dict(data)

    return build


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
