import pytest

from lrvsim.config import BreakPolicy, ConfigError, config_from_dict, cpec_config, load_scenario
from lrvsim.geo_route import Mode

MINIMAL = """
route:
  checkpoints: [{x: 0, y: 0}, {x: 100, y: 0}]
  segment_speeds: [50]
vehicles:
  - {id: t1, reliability: 0.8}
"""


def test_minimal_config_gets_defaults():
    cfg = load_scenario(MINIMAL)
    assert cfg.route.length_km == 100
    assert cfg.breaks == BreakPolicy()
    assert cfg.vehicles[0].reliability == 0.8
    assert cfg.vehicles[0].max_speed_kmh == 80
    assert cfg.hazards.breakdown_per_km == 0


def test_negative_speed_names_the_field():
    with pytest.raises(ConfigError) as err:
        load_scenario(MINIMAL.replace("[50]", "[-5]"))
    assert "route.segment_speeds[0]" in str(err.value)


def test_missing_reliability_rejected():
    with pytest.raises(ConfigError) as err:
        load_scenario(MINIMAL.replace(", reliability: 0.8", ""))
    assert "vehicles[0].reliability" in str(err.value)


def test_parse_error():
    with pytest.raises(ConfigError):
        load_scenario("route: [unclosed\n")


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"breaks": {"meal_hours": -1}}, "breaks.meal_hours"),
        ({"vehicles": [{"id": "a", "reliability": 1}, {"id": "a", "reliability": 1}]}, "vehicles[1].id"),
        ({"hazards": {"breakdown_per_km": -0.1}}, "hazards.breakdown_per_km"),
    ],
)
def test_invariant_violations(make_config, patch, field):
    with pytest.raises(ConfigError) as err:
        make_config(**patch)
    assert field in str(err.value)


def test_cpec_reference_file():
    cfg = cpec_config()
    assert cfg.route.checkpoints[0].position.mode is Mode.GEOGRAPHIC
    assert cfg.route.length_km == 2442
    assert set(cfg.route.segment_speeds) == {50}
    assert cfg.breaks == BreakPolicy(3, 0.5, 6, 0.25, 5, 0.25)
    assert cfg.checkpoint_names[0] == "Gwadar" and cfg.checkpoint_names[-1] == "Kashgar"
    assert len(cfg.police_vans) == 3


def test_dict_and_text_agree():
    import yaml

    assert config_from_dict(yaml.safe_load(MINIMAL)) == load_scenario(MINIMAL)
