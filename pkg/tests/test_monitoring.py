import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrvsim.config import BreakPolicy
from lrvsim.geo_route import Position, Route
from lrvsim.monitoring import (
    CheckpointRecord,
    MissingCheckpointError,
    MonitoringError,
    SchedulePlan,
    ScheduleStatus,
    UndefinedIntervalError,
    delta_t,
    recovery_plan,
    schedule_status,
    time_to_reach_checkpoint,
    total_time,
    update_expected_arrival,
)
from lrvsim.planning import break_schedule, plan_trip_time


def recs(times):
    return [CheckpointRecord(i, t) for i, t in enumerate(times)]


def test_delta_t():
    r = [CheckpointRecord(1, 10.0), CheckpointRecord(2, 14.5)]
    assert delta_t(r, 1, 2) == 4.5
    with pytest.raises(UndefinedIntervalError):
        delta_t(r, 2, 2)
    with pytest.raises(UndefinedIntervalError):
        delta_t(r, 3, 1)
    with pytest.raises(MissingCheckpointError):
        delta_t(r, 0, 2)


@given(st.integers(0, 20), st.integers(0, 20))
def test_delta_t_validity_is_antisymmetric(i, j):
    r = recs(range(21))
    if i < j:
        delta_t(r, i, j)
        with pytest.raises(UndefinedIntervalError):
            delta_t(r, j, i)


def test_total_time():
    assert total_time(recs([10, 12, 15, 20])) == 10
    assert total_time(recs([3.5])) == 0
    with pytest.raises(MonitoringError):
        total_time([])


@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=40, unique=True))
def test_total_time_telescopes_exactly(times):
    times = sorted(times)
    assert total_time(recs(times)) == times[-1] - times[0]


def test_time_to_reach_checkpoint():
    assert time_to_reach_checkpoint(100, 50) == 2.0
    assert time_to_reach_checkpoint(2442, 50) == pytest.approx(48.84, abs=1e-12)
    assert time_to_reach_checkpoint(0, 50) == 0
    with pytest.raises(MonitoringError):
        time_to_reach_checkpoint(10, 0)


@pytest.mark.parametrize(
    "actual, expected",
    [(10.0, ScheduleStatus.ON_TIME), (12.0, ScheduleStatus.BEHIND), (8.0, ScheduleStatus.AHEAD),
     (10.9, ScheduleStatus.ON_TIME), (9.1, ScheduleStatus.ON_TIME)],
)
def test_schedule_status(actual, expected):
    assert schedule_status(actual, 10.0, 0.1) is expected


PLAN = SchedulePlan((5.0, 5.0), speed_boost_cap_kmh=60.0)


def test_recovery_plan_examples():
    assert recovery_plan(0.0, PLAN, 50, 80, 10) == (1.0, 50)
    assert recovery_plan(1.0, PLAN, 50, 80, 10) == (0.5, pytest.approx(55.0))
    assert recovery_plan(4.0, PLAN, 50, 80, 10) == (0.5, 60.0)
    assert recovery_plan(4.0, PLAN, 50, 56, 10) == (0.5, 56.0)


@given(
    st.floats(0.001, 100), st.floats(10, 120), st.floats(10, 150), st.floats(0.1, 200), st.floats(10, 150),
)
def test_recovery_never_exceeds_caps(behind, base, max_speed, remaining, cap):
    plan = SchedulePlan((1.0,), speed_boost_cap_kmh=cap)
    scale, speed = recovery_plan(behind, plan, base, max_speed, remaining)
    assert speed <= min(cap, max_speed)
    assert 0 < scale <= 1


CPEC_BREAKS = BreakPolicy(3, 0.5, 6, 0.25, 5, 0.25)


def straight_route(length, speed=50.0):
    return Route.from_positions([Position(0, 0), Position(length, 0)], [speed], [0, length])


def test_eta_at_origin_matches_closed_form():
    route = straight_route(2442)
    stops = break_schedule(route, 2442 / 50, CPEC_BREAKS)
    eta = update_expected_arrival(0.0, route, 0.0, lambda i: 50.0, sum(s.hours for s in stops))
    assert eta == pytest.approx(56.21, abs=1e-9)


def test_eta_at_final_checkpoint_is_now():
    route = straight_route(2442)
    assert update_expected_arrival(60.0, route, 2442, lambda i: 50.0, 0.0) == 60.0


def test_eta_halfway():
    policy = BreakPolicy(3, 0.5, 6, 0.25, 4, 0.25)
    route = straight_route(2442)
    stops = break_schedule(route, 2442 / 50, policy)
    remaining = sum(s.hours for s in stops if s.km >= 1221)
    oracle_total = plan_trip_time(2442, 50, policy).total_hours
    eta = update_expected_arrival(30.0, route, 1221, lambda i: 50.0, remaining)
    assert eta == pytest.approx(30.0 + oracle_total / 2, abs=1e-9)
