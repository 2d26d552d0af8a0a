"""Checkpoint timing: interval times, trip totals, ETAs and schedule recovery."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .geo_route import Route


class MonitoringError(ValueError):
    pass


class UndefinedIntervalError(MonitoringError):
    pass


class MissingCheckpointError(MonitoringError, KeyError):
    pass


class ScheduleStatus(str, Enum):
    AHEAD = "Ahead"
    ON_TIME = "OnTime"
    BEHIND = "Behind"


@dataclass(frozen=True)
class CheckpointRecord:
    checkpoint_id: int
    observed_time: float


@dataclass(frozen=True)
class SchedulePlan:
    expected_segment_hours: tuple[float, ...]
    lateness_tolerance: float = 0.05
    rest_reduction_factor: float = 0.5
    speed_boost_cap_kmh: float = 80.0

    def __post_init__(self):
        if any(h <= 0 for h in self.expected_segment_hours):
            raise MonitoringError("expected segment hours must be positive")
        if not 0 < self.rest_reduction_factor <= 1:
            raise MonitoringError("rest_reduction_factor must lie in (0, 1]")
        if self.lateness_tolerance < 0:
            raise MonitoringError("lateness_tolerance must be non-negative")

    def remaining_hours(self, from_checkpoint: int) -> float:
        return sum(self.expected_segment_hours[from_checkpoint:])


def _lookup(records: Sequence[CheckpointRecord], cid: int) -> float:
    for r in records:
        if r.checkpoint_id == cid:
            return r.observed_time
    raise MissingCheckpointError(f"no record for checkpoint {cid}")


def delta_t(records: Sequence[CheckpointRecord], i: int, j: int) -> float:
    """Observed time between an earlier checkpoint ``i`` and a later one ``j``."""
    if i >= j:
        raise UndefinedIntervalError(f"interval ({i}, {j}) is undefined: need i < j")
    return _lookup(records, j) - _lookup(records, i)


def total_time(records: Sequence[CheckpointRecord]) -> float:
    # Consecutive pairs only; a wider double sum counts intervals twice. Exact
    # rational accumulation makes the result the correctly rounded last - first.
    if not records:
        raise MonitoringError("total_time needs at least one checkpoint record")
    ordered = sorted(records, key=lambda r: r.checkpoint_id)
    total = Fraction(0)
    for a, b in zip(ordered, ordered[1:]):
        if a.checkpoint_id == b.checkpoint_id:
            raise UndefinedIntervalError(f"checkpoint {a.checkpoint_id} recorded twice")
        total += Fraction(b.observed_time) - Fraction(a.observed_time)
    return float(total)


def time_to_reach_checkpoint(dist_km: float, avg_speed_kmh: float) -> float:
    if avg_speed_kmh <= 0:
        raise MonitoringError(f"average speed must be positive, got {avg_speed_kmh}")
    if dist_km < 0:
        raise MonitoringError(f"distance must be non-negative, got {dist_km}")
    return dist_km / avg_speed_kmh


def schedule_status(actual_hours: float, expected_hours: float, tolerance: float) -> ScheduleStatus:
    if actual_hours > expected_hours * (1 + tolerance):
        return ScheduleStatus.BEHIND
    if actual_hours < expected_hours * (1 - tolerance):
        return ScheduleStatus.AHEAD
    return ScheduleStatus.ON_TIME


def recovery_plan(
    behind_by_hours: float,
    plan: SchedulePlan,
    base_speed_kmh: float,
    max_speed_kmh: float,
    remaining_expected_hours: float,
    current_speed_kmh: float | None = None,
    current_rest_scale: float = 1.0,
) -> tuple[float, float]:
    """Shorten rests and raise speed, within caps, for a vehicle running late.

    Returns ``(rest_scale, speed_kmh)``. A vehicle that is not behind, or has
    no remaining plan to catch up on, keeps its current values.
    """
    current = base_speed_kmh if current_speed_kmh is None else current_speed_kmh
    if behind_by_hours <= 0 or remaining_expected_hours <= 0:
        return current_rest_scale, current
    cap = min(plan.speed_boost_cap_kmh, max_speed_kmh)
    boosted = base_speed_kmh * (1 + behind_by_hours / remaining_expected_hours)
    return plan.rest_reduction_factor, min(boosted, cap)


def drive_hours_remaining(route: Route, current_km: float, speed_of_segment) -> float:
    """Driving time from ``current_km`` to the route end, segment by segment.

    ``speed_of_segment(i)`` gives the effective km/h on segment i.
    """
    hours = 0.0
    km = current_km
    for i in range(route.segment_index(current_km), len(route.segment_speeds)):
        end = route.checkpoints[i + 1].cumulative_km
        if end > km:
            hours += time_to_reach_checkpoint(end - km, speed_of_segment(i))
            km = end
    return hours


def update_expected_arrival(
    now: float,
    route: Route,
    current_km: float,
    speed_of_segment,
    remaining_break_hours: float = 0.0,
) -> float:
    """ETA from here: remaining drive time plus the breaks still scheduled."""
    return now + drive_hours_remaining(route, current_km, speed_of_segment) + remaining_break_hours
