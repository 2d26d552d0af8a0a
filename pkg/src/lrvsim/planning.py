"""Closed-form trip planning and the per-vehicle break schedule derived from it."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .config import BreakPolicy
from .engine import EventKind
from .geo_route import Route


@dataclass(frozen=True)
class TripPlan:
    driving_hours: float
    driving_days: float
    total_hours: float
    total_days: float


@dataclass(frozen=True)
class PlannedStop:
    km: float
    kind: EventKind  # MealBreak, RefreshmentBreak or RefuelStart
    hours: float

    @property
    def is_rest(self) -> bool:
        return self.kind is not EventKind.REFUEL_START


def driving_days(driving_hours: float) -> float:
    """Driving time in days, rounded half-up to two decimals as a person would."""
    # 9-decimal pre-rounding keeps float noise (2.0349999...) from flipping the half-up step
    return float(Decimal(f"{driving_hours / 24:.9f}").quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _break_hours(driving_hours: float, breaks: BreakPolicy) -> tuple[float, float, float, float]:
    # Break counts follow driving days rounded to two decimals, not total days.
    days = driving_days(driving_hours)
    meals = days * breaks.meals_per_day * breaks.meal_hours
    refresh = days * breaks.refreshments_per_day * breaks.refreshment_hours
    fuel = breaks.fuel_stops * breaks.fuel_stop_hours
    return days, meals, refresh, fuel


def plan_trip_time(distance_km: float, speed_kmh: float, breaks: BreakPolicy) -> TripPlan:
    if distance_km <= 0 or speed_kmh <= 0:
        raise ValueError("distance and speed must be positive")
    driving = distance_km / speed_kmh
    days, meals, refresh, fuel = _break_hours(driving, breaks)
    total = meals + refresh + fuel + driving
    return TripPlan(driving, days, total, total / 24)


def route_driving_hours(route: Route, max_speed_kmh: float = float("inf")) -> float:
    cps = route.checkpoints
    return sum(
        (b.cumulative_km - a.cumulative_km) / min(s, max_speed_kmh)
        for a, b, s in zip(cps, cps[1:], route.segment_speeds)
    )


def _spread(length_km: float, count: int, kind: EventKind, hours: float) -> list[PlannedStop]:
    return [PlannedStop(length_km * k / (count + 1), kind, hours) for k in range(1, count + 1)]


def break_schedule(route: Route, driving_hours: float, breaks: BreakPolicy) -> list[PlannedStop]:
    """Evenly spaced stops whose durations add up to the closed-form break total.

    A fractional number of breaks (say 6.12 meals) is rounded to whole stops
    and the total time is shared equally among them.
    """
    days, meals, refresh, _ = _break_hours(driving_hours, breaks)
    stops = []
    for total, per_day, kind in (
        (meals, breaks.meals_per_day, EventKind.MEAL_BREAK),
        (refresh, breaks.refreshments_per_day, EventKind.REFRESHMENT_BREAK),
    ):
        if total > 0:
            n = max(1, round(days * per_day))
            stops += _spread(route.length_km, n, kind, total / n)
    if breaks.fuel_stops and breaks.fuel_stop_hours >= 0:
        stops += _spread(route.length_km, breaks.fuel_stops, EventKind.REFUEL_START, breaks.fuel_stop_hours)
    order = {EventKind.MEAL_BREAK: 0, EventKind.REFRESHMENT_BREAK: 1, EventKind.REFUEL_START: 2}
    return sorted(stops, key=lambda s: (s.km, order[s.kind]))


def expected_segment_hours(route: Route, stops: list[PlannedStop], max_speed_kmh: float) -> list[float]:
    """Planned time per segment: driving at the segment speed plus the stops that fall inside it."""
    cps = route.checkpoints
    hours = []
    for i, (a, b) in enumerate(zip(cps, cps[1:])):
        h = (b.cumulative_km - a.cumulative_km) / min(route.segment_speeds[i], max_speed_kmh)
        h += sum(s.hours for s in stops if a.cumulative_km <= s.km < b.cumulative_km)
        hours.append(h)
    return hours
