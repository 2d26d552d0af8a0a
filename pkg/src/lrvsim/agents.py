"""Agent state for vehicles, the shipment manager and help services, plus their local decision rules."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum

from .engine import EventKind, RandomSource, SimEvent
from .geo_route import Position, Route


class VehicleStatus(str, Enum):
    MOVING = "Moving"
    RESTING = "Resting"
    REFUELING = "Refueling"
    BROKEN_DOWN = "BrokenDown"
    AWAITING_HELP = "AwaitingHelp"
    ARRIVED = "Arrived"


class UnitStatus(str, Enum):
    AVAILABLE = "Available"
    ENGAGED = "Engaged"


class RequestKind(str, Enum):
    POLICE = "Police"
    MEDICAL = "Medical"
    WORKSHOP = "Workshop"


class WeatherDecision(str, Enum):
    PROCEED = "Proceed"
    REST_EARLY = "RestEarly"


class ServiceMode(str, Enum):
    ON_STATION = "OnStation"
    OFF_STATION = "OffStation"


class NoMobileUnitError(LookupError):
    """Severe fault but the responding unit cannot leave its station."""


@dataclass
class VehicleState:
    id: str
    route_km: float = 0.0
    speed_kmh: float = 50.0
    base_speed_kmh: float = 50.0
    max_speed_kmh: float = 80.0
    fuel_liters: float = 400.0
    tank_capacity_liters: float = 400.0
    consumption_l_per_km: float = 0.35
    reliability: float = 1.0
    load_tons: float = 0.0
    category: str = "container"
    checkpoint_log: list[tuple[int, float]] = field(default_factory=list)
    status: VehicleStatus = VehicleStatus.MOVING

    def __post_init__(self):
        if not 0 <= self.reliability <= 1:
            raise ValueError(f"reliability must lie in [0, 1], got {self.reliability}")
        if not 0 <= self.fuel_liters <= self.tank_capacity_liters:
            raise ValueError("fuel must lie between 0 and the tank capacity")


@dataclass
class PoliceVanState:
    id: str
    position_km: float
    coverage_start_km: float
    coverage_end_km: float
    speed_kmh: float = 80.0
    position: Position | None = None
    status: UnitStatus = UnitStatus.AVAILABLE
    current_assignment: str | None = None
    # request ids still to visit, primary assignment last
    itinerary: list[str] = field(default_factory=list)
    target_km: float | None = None

    def __post_init__(self):
        if not self.coverage_start_km < self.coverage_end_km:
            raise ValueError(f"van {self.id}: coverage_start_km must be below coverage_end_km")

    def covers(self, km: float) -> bool:
        return self.coverage_start_km <= km <= self.coverage_end_km

    def check(self):
        assert (self.status is UnitStatus.ENGAGED) == (self.current_assignment is not None), self.id


@dataclass
class FuelStationState:
    id: str
    route_km: float
    price_per_liter: float
    fuel_available_liters: float = 50_000.0
    services: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.fuel_available_liters < 0 or self.price_per_liter <= 0:
            raise ValueError(f"fuel station {self.id}: stock must be >= 0 and price > 0")


@dataclass
class RestAreaState:
    id: str
    route_km: float
    category: int = 1
    services: frozenset[str] = frozenset()
    meal_price: float = 0.0

    def __post_init__(self):
        if self.category < 1:
            raise ValueError(f"rest area {self.id}: category must be >= 1")


@dataclass
class ServiceUnitState:
    id: str
    kind: RequestKind
    route_km: float
    mobile: bool = True
    quality: float = 1.0
    speed_kmh: float = 60.0
    status: UnitStatus = UnitStatus.AVAILABLE
    current_assignment: str | None = None

    def check(self):
        assert (self.status is UnitStatus.ENGAGED) == (self.current_assignment is not None), self.id


@dataclass(frozen=True)
class HelpRequest:
    request_id: str
    vehicle_id: str | None
    kind: RequestKind
    position_km: float
    severity: float
    issued_at: float

    def __post_init__(self):
        if not 0 <= self.severity <= 1:
            raise ValueError(f"severity must lie in [0, 1], got {self.severity}")


@dataclass
class ShipmentManagerState:
    id: str = "manager"
    last_heartbeat: dict[str, float] = field(default_factory=dict)
    last_known_km: dict[str, float] = field(default_factory=dict)
    expected_arrival: dict[str, float] = field(default_factory=dict)
    pending_requests: deque[HelpRequest] = field(default_factory=deque)
    alarm_latched: set[str] = field(default_factory=set)
    trip_history: dict[str, object] = field(default_factory=dict)

    def record_heartbeat(self, vehicle_id: str, now: float, route_km: float):
        self.last_heartbeat[vehicle_id] = now
        self.last_known_km[vehicle_id] = route_km
        self.alarm_latched.discard(vehicle_id)

    def stop_monitoring(self, vehicle_id: str):
        self.last_heartbeat.pop(vehicle_id, None)
        self.alarm_latched.discard(vehicle_id)

    def pop_pending(self, kinds) -> HelpRequest | None:
        """Oldest pending request of one of ``kinds``."""
        for req in self.pending_requests:
            if req.kind in kinds:
                self.pending_requests.remove(req)
                return req
        return None


def sample_incident(rate_per_km: float, start_km: float, segment_km: float, rng: RandomSource) -> float | None:
    """Bernoulli draw with probability 1 - exp(-rate * length); position uniform in the segment."""
    if rate_per_km <= 0 or segment_km <= 0:
        return None
    p = -math.expm1(-rate_per_km * segment_km)
    if rng.random() >= p:
        return None
    return start_km + rng.random() * segment_km


def sample_breakdown(
    v: VehicleState, segment_km: float, base_hazard_per_km: float, rng: RandomSource, start_km: float | None = None
) -> float | None:
    if segment_km <= 0 or base_hazard_per_km < 0:
        raise ValueError("segment_km must be positive and hazard non-negative")
    start = v.route_km if start_km is None else start_km
    return sample_incident((1 - v.reliability) * base_hazard_per_km, start, segment_km, rng)


def advance_to_km(
    v: VehicleState,
    route: Route,
    target_km: float,
    now: float,
    rng: RandomSource | None = None,
    base_hazard_per_km: float = 0.0,
) -> tuple[VehicleState, list[SimEvent]]:
    """Drive ``v`` toward ``target_km`` at its current speed starting at time ``now``.

    Motion stops early at a sampled breakdown point or where the tank runs dry.
    Emitted events carry their own timestamps and are not yet scheduled.
    """
    if v.status is not VehicleStatus.MOVING:
        raise ValueError(f"vehicle {v.id} is {v.status.value}, not Moving")
    start = v.route_km
    target = min(target_km, route.length_km)
    stop_km, stop_reason = target, None

    if rng is not None and target > start and base_hazard_per_km > 0:
        b = sample_breakdown(v, target - start, base_hazard_per_km, rng)
        if b is not None:
            stop_km, stop_reason = b, "breakdown"
    if v.consumption_l_per_km > 0:
        reach = start + v.fuel_liters / v.consumption_l_per_km
        if reach < stop_km:
            stop_km, stop_reason = reach, "fuel"

    at = lambda km: now + (km - start) / v.speed_kmh
    events = []
    log = list(v.checkpoint_log)
    done = {cid for cid, _ in log}
    for cp in route.checkpoints:
        if cp.id not in done and start <= cp.cumulative_km <= stop_km:
            t = at(cp.cumulative_km)
            log.append((cp.id, t))
            fuel_here = v.fuel_liters - (cp.cumulative_km - start) * v.consumption_l_per_km
            events.append(SimEvent(t, EventKind.CHECKPOINT_PASSED, v.id, {
                "checkpoint": cp.id, "km": cp.cumulative_km, "fuel_l": max(fuel_here, 0.0),
            }))

    fuel = v.fuel_liters - (stop_km - start) * v.consumption_l_per_km
    if stop_reason == "fuel":
        fuel = 0.0
    nv = replace(v, route_km=stop_km, fuel_liters=max(fuel, 0.0), checkpoint_log=log)
    t_stop = at(stop_km)
    if stop_reason == "breakdown":
        nv.status = VehicleStatus.BROKEN_DOWN
        events.append(SimEvent(t_stop, EventKind.BREAKDOWN, v.id, {"km": stop_km, "fuel_l": nv.fuel_liters}))
    elif stop_reason == "fuel":
        nv.status = VehicleStatus.AWAITING_HELP
        events.append(
            SimEvent(t_stop, EventKind.HELP_REQUESTED, v.id,
                     {"kind": RequestKind.WORKSHOP.value, "km": stop_km, "reason": "fuel"})
        )
    elif stop_km >= route.length_km:
        nv.status = VehicleStatus.ARRIVED
        events.append(SimEvent(t_stop, EventKind.ARRIVED, v.id, {"km": stop_km}))
    return nv, events


def advance_vehicle(
    v: VehicleState, route: Route, dt: float, rng: RandomSource | None = None,
    base_hazard_per_km: float = 0.0, now: float = 0.0,
) -> tuple[VehicleState, list[SimEvent]]:
    if dt <= 0:
        raise ValueError("dt must be positive")
    return advance_to_km(v, route, v.route_km + v.speed_kmh * dt, now, rng, base_hazard_per_km)


def adapt_to_weather(
    v: VehicleState,
    forecast_severity: float,
    nearest_rest: RestAreaState | None,
    threshold: float = 0.7,
) -> WeatherDecision:
    # Without a rest area ahead the caller slows the vehicle instead of stopping it.
    if forecast_severity >= threshold and nearest_rest is not None and nearest_rest.route_km >= v.route_km:
        return WeatherDecision.REST_EARLY
    return WeatherDecision.PROCEED


def heartbeat_monitor(
    m: ShipmentManagerState, now: float, interval: float = 0.25, missed_limit: int = 3
) -> list[SimEvent]:
    """Alarm once per silence episode for every vehicle whose heartbeat is overdue."""
    if interval <= 0 or missed_limit < 1:
        raise ValueError("interval must be positive and missed_limit >= 1")
    events = []
    for vid in sorted(m.last_heartbeat):
        if vid in m.alarm_latched or now - m.last_heartbeat[vid] <= missed_limit * interval:
            continue
        m.alarm_latched.add(vid)
        km = m.last_known_km.get(vid, 0.0)
        silent = now - m.last_heartbeat[vid]
        events.append(SimEvent(now, EventKind.SIGNAL_LOST, vid, {"silent_h": silent, "last_km": km}))
        events.append(SimEvent(now, EventKind.ALARM_RAISED, m.id, {"vehicle": vid, "km": km}))
        events.append(
            SimEvent(now, EventKind.HELP_REQUESTED, vid,
                     {"kind": RequestKind.POLICE.value, "km": km, "reason": "signal_lost"})
        )
    return events


def choose_fuel_station(
    v: VehicleState, stations_ahead: list[FuelStationState], reserve_fraction: float = 0.1
) -> str | None:
    """Cheapest station reachable on the usable fuel; nearer wins a price tie."""
    if v.consumption_l_per_km > 0:
        reach_km = v.fuel_liters * (1 - reserve_fraction) / v.consumption_l_per_km
    else:
        reach_km = math.inf
    reachable = [s for s in stations_ahead if 0 <= s.route_km - v.route_km <= reach_km]
    if not reachable:
        return None
    return min(reachable, key=lambda s: (s.price_per_liter, s.route_km)).id


def triage_service(req: HelpRequest, unit: ServiceUnitState, severity_threshold: float = 0.5) -> ServiceMode:
    if unit.status is not UnitStatus.AVAILABLE:
        raise ValueError(f"unit {unit.id} is not available")
    if req.severity >= severity_threshold:
        if not unit.mobile:
            raise NoMobileUnitError(f"request {req.request_id} needs off-station help; {unit.id} is fixed")
        return ServiceMode.OFF_STATION
    return ServiceMode.ON_STATION
