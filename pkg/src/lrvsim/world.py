"""The simulated world: builds agents from a scenario and reacts to every event kind.

Vehicles move in legs. A leg runs from the current position to the next
waypoint (checkpoint, planned stop, fuel detour, weather shelter); its end
events are scheduled when the leg starts and withdrawn if the leg is cut
short by a weather change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import dispatch as dsp
from .agents import (
    FuelStationState,
    HelpRequest,
    PoliceVanState,
    RequestKind,
    RestAreaState,
    ServiceMode,
    ServiceUnitState,
    ShipmentManagerState,
    UnitStatus,
    VehicleState,
    VehicleStatus,
    WeatherDecision,
    adapt_to_weather,
    advance_to_km,
    choose_fuel_station,
    heartbeat_monitor,
    sample_incident,
    triage_service,
)
from .config import ScenarioConfig, VehicleSpec
from .engine import EventKind, RandomSource, SimEvent, Simulator
from .geo_route import position_at_km
from .monitoring import (
    SchedulePlan,
    ScheduleStatus,
    recovery_plan,
    schedule_status,
    update_expected_arrival,
)
from .planning import PlannedStop, break_schedule, expected_segment_hours, route_driving_hours

K = EventKind
_WAYPOINT_ORDER = {"checkpoint": 0, "detour": 1, "stop": 2}


@dataclass
class Trip:
    """Per-vehicle bookkeeping that is not part of the vehicle's own state."""

    spec: VehicleSpec
    stops: list[PlannedStop]
    plan: SchedulePlan
    depart_time: float
    initial_eta: float
    stop_index: int = 0
    boost: float = 1.0
    rest_scale: float = 1.0
    slowed: bool = False
    sheltering: bool = False
    weather_resting: bool = False
    detour: tuple | None = None  # (km, kind, agent_id)
    leg_events: list[SimEvent] = field(default_factory=list)
    leg_start: tuple[float, VehicleState] | None = None
    leg_end_state: VehicleState | None = None
    waiting_for: str | None = None
    last_refuel_km: float = -1.0
    departed: bool = False
    arrived: bool = False


class World:
    def __init__(self, config: ScenarioConfig, seed: int | None = None):
        self.config = config
        self.route = config.route
        self.sim = Simulator()
        self.rng = RandomSource(config.seed if seed is None else seed)
        self.manager = ShipmentManagerState()
        self.vehicles: dict[str, VehicleState] = {}
        self.trips: dict[str, Trip] = {}
        self.vans = [
            PoliceVanState(v.id, v.position_km, v.coverage[0], v.coverage[1], v.speed_kmh,
                           position=position_at_km(self.route, v.position_km))
            for v in config.police_vans
        ]
        self.units = [
            ServiceUnitState(u.id, u.kind, u.km, u.mobile, u.quality, u.speed_kmh) for u in config.service_units
        ]
        self.stations = [
            FuelStationState(s.id, s.km, s.price_per_liter, s.fuel_available_liters, frozenset(s.services))
            for s in config.fuel_stations
        ]
        self.rest_areas = [
            RestAreaState(a.id, a.km, a.category, frozenset(a.services), a.meal_price) for a in config.rest_areas
        ]
        self.requests: dict[str, HelpRequest] = {}
        self.decisions: list[tuple[float, dsp.DispatchDecision]] = []
        self.weather: dict[tuple[float, float], float] = {}
        # (event, departure time, start km, destination km) for vans in transit
        self.van_legs: dict[str, tuple[SimEvent, float, float, float]] = {}
        self.serving: set[str] = set()
        self._request_counter = 0
        self._handlers = {
            K.DEPART: self._on_depart,
            K.CHECKPOINT_PASSED: self._on_checkpoint,
            K.MEAL_BREAK: self._on_break,
            K.REFRESHMENT_BREAK: self._on_break,
            K.REFUEL_START: self._on_refuel_start,
            K.REFUEL_END: self._on_resume,
            K.REST_START: self._on_rest_start,
            K.REST_END: self._on_resume,
            K.BREAKDOWN: self._on_breakdown,
            K.HELP_REQUESTED: self._on_help_requested,
            K.VAN_ARRIVED: self._on_van_arrived,
            K.SERVICE_COMPLETED: self._on_service_completed,
            K.HEARTBEAT: self._on_heartbeat,
            K.WEATHER_UPDATE: self._on_weather,
            K.ARRIVED: self._on_arrived,
        }
        self._setup()

    # ------------------------------------------------------------------ setup

    def _setup(self):
        cfg = self.config
        for spec in cfg.vehicles:
            v = VehicleState(
                id=spec.id,
                max_speed_kmh=spec.max_speed_kmh,
                fuel_liters=spec.fuel_liters if spec.fuel_liters is not None else spec.tank_capacity_liters,
                tank_capacity_liters=spec.tank_capacity_liters,
                consumption_l_per_km=spec.consumption_l_per_km,
                reliability=spec.reliability,
                load_tons=spec.load_tons,
                category=spec.category,
                status=VehicleStatus.RESTING,
            )
            self._set_segment_speed(v, 0, boost=1.0)
            driving = route_driving_hours(self.route, spec.max_speed_kmh)
            stops = break_schedule(self.route, driving, cfg.breaks)
            plan = SchedulePlan(
                tuple(expected_segment_hours(self.route, stops, spec.max_speed_kmh)),
                cfg.schedule.lateness_tolerance,
                cfg.schedule.rest_reduction_factor,
                cfg.schedule.speed_boost_cap_kmh,
            )
            eta = spec.depart_hours + driving + sum(s.hours for s in stops)
            self.vehicles[spec.id] = v
            self.trips[spec.id] = Trip(spec, stops, plan, spec.depart_hours, eta)
            self.sim.schedule(SimEvent(spec.depart_hours, K.DEPART, spec.id, {
                "origin": self._cp_name(0),
                "terminal": self._cp_name(-1),
                "reliability": spec.reliability,
                "eta": eta,
                "tolerance": cfg.schedule.lateness_tolerance,
            }))
        for u in cfg.weather.updates:
            self.sim.schedule(SimEvent(u.time, K.WEATHER_UPDATE, "weather", {
                "severity": u.severity, "start_km": u.start_km,
                "end_km": u.end_km if math.isfinite(u.end_km) else self.route.length_km,
            }))
        if cfg.vehicles:
            first = min(s.depart_hours for s in cfg.vehicles)
            self.sim.schedule(SimEvent(first + cfg.heartbeat.interval_hours, K.HEARTBEAT, self.manager.id, {}))
        if cfg.incidents.rate_per_hour > 0:
            self._schedule_incident()

    def _cp_name(self, i):
        names = self.config.checkpoint_names
        return names[i] if names else f"cp{i % len(self.route.checkpoints)}"

    # ---------------------------------------------------------------- running

    def done(self) -> bool:
        return bool(self.trips) and all(t.arrived for t in self.trips.values())

    def run(self, horizon: float | None = None) -> list[SimEvent]:
        horizon = self.config.horizon_hours if horizon is None else horizon
        return self.sim.run_until(horizon, self.handle, self.done)

    def handle(self, event: SimEvent):
        trip = self.trips.get(event.subject)
        if trip is not None and event in trip.leg_events:
            self._settle_leg(trip, event)
        handler = self._handlers.get(event.kind)
        if handler is not None:
            handler(event)

    def _schedule(self, event: SimEvent) -> SimEvent:
        return self.sim.schedule(event)

    def _new_request_id(self) -> str:
        self._request_counter += 1
        return f"req-{self._request_counter}"

    # ---------------------------------------------------------------- vehicles

    def _set_segment_speed(self, v: VehicleState, seg: int, boost: float, slowed: bool = False):
        cap = min(self.config.schedule.speed_boost_cap_kmh, v.max_speed_kmh)
        v.base_speed_kmh = min(self.route.segment_speeds[seg], v.max_speed_kmh)
        speed = v.base_speed_kmh * boost
        if boost > 1:
            speed = min(speed, max(cap, v.base_speed_kmh))
        if slowed:
            speed *= self.config.weather.bad_weather_speed_factor
        v.speed_kmh = speed

    def _segment_speed_fn(self, vid):
        trip, v = self.trips[vid], self.vehicles[vid]
        cap = min(self.config.schedule.speed_boost_cap_kmh, v.max_speed_kmh)

        def speed(i):
            base = min(self.route.segment_speeds[i], v.max_speed_kmh)
            s = base * trip.boost
            if trip.boost > 1:
                s = min(s, max(cap, base))
            return s * (self.config.weather.bad_weather_speed_factor if trip.slowed else 1.0)

        return speed

    def _remaining_break_hours(self, trip: Trip) -> float:
        return sum(s.hours * (trip.rest_scale if s.is_rest else 1.0) for s in trip.stops[trip.stop_index:])

    def _current_segment(self, v: VehicleState) -> int:
        logged = len(v.checkpoint_log)
        return min(max(logged - 1, 0), len(self.route.segment_speeds) - 1)

    def current_km(self, vid: str) -> float:
        trip, v = self.trips[vid], self.vehicles[vid]
        if trip.leg_events and trip.leg_start is not None and trip.leg_end_state is not None:
            t0, v0 = trip.leg_start
            return min(v0.route_km + v0.speed_kmh * (self.sim.now - t0), trip.leg_end_state.route_km)
        return v.route_km

    def _forecast(self, km: float) -> float:
        nxt = self.route.next_checkpoint(km)
        end = self.route.checkpoints[nxt].cumulative_km if nxt is not None else km
        if end <= km and nxt is not None and nxt + 1 < len(self.route.checkpoints):
            end = self.route.checkpoints[nxt + 1].cumulative_km
        worst = 0.0
        for (a, b), sev in self.weather.items():
            if a <= end and b >= km:
                worst = max(worst, sev)
        return worst

    def _next_waypoint(self, vid: str):
        v, trip = self.vehicles[vid], self.trips[vid]
        options = []
        logged = len(v.checkpoint_log)
        if logged < len(self.route.checkpoints):
            options.append((self.route.checkpoints[logged].cumulative_km, _WAYPOINT_ORDER["checkpoint"], "checkpoint", None))
        if trip.detour is not None:
            options.append((trip.detour[0], _WAYPOINT_ORDER["detour"], "detour", trip.detour))
        if trip.stop_index < len(trip.stops):
            stop = trip.stops[trip.stop_index]
            options.append((stop.km, _WAYPOINT_ORDER["stop"], "stop", stop))
        return min(options, key=lambda o: (o[0], o[1]))

    def _weather_check(self, vid: str) -> bool:
        """Apply weather adaptation at the vehicle's position; True if its plan changed."""
        v, trip = self.vehicles[vid], self.trips[vid]
        km = self.current_km(vid)
        severity = self._forecast(km)
        threshold = self.config.weather.threshold
        if severity >= threshold:
            if trip.sheltering or trip.slowed:
                return False
            ahead = [a for a in self.rest_areas if a.route_km >= km]
            nearest = ahead[0] if ahead else None
            probe = replace(v, route_km=km)
            if adapt_to_weather(probe, severity, nearest, threshold) is WeatherDecision.REST_EARLY:
                trip.sheltering = True
                trip.detour = (nearest.route_km, K.REST_START, nearest.id)
            else:
                trip.slowed = True
            return True
        changed = trip.sheltering or trip.slowed
        if trip.sheltering and trip.detour and trip.detour[1] is K.REST_START:
            trip.detour = None
        trip.sheltering = trip.slowed = False
        return changed

    def _maybe_fuel_detour(self, vid: str):
        v, trip = self.vehicles[vid], self.trips[vid]
        if trip.detour is not None or v.consumption_l_per_km <= 0:
            return
        next_fuel = next((s.km for s in trip.stops[trip.stop_index:] if not s.is_rest), self.route.length_km)
        usable = v.fuel_liters * (1 - self.config.dispatch.reserve_fraction)
        if (next_fuel - v.route_km) * v.consumption_l_per_km <= usable:
            return
        ahead = [s for s in self.stations if s.route_km >= v.route_km and s.route_km > trip.last_refuel_km]
        sid = choose_fuel_station(v, ahead, self.config.dispatch.reserve_fraction)
        if sid is not None:
            station = next(s for s in self.stations if s.id == sid)
            trip.detour = (station.route_km, K.REFUEL_START, sid)

    def _start_leg(self, vid: str):
        v, trip = self.vehicles[vid], self.trips[vid]
        now = self.sim.now
        v.status = VehicleStatus.MOVING
        self._weather_check(vid)
        self._maybe_fuel_detour(vid)
        self._set_segment_speed(v, self._current_segment(v), trip.boost, trip.slowed)

        w_km, _, tag, item = self._next_waypoint(vid)
        hz = self.config.hazards
        threat_km = medical_km = None
        if w_km > v.route_km:
            threat_km = sample_incident(hz.threat_per_km, v.route_km, w_km - v.route_km, self.rng)
            medical_km = sample_incident(hz.medical_per_km, v.route_km, w_km - v.route_km, self.rng)
        incident = min(
            [(x, k) for x, k in ((threat_km, RequestKind.POLICE), (medical_km, RequestKind.MEDICAL)) if x is not None],
            default=None,
        )
        if incident is not None:
            w_km, tag, item = incident[0], "incident", incident[1]

        nv, events = advance_to_km(v, self.route, w_km, now, self.rng, hz.breakdown_per_km)
        t_end = now + (nv.route_km - v.route_km) / v.speed_kmh
        stopped_early = nv.status is not VehicleStatus.MOVING and nv.status is not VehicleStatus.ARRIVED
        for i, e in enumerate(events):
            if e.kind is K.CHECKPOINT_PASSED:
                j = e.payload["checkpoint"]
                payload = dict(e.payload)
                if j > 0:
                    payload["expected_h"] = trip.plan.expected_segment_hours[j - 1]
                events[i] = replace(e, payload=payload)
            elif e.kind is K.HELP_REQUESTED:
                events[i] = self._stamp_request(e, severity=1.0)
        if not stopped_early:
            if tag == "stop":
                events.append(SimEvent(t_end, item.kind, vid, {
                    "km": item.km, "hours": item.hours * (trip.rest_scale if item.is_rest else 1.0),
                    "planned": 1,
                }))
            elif tag == "detour":
                km, kind, agent = item
                payload = {"km": km, "at": agent, "planned": 0}
                if kind is K.REFUEL_START:
                    payload["hours"] = self.config.breaks.fuel_stop_hours
                events.append(SimEvent(t_end, kind, vid, payload))
            elif tag == "incident":
                reason = "threat" if item is RequestKind.POLICE else "medical"
                nv.status = VehicleStatus.AWAITING_HELP
                events.append(self._stamp_request(
                    SimEvent(t_end, K.HELP_REQUESTED, vid, {"kind": item.value, "km": nv.route_km, "reason": reason}),
                    severity=self.rng.random(),
                ))
        trip.leg_start = (now, replace(v, checkpoint_log=list(v.checkpoint_log)))
        trip.leg_end_state = nv
        trip.leg_events = [self._schedule(e) for e in events]
        if not trip.leg_events:
            # zero-length leg with nothing to do cannot happen; guard against stalls
            raise RuntimeError(f"vehicle {vid} planned an empty leg at {v.route_km} km")

    def _stamp_request(self, event: SimEvent, severity: float) -> SimEvent:
        payload = dict(event.payload)
        payload.setdefault("request_id", self._new_request_id())
        payload.setdefault("severity", severity)
        return replace(event, payload=payload)

    def _settle_leg(self, trip: Trip, event: SimEvent):
        if trip.leg_end_state is not None:
            self.vehicles[event.subject] = trip.leg_end_state
            trip.leg_end_state = None
        trip.leg_events.remove(event)

    def _leg_finished(self, vid: str) -> bool:
        return not self.trips[vid].leg_events

    def _continue(self, vid: str):
        if self._leg_finished(vid) and self.vehicles[vid].status is VehicleStatus.MOVING:
            self._start_leg(vid)

    def _interrupt(self, vid: str):
        """Cut the current leg at the vehicle's present position and plan a new one."""
        trip, v = self.trips[vid], self.vehicles[vid]
        if not trip.leg_events or trip.leg_start is None:
            return
        t0, v0 = trip.leg_start
        km = self.current_km(vid)
        for e in trip.leg_events:
            self.sim.cancel(e)
        trip.leg_events = []
        trip.leg_end_state = None
        fuel = max(v0.fuel_liters - (km - v0.route_km) * v0.consumption_l_per_km, 0.0)
        self.vehicles[vid] = replace(v0, route_km=km, fuel_liters=fuel, checkpoint_log=list(v0.checkpoint_log))
        self._start_leg(vid)

    def _on_depart(self, e: SimEvent):
        trip = self.trips[e.subject]
        trip.departed = True
        self.manager.record_heartbeat(e.subject, e.time, 0.0)
        self.manager.expected_arrival[e.subject] = trip.initial_eta
        self.manager.trip_history[e.subject] = [(e.time, trip.initial_eta)]
        self._start_leg(e.subject)

    def _on_checkpoint(self, e: SimEvent):
        vid = e.subject
        v, trip = self.vehicles[vid], self.trips[vid]
        j = e.payload["checkpoint"]
        if 0 < j < len(self.route.checkpoints) - 1:
            actual = e.time - trip.depart_time
            expected = sum(trip.plan.expected_segment_hours[:j])
            status = schedule_status(actual, expected, trip.plan.lateness_tolerance)
            if status is ScheduleStatus.BEHIND:
                base = min(self.route.segment_speeds[j], v.max_speed_kmh)
                scale, speed = recovery_plan(
                    actual - expected, trip.plan, base, v.max_speed_kmh, trip.plan.remaining_hours(j)
                )
                trip.rest_scale, trip.boost = scale, speed / base
            else:
                trip.rest_scale, trip.boost = 1.0, 1.0
        self._update_eta(vid)
        self._continue(vid)

    def _update_eta(self, vid: str):
        v, trip = self.vehicles[vid], self.trips[vid]
        eta = update_expected_arrival(
            self.sim.now, self.route, v.route_km, self._segment_speed_fn(vid), self._remaining_break_hours(trip)
        )
        self.manager.expected_arrival[vid] = eta
        self.manager.trip_history.setdefault(vid, []).append((self.sim.now, eta))

    def _on_break(self, e: SimEvent):
        vid = e.subject
        trip = self.trips[vid]
        trip.stop_index += 1
        self.vehicles[vid].status = VehicleStatus.RESTING
        self._schedule(SimEvent(e.time + e.payload["hours"], K.REST_END, vid, {"reason": e.kind.value}))

    def _on_refuel_start(self, e: SimEvent):
        vid = e.subject
        trip, v = self.trips[vid], self.vehicles[vid]
        trip.last_refuel_km = v.route_km
        if e.payload.get("planned"):
            trip.stop_index += 1
        else:
            trip.detour = None
        v.status = VehicleStatus.REFUELING
        self._schedule(SimEvent(e.time + e.payload["hours"], K.REFUEL_END, vid, {
            "liters": v.tank_capacity_liters - v.fuel_liters,
        }))

    def _on_rest_start(self, e: SimEvent):
        vid = e.subject
        trip = self.trips[vid]
        trip.detour = None
        trip.weather_resting = True
        self.vehicles[vid].status = VehicleStatus.RESTING
        if self._forecast(self.vehicles[vid].route_km) < self.config.weather.threshold:
            self._end_weather_rest(vid)

    def _end_weather_rest(self, vid: str):
        trip = self.trips[vid]
        trip.weather_resting = False
        trip.sheltering = False
        self._schedule(SimEvent(self.sim.now, K.REST_END, vid, {"reason": "weather"}))

    def _on_resume(self, e: SimEvent):
        vid = e.subject
        v = self.vehicles[vid]
        if e.kind is K.REFUEL_END:
            v.fuel_liters = v.tank_capacity_liters
        self._update_eta(vid)
        v.status = VehicleStatus.MOVING
        self._start_leg(vid)

    def _on_breakdown(self, e: SimEvent):
        vid = e.subject
        self.vehicles[vid].status = VehicleStatus.BROKEN_DOWN
        self._schedule(self._stamp_request(
            SimEvent(e.time, K.HELP_REQUESTED, vid,
                     {"kind": RequestKind.WORKSHOP.value, "km": e.payload["km"], "reason": "breakdown"}),
            severity=self.rng.random(),
        ))

    def _on_arrived(self, e: SimEvent):
        vid = e.subject
        self.vehicles[vid].status = VehicleStatus.ARRIVED
        self.trips[vid].arrived = True
        self.manager.stop_monitoring(vid)
        self.manager.expected_arrival[vid] = e.time
        self.trips[vid].leg_events = []

    # ---------------------------------------------------------------- monitoring

    def _silenced(self, vid: str, t: float) -> bool:
        return any(s.vehicle == vid and s.start <= t < s.end for s in self.config.heartbeat.silences)

    def _on_heartbeat(self, e: SimEvent):
        hb = self.config.heartbeat
        for vid in sorted(self.trips):
            trip, v = self.trips[vid], self.vehicles[vid]
            if not trip.departed or trip.arrived or self._silenced(vid, e.time):
                continue
            self.manager.record_heartbeat(vid, e.time, self.current_km(vid))
        for alarm in heartbeat_monitor(self.manager, e.time, hb.interval_hours, hb.missed_limit):
            if alarm.kind is K.HELP_REQUESTED:
                alarm = self._stamp_request(alarm, severity=1.0)
            self._schedule(alarm)
        if not self.done():
            self._schedule(SimEvent(e.time + hb.interval_hours, K.HEARTBEAT, self.manager.id, {}))

    def _on_weather(self, e: SimEvent):
        self.weather[(e.payload["start_km"], e.payload["end_km"])] = e.payload["severity"]
        threshold = self.config.weather.threshold
        for vid in sorted(self.trips):
            trip, v = self.trips[vid], self.vehicles[vid]
            if not trip.departed:
                continue
            if trip.weather_resting:
                if self._forecast(v.route_km) < threshold:
                    self._end_weather_rest(vid)
            elif v.status is VehicleStatus.MOVING and trip.leg_events and trip.leg_end_state is not None:
                was = (trip.sheltering, trip.slowed)
                probe = self._weather_probe(vid)
                if probe != was:
                    self._interrupt(vid)

    def _weather_probe(self, vid: str):
        """What the weather rule would decide now, without committing to it."""
        trip = self.trips[vid]
        saved = (trip.sheltering, trip.slowed, trip.detour)
        self._weather_check(vid)
        probe = (trip.sheltering, trip.slowed)
        trip.sheltering, trip.slowed, trip.detour = saved
        return probe

    def inject_request(self, time: float, km: float, kind: RequestKind = RequestKind.POLICE,
                       severity: float = 1.0, subject: str = "caller") -> SimEvent:
        """Schedule an external help request, e.g. a call from a road user."""
        return self._schedule(self._stamp_request(
            SimEvent(time, K.HELP_REQUESTED, subject, {"kind": kind.value, "km": km, "reason": "call"}),
            severity=severity,
        ))

    def _schedule_incident(self):
        inc = self.config.incidents
        t = self.sim.now + self.rng.exponential(inc.rate_per_hour)
        km = self.rng.uniform(0.0, self.route.length_km)
        self._schedule(self._stamp_request(
            SimEvent(t, K.HELP_REQUESTED, "incident", {"kind": inc.kind.value, "km": km, "reason": "incident"}),
            severity=self.rng.random(),
        ))

    # ---------------------------------------------------------------- dispatch

    def _on_help_requested(self, e: SimEvent):
        p = e.payload
        vehicle = e.subject if e.subject in self.trips else None
        req = HelpRequest(p["request_id"], vehicle, RequestKind(p["kind"]), p["km"], p["severity"], e.time)
        self.requests[req.request_id] = req
        if vehicle is not None and p.get("reason") != "signal_lost":
            self.trips[vehicle].waiting_for = req.request_id
            if self.vehicles[vehicle].status is not VehicleStatus.BROKEN_DOWN:
                self.vehicles[vehicle].status = VehicleStatus.AWAITING_HELP
        if e.subject == "incident":
            self._schedule_incident()
        if req.kind is RequestKind.POLICE:
            self._dispatch_police(req)
        else:
            self._dispatch_unit(req)

    def _record(self, decision: dsp.DispatchDecision, from_queue: bool):
        self.decisions.append((self.sim.now, decision))
        if decision.assignee is not None:
            self._schedule(SimEvent(self.sim.now, K.VAN_ASSIGNED, decision.assignee, {
                "request_id": decision.request_id,
                "outcome": decision.outcome.value,
                "from_queue": int(from_queue),
            }))

    def _dispatch_police(self, req: HelpRequest, from_queue: bool = False):
        covering = sorted(
            (v for v in self.vans if v.covers(req.position_km)),
            key=lambda v: (abs(self._van_km(v) - req.position_km), v.id),
        )
        for v in self.vans:
            v.position_km = self._van_km(v)
        decision = None
        if covering and not from_queue:
            _, decision = dsp.van_step(covering[0], req, self.config.dispatch.corridor_km)
        if decision is None or decision.outcome is dsp.DispatchOutcome.TRANSFERRED:
            if decision is not None:
                self.decisions.append((self.sim.now, decision))
            decision = dsp.transfer_request(req, self.vans)
        if decision.outcome is dsp.DispatchOutcome.QUEUED:
            if from_queue:
                self.manager.pending_requests.appendleft(req)
            else:
                self.manager.pending_requests.append(req)
                self.decisions.append((self.sim.now, decision))
            return False
        self._record(decision, from_queue)
        van = next(v for v in self.vans if v.id == decision.assignee)
        if van.id not in self.serving:
            self._van_travel(van)
        return True

    def _van_km(self, van: PoliceVanState) -> float:
        leg = self.van_legs.get(van.id)
        return van.position_km if leg is None else self._van_km_at(leg, van)

    def _van_travel(self, van: PoliceVanState):
        """(Re)plan the van's trip to its next itinerary stop."""
        leg = self.van_legs.pop(van.id, None)
        if leg is not None:
            van.position_km = self._van_km_at(leg, van)
            self.sim.cancel(leg[0])
        if not van.itinerary:
            return
        primary = van.itinerary[-1]
        others = van.itinerary[:-1]
        nxt = min(others, key=lambda r: (abs(self.requests[r].position_km - van.position_km), r), default=primary)
        dest = self.requests[nxt].position_km
        van.target_km = self.requests[primary].position_km
        t = self.sim.now + abs(dest - van.position_km) / van.speed_kmh
        ev = self._schedule(SimEvent(t, K.VAN_ARRIVED, van.id, {"request_id": nxt, "km": dest}))
        self.van_legs[van.id] = (ev, self.sim.now, van.position_km, dest)

    def _van_km_at(self, leg, van):
        _, t0, start, dest = leg
        step = van.speed_kmh * (self.sim.now - t0)
        return dest if step >= abs(dest - start) else start + math.copysign(step, dest - start)

    def _dispatch_unit(self, req: HelpRequest, from_queue: bool = False) -> bool:
        d = self.config.dispatch
        of_kind = [u for u in self.units if u.kind is req.kind]
        severe = req.severity >= d.severity_threshold
        pool = [u for u in of_kind if u.mobile] if severe else of_kind
        free = [u for u in pool if u.status is UnitStatus.AVAILABLE]
        if not free:
            if from_queue:
                return False
            self.manager.pending_requests.append(req)
            self.decisions.append((self.sim.now, dsp.DispatchDecision(req.request_id, dsp.DispatchOutcome.QUEUED)))
            return False
        cands = [dsp.ServiceCandidate(u.id, u.kind.value, u.route_km, u.quality) for u in free]
        chosen = dsp.best_choice(cands, req.position_km, d.weight_quality)
        unit = next(u for u in free if u.id == chosen.agent_id)
        mode = triage_service(req, unit, d.severity_threshold)
        unit.status = UnitStatus.ENGAGED
        unit.current_assignment = req.request_id
        decision = dsp.DispatchDecision(req.request_id, dsp.DispatchOutcome.ASSIGNED_DIRECT, unit.id)
        self.decisions.append((self.sim.now, decision))
        self._schedule(SimEvent(self.sim.now, K.VAN_ASSIGNED, unit.id, {
            "request_id": req.request_id, "outcome": decision.outcome.value,
            "from_queue": int(from_queue), "mode": mode.value,
        }))
        gap = abs(unit.route_km - req.position_km)
        speed = unit.speed_kmh if mode is ServiceMode.OFF_STATION else self.config.hazards.limp_speed_kmh
        self._schedule(SimEvent(self.sim.now + gap / speed, K.VAN_ARRIVED, unit.id, {
            "request_id": req.request_id, "km": req.position_km if mode is ServiceMode.OFF_STATION else unit.route_km,
            "mode": mode.value,
        }))
        return True

    def _on_van_arrived(self, e: SimEvent):
        rid = e.payload["request_id"]
        if any(v.id == e.subject for v in self.vans):
            van = next(v for v in self.vans if v.id == e.subject)
            self.van_legs.pop(van.id, None)
            van.position_km = e.payload["km"]
            self.serving.add(van.id)
            hours = self.config.dispatch.police_service_hours
        else:
            hours = self.config.hazards.repair_hours
        req = self.requests[rid]
        self._schedule(SimEvent(e.time + hours, K.SERVICE_COMPLETED, e.subject, {
            "request_id": rid, "vehicle": req.vehicle_id or "",
        }))

    def _on_service_completed(self, e: SimEvent):
        rid = e.payload["request_id"]
        req = self.requests[rid]
        van = next((v for v in self.vans if v.id == e.subject), None)
        if van is not None:
            self.serving.discard(van.id)
            dsp.release_van(van, rid)
            if van.itinerary:
                self._van_travel(van)
            else:
                self._drain_police_queue()
        else:
            unit = next(u for u in self.units if u.id == e.subject)
            unit.status = UnitStatus.AVAILABLE
            unit.current_assignment = None
            self._drain_unit_queue(unit)
        vid = req.vehicle_id
        if vid is not None and self.trips[vid].waiting_for == rid:
            trip, v = self.trips[vid], self.vehicles[vid]
            trip.waiting_for = None
            if req.kind is RequestKind.WORKSHOP and v.fuel_liters <= 0:
                v.fuel_liters = v.tank_capacity_liters
            self._update_eta(vid)
            v.status = VehicleStatus.MOVING
            self._start_leg(vid)

    def _drain_police_queue(self):
        while any(v.status is UnitStatus.AVAILABLE for v in self.vans):
            req = self.manager.pop_pending({RequestKind.POLICE})
            if req is None or not self._dispatch_police(req, from_queue=True):
                return

    def _drain_unit_queue(self, unit: ServiceUnitState):
        threshold = self.config.dispatch.severity_threshold
        for req in list(self.manager.pending_requests):
            if req.kind is unit.kind and (unit.mobile or req.severity < threshold):
                self.manager.pending_requests.remove(req)
                self._dispatch_unit(req, from_queue=True)
                return


def run(config: ScenarioConfig, seed: int | None = None, horizon: float | None = None):
    """Simulate a scenario to its horizon or until every vehicle has arrived.

    Returns ``(trace, metrics)``.
    """
    from .report import metrics_from_trace

    world = World(config, seed)
    trace = world.run(horizon)
    return trace, metrics_from_trace(trace)
