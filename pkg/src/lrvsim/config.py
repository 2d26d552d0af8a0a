"""Scenario configuration: schema, defaults and validation with field-path errors.

The document is YAML (JSON is accepted too, being a YAML subset). Every key
below except ``route`` is optional::

    seed: 0
    horizon_hours: 500
    route:
      mode: Grid | Geographic
      checkpoints: [{x, y, km?, name?}, ...]   # km defaults to straight-line sums
      segment_speeds: [km/h per consecutive pair]
    vehicles: [{id, depart_hours, max_speed_kmh, tank_capacity_liters, fuel_liters,
                consumption_l_per_km, reliability, load_tons, category}]
    breaks: {meals_per_day, meal_hours, refreshments_per_day, refreshment_hours,
             fuel_stops, fuel_stop_hours}
    police_vans: [{id, position_km, coverage: [start_km, end_km], speed_kmh}]
    fuel_stations: [{id, km, price_per_liter, fuel_available_liters, services}]
    rest_areas: [{id, km, category, services, meal_price}]
    service_units: [{id, kind: Workshop | Medical, km, mobile, quality, speed_kmh}]
    hazards: {breakdown_per_km, threat_per_km, medical_per_km, repair_hours, limp_speed_kmh}
    weather: {threshold, bad_weather_speed_factor, updates: [{time, severity, start_km?, end_km?}]}
    heartbeat: {interval_hours, missed_limit, silences: [{vehicle, start, end?}]}
    dispatch: {corridor_km, weight_quality, severity_threshold, police_service_hours, reserve_fraction}
    schedule: {lateness_tolerance, rest_reduction_factor, speed_boost_cap_kmh}
    incidents: {rate_per_hour, kind}
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .agents import RequestKind
from .geo_route import Mode, Position, Route, RouteError


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class BreakPolicy:
    meals_per_day: float = 3
    meal_hours: float = 0.5
    refreshments_per_day: float = 6
    refreshment_hours: float = 0.25
    fuel_stops: int = 5
    fuel_stop_hours: float = 0.25

    @classmethod
    def none(cls) -> "BreakPolicy":
        return cls(0, 0, 0, 0, 0, 0)


@dataclass(frozen=True)
class VehicleSpec:
    id: str
    depart_hours: float = 0.0
    max_speed_kmh: float = 80.0
    tank_capacity_liters: float = 600.0
    fuel_liters: float | None = None
    consumption_l_per_km: float = 0.35
    reliability: float = 1.0
    load_tons: float = 20.0
    category: str = "container"


@dataclass(frozen=True)
class VanSpec:
    id: str
    position_km: float
    coverage: tuple[float, float]
    speed_kmh: float = 80.0


@dataclass(frozen=True)
class FuelStationSpec:
    id: str
    km: float
    price_per_liter: float = 1.0
    fuel_available_liters: float = 50_000.0
    services: tuple[str, ...] = ()


@dataclass(frozen=True)
class RestAreaSpec:
    id: str
    km: float
    category: int = 1
    services: tuple[str, ...] = ()
    meal_price: float = 0.0


@dataclass(frozen=True)
class ServiceUnitSpec:
    id: str
    kind: RequestKind
    km: float
    mobile: bool = True
    quality: float = 1.0
    speed_kmh: float = 60.0


@dataclass(frozen=True)
class Hazards:
    breakdown_per_km: float = 0.0
    threat_per_km: float = 0.0
    medical_per_km: float = 0.0
    repair_hours: float = 1.0
    limp_speed_kmh: float = 20.0


@dataclass(frozen=True)
class WeatherUpdateSpec:
    time: float
    severity: float
    start_km: float = 0.0
    end_km: float = math.inf


@dataclass(frozen=True)
class WeatherParams:
    threshold: float = 0.7
    bad_weather_speed_factor: float = 0.6
    updates: tuple[WeatherUpdateSpec, ...] = ()


@dataclass(frozen=True)
class Silence:
    vehicle: str
    start: float
    end: float = math.inf


@dataclass(frozen=True)
class HeartbeatParams:
    interval_hours: float = 0.25
    missed_limit: int = 3
    silences: tuple[Silence, ...] = ()


@dataclass(frozen=True)
class DispatchParams:
    corridor_km: float = 5.0
    weight_quality: float = 0.5
    severity_threshold: float = 0.5
    police_service_hours: float = 0.5
    reserve_fraction: float = 0.1


@dataclass(frozen=True)
class ScheduleParams:
    lateness_tolerance: float = 0.05
    rest_reduction_factor: float = 0.5
    speed_boost_cap_kmh: float = 80.0


@dataclass(frozen=True)
class IncidentStream:
    rate_per_hour: float = 0.0
    kind: RequestKind = RequestKind.POLICE


@dataclass(frozen=True)
class ScenarioConfig:
    route: Route
    vehicles: tuple[VehicleSpec, ...] = ()
    breaks: BreakPolicy = BreakPolicy()
    police_vans: tuple[VanSpec, ...] = ()
    fuel_stations: tuple[FuelStationSpec, ...] = ()
    rest_areas: tuple[RestAreaSpec, ...] = ()
    service_units: tuple[ServiceUnitSpec, ...] = ()
    hazards: Hazards = Hazards()
    weather: WeatherParams = WeatherParams()
    heartbeat: HeartbeatParams = HeartbeatParams()
    dispatch: DispatchParams = DispatchParams()
    schedule: ScheduleParams = ScheduleParams()
    incidents: IncidentStream = IncidentStream()
    seed: int = 0
    horizon_hours: float = 1000.0
    checkpoint_names: tuple[str, ...] = field(default=(), compare=False)


class _Reader:
    """Pulls typed fields out of a nested mapping, naming the failing path."""

    def __init__(self, data, path: str):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(path or "<root>", "expected a mapping")
        self.data, self.path = data, path

    def at(self, key):
        return f"{self.path}.{key}" if self.path else str(key)

    def sub(self, key) -> "_Reader":
        return _Reader(self.data.get(key), self.at(key))

    def items(self, key) -> list[tuple[str, object]]:
        value = self.data.get(key, [])
        if value is None:
            value = []
        if not isinstance(value, list):
            raise ConfigError(self.at(key), "expected a list")
        return [(f"{self.at(key)}[{i}]", v) for i, v in enumerate(value)]

    def num(self, key, default=None, *, minimum=None, positive=False, maximum=None, integer=False):
        value = self.data.get(key, default)
        path = self.at(key)
        if value is None:
            raise ConfigError(path, "required")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        if integer and value != int(value):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        check_number(path, value, minimum=minimum, positive=positive, maximum=maximum)
        return int(value) if integer else float(value)

    def text(self, key, default=None):
        value = self.data.get(key, default)
        if value is None:
            raise ConfigError(self.at(key), "required")
        return str(value)

    def flag(self, key, default):
        value = self.data.get(key, default)
        if not isinstance(value, bool):
            raise ConfigError(self.at(key), f"expected true/false, got {value!r}")
        return value

    def kind(self, key, default=None):
        value = self.text(key, default)
        try:
            return RequestKind(value)
        except ValueError:
            raise ConfigError(self.at(key), f"unknown kind {value!r}") from None


def check_number(path, value, *, minimum=None, positive=False, maximum=None):
    if math.isnan(value):
        raise ConfigError(path, "must not be NaN")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(path, f"must be <= {maximum}, got {value}")


def _route(r: _Reader) -> tuple[Route, tuple[str, ...]]:
    mode_name = r.text("mode", "Grid")
    try:
        mode = Mode(mode_name)
    except ValueError:
        raise ConfigError(r.at("mode"), f"expected Grid or Geographic, got {mode_name!r}") from None
    cps = r.items("checkpoints")
    if len(cps) < 2:
        raise ConfigError(r.at("checkpoints"), "at least two checkpoints are required")
    positions, kms, names = [], [], []
    for path, raw in cps:
        c = _Reader(raw, path)
        try:
            positions.append(Position(c.num("x"), c.num("y"), mode))
        except RouteError as exc:
            raise ConfigError(path, str(exc)) from None
        kms.append(c.data.get("km"))
        names.append(str(c.data.get("name", f"cp{len(names)}")))
    speeds = r.items("segment_speeds")
    if len(speeds) != len(cps) - 1:
        raise ConfigError(r.at("segment_speeds"), f"expected {len(cps) - 1} speeds, got {len(speeds)}")
    for path, s in speeds:
        if isinstance(s, bool) or not isinstance(s, (int, float)):
            raise ConfigError(path, f"expected a number, got {s!r}")
        check_number(path, s, positive=True)
    if any(k is not None for k in kms):
        for i, k in enumerate(kms):
            path = f"{cps[i][0]}.km"
            if isinstance(k, bool) or not isinstance(k, (int, float)):
                raise ConfigError(path, "give km for every checkpoint or for none")
            if i == 0 and k != 0:
                raise ConfigError(path, "the first checkpoint must be at 0 km")
            if i and k <= kms[i - 1]:
                raise ConfigError(path, "cumulative km must increase strictly")
    else:
        kms = None
    try:
        route = Route.from_positions(positions, [s for _, s in speeds], kms)
    except RouteError as exc:
        raise ConfigError(r.path, str(exc)) from None
    return route, tuple(names)


def _on_route(path, km, route):
    check_number(path, km, minimum=0, maximum=route.length_km)
    return km


def config_from_dict(data: dict) -> ScenarioConfig:
    root = _Reader(data, "")
    if "route" not in root.data:
        raise ConfigError("route", "required")
    route, names = _route(root.sub("route"))
    length = route.length_km

    vehicles, seen = [], set()
    for path, raw in root.items("vehicles"):
        v = _Reader(raw, path)
        vid = v.text("id")
        if vid in seen:
            raise ConfigError(v.at("id"), f"duplicate vehicle id {vid!r}")
        seen.add(vid)
        if "reliability" not in v.data:
            raise ConfigError(v.at("reliability"), "initial reliability is required")
        cap = v.num("tank_capacity_liters", 600.0, positive=True)
        vehicles.append(VehicleSpec(
            id=vid,
            depart_hours=v.num("depart_hours", 0.0, minimum=0),
            max_speed_kmh=v.num("max_speed_kmh", 80.0, positive=True),
            tank_capacity_liters=cap,
            fuel_liters=v.num("fuel_liters", cap, minimum=0, maximum=cap),
            consumption_l_per_km=v.num("consumption_l_per_km", 0.35, minimum=0),
            reliability=v.num("reliability", minimum=0, maximum=1),
            load_tons=v.num("load_tons", 20.0, minimum=0),
            category=v.text("category", "container"),
        ))

    b = root.sub("breaks")
    breaks = BreakPolicy(
        meals_per_day=b.num("meals_per_day", 3, minimum=0),
        meal_hours=b.num("meal_hours", 0.5, minimum=0),
        refreshments_per_day=b.num("refreshments_per_day", 6, minimum=0),
        refreshment_hours=b.num("refreshment_hours", 0.25, minimum=0),
        fuel_stops=b.num("fuel_stops", 5, minimum=0, integer=True),
        fuel_stop_hours=b.num("fuel_stop_hours", 0.25, minimum=0),
    )

    vans = []
    for path, raw in root.items("police_vans"):
        v = _Reader(raw, path)
        cov = v.data.get("coverage", [0, length])
        if not (isinstance(cov, list) and len(cov) == 2 and all(isinstance(c, (int, float)) for c in cov)):
            raise ConfigError(v.at("coverage"), "expected [start_km, end_km]")
        if not cov[0] < cov[1]:
            raise ConfigError(v.at("coverage"), "start must be below end")
        vans.append(VanSpec(
            id=v.text("id"),
            position_km=_on_route(v.at("position_km"), v.num("position_km"), route),
            coverage=(float(cov[0]), float(cov[1])),
            speed_kmh=v.num("speed_kmh", 80.0, positive=True),
        ))

    stations = []
    for path, raw in root.items("fuel_stations"):
        f = _Reader(raw, path)
        stations.append(FuelStationSpec(
            id=f.text("id"),
            km=_on_route(f.at("km"), f.num("km"), route),
            price_per_liter=f.num("price_per_liter", 1.0, positive=True),
            fuel_available_liters=f.num("fuel_available_liters", 50_000.0, minimum=0),
            services=tuple(map(str, f.data.get("services", ()))),
        ))

    rests = []
    for path, raw in root.items("rest_areas"):
        a = _Reader(raw, path)
        rests.append(RestAreaSpec(
            id=a.text("id"),
            km=_on_route(a.at("km"), a.num("km"), route),
            category=a.num("category", 1, minimum=1, integer=True),
            services=tuple(map(str, a.data.get("services", ()))),
            meal_price=a.num("meal_price", 0.0, minimum=0),
        ))

    units = []
    for path, raw in root.items("service_units"):
        u = _Reader(raw, path)
        kind = u.kind("kind")
        if kind is RequestKind.POLICE:
            raise ConfigError(u.at("kind"), "police are declared under police_vans")
        units.append(ServiceUnitSpec(
            id=u.text("id"),
            kind=kind,
            km=_on_route(u.at("km"), u.num("km"), route),
            mobile=u.flag("mobile", True),
            quality=u.num("quality", 1.0),
            speed_kmh=u.num("speed_kmh", 60.0, positive=True),
        ))

    ids = [x.id for group in (vehicles, vans, stations, rests, units) for x in group]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ConfigError("<agents>", f"agent ids must be unique, repeated: {', '.join(dupes)}")

    h = root.sub("hazards")
    hazards = Hazards(
        breakdown_per_km=h.num("breakdown_per_km", 0.0, minimum=0),
        threat_per_km=h.num("threat_per_km", 0.0, minimum=0),
        medical_per_km=h.num("medical_per_km", 0.0, minimum=0),
        repair_hours=h.num("repair_hours", 1.0, minimum=0),
        limp_speed_kmh=h.num("limp_speed_kmh", 20.0, positive=True),
    )

    w = root.sub("weather")
    updates = []
    for path, raw in w.items("updates"):
        u = _Reader(raw, path)
        updates.append(WeatherUpdateSpec(
            time=u.num("time", minimum=0),
            severity=u.num("severity", minimum=0, maximum=1),
            start_km=u.num("start_km", 0.0, minimum=0),
            end_km=u.num("end_km", math.inf, minimum=0),
        ))
    weather = WeatherParams(
        threshold=w.num("threshold", 0.7, minimum=0, maximum=1),
        bad_weather_speed_factor=w.num("bad_weather_speed_factor", 0.6, positive=True, maximum=1),
        updates=tuple(updates),
    )

    hb = root.sub("heartbeat")
    silences = []
    for path, raw in hb.items("silences"):
        s = _Reader(raw, path)
        vid = s.text("vehicle")
        if vid not in seen:
            raise ConfigError(s.at("vehicle"), f"unknown vehicle {vid!r}")
        silences.append(Silence(vid, s.num("start", minimum=0), s.num("end", math.inf, minimum=0)))
    heartbeat = HeartbeatParams(
        interval_hours=hb.num("interval_hours", 0.25, positive=True),
        missed_limit=hb.num("missed_limit", 3, minimum=1, integer=True),
        silences=tuple(silences),
    )

    d = root.sub("dispatch")
    dispatch = DispatchParams(
        corridor_km=d.num("corridor_km", 5.0, minimum=0),
        weight_quality=d.num("weight_quality", 0.5, minimum=0, maximum=1),
        severity_threshold=d.num("severity_threshold", 0.5, minimum=0, maximum=1),
        police_service_hours=d.num("police_service_hours", 0.5, minimum=0),
        reserve_fraction=d.num("reserve_fraction", 0.1, minimum=0, maximum=1),
    )

    sc = root.sub("schedule")
    schedule = ScheduleParams(
        lateness_tolerance=sc.num("lateness_tolerance", 0.05, minimum=0),
        rest_reduction_factor=sc.num("rest_reduction_factor", 0.5, positive=True, maximum=1),
        speed_boost_cap_kmh=sc.num("speed_boost_cap_kmh", 80.0, positive=True),
    )

    inc = root.sub("incidents")
    incidents = IncidentStream(
        rate_per_hour=inc.num("rate_per_hour", 0.0, minimum=0),
        kind=inc.kind("kind", "Police"),
    )

    return ScenarioConfig(
        route=route,
        vehicles=tuple(vehicles),
        breaks=breaks,
        police_vans=tuple(vans),
        fuel_stations=tuple(sorted(stations, key=lambda s: (s.km, s.id))),
        rest_areas=tuple(sorted(rests, key=lambda a: (a.km, a.id))),
        service_units=tuple(units),
        hazards=hazards,
        weather=weather,
        heartbeat=heartbeat,
        dispatch=dispatch,
        schedule=schedule,
        incidents=incidents,
        seed=root.num("seed", 0, minimum=0, maximum=2**64 - 1, integer=True),
        horizon_hours=root.num("horizon_hours", 1000.0, positive=True),
        checkpoint_names=names,
    )


def load_scenario(source) -> ScenarioConfig:
    """Load a scenario from a path, or from YAML/JSON text when given a string containing a newline."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"parse error: {exc}") from None
    return config_from_dict(data)


def cpec_config_path() -> Path:
    return Path(str(resources.files("lrvsim") / "data" / "cpec.yaml"))


def cpec_config() -> ScenarioConfig:
    """The Gwadar to Kashgar reference scenario shipped with the package."""
    return load_scenario(cpec_config_path())
