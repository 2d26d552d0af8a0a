"""Positions, checkpoint routes and distances along them."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum

EARTH_RADIUS_KM = 6371.0


class RouteError(ValueError):
    pass


class Mode(str, Enum):
    GRID = "Grid"
    GEOGRAPHIC = "Geographic"


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    mode: Mode = Mode.GRID

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise RouteError(f"non-finite coordinates ({self.x}, {self.y})")
        if self.mode is Mode.GEOGRAPHIC and not (-180 <= self.x <= 180 and -90 <= self.y <= 90):
            raise RouteError(f"longitude/latitude out of range ({self.x}, {self.y})")


@dataclass(frozen=True)
class Checkpoint:
    id: int
    position: Position
    cumulative_km: float


@dataclass(frozen=True)
class Route:
    checkpoints: tuple[Checkpoint, ...]
    segment_speeds: tuple[float, ...]

    def __post_init__(self):
        cps = self.checkpoints
        if len(cps) < 2:
            raise RouteError("a route needs at least two checkpoints")
        if len(self.segment_speeds) != len(cps) - 1:
            raise RouteError("one segment speed is required per consecutive checkpoint pair")
        if cps[0].cumulative_km != 0:
            raise RouteError("checkpoint 0 must sit at 0 km")
        for i, cp in enumerate(cps):
            if cp.id != i:
                raise RouteError(f"checkpoint ids must be 0..n-1, got {cp.id} at index {i}")
            if i and cp.cumulative_km <= cps[i - 1].cumulative_km:
                raise RouteError(f"cumulative_km must increase strictly (checkpoint {i})")
        modes = {cp.position.mode for cp in cps}
        if len(modes) != 1:
            raise RouteError("checkpoints mix Grid and Geographic positions")
        for i, s in enumerate(self.segment_speeds):
            if not s > 0:
                raise RouteError(f"segment speed {i} must be positive, got {s}")

    @property
    def length_km(self) -> float:
        return self.checkpoints[-1].cumulative_km

    @property
    def km_marks(self) -> list[float]:
        return [cp.cumulative_km for cp in self.checkpoints]

    def segment_index(self, km: float) -> int:
        """Index i of the segment [cp_i, cp_i+1) holding ``km``; the route end maps to the last segment."""
        i = bisect.bisect_right(self.km_marks, km) - 1
        return min(max(i, 0), len(self.segment_speeds) - 1)

    def next_checkpoint(self, km: float) -> int | None:
        """First checkpoint id at or beyond ``km``."""
        i = bisect.bisect_left(self.km_marks, km)
        return i if i < len(self.checkpoints) else None

    @classmethod
    def from_positions(cls, positions, segment_speeds, cumulative_km=None) -> "Route":
        """Build a route; cumulative distances default to straight-line sums between positions."""
        positions = list(positions)
        if cumulative_km is None:
            cumulative_km = [0.0]
            for a, b in zip(positions, positions[1:]):
                cumulative_km.append(cumulative_km[-1] + distance(a, b))
        cps = tuple(Checkpoint(i, p, float(c)) for i, (p, c) in enumerate(zip(positions, cumulative_km)))
        return cls(cps, tuple(float(s) for s in segment_speeds))


def distance(a: Position, b: Position) -> float:
    """Euclidean distance for grid points, haversine great-circle km for lon/lat."""
    if a.mode is not b.mode:
        raise RouteError(f"cannot measure between {a.mode.value} and {b.mode.value} positions")
    if a.mode is Mode.GRID:
        return math.hypot(b.x - a.x, b.y - a.y)
    lon1, lat1, lon2, lat2 = map(math.radians, (a.x, a.y, b.x, b.y))
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def position_at_km(route: Route, s: float) -> Position:
    if not 0 <= s <= route.length_km:
        raise RouteError(f"{s} km lies outside the route [0, {route.length_km}]")
    cps = route.checkpoints
    i = bisect.bisect_right(route.km_marks, s) - 1
    if i >= len(cps) - 1:
        return cps[-1].position
    a, b = cps[i], cps[i + 1]
    f = (s - a.cumulative_km) / (b.cumulative_km - a.cumulative_km)
    if f == 0:
        return a.position
    pa, pb = a.position, b.position
    return Position(pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y), pa.mode)


def distance_to_checkpoint(route: Route, current_km: float, j: int) -> float:
    """Remaining along-route distance to checkpoint ``j``."""
    if not 0 <= j < len(route.checkpoints):
        raise RouteError(f"no checkpoint {j} on this route")
    target = route.checkpoints[j].cumulative_km
    if target < current_km:
        raise RouteError(f"checkpoint {j} at {target} km already passed (vehicle at {current_km} km)")
    return target - current_km
