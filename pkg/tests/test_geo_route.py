import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrvsim.geo_route import (
    Checkpoint,
    Mode,
    Position,
    Route,
    RouteError,
    distance,
    distance_to_checkpoint,
    position_at_km,
)

G = Mode.GEOGRAPHIC


def cosine_law_km(a, b, radius=6371.0):
    lon1, lat1, lon2, lat2 = map(math.radians, (a.x, a.y, b.x, b.y))
    c = math.sin(lat1) * math.sin(lat2) + math.cos(lat1) * math.cos(lat2) * math.cos(lon2 - lon1)
    return radius * math.acos(max(-1.0, min(1.0, c)))


def test_identity_and_pythagoras():
    p = Position(3.5, -2)
    assert distance(p, p) == 0.0
    assert distance(Position(0, 0), Position(3, 4)) == 5.0


def test_one_degree_along_equator():
    a, b = Position(0, 0, G), Position(1, 0, G)
    assert distance(a, b) == pytest.approx(cosine_law_km(a, b), rel=1e-9)
    assert distance(a, b) == pytest.approx(111.19, abs=0.01)


@given(
    st.floats(-180, 180), st.floats(-89, 89), st.floats(-180, 180), st.floats(-89, 89),
)
def test_haversine_matches_cosine_law(x1, y1, x2, y2):
    a, b = Position(x1, y1, G), Position(x2, y2, G)
    # the cosine law loses precision for tiny separations
    assert distance(a, b) == pytest.approx(cosine_law_km(a, b), abs=0.05)


def test_mode_mismatch():
    with pytest.raises(RouteError):
        distance(Position(0, 0), Position(0, 0, G))


def test_geographic_range_enforced():
    with pytest.raises(RouteError):
        Position(200, 0, G)
    Position(200, 0)  # grid points are unbounded


coords = st.floats(-1e3, 1e3, allow_nan=False)
lonlat = st.tuples(st.floats(-180, 180), st.floats(-90, 90))


@given(st.tuples(coords, coords), st.tuples(coords, coords), st.tuples(coords, coords))
def test_triangle_inequality_grid(a, b, c):
    a, b, c = (Position(*p) for p in (a, b, c))
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9
    assert distance(a, b) == distance(b, a)


@given(lonlat, lonlat, lonlat)
def test_triangle_inequality_geographic(a, b, c):
    a, b, c = (Position(*p, G) for p in (a, b, c))
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-6
    assert distance(a, b) == pytest.approx(distance(b, a), abs=1e-9)


def straight(length=10.0):
    return Route.from_positions([Position(0, 0), Position(length, 0)], [50])


def test_position_at_km_interpolates():
    r = straight()
    assert position_at_km(r, 0) == Position(0, 0)
    assert position_at_km(r, 10) == Position(10, 0)
    assert position_at_km(r, 4) == Position(4, 0)
    with pytest.raises(RouteError):
        position_at_km(r, 10.5)
    with pytest.raises(RouteError):
        position_at_km(r, -1)


@st.composite
def routes(draw):
    n = draw(st.integers(2, 8))
    pts = [Position(draw(coords), draw(coords)) for _ in range(n)]
    gaps = [draw(st.floats(0.5, 500)) for _ in range(n - 1)]
    kms = [0.0]
    for g in gaps:
        kms.append(kms[-1] + g)
    return Route.from_positions(pts, [draw(st.floats(5, 120)) for _ in gaps], kms)


@given(routes())
def test_checkpoint_round_trip(route):
    for cp in route.checkpoints:
        p = position_at_km(route, cp.cumulative_km)
        assert abs(p.x - cp.position.x) <= 1e-9 and abs(p.y - cp.position.y) <= 1e-9


@given(routes(), st.data())
def test_distance_to_checkpoint_non_increasing(route, data):
    j = data.draw(st.integers(0, len(route.checkpoints) - 1))
    end = route.checkpoints[j].cumulative_km
    kms = sorted(data.draw(st.lists(st.floats(0, end), min_size=2, max_size=10)))
    dists = [distance_to_checkpoint(route, k, j) for k in kms]
    assert all(b <= a for a, b in zip(dists, dists[1:]))


def test_distance_to_checkpoint_examples():
    r = Route.from_positions([Position(0, 0), Position(100, 0), Position(2442, 0)], [50, 50], [0, 100, 2442])
    assert distance_to_checkpoint(r, 0, 2) == 2442
    assert distance_to_checkpoint(r, 100, 1) == 0
    with pytest.raises(RouteError):
        distance_to_checkpoint(r, 150, 1)


@pytest.mark.parametrize(
    "cps, speeds",
    [
        ([Checkpoint(0, Position(0, 0), 0)], ()),
        ([Checkpoint(0, Position(0, 0), 0), Checkpoint(1, Position(1, 0), 0)], (50,)),
        ([Checkpoint(0, Position(0, 0), 1), Checkpoint(1, Position(1, 0), 2)], (50,)),
        ([Checkpoint(0, Position(0, 0), 0), Checkpoint(1, Position(1, 0), 1)], (0,)),
        ([Checkpoint(0, Position(0, 0), 0), Checkpoint(1, Position(1, 0, G), 1)], (50,)),
    ],
)
def test_route_invariants(cps, speeds):
    with pytest.raises(RouteError):
        Route(tuple(cps), tuple(speeds))
