import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrvsim.agents import HelpRequest, PoliceVanState, RequestKind, UnitStatus
from lrvsim.dispatch import (
    DispatchOutcome,
    OutsideCoverageError,
    ServiceCandidate,
    best_choice,
    is_on_way,
    nearest_choice,
    release_van,
    super_choice,
    transfer_request,
    van_step,
)


def police(rid, km):
    return HelpRequest(rid, None, RequestKind.POLICE, km, 1.0, 0.0)


def van(vid="p1", km=100.0, cov=(0.0, 500.0)):
    return PoliceVanState(vid, km, *cov)


def test_available_van_takes_request():
    v = van()
    v, d = van_step(v, police("r1", 150))
    assert d.outcome is DispatchOutcome.ASSIGNED_DIRECT and d.assignee == "p1"
    assert v.status is UnitStatus.ENGAGED and v.target_km == 150 and v.itinerary == ["r1"]


def test_engaged_van_absorbs_on_way_request_only():
    v, _ = van_step(van(), police("r1", 300))
    _, d = van_step(v, police("r2", 200))
    assert d.outcome is DispatchOutcome.ASSIGNED_ON_WAY
    assert v.itinerary == ["r2", "r1"]
    _, d = van_step(v, police("r3", 50))
    assert d.outcome is DispatchOutcome.TRANSFERRED and d.assignee is None
    _, d = van_step(v, police("r4", 304))
    assert d.outcome is DispatchOutcome.ASSIGNED_ON_WAY


def test_outside_coverage():
    with pytest.raises(OutsideCoverageError):
        van_step(van(cov=(0, 100)), police("r1", 150))
    with pytest.raises(ValueError):
        van_step(van(), HelpRequest("r", None, RequestKind.MEDICAL, 1.0, 1.0, 0.0))


def test_is_on_way_needs_engagement():
    assert not is_on_way(van(), police("r", 100))


def test_release_frees_when_itinerary_empty():
    v, _ = van_step(van(), police("r1", 300))
    van_step(v, police("r2", 200))
    release_van(v, "r2")
    assert v.status is UnitStatus.ENGAGED and v.current_assignment == "r1"
    release_van(v, "r1")
    assert v.status is UnitStatus.AVAILABLE and v.current_assignment is None and v.target_km is None


def test_transfer_to_nearest_free_else_queue():
    near, far = van("near", 90), van("far", 400)
    van_step(near, police("r0", 95))
    d = transfer_request(police("r1", 100), [near, far])
    assert d.assignee == "far" and far.status is UnitStatus.ENGAGED
    d = transfer_request(police("r2", 100), [near, far])
    assert d.outcome is DispatchOutcome.QUEUED and d.assignee is None


def C(i, km, q):
    return ServiceCandidate(f"u{i:03d}", "Workshop", km, q)


def test_selection_operators():
    cands = [C(0, 10, 0.9), C(1, 50, 0.5), C(2, 52, 0.95)]
    assert super_choice(cands).agent_id == "u002"
    assert nearest_choice(cands, 49).agent_id == "u001"
    # best and nearest coincide
    assert best_choice(cands, 53).agent_id == "u002"
    with pytest.raises(ValueError):
        best_choice([], 0)
    with pytest.raises(ValueError):
        best_choice(cands, 0, weight_quality=2)


def test_best_choice_compromise():
    # u000: top quality but far; u001: nearest but poor; u002 is good on both
    cands = [C(0, 100, 1.0), C(1, 0, 0.0), C(2, 10, 0.9)]
    assert best_choice(cands, 0).agent_id == "u002"


candidate_lists = st.lists(
    st.tuples(st.floats(0, 1000), st.floats(0, 1)), min_size=1, max_size=12
).map(lambda xs: [C(i, km, q) for i, (km, q) in enumerate(xs)])


@given(candidate_lists, st.floats(0, 1000), st.floats(0.01, 1000))
def test_argmax_invariant_under_rescaling(cands, pos, k):
    scaled_q = [ServiceCandidate(c.agent_id, c.kind, c.position_km, c.quality_score * k) for c in cands]
    # rounding after scaling can merge near ties, so compare the winning score, not the id
    by_id = {c.agent_id: c for c in cands}
    top = super_choice(scaled_q)
    assert by_id[top.agent_id].quality_score == pytest.approx(super_choice(cands).quality_score, rel=1e-9)
    scaled_d = [ServiceCandidate(c.agent_id, c.kind, c.position_km * k, c.quality_score) for c in cands]
    near = by_id[nearest_choice(scaled_d, pos * k).agent_id]
    best = nearest_choice(cands, pos)
    assert abs(near.position_km - pos) == pytest.approx(abs(best.position_km - pos), rel=1e-9, abs=1e-9)
