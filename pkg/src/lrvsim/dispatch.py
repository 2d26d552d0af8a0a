"""Police-van request handling and service selection operators."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .agents import HelpRequest, PoliceVanState, RequestKind, UnitStatus


class DispatchOutcome(str, Enum):
    ASSIGNED_DIRECT = "AssignedDirect"
    ASSIGNED_ON_WAY = "AssignedOnWay"
    TRANSFERRED = "Transferred"
    QUEUED = "Queued"


class OutsideCoverageError(LookupError):
    pass


@dataclass(frozen=True)
class ServiceCandidate:
    agent_id: str
    kind: str
    position_km: float
    quality_score: float
    available: bool = True


@dataclass(frozen=True)
class DispatchDecision:
    request_id: str
    outcome: DispatchOutcome
    assignee: str | None = None

    def __post_init__(self):
        needs = self.outcome in (DispatchOutcome.ASSIGNED_DIRECT, DispatchOutcome.ASSIGNED_ON_WAY)
        if needs and self.assignee is None:
            raise ValueError("an assignment needs an assignee")
        if self.outcome is DispatchOutcome.QUEUED and self.assignee is not None:
            raise ValueError("a queued request has no assignee")


def is_on_way(van: PoliceVanState, req: HelpRequest, corridor_km: float = 5.0) -> bool:
    """Whether ``req`` sits between the van and its current target, give or take ``corridor_km``."""
    if van.status is not UnitStatus.ENGAGED or van.target_km is None:
        return False
    lo, hi = sorted((van.position_km, van.target_km))
    return lo - corridor_km <= req.position_km <= hi + corridor_km


def van_step(
    van: PoliceVanState, req: HelpRequest, corridor_km: float = 5.0
) -> tuple[PoliceVanState, DispatchDecision]:
    """One pass of the van's service-provision state machine for an incoming request.

    Mutates and returns ``van``. The caller owns travel (``target_km``) and
    completion; on completion the van goes back to Available.
    """
    if req.kind is not RequestKind.POLICE:
        raise ValueError(f"van {van.id} only handles Police requests, got {req.kind.value}")
    if not van.covers(req.position_km) and van.status is UnitStatus.AVAILABLE:
        raise OutsideCoverageError(f"{req.position_km} km is outside van {van.id}'s coverage")
    if van.status is UnitStatus.AVAILABLE:
        van.status = UnitStatus.ENGAGED
        van.current_assignment = req.request_id
        van.itinerary = [req.request_id]
        van.target_km = req.position_km
        return van, DispatchDecision(req.request_id, DispatchOutcome.ASSIGNED_DIRECT, van.id)
    if is_on_way(van, req, corridor_km):
        van.itinerary.insert(0, req.request_id)
        return van, DispatchDecision(req.request_id, DispatchOutcome.ASSIGNED_ON_WAY, van.id)
    return van, DispatchDecision(req.request_id, DispatchOutcome.TRANSFERRED)


def release_van(van: PoliceVanState, request_id: str) -> PoliceVanState:
    """Drop a served request; the van is Available once its itinerary is empty."""
    van.itinerary.remove(request_id)
    if van.current_assignment == request_id:
        van.current_assignment = van.itinerary[-1] if van.itinerary else None
    if not van.itinerary:
        van.status = UnitStatus.AVAILABLE
        van.current_assignment = None
        van.target_km = None
    return van


def nearest_available_van(req: HelpRequest, vans: Sequence[PoliceVanState]) -> PoliceVanState | None:
    free = [v for v in vans if v.status is UnitStatus.AVAILABLE]
    if not free:
        return None
    return min(free, key=lambda v: (abs(v.position_km - req.position_km), v.id))


def transfer_request(req: HelpRequest, vans: Sequence[PoliceVanState]) -> DispatchDecision:
    """Single hop to the nearest free van by route distance, else the manager's queue.

    The chosen van is engaged in place.
    """
    van = nearest_available_van(req, vans)
    if van is None:
        return DispatchDecision(req.request_id, DispatchOutcome.QUEUED)
    van.status = UnitStatus.ENGAGED
    van.current_assignment = req.request_id
    van.itinerary = [req.request_id]
    van.target_km = req.position_km
    return DispatchDecision(req.request_id, DispatchOutcome.ASSIGNED_DIRECT, van.id)


def _require(candidates):
    if not candidates:
        raise ValueError("no candidates to choose from")


def super_choice(candidates: Sequence[ServiceCandidate]) -> ServiceCandidate:
    _require(candidates)
    return min(candidates, key=lambda c: (-c.quality_score, c.agent_id))


def nearest_choice(candidates: Sequence[ServiceCandidate], pos_km: float) -> ServiceCandidate:
    _require(candidates)
    return min(candidates, key=lambda c: (abs(c.position_km - pos_km), c.agent_id))


def _minmax(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    return [(x - lo) / (hi - lo) for x in values]


def aggregate_scores(candidates: Sequence[ServiceCandidate], pos_km: float, weight_quality: float) -> list[float]:
    quality = _minmax([c.quality_score for c in candidates])
    # proximity: nearest scores 1, farthest 0
    dist = [abs(c.position_km - pos_km) for c in candidates]
    proximity = [1.0] * len(dist) if max(dist) == min(dist) else [1 - d for d in _minmax(dist)]
    return [weight_quality * q + (1 - weight_quality) * p for q, p in zip(quality, proximity)]


def best_choice(candidates: Sequence[ServiceCandidate], pos_km: float, weight_quality: float = 0.5) -> ServiceCandidate:
    """The candidate that is both best and nearest, or else the best weighted compromise."""
    _require(candidates)
    if not 0 <= weight_quality <= 1:
        raise ValueError("weight_quality must lie in [0, 1]")
    top = super_choice(candidates)
    if top == nearest_choice(candidates, pos_km):
        return top
    scores = aggregate_scores(candidates, pos_km, weight_quality)
    best = min(range(len(candidates)), key=lambda k: (-scores[k], candidates[k].agent_id))
    return candidates[best]
