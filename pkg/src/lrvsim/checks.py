"""Trace scans for the invariants a run must satisfy.

Each check returns a list of human-readable violations; empty means clean.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from .engine import EventKind as K
from .engine import SimEvent


def clock_monotone(trace: Sequence[SimEvent]) -> list[str]:
    bad = []
    for a, b in zip(trace, trace[1:]):
        if b.time < a.time:
            bad.append(f"time goes back at seq {b.seq}: {a.time} -> {b.time}")
    return bad


def fuel_nonnegative(trace: Sequence[SimEvent]) -> list[str]:
    return [f"negative fuel at seq {e.seq}" for e in trace if e.payload.get("fuel_l", 0.0) < 0]


def checkpoint_logs(trace: Sequence[SimEvent]) -> list[str]:
    """Each vehicle passes checkpoints 0, 1, 2, ... in order at strictly increasing times."""
    bad = []
    seen = defaultdict(list)
    for e in trace:
        if e.kind is K.CHECKPOINT_PASSED:
            seen[e.subject].append((e.payload["checkpoint"], e.time))
    for vid, log in seen.items():
        ids = [c for c, _ in log]
        if ids != list(range(len(ids))):
            bad.append(f"{vid}: checkpoints out of order {ids}")
        times = [t for _, t in log]
        if any(b <= a for a, b in zip(times, times[1:])):
            bad.append(f"{vid}: checkpoint times not strictly increasing")
    return bad


def dispatch_invariants(trace: Sequence[SimEvent], responders: set[str] | None = None) -> list[str]:
    """Single assignment, bracketed engagement and on-way consistency per responder.

    ``responders`` restricts the scan to those agent ids (e.g. police vans).
    """
    bad = []
    assigned: dict[str, str] = {}
    open_jobs: dict[str, set[str]] = defaultdict(set)
    arrived: set[tuple[str, str]] = set()
    for e in trace:
        if responders is not None and e.subject not in responders:
            continue
        rid = e.payload.get("request_id")
        if e.kind is K.VAN_ASSIGNED:
            if rid in assigned:
                bad.append(f"{rid} assigned to {assigned[rid]} and again to {e.subject}")
            assigned[rid] = e.subject
            direct = e.payload["outcome"] == "AssignedDirect"
            if direct and open_jobs[e.subject]:
                bad.append(f"{e.subject} got a direct assignment {rid} while engaged")
            if not direct and not open_jobs[e.subject]:
                bad.append(f"{e.subject} got an on-way assignment {rid} while free")
            open_jobs[e.subject].add(rid)
        elif e.kind is K.VAN_ARRIVED:
            if rid not in open_jobs[e.subject]:
                bad.append(f"{e.subject} arrived for {rid} without an assignment")
            arrived.add((e.subject, rid))
        elif e.kind is K.SERVICE_COMPLETED:
            if (e.subject, rid) not in arrived:
                bad.append(f"{e.subject} completed {rid} before arriving")
            if rid not in open_jobs[e.subject]:
                bad.append(f"{e.subject} completed {rid} outside an engaged episode")
            open_jobs[e.subject].discard(rid)
    return bad


def fifo_queue(trace: Sequence[SimEvent], kind: str = "Police") -> list[str]:
    """Requests taken from the manager's queue leave it in the order they were issued."""
    issued = {}
    for e in trace:
        if e.kind is K.HELP_REQUESTED and e.payload.get("kind") == kind:
            issued[e.payload["request_id"]] = (e.time, e.seq)
    order = [
        issued[e.payload["request_id"]] for e in trace
        if e.kind is K.VAN_ASSIGNED and e.payload.get("from_queue") and e.payload["request_id"] in issued
    ]
    return [f"queue served {b} before {a}" for a, b in zip(order, order[1:]) if b < a]


def request_conservation(trace: Sequence[SimEvent], pending_ids: set[str]) -> list[str]:
    """Every request is either assigned in the trace or still waiting in the manager's queue."""
    issued = [e.payload["request_id"] for e in trace if e.kind is K.HELP_REQUESTED]
    assigned = {e.payload["request_id"] for e in trace if e.kind is K.VAN_ASSIGNED}
    bad = [f"{rid} vanished" for rid in issued if rid not in assigned and rid not in pending_ids]
    bad += [f"{rid} both assigned and pending" for rid in assigned & pending_ids]
    return bad

