"""Trace serialization, per-trip metrics and the summary report."""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .engine import EventKind, SimEvent
from .monitoring import CheckpointRecord, ScheduleStatus, schedule_status, total_time

TRACE_COLUMNS = ("time", "seq", "kind", "subject", "payload")


def _record(e: SimEvent) -> dict:
    return {"time": e.time, "seq": e.seq, "kind": e.kind.value, "subject": e.subject, "payload": e.payload}


def emit_trace(trace: Iterable[SimEvent], fmt: str = "jsonl") -> bytes:
    """Serialize events, one UTF-8 line per event in processing order."""
    fmt = fmt.lower()
    if fmt in ("jsonl", "jsonlines"):
        lines = [json.dumps(_record(e), separators=(",", ":")) for e in trace]
        return "".join(line + "\n" for line in lines).encode("utf-8")
    if fmt == "csv":
        events = list(trace)
        if not events:
            return b""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for e in events:
            flat = ";".join(f"{k}={json.dumps(v)}" for k, v in e.payload.items())
            writer.writerow([repr(e.time), e.seq, e.kind.value, e.subject, flat])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown trace format {fmt!r}")


def parse_trace(data: bytes | str, fmt: str = "jsonl") -> list[SimEvent]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    fmt = fmt.lower()
    events = []
    if fmt in ("jsonl", "jsonlines"):
        for line in text.splitlines():
            if line.strip():
                r = json.loads(line)
                events.append(SimEvent(r["time"], EventKind(r["kind"]), r["subject"], r["payload"], r["seq"]))
        return events
    if fmt == "csv":
        for row in csv.DictReader(io.StringIO(text)):
            payload = {}
            if row["payload"]:
                for item in row["payload"].split(";"):
                    k, _, v = item.partition("=")
                    payload[k] = json.loads(v)
            events.append(SimEvent(float(row["time"]), EventKind(row["kind"]), row["subject"], payload, int(row["seq"])))
        return events
    raise ValueError(f"unknown trace format {fmt!r}")


@dataclass
class SegmentTiming:
    segment: int
    actual_hours: float
    expected_hours: float
    status: ScheduleStatus


@dataclass
class TripMetrics:
    vehicle_id: str
    arrived: bool
    trip_duration_hours: float
    initial_eta_hours: float
    breakdown_count: int = 0
    threats_faced_count: int = 0
    requests_issued: int = 0
    requests_served: int = 0
    requests_queued: int = 0
    segments: list[SegmentTiming] = field(default_factory=list)
    reliability_as_configured: float = 1.0

    @property
    def breakdown_free(self) -> bool:
        return self.breakdown_count == 0


def metrics_from_trace(trace: Sequence[SimEvent]) -> list[TripMetrics]:
    """Per-vehicle trip metrics; everything is read back from the trace itself.

    ``requests_queued`` counts requests still open when the trace ends.
    """
    departs = [e for e in trace if e.kind is EventKind.DEPART]
    out = []
    for d in departs:
        vid = d.subject
        mine = [e for e in trace if e.subject == vid]
        records = [CheckpointRecord(e.payload["checkpoint"], e.time) for e in mine if e.kind is EventKind.CHECKPOINT_PASSED]
        requests = [e for e in mine if e.kind is EventKind.HELP_REQUESTED]
        served = {
            e.payload["request_id"] for e in trace
            if e.kind is EventKind.SERVICE_COMPLETED and e.payload.get("vehicle") == vid
        }
        tol = d.payload.get("tolerance", 0.05)
        segments = []
        passed = {e.payload["checkpoint"]: e for e in mine if e.kind is EventKind.CHECKPOINT_PASSED}
        for j in sorted(passed):
            if j == 0 or j - 1 not in passed:
                continue
            actual = passed[j].time - passed[j - 1].time
            expected = passed[j].payload.get("expected_h", actual)
            segments.append(SegmentTiming(j - 1, actual, expected, schedule_status(actual, expected, tol)))
        out.append(TripMetrics(
            vehicle_id=vid,
            arrived=any(e.kind is EventKind.ARRIVED for e in mine),
            trip_duration_hours=total_time(records) if records else 0.0,
            initial_eta_hours=d.payload.get("eta", float("nan")),
            breakdown_count=sum(e.kind is EventKind.BREAKDOWN for e in mine),
            threats_faced_count=sum(e.payload.get("kind") == "Police" for e in requests),
            requests_issued=len(requests),
            requests_served=len(served),
            requests_queued=len({e.payload["request_id"] for e in requests} - served),
            segments=segments,
            reliability_as_configured=d.payload.get("reliability", float("nan")),
        ))
    return out


REPORT_COLUMNS = (
    "vehicle", "arrived", "duration_h", "eta_h", "breakdowns", "threats",
    "req_issued", "req_served", "req_queued", "reliability", "lateness",
)


def _rows(metrics: Sequence[TripMetrics]) -> list[list[str]]:
    rows = []
    for m in metrics:
        rows.append([
            m.vehicle_id, "yes" if m.arrived else "no", f"{m.trip_duration_hours:.2f}", f"{m.initial_eta_hours:.2f}",
            str(m.breakdown_count), str(m.threats_faced_count), str(m.requests_issued), str(m.requests_served),
            str(m.requests_queued), f"{m.reliability_as_configured:.2f}",
            " ".join(s.status.value for s in m.segments),
        ])
    if metrics:
        mean = lambda attr: statistics.fmean(getattr(m, attr) for m in metrics)
        free = sum(m.breakdown_free for m in metrics) / len(metrics)
        rows.append([
            "mean", f"{sum(m.arrived for m in metrics)}/{len(metrics)}",
            f"{mean('trip_duration_hours'):.2f}", f"{mean('initial_eta_hours'):.2f}",
            f"{mean('breakdown_count'):.2f}", f"{mean('threats_faced_count'):.2f}",
            f"{mean('requests_issued'):.2f}", f"{mean('requests_served'):.2f}", f"{mean('requests_queued'):.2f}",
            f"{mean('reliability_as_configured'):.2f}", f"breakdown-free {free:.0%}",
        ])
    return rows


def report(metrics: Sequence[TripMetrics], fmt: str = "text") -> str:
    rows = _rows(metrics)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c) for i, c in enumerate(REPORT_COLUMNS)]
    fmt_row = lambda r: "  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip()
    lines = [fmt_row(REPORT_COLUMNS), fmt_row(["-" * w for w in widths])]
    lines += [fmt_row(r) for r in rows]
    return "\n".join(lines) + "\n"
