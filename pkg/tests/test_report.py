import pytest

from lrvsim.config import cpec_config
from lrvsim.engine import EventKind, SimEvent
from lrvsim.monitoring import CheckpointRecord, ScheduleStatus, total_time
from lrvsim.report import emit_trace, metrics_from_trace, parse_trace, report
from lrvsim.world import run


def test_empty_trace():
    assert emit_trace([], "jsonl") == b""
    assert emit_trace([], "csv") == b""
    assert parse_trace(b"") == []


def test_single_arrived_event():
    out = emit_trace([SimEvent(1.5, EventKind.ARRIVED, "v1", {"km": 10.0}, 0)])
    assert out.count(b"\n") == 1
    assert b'"kind":"Arrived"' in out


@pytest.mark.parametrize("fmt", ["jsonl", "csv"])
def test_round_trip(make_config, fmt):
    trace, _ = run(make_config())
    back = parse_trace(emit_trace(trace, fmt), fmt)
    key = lambda e: (e.time, e.seq, e.kind, e.subject)
    assert [key(e) for e in back] == [key(e) for e in trace]
    assert [e.payload for e in back] == [e.payload for e in trace]


def test_empty_metrics_header_only():
    text = report([])
    assert len(text.strip().splitlines()) == 2
    assert text.startswith("vehicle")
    assert report([], "csv").strip().count("\n") == 0


def test_on_time_vehicle(make_config):
    _, metrics = run(make_config())
    (m,) = metrics
    assert m.arrived and m.trip_duration_hours == pytest.approx(6.0)
    assert {s.status for s in m.segments} == {ScheduleStatus.ON_TIME}
    line = report(metrics).splitlines()[2]
    assert "OnTime OnTime OnTime" in line


def test_cpec_report_and_cross_module_consistency():
    trace, metrics = run(cpec_config())
    (m,) = metrics
    recs = [CheckpointRecord(e.payload["checkpoint"], e.time) for e in trace if e.kind is EventKind.CHECKPOINT_PASSED]
    assert m.trip_duration_hours == total_time(recs)
    assert "56.21" in report(metrics).splitlines()[2]
    assert m.breakdown_count == 0 and m.breakdown_free
