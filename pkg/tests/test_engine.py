import pytest

from lrvsim.engine import CausalityError, EventKind, RandomSource, SimEvent, Simulator

K = EventKind


def ev(t, subject="a", kind=K.HEARTBEAT):
    return SimEvent(t, kind, subject)


def test_same_time_events_keep_insertion_order():
    sim = Simulator()
    sim.schedule(ev(1.0, "A"))
    sim.schedule(ev(1.0, "B"))
    sim.schedule(ev(0.5, "C"))
    assert [e.subject for e in sim.run_until(2.0)] == ["C", "A", "B"]


def test_event_at_current_time_runs_next():
    sim = Simulator()
    seen = []

    def handler(e):
        seen.append(e.subject)
        if e.subject == "first":
            sim.schedule(ev(sim.now, "now"))

    sim.schedule(ev(1.0, "first"))
    sim.schedule(ev(2.0, "later"))
    sim.run_until(5, handler)
    assert seen == ["first", "now", "later"]


def test_past_event_rejected():
    sim = Simulator()
    sim.schedule(ev(3.0))
    sim.run_until(3.0)
    with pytest.raises(CausalityError):
        sim.schedule(ev(2.0))
    with pytest.raises(CausalityError):
        sim.run_until(1.0)


def test_empty_queue():
    sim = Simulator(start=4.0)
    assert sim.run_until(10.0) == []
    assert sim.now == 4.0


def test_single_arrival():
    sim = Simulator()
    sim.schedule(SimEvent(56.21, K.ARRIVED, "truck"))
    trace = sim.run_until(100)
    assert trace[-1].kind is K.ARRIVED and trace[-1].time == 56.21
    assert sim.now == 56.21


def test_clock_stops_at_horizon_with_work_left():
    sim = Simulator()
    sim.schedule(ev(1.0))
    sim.schedule(ev(7.0))
    assert len(sim.run_until(5.0)) == 1
    assert sim.now == 5.0
    assert len(sim.run_until(10.0)) == 1
    assert sim.now == 7.0


def test_cancelled_events_are_not_traced():
    sim = Simulator()
    keep = sim.schedule(ev(1.0, "keep"))
    drop = sim.schedule(ev(0.5, "drop"))
    sim.cancel(drop)
    assert sim.run_until(2.0) == [keep]


def test_stop_predicate():
    sim = Simulator()
    for t in range(5):
        sim.schedule(ev(float(t)))
    assert len(sim.run_until(10, stop=lambda: sim.now >= 2)) == 3


def test_seq_is_total_order():
    sim = Simulator()
    events = [sim.schedule(ev(t)) for t in (3.0, 1.0, 1.0, 2.0)]
    assert len({(e.time, e.seq) for e in events}) == 4


def test_random_source_replays():
    a, b = RandomSource(2**64 - 1), RandomSource(2**64 - 1)
    assert [a.random() for _ in range(20)] == [b.random() for _ in range(20)]
    assert RandomSource(1).random() != RandomSource(2).random()
    with pytest.raises(ValueError):
        RandomSource(-1)
