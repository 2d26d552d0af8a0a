"""Deterministic discrete-event core: clock, ordered event queue, seeded randomness."""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable


class CausalityError(ValueError):
    pass


class EventKind(str, Enum):
    DEPART = "Depart"
    CHECKPOINT_PASSED = "CheckpointPassed"
    MEAL_BREAK = "MealBreak"
    REFRESHMENT_BREAK = "RefreshmentBreak"
    REFUEL_START = "RefuelStart"
    REFUEL_END = "RefuelEnd"
    REST_START = "RestStart"
    REST_END = "RestEnd"
    BREAKDOWN = "Breakdown"
    HELP_REQUESTED = "HelpRequested"
    VAN_ASSIGNED = "VanAssigned"
    VAN_ARRIVED = "VanArrived"
    SERVICE_COMPLETED = "ServiceCompleted"
    HEARTBEAT = "Heartbeat"
    SIGNAL_LOST = "SignalLost"
    ALARM_RAISED = "AlarmRaised"
    WEATHER_UPDATE = "WeatherUpdate"
    ARRIVED = "Arrived"


@dataclass(frozen=True)
class SimEvent:
    """A timestamped occurrence. ``seq`` is -1 until the event is scheduled."""

    time: float
    kind: EventKind
    subject: str
    payload: dict = field(default_factory=dict)
    seq: int = -1

    def sort_key(self):
        return (self.time, self.seq)


class RandomSource:
    """Seeded stream shared by a whole simulation; same seed, same draws."""

    def __init__(self, seed: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._rng = random.Random(seed)

    def random(self) -> float:
        return self._rng.random()

    def uniform(self, a: float, b: float) -> float:
        return self._rng.uniform(a, b)

    def exponential(self, rate: float) -> float:
        return self._rng.expovariate(rate)


class Simulator:
    def __init__(self, start: float = 0.0):
        self.now = start
        self._queue: list[tuple[float, int, SimEvent]] = []
        self._seq = 0
        self._cancelled: set[int] = set()

    def __len__(self):
        return len(self._queue) - len(self._cancelled)

    def schedule(self, event: SimEvent) -> SimEvent:
        if not math.isfinite(event.time) or event.time < self.now:
            raise CausalityError(f"cannot schedule {event.kind.value} at t={event.time} before now={self.now}")
        event = replace(event, seq=self._seq)
        self._seq += 1
        heapq.heappush(self._queue, (event.time, event.seq, event))
        return event

    def cancel(self, event: SimEvent) -> None:
        """Withdraw a scheduled event; it is skipped and never traced."""
        if event.seq >= 0:
            self._cancelled.add(event.seq)

    def peek_time(self) -> float | None:
        while self._queue and self._queue[0][1] in self._cancelled:
            _, seq, _ = heapq.heappop(self._queue)
            self._cancelled.discard(seq)
        return self._queue[0][0] if self._queue else None

    def run_until(
        self,
        t_end: float,
        handler: Callable[[SimEvent], None] | None = None,
        stop: Callable[[], bool] | None = None,
    ) -> list[SimEvent]:
        """Dispatch every event with time <= t_end in (time, seq) order and return them.

        ``handler`` is invoked per event and may schedule further events; ``stop``
        is polled after each event and ends the run early when true.
        """
        if t_end < self.now:
            raise CausalityError(f"t_end={t_end} is before now={self.now}")
        trace = []
        while True:
            t = self.peek_time()
            if t is None or t > t_end:
                break
            _, _, event = heapq.heappop(self._queue)
            self.now = event.time
            trace.append(event)
            if handler is not None:
                handler(event)
            if stop is not None and stop():
                break
        if self.peek_time() is not None and not (stop and stop()):
            self.now = t_end
        return trace
