"""Minimal terminating discrete-event kernel.

Event calendar ordered by (time, insertion sequence), capacitated
resource pools with FIFO queues, and time-weighted busy statistics.
One kernel instance is strictly single-threaded; parallelism happens at
the replication level with disjoint instances.
"""

from __future__ import annotations

import heapq
from collections import deque

from .errors import SimulationLogicError


class EventCalendar:
    """Future event list. Ties on time resolve by insertion order, so a
    replication's event sequence is totally ordered and reproducible."""

    __slots__ = ("_heap", "_seq", "clock")

    def __init__(self):
        self._heap: list[tuple] = []
        self._seq = 0
        self.clock = 0.0

    def __len__(self):
        return len(self._heap)

    def schedule(self, time: float, action, payload=None) -> None:
        if time < self.clock:
            raise SimulationLogicError(
                f"scheduling into the past: event at t={time} with clock={self.clock}"
            )
        heapq.heappush(self._heap, (time, self._seq, action, payload))
        self._seq += 1

    def next_event(self):
        """Pop the minimum (time, sequence) event and advance the clock.

        Returns (time, action, payload), or None when the calendar is
        empty (end of replication).
        """
        if not self._heap:
            return None
        time, _, action, payload = heapq.heappop(self._heap)
        self.clock = time
        return time, action, payload


class BusyStat:
    """Time-weighted integral of busy units plus a grant tally."""

    __slots__ = ("integral", "last_change", "grants")

    def __init__(self):
        self.integral = 0.0
        self.last_change = 0.0
        self.grants = 0

    def advance(self, busy_units: int, now: float) -> None:
        self.integral += busy_units * (now - self.last_change)
        self.last_change = now


class ResourcePool:
    """Capacitated resource with a FIFO wait queue.

    Capacity 0 is allowed: every seize enqueues and nothing is ever
    granted, modeling a picking point with none of that resource.
    """

    __slots__ = ("name", "capacity", "busy_units", "wait_queue", "stats")

    def __init__(self, name: str, capacity: int):
        if capacity < 0:
            raise SimulationLogicError(f"pool {name}: capacity must be >= 0")
        self.name = name
        self.capacity = capacity
        self.busy_units = 0
        self.wait_queue: deque = deque()
        self.stats = BusyStat()

    def seize(self, entity, clock: float) -> bool:
        """Grant a unit now if one is free, else enqueue. Returns True on
        grant."""
        if self.busy_units < self.capacity:
            self.stats.advance(self.busy_units, clock)
            self.busy_units += 1
            self.stats.grants += 1
            return True
        self.wait_queue.append(entity)
        return False

    def release(self, clock: float):
        """Free one unit. If someone is waiting, the queue head is granted
        immediately (busy count unchanged net) and returned; otherwise
        returns None."""
        if self.busy_units < 1:
            raise SimulationLogicError(f"pool {self.name}: release with no busy units")
        if self.wait_queue:
            self.stats.grants += 1
            return self.wait_queue.popleft()
        self.stats.advance(self.busy_units, clock)
        self.busy_units -= 1
        return None

    def finalize_stats(self, horizon: float) -> tuple[float, float, int]:
        """Close the busy integral at the horizon.

        Returns (busy_time, idle_time, grants) in unit-minutes; the
        identity busy + idle == capacity * horizon holds exactly up to
        float rounding.
        """
        self.stats.advance(self.busy_units, horizon)
        busy = self.stats.integral
        idle = self.capacity * horizon - busy
        return busy, idle, self.stats.grants
