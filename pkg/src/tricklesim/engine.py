"""Discrete-event core: integer microsecond clock, cancellable events, seeded streams."""
import heapq
from dataclasses import dataclass, field

import numpy as np

US_PER_MS = 1000
US_PER_S = 1_000_000


def ms(value):
    """Milliseconds -> integer ticks (1 tick = 1 us)."""
    return int(round(value * US_PER_MS))


class SchedulingError(RuntimeError):
    pass


@dataclass(eq=False)
class EventHandle:
    fire_at: int
    seq: int
    action: object
    args: tuple = ()
    tag: str = ""
    cancelled: bool = False
    fired: bool = False

    def __lt__(self, other):
        return (self.fire_at, self.seq) < (other.fire_at, other.seq)

    @property
    def pending(self):
        return not (self.cancelled or self.fired)


@dataclass
class RunResult:
    now: int
    exhausted: bool
    fired: int


class EventQueue:
    """Single-threaded event scheduler.

    Events fire in ``(fire_at, seq)`` order, so simultaneous events run in
    insertion order. Cancelled events stay in the heap and are skipped
    when popped.
    """

    def __init__(self, start=0, trace=False):
        if start < 0:
            raise SchedulingError("clock cannot start before 0")
        self.now = int(start)
        self._heap = []
        self._seq = 0
        self.fired = 0
        self.trace = [] if trace else None

    def __len__(self):
        return sum(1 for ev in self._heap if ev.pending)

    def schedule(self, at, action, *args, tag=""):
        at = int(at)
        if at < self.now:
            raise SchedulingError(f"cannot schedule at {at} < now={self.now} ({tag or action})")
        ev = EventHandle(at, self._seq, action, args, tag)
        self._seq += 1
        heapq.heappush(self._heap, ev)
        return ev

    def schedule_in(self, delay, action, *args, tag=""):
        return self.schedule(self.now + int(delay), action, *args, tag=tag)

    @staticmethod
    def cancel(handle):
        if handle is None or not handle.pending:
            return False
        handle.cancelled = True
        return True

    def peek_time(self):
        while self._heap and not self._heap[0].pending:
            heapq.heappop(self._heap)
        return self._heap[0].fire_at if self._heap else None

    def step(self):
        """Fire the next pending event. Returns False when the queue is empty."""
        heap = self._heap
        while heap:
            ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self.now = ev.fire_at
            ev.fired = True
            self.fired += 1
            if self.trace is not None:
                self.trace.append((ev.fire_at, ev.seq, ev.tag))
            ev.action(*ev.args)
            return True
        return False

    def run_until(self, stop=None):
        """Process events until ``stop`` is reached.

        ``stop`` may be an integer time (events at exactly that time still
        fire), a zero-argument predicate checked after every event, or None
        to drain the queue. Returns a RunResult; ``exhausted`` is set when the
        queue ran dry before the stop condition held.
        """
        fired0 = self.fired
        if stop is None:
            while self.step():
                pass
            return RunResult(self.now, True, self.fired - fired0)
        if callable(stop):
            if stop():
                return RunResult(self.now, False, 0)
            while self.step():
                if stop():
                    return RunResult(self.now, False, self.fired - fired0)
            return RunResult(self.now, True, self.fired - fired0)
        limit = int(stop)
        while True:
            nxt = self.peek_time()
            if nxt is None:
                return RunResult(self.now, True, self.fired - fired0)
            if nxt > limit:
                self.now = max(self.now, limit)
                return RunResult(self.now, False, self.fired - fired0)
            self.step()


@dataclass
class RngStream:
    """Independent random stream keyed by ``(seed, replication, node)``."""

    seed: int
    rep: int = 0
    node: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(self.seed & (2**64 - 1), spawn_key=(self.rep, self.node))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def uniform(self, lo, hi):
        if lo > hi:
            raise ValueError(f"uniform: lo={lo} > hi={hi}")
        if lo == hi:
            return lo
        return lo + (hi - lo) * self._gen.random()

    def randint(self, lo, hi):
        """Integer uniform on the closed range [lo, hi]."""
        if lo > hi:
            raise ValueError(f"randint: lo={lo} > hi={hi}")
        if lo == hi:
            return int(lo)
        return int(self._gen.integers(lo, hi, endpoint=True))

    @property
    def generator(self):
        return self._gen
