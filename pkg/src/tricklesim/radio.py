"""Duty-cycled radio (ContikiMAC-style broadcast) over a lossless unit-disk medium."""
import math
from dataclasses import dataclass, field


@dataclass
class RdcConfig:
    w: int
    phases: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("wake-up interval must be positive")
        for node, ph in self.phases.items():
            if not 0 <= ph < self.w:
                raise ValueError(f"phase of node {node} outside [0, w)")

    @classmethod
    def from_hz(cls, hz, phases=None):
        return cls(w=int(round(1_000_000 / hz)), phases=dict(phases or {}))

    @property
    def hz(self):
        return 1_000_000 / self.w

    def next_wakeup(self, node, t):
        """First wake-up instant of ``node`` at or after ``t``."""
        ph = self.phases.get(node, 0)
        if t <= ph:
            return ph
        j = -(-(t - ph) // self.w)
        return ph + j * self.w

    def wakeups(self, node, until):
        ph = self.phases.get(node, 0)
        return list(range(ph, until, self.w))


def unit_disk_links(positions, ranges):
    """``hears[b]`` = set of nodes whose transmissions reach ``b``."""
    ids = list(positions)
    hears = {b: set() for b in ids}
    for a in ids:
        xa, ya = positions[a]
        ra = ranges[a] if isinstance(ranges, dict) else ranges
        for b in ids:
            if a != b and math.hypot(positions[b][0] - xa, positions[b][1] - ya) <= ra:
                hears[b].add(a)
    return hears


@dataclass
class RadioStats:
    broadcasts: int = 0
    deliveries: int = 0
    collisions: int = 0


class RadioMedium:
    """Shared channel with per-node occupancies of length ``w``.

    A broadcast reaches each listener at the listener's first wake-up at or
    after the start. The copy is lost when some other occupancy audible to
    the listener (its own included) also covers that instant. Occupancies
    are half-open, ``[start, start + w)``.
    """

    def __init__(self, queue, hears, rdc, deliver):
        self.queue = queue
        self.rdc = rdc
        self.deliver = deliver
        self.hears = {b: frozenset(s) for b, s in hears.items()}
        self.listeners = {a: [] for a in self.hears}
        for b in sorted(self.hears):
            for a in sorted(self.hears[b]):
                self.listeners[a].append(b)
        self.active = {}
        self.stats = RadioStats()
        self.log = None

    def airtime(self, frame=None):
        return self.rdc.w

    def _covers(self, node, t):
        occ = self.active.get(node)
        return occ is not None and occ[0] <= t < occ[1]

    def cca(self, node, now):
        """True when the channel at ``node`` is busy."""
        return any(self._covers(a, now) for a in self.hears[node])

    def begin_broadcast(self, node, frame, now):
        prev = self.active.get(node)
        if prev is not None and prev[1] > now:
            raise RuntimeError(f"node {node} already on air until {prev[1]}")
        end = now + self.rdc.w
        self.active[node] = (now, end, frame)
        self.stats.broadcasts += 1
        for b in self.listeners[node]:
            at = self.rdc.next_wakeup(b, now)
            self.queue.schedule(at, self._arrive, node, b, frame, tag="radio.rx")
        return (now, end)

    def _arrive(self, src, dst, frame):
        now = self.queue.now
        if self._covers(dst, now) or any(a != src and self._covers(a, now) for a in self.hears[dst]):
            self.stats.collisions += 1
            if self.log is not None:
                self.log.append((now, src, dst, "collision"))
            return
        self.stats.deliveries += 1
        if self.log is not None:
            self.log.append((now, src, dst, "rx"))
        self.deliver(dst, frame)


class IdealMedium:
    """Instant, lossless, collision-free broadcast used to check Trickle in isolation."""

    def __init__(self, queue, hears, deliver):
        self.queue = queue
        self.deliver = deliver
        self.listeners = {a: [] for a in hears}
        for b in sorted(hears):
            for a in sorted(hears[b]):
                self.listeners[a].append(b)
        self.stats = RadioStats()

    def airtime(self, frame=None):
        return 0

    def cca(self, node, now):
        return False

    def begin_broadcast(self, node, frame, now):
        self.stats.broadcasts += 1
        for b in self.listeners[node]:
            self.stats.deliveries += 1
            self.deliver(b, frame)
        return (now, now)
