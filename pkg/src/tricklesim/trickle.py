"""Trickle timer with version-number consistency (dissemination semantics)."""
import math
from dataclasses import dataclass
from enum import Enum


class Rx(Enum):
    CONSISTENT = "consistent"
    NEWER = "inconsistent-newer"
    OLDER = "inconsistent-older"


@dataclass(frozen=True)
class TrickleParams:
    k: float = 1
    i_min: int = 1_000_000
    i_max: int = 1_000_000 * 1024
    eta: float = 0.5

    def __post_init__(self):
        if not (self.k >= 1 or self.k == math.inf):
            raise ValueError(f"k must be a positive integer or inf, got {self.k}")
        if self.i_min <= 0:
            raise ValueError("i_min must be positive")
        if self.i_max < self.i_min:
            raise ValueError("i_max < i_min")
        ratio = self.i_max // self.i_min
        if self.i_max % self.i_min or ratio & (ratio - 1):
            raise ValueError("i_max must be i_min doubled an integer number of times")
        if not 0 <= self.eta < 1:
            raise ValueError("eta must lie in [0, 1)")

    @classmethod
    def from_doublings(cls, i_min, doublings, k=1, eta=0.5):
        return cls(k=k, i_min=i_min, i_max=i_min << doublings, eta=eta)

    @property
    def doublings(self):
        return (self.i_max // self.i_min).bit_length() - 1


@dataclass
class TrickleState:
    i: int
    c: int = 0
    t: int = 0
    interval_start: int = 0
    version: int = 0


class Trickle:
    """One node's Trickle process, driven by an EventQueue.

    ``transmit`` is called with the node's current version whenever the
    timer fires with ``c < k``; everything below Trickle (queueing, radio)
    lives behind that callback.
    """

    def __init__(self, params, queue, rng, transmit, version=0, i=None, on_interval=None):
        self.params = params
        self.queue = queue
        self.rng = rng
        self.transmit = transmit
        self.on_interval = on_interval
        self.state = TrickleState(i=params.i_min if i is None else i, version=version)
        self._timer = None
        self._end = None
        self.transmissions = 0
        self.suppressions = 0

    @property
    def version(self):
        return self.state.version

    def draw_t(self, start, i):
        lo = start + math.ceil(self.params.eta * i)
        return self.rng.randint(lo, start + i)

    def start_interval(self, now, elapsed=0):
        """Reset ``c`` and draw ``t``; ``elapsed`` > 0 backdates the interval start.

        A backdated timer that would already have fired is treated as spent.
        """
        st = self.state
        p = self.params
        if not p.i_min <= st.i <= p.i_max:
            raise ValueError(f"interval {st.i} outside [{p.i_min}, {p.i_max}]")
        if not 0 <= elapsed < st.i:
            raise ValueError("elapsed must lie in [0, i)")
        self.queue.cancel(self._timer)
        self.queue.cancel(self._end)
        st.c = 0
        st.interval_start = now - elapsed
        st.t = self.draw_t(st.interval_start, st.i)
        self._timer = None
        if st.t >= now:
            self._timer = self.queue.schedule(st.t, self._on_timer, tag="trickle.timer")
        self._end = self.queue.schedule(st.interval_start + st.i, self._on_interval_end, tag="trickle.end")
        if self.on_interval is not None:
            self.on_interval(self, now)

    def _on_timer(self):
        self._timer = None
        if self.state.c < self.params.k:
            self.transmissions += 1
            self.transmit(self.state.version)
        else:
            self.suppressions += 1

    def _on_interval_end(self):
        self._end = None
        self.state.i = min(2 * self.state.i, self.params.i_max)
        self.start_interval(self.queue.now)

    def reset(self, now):
        """Shrink to i_min and start over, but only when i > i_min."""
        if self.state.i > self.params.i_min:
            self.state.i = self.params.i_min
            self.start_interval(now)
            return True
        return False

    def receive(self, version, now):
        st = self.state
        if version == st.version:
            st.c += 1
            return Rx.CONSISTENT
        if version > st.version:
            st.version = version
            self.reset(now)
            return Rx.NEWER
        self.reset(now)
        return Rx.OLDER

    def inject(self, version, now):
        """External update: adopt ``version`` and restart at i_min unconditionally."""
        self.state.version = version
        self.state.i = self.params.i_min
        self.start_interval(now)

    def stop(self):
        self.queue.cancel(self._timer)
        self.queue.cancel(self._end)
        self._timer = self._end = None
