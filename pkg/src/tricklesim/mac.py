"""Unslotted CSMA/CA with a bounded broadcast queue and optional Cleansing."""
from collections import deque
from dataclasses import dataclass
from enum import Enum

BROADCAST = "broadcast"


class Variant(Enum):
    STANDARD = "standard"
    CONTIKI = "contiki-broadcast"
    CLEANSING = "contiki-broadcast+cleansing"

    @property
    def contiki(self):
        return self is not Variant.STANDARD

    @property
    def cleansing(self):
        return self is Variant.CLEANSING


@dataclass(frozen=True)
class MacParams:
    be_min: int = 0
    be_max: int = 3
    nb_max: int = 3
    bp: int = 125_000
    variant: Variant = Variant.CONTIKI
    capacity: int = 8

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", Variant(self.variant))
        if not 0 <= self.be_min <= self.be_max:
            raise ValueError("need 0 <= be_min <= be_max")
        if self.nb_max < 0:
            raise ValueError("nb_max must be >= 0")
        if self.bp <= 0:
            raise ValueError("bp must be positive")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")


@dataclass(eq=False)
class Frame:
    origin: int
    version: int
    enqueued_at: int
    kind: str = "trickle-broadcast"
    dest: str = BROADCAST
    nb: int = 0
    be: int = 0
    attempts: int = 0


@dataclass
class MacStats:
    enqueued: int = 0
    overflow_drops: int = 0
    attempts: int = 0
    tx: int = 0
    rtx: int = 0
    csma_drops: int = 0
    cleansing_drops: int = 0
    queue_time_total: int = 0

    def merge(self, other):
        for name in self.__dataclass_fields__:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self


def backoff_delay(params, frame, rng):
    """Delay before the next attempt of ``frame`` at its current ``be``."""
    if params.variant.contiki and frame.dest == BROADCAST:
        return params.bp
    return params.bp * rng.randint(0, 2**frame.be - 1)


class CsmaMac:
    """Per-node MAC. The medium must provide ``cca``, ``begin_broadcast`` and ``airtime``."""

    def __init__(self, node, params, queue, medium, rng, deliver_up, stats=None):
        self.node = node
        self.params = params
        self.queue = queue
        self.medium = medium
        self.rng = rng
        self.deliver_up = deliver_up
        self.stats = stats if stats is not None else MacStats()
        self.queues = {BROADCAST: deque()}
        self.on_air = None
        self._attempt_ev = None
        self.backoff_log = []
        self.trace = None

    def _log(self, what, frame):
        if self.trace is not None:
            self.trace.append((self.queue.now, self.node, what, frame.version, frame.nb))

    @property
    def backlog(self):
        return sum(len(q) for q in self.queues.values())

    @property
    def idle(self):
        return self.on_air is None and self._attempt_ev is None

    def enqueue(self, frame):
        q = self.queues.setdefault(frame.dest, deque())
        if len(q) >= self.params.capacity:
            self.stats.overflow_drops += 1
            self._log("overflow", frame)
            return False
        frame.nb = 0
        frame.be = self.params.be_min
        frame.enqueued_at = self.queue.now
        q.append(frame)
        self.stats.enqueued += 1
        if self.idle:
            self._service()
        return True

    def _head(self):
        for q in self.queues.values():
            if q:
                return q
        return None

    def _service(self):
        q = self._head()
        if q is None:
            return
        frame = q[0]
        if self.params.variant.contiki:
            delay = 0
        else:
            delay = backoff_delay(self.params, frame, self.rng)
        self._attempt_ev = self.queue.schedule_in(delay, self._attempt, q, tag="mac.attempt")

    def _attempt(self, q):
        self._attempt_ev = None
        frame = q[0]
        now = self.queue.now
        frame.attempts += 1
        self.stats.attempts += 1
        if not self.medium.cca(self.node, now):
            q.popleft()
            self.on_air = frame
            self.stats.tx += 1
            if frame.nb > 0:
                self.stats.rtx += 1
            self.stats.queue_time_total += now - frame.enqueued_at
            self._log("tx", frame)
            self.medium.begin_broadcast(self.node, frame, now)
            self.queue.schedule_in(self.medium.airtime(frame), self._tx_done, tag="mac.txdone")
            return
        frame.nb += 1
        if frame.nb > self.params.nb_max:
            q.popleft()
            self.stats.csma_drops += 1
            self._log("drop", frame)
            self._service()
            return
        be_cap = self.params.be_max
        if self.params.variant.contiki and frame.dest == BROADCAST:
            be_cap = min(be_cap, 1)
        frame.be = min(frame.be + 1, be_cap)
        self.backoff_log.append((now, frame.version))
        self._log("backoff", frame)
        delay = backoff_delay(self.params, frame, self.rng)
        self._attempt_ev = self.queue.schedule_in(delay, self._attempt, q, tag="mac.attempt")

    def _tx_done(self):
        self.on_air = None
        self._service()

    def purge_trickle(self):
        """Drop every queued (not on-air) Trickle frame; returns the count."""
        dropped = 0
        for q in self.queues.values():
            head = q[0] if q else None
            keep = [f for f in q if not f.kind.startswith("trickle")]
            dropped += len(q) - len(keep)
            q.clear()
            q.extend(keep)
            ev = self._attempt_ev
            if ev is not None and ev.args[0] is q and (not q or q[0] is not head):
                self.queue.cancel(ev)
                self._attempt_ev = None
        self.stats.cleansing_drops += dropped
        if dropped and self.idle:
            self._service()
        return dropped

    def on_incoming(self, frame):
        if self.params.variant.cleansing and frame.kind.startswith("trickle"):
            self.purge_trickle()
        self.deliver_up(frame)
