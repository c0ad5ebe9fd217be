"""Topologies, per-node assembly (Trickle + CSMA + radio), replications and metrics."""
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .engine import EventQueue, RngStream
from .mac import CsmaMac, Frame, MacStats
from .radio import IdealMedium, RadioMedium, RdcConfig, unit_disk_links
from .trickle import Rx, Trickle


@dataclass
class Topology:
    nodes: list
    positions: dict = field(default_factory=dict)
    radius: object = None
    edges: list = None

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("node ids must be unique")

    def hears(self):
        """Map node -> set of nodes it can hear. Explicit edges win over ranges."""
        if self.edges is not None:
            out = {v: set() for v in self.nodes}
            for a, b in self.edges:
                if a not in out or b not in out:
                    raise ValueError(f"edge {a}-{b} references an unknown node")
                out[a].add(b)
                out[b].add(a)
            return out
        return unit_disk_links(self.positions, self.radius)

    def neighbors(self, node):
        return self.hears()[node]

    def edge_set(self):
        h = self.hears()
        return {tuple(sorted((a, b))) for b in h for a in h[b]}

    def with_edges(self, edges):
        return Topology(list(self.nodes), dict(self.positions), self.radius, list(edges))


def make_clique(n):
    if n < 2:
        raise ValueError("clique needs n >= 2")
    ids = list(range(1, n + 1))
    return Topology(ids, edges=list(combinations(ids, 2)))


def make_bottleneck4():
    """Nodes 1 and 2 see each other and node 3; node 4 hangs off node 3 only."""
    return Topology([1, 2, 3, 4], edges=[(1, 2), (1, 3), (2, 3), (3, 4)])


def make_grid(rows=10, cols=10, spacing=10.0, R=1):
    """Row-major ids from the top-left corner (id 0); range is ``2 + 10 R`` meters."""
    if not 1 <= R <= 5:
        raise ValueError("R must lie in [1, 5]")
    ids = list(range(rows * cols))
    pos = {r * cols + c: (c * spacing, r * spacing) for r in range(rows) for c in range(cols)}
    return Topology(ids, pos, radius=2.0 + 10.0 * R)


def make_custom(edges):
    ids = sorted({v for e in edges for v in e})
    return Topology(ids, edges=list(edges))


def topology_for(cfg):
    if cfg.topology == "clique":
        return make_clique(cfg.n)
    if cfg.topology == "bottleneck4":
        topo = make_bottleneck4()
        return topo.with_edges(cfg.edges) if cfg.edges else topo
    if cfg.topology == "grid":
        return make_grid(cfg.rows, cfg.cols, cfg.spacing_m, cfg.R)
    return make_custom(cfg.edges)


def default_injection(cfg, topo):
    if cfg.inject_nodes:
        return list(cfg.inject_nodes)
    if cfg.topology == "bottleneck4":
        return [1, 2]
    if cfg.topology == "clique":
        return list(topo.nodes)
    return [topo.nodes[0]]


def default_sinks(cfg, topo):
    if cfg.sinks:
        return list(cfg.sinks)
    if cfg.topology == "bottleneck4":
        return [4]
    return [topo.nodes[-1]]


def interval_index(delay, i_min, i_max):
    """1-based index of the Trickle interval containing ``delay`` after a reset.

    Intervals double from ``i_min`` and saturate at ``i_max``.
    """
    if delay < 0:
        raise ValueError("delay must be >= 0")
    j, end, size = 1, i_min, i_min
    while delay >= end:
        size = min(2 * size, i_max)
        end += size
        j += 1
    return j


@dataclass
class Metrics:
    update_delay: int
    adoption: dict
    updater: dict
    updated_interval: dict
    sinks: list
    tx_count: int
    rtx_count: int
    attempts: int
    csma_drops: int
    cleansing_drops: int
    overflow_drops: int
    enqueued: int
    in_queue_at_end: int
    on_air_at_end: int
    mean_queue_time: float
    suppressions: int
    trickle_tx: int
    collisions: int
    timed_out: bool
    end_time: int
    injected_backoff: bool = False
    updated_interval_local: dict = None
    seed: int = 0
    rep: int = 0

    @property
    def sink_interval(self):
        return max(self.updated_interval.get(s, -1) for s in self.sinks)

    def reconciles(self):
        """Every enqueued frame is transmitted, dropped, purged, or still queued."""
        return self.enqueued == (
            self.tx_count + self.csma_drops + self.cleansing_drops + self.in_queue_at_end
        )


class Simulation:
    """One replication of a dissemination scenario.

    Every node starts consistent at version ``inject_version - 1`` with
    ``i = i_max`` and an interval that began at a uniformly random point in
    the past (unless ``sync_start``).
    """

    def __init__(self, cfg, seed=None, rep=0, topology=None, trace=False):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.rep = rep
        self.topology = topology if topology is not None else topology_for(cfg)
        self.queue = EventQueue(trace=trace)
        self.target = cfg.inject_version
        self.inject_at = int(round(cfg.inject_time_ms * 1000))
        self.injected = default_injection(cfg, self.topology)
        self.sinks = default_sinks(cfg, self.topology)
        unknown = set(self.injected + self.sinks) - set(self.topology.nodes)
        if unknown:
            raise ValueError(f"unknown node ids {sorted(unknown)}")

        self.tparams = cfg.trickle_params()
        self.mparams = cfg.mac_params()
        self.ideal = cfg.radio == "ideal"
        hears = self.topology.hears()
        self.rngs = {v: RngStream(self.seed, rep, v) for v in self.topology.nodes}

        if self.ideal:
            self.medium = IdealMedium(self.queue, hears, self._deliver)
        else:
            phases = {v: self.rngs[v].randint(0, cfg.w - 1) for v in self.topology.nodes}
            self.medium = RadioMedium(self.queue, hears, RdcConfig(cfg.w, phases), self._deliver)

        self.mac_stats = MacStats()
        self.trickles = {}
        self.macs = {}
        self.adoption = {}
        self.updater = {}
        self.done = set()
        self.tx_log = []
        for v in self.topology.nodes:
            tr = Trickle(
                self.tparams, self.queue, self.rngs[v],
                transmit=self._transmitter(v),
                version=self.target - 1,
                i=self.tparams.i_max,
                on_interval=self._on_interval,
            )
            tr.node = v
            self.trickles[v] = tr
            if not self.ideal:
                self.macs[v] = CsmaMac(
                    v, self.mparams, self.queue, self.medium, self.rngs[v],
                    deliver_up=self._receiver(v), stats=self.mac_stats,
                )

        self.queue.schedule(self.inject_at, self._inject, tag="inject")
        for v in self.topology.nodes:
            elapsed = 0 if cfg.sync_start else self.rngs[v].randint(0, self.tparams.i_max - 1)
            self.trickles[v].start_interval(0, elapsed=elapsed)

    # -- wiring -------------------------------------------------------------
    def _transmitter(self, v):
        def transmit(version):
            frame = Frame(origin=v, version=version, enqueued_at=self.queue.now)
            self.tx_log.append((self.queue.now, v, version))
            if self.ideal:
                self.mac_stats.enqueued += 1
                self.mac_stats.attempts += 1
                self.mac_stats.tx += 1
                self.medium.begin_broadcast(v, frame, self.queue.now)
            else:
                self.macs[v].enqueue(frame)
        return transmit

    def _receiver(self, v):
        def up(frame):
            self._receive(v, frame)
        return up

    def _deliver(self, dst, frame):
        if self.ideal:
            self._receive(dst, frame)
        else:
            self.macs[dst].on_incoming(frame)

    def _receive(self, v, frame):
        now = self.queue.now
        tr = self.trickles[v]
        kind = tr.receive(frame.version, now)
        if kind is Rx.NEWER and tr.version == self.target and v not in self.adoption:
            self.adoption[v] = now
            self.updater[v] = frame.origin
        self._refresh(tr)

    def _on_interval(self, tr, now):
        self._refresh(tr)

    def _refresh(self, tr):
        if tr.version == self.target and tr.state.i == self.tparams.i_max:
            self.done.add(tr.node)
        else:
            self.done.discard(tr.node)

    def _inject(self):
        now = self.queue.now
        for v in self.injected:
            self.trickles[v].inject(self.target, now)
            self.adoption.setdefault(v, now)
            self.updater.setdefault(v, None)
            self._refresh(self.trickles[v])

    # -- running ------------------------------------------------------------
    def finished(self):
        return len(self.done) == len(self.trickles) and self.queue.now >= self.inject_at

    def run(self):
        deadline = self.inject_at + self.cfg.time_limit
        q = self.queue
        n = len(self.trickles)
        done = self.done
        timed_out = False
        while True:
            nxt = q.peek_time()
            if nxt is None or nxt > deadline:
                timed_out = True
                break
            q.step()
            if len(done) == n and q.now >= self.inject_at:
                break
        return self.metrics(timed_out)

    def metrics(self, timed_out=False):
        st = self.mac_stats
        nodes = self.topology.nodes
        if len(self.adoption) == len(nodes):
            delay = max(self.adoption.values()) - self.inject_at
        else:
            delay = self.queue.now - self.inject_at
        upd = {
            v: interval_index(self.adoption[v] - self.inject_at, self.tparams.i_min, self.tparams.i_max)
            if v in self.adoption else -1
            for v in nodes
        }
        # interval index measured from the adoption of whoever delivered the update
        local = {}
        for v, t in self.adoption.items():
            src = self.updater.get(v)
            anchor = self.adoption.get(src, self.inject_at) if src is not None else self.inject_at
            local[v] = interval_index(max(t - anchor, 0), self.tparams.i_min, self.tparams.i_max)
        first_window = self.inject_at + self.tparams.i_min + (0 if self.ideal else self.cfg.w)
        backoff = any(
            t < first_window and ver == self.target
            for v in self.injected if v in self.macs
            for t, ver in self.macs[v].backoff_log
        )
        in_queue = sum(m.backlog for m in self.macs.values())
        on_air = sum(1 for m in self.macs.values() if m.on_air is not None)
        return Metrics(
            update_delay=delay,
            adoption=dict(self.adoption),
            updater=dict(self.updater),
            updated_interval=upd,
            sinks=list(self.sinks),
            tx_count=st.tx,
            rtx_count=st.rtx,
            attempts=st.attempts,
            csma_drops=st.csma_drops,
            cleansing_drops=st.cleansing_drops,
            overflow_drops=st.overflow_drops,
            enqueued=st.enqueued,
            in_queue_at_end=in_queue,
            on_air_at_end=on_air,
            mean_queue_time=st.queue_time_total / st.tx if st.tx else 0.0,
            suppressions=sum(t.suppressions for t in self.trickles.values()),
            trickle_tx=sum(t.transmissions for t in self.trickles.values()),
            collisions=self.medium.stats.collisions if not self.ideal else 0,
            timed_out=timed_out or len(self.adoption) < len(nodes),
            end_time=self.queue.now,
            injected_backoff=backoff,
            updated_interval_local=local,
            seed=self.seed,
            rep=self.rep,
        )


def run_replication(cfg, seed=None, rep=0, **kwargs):
    return Simulation(cfg, seed=seed, rep=rep, **kwargs).run()


def run_many(cfg, reps=None, seed=None):
    reps = cfg.reps if reps is None else reps
    seed = cfg.seed if seed is None else seed
    return [run_replication(cfg, seed=seed, rep=r) for r in range(reps)]


SUMMARY_FIELDS = (
    "update_delay", "tx_count", "rtx_count", "csma_drops", "cleansing_drops",
    "mean_queue_time", "suppressions",
)


def worst_decile_mean(values):
    vals = np.sort(np.asarray(values, dtype=float))
    k = max(1, math.ceil(0.1 * len(vals)))
    return float(vals[-k:].mean())


def aggregate(metrics, fields=SUMMARY_FIELDS):
    """Per-field mean / stddev / percentiles, plus the worst-decile mean delay."""
    if not metrics:
        raise ValueError("aggregate needs at least one Metrics record")
    out = {}
    for name in fields:
        vals = np.array([getattr(m, name) for m in metrics], dtype=float)
        p10, p50, p90 = np.percentile(vals, [10, 50, 90])
        out[name] = {
            "mean": float(vals.mean()),
            "std": float(vals.std()),
            "p10": float(p10),
            "p50": float(p50),
            "p90": float(p90),
        }
    out["update_delay"]["worst_decile_mean"] = worst_decile_mean([m.update_delay for m in metrics])
    out["timed_out"] = sum(m.timed_out for m in metrics)
    out["reps"] = len(metrics)
    return out
