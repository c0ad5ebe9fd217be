"""Scenario configuration: flat ``section.key = value`` text, durations in ms."""
import math
import warnings
from dataclasses import dataclass, fields, replace

from .engine import ms
from .mac import MacParams, Variant
from .trickle import TrickleParams

TOPOLOGIES = ("clique", "bottleneck4", "grid", "custom")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    topology: str = "bottleneck4"
    n: int = 2
    rows: int = 10
    cols: int = 10
    spacing_m: float = 10.0
    R: int = 1
    edges: tuple = ()

    k: float = 1
    i_min_ms: float = 1000.0
    i_max_ms: float = None
    doublings: int = 10
    eta: float = 0.5

    variant: str = "contiki-broadcast"
    be_min: int = 0
    be_max: int = 3
    nb_max: int = 3
    queue_capacity: int = 8
    bp_ms: float = None

    wakeup_hz: float = 8.0
    radio: str = "contikimac"

    inject_nodes: tuple = None
    inject_time_ms: float = 0.0
    inject_version: int = 1

    reps: int = 1
    seed: int = 1
    time_limit_ms: float = None
    sinks: tuple = None
    sync_start: bool = False

    def __post_init__(self):
        self.validate()

    # -- derived quantities -------------------------------------------------
    @property
    def w(self):
        return int(round(1_000_000 / self.wakeup_hz))

    @property
    def m(self):
        return ms(self.i_min_ms) / self.w

    @property
    def i_min(self):
        return ms(self.i_min_ms)

    @property
    def i_max(self):
        if self.i_max_ms is not None:
            return ms(self.i_max_ms)
        return self.i_min << self.doublings

    @property
    def time_limit(self):
        if self.time_limit_ms is not None:
            return ms(self.time_limit_ms)
        return 4 * self.i_max

    def trickle_params(self):
        return TrickleParams(k=self.k, i_min=self.i_min, i_max=self.i_max, eta=self.eta)

    def mac_params(self):
        v = Variant(self.variant)
        bp = self.w if v.contiki or self.bp_ms is None else ms(self.bp_ms)
        return MacParams(self.be_min, self.be_max, self.nb_max, bp, v, self.queue_capacity)

    def with_(self, **changes):
        return replace(self, **changes)

    def validate(self):
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if self.topology == "clique" and self.n < 2:
            raise ConfigError("clique needs n >= 2")
        if self.topology == "grid":
            if self.rows < 1 or self.cols < 1 or self.spacing_m <= 0:
                raise ConfigError("grid needs rows, cols >= 1 and spacing_m > 0")
            if not 1 <= self.R <= 5:
                raise ConfigError(f"grid R must lie in [1, 5], got {self.R}")
        if self.topology == "custom" and not self.edges:
            raise ConfigError("custom topology needs edges")
        if self.wakeup_hz <= 0:
            raise ConfigError("wakeup_hz must be positive")
        if self.radio not in ("contikimac", "ideal"):
            raise ConfigError(f"radio must be 'contikimac' or 'ideal', got {self.radio!r}")
        if self.i_min_ms <= 0:
            raise ConfigError("i_min_ms must be positive")
        if self.radio == "contikimac" and self.m < 2:
            raise ConfigError(
                f"i_min_ms={self.i_min_ms} is below two wake-up intervals "
                f"({2000 / self.wakeup_hz:g} ms at {self.wakeup_hz:g} Hz): m={self.m:g} < 2"
            )
        if self.doublings < 0:
            raise ConfigError("doublings must be >= 0")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        try:
            self.trickle_params()
            self.mac_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.inject_time_ms < 0:
            raise ConfigError("inject_time_ms must be >= 0")


# dotted key -> field name
KEYS = {
    "topology": "topology",
    "topology.kind": "topology",
    "topology.n": "n",
    "topology.rows": "rows",
    "topology.cols": "cols",
    "topology.spacing_m": "spacing_m",
    "topology.R": "R",
    "topology.edges": "edges",
    "trickle.k": "k",
    "trickle.i_min_ms": "i_min_ms",
    "trickle.i_max_ms": "i_max_ms",
    "trickle.doublings": "doublings",
    "trickle.eta": "eta",
    "mac.variant": "variant",
    "mac.be_min": "be_min",
    "mac.be_max": "be_max",
    "mac.nb_max": "nb_max",
    "mac.queue_capacity": "queue_capacity",
    "mac.bp_ms": "bp_ms",
    "rdc.wakeup_hz": "wakeup_hz",
    "rdc.radio": "radio",
    "injection.nodes": "inject_nodes",
    "injection.time_ms": "inject_time_ms",
    "injection.version": "inject_version",
    "run.reps": "reps",
    "run.seed": "seed",
    "run.time_limit_ms": "time_limit_ms",
    "run.sinks": "sinks",
    "run.sync_start": "sync_start",
}
_LEAVES = {}
for _k, _f in KEYS.items():
    _LEAVES.setdefault(_k.rsplit(".", 1)[-1], set()).add(_f)


def _resolve(key):
    if key in KEYS:
        return KEYS[key]
    cands = _LEAVES.get(key, set())
    if len(cands) == 1:
        return next(iter(cands))
    raise ConfigError(f"unknown configuration key {key!r}")


def _int_list(text):
    return tuple(int(x) for x in text.replace(";", ",").split(",") if x.strip())


def _edge_list(text):
    out = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        a, _, b = item.partition("-")
        out.append((int(a), int(b)))
    return tuple(out)


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _k(text):
    if text.lower() in ("inf", "infinity", "unbounded"):
        return math.inf
    v = int(text)
    if v < 1:
        raise ValueError(text)
    return v


_CONVERT = {
    "edges": _edge_list,
    "inject_nodes": _int_list,
    "sinks": _int_list,
    "sync_start": _bool,
    "k": _k,
}


def _convert(name, text):
    if name in _CONVERT:
        return _CONVERT[name](text)
    ftype = {f.name: f.default for f in fields(ScenarioConfig)}[name]
    if name in ("topology", "variant", "radio"):
        return text
    if isinstance(ftype, bool):
        return _bool(text)
    if isinstance(ftype, int):
        return int(text)
    return float(text)


def parse_config(text, **overrides):
    """Parse ``key = value`` lines into a validated ScenarioConfig.

    Keys are dotted (``trickle.i_min_ms``) or bare when the leaf name is
    unambiguous (``i_min_ms``). ``#`` starts a comment.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        key, found, val = line.partition(sep)
        if not found:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = key.strip(), val.strip()
        name = _resolve(key)
        try:
            values[name] = _convert(name, val)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {val!r} for {key!r}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = ScenarioConfig(**values)
    if cfg.time_limit_ms is not None and cfg.time_limit <= cfg.i_max:
        warnings.warn("time limit is not larger than i_max; replications will likely time out")
    return cfg


def dump_config(cfg):
    inv = {}
    for key, name in KEYS.items():
        if name not in inv and key != "topology.kind":
            inv[name] = key
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if f.name == "edges":
            v = ",".join(f"{a}-{b}" for a, b in v)
            if not v:
                continue
        elif isinstance(v, tuple):
            v = ",".join(map(str, v))
        lines.append(f"{inv[f.name]} = {v}")
    return "\n".join(lines) + "\n"

