import pytest

from tricklesim.engine import EventQueue, RngStream
from tricklesim.mac import CsmaMac, Frame, MacParams, MacStats, Variant, backoff_delay

W = 125_000


class FakeMedium:
    """Channel that is busy whenever ``busy(now)`` says so; records broadcasts."""

    def __init__(self, busy=lambda now: False, air=W):
        self.busy = busy
        self.air = air
        self.sent = []
        self.cca_calls = []

    def airtime(self, frame=None):
        return self.air

    def cca(self, node, now):
        self.cca_calls.append(now)
        return self.busy(now)

    def begin_broadcast(self, node, frame, now):
        self.sent.append((now, frame.version))


def make(variant=Variant.CONTIKI, busy=lambda now: False, **kw):
    q = EventQueue()
    med = FakeMedium(busy)
    got = []
    mac = CsmaMac(1, MacParams(bp=W, variant=variant, **kw), q, med, RngStream(0), got.append)
    return mac, q, med, got


def frame(version=1, kind="trickle-broadcast"):
    return Frame(origin=1, version=version, enqueued_at=0, kind=kind)


def test_params_accept_variant_names():
    assert MacParams(variant="contiki-broadcast+cleansing").variant is Variant.CLEANSING
    with pytest.raises(ValueError):
        MacParams(be_min=4, be_max=3)
    with pytest.raises(ValueError):
        MacParams(variant="aloha")


def test_idle_channel_sends_immediately():
    mac, q, med, _ = make()
    mac.enqueue(frame())
    q.run_until()
    assert med.sent == [(0, 1)]
    assert mac.stats.tx == 1 and mac.stats.rtx == 0
    assert mac.stats.queue_time_total == 0


def test_busy_cca_retries_exactly_w_later():
    mac, q, med, _ = make(busy=lambda now: now < W)
    mac.enqueue(frame())
    q.run_until()
    assert med.cca_calls == [0, W]
    assert med.sent == [(W, 1)]
    assert mac.stats.rtx == 1
    assert mac.stats.queue_time_total == W


def test_contiki_broadcast_caps_be_at_one():
    mac, q, med, _ = make(busy=lambda now: now < 3 * W, be_max=5, nb_max=5)
    f = frame()
    mac.enqueue(f)
    q.run_until()
    assert f.be == 1
    assert med.cca_calls == [0, W, 2 * W, 3 * W]


def test_drop_after_nb_max_plus_one_busy_attempts():
    mac, q, med, _ = make(busy=lambda now: True, nb_max=3)
    mac.enqueue(frame())
    q.run_until()
    assert len(med.cca_calls) == 4
    assert med.sent == []
    assert mac.stats.csma_drops == 1
    assert mac.backlog == 0


def test_standard_variant_backoff_is_slot_multiple():
    rng = RngStream(5)
    p = MacParams(bp=W, variant=Variant.STANDARD, be_max=3)
    f = frame()
    seen = set()
    for be in range(4):
        f.be = be
        for _ in range(200):
            d = backoff_delay(p, f, rng)
            assert d % W == 0 and 0 <= d // W <= 2**be - 1
            seen.add(d // W)
    assert seen == set(range(8))


def test_standard_variant_has_initial_backoff_range():
    mac, q, med, _ = make(variant=Variant.STANDARD, be_min=2)
    mac.enqueue(frame())
    q.run_until()
    t0 = med.sent[0][0]
    assert t0 % W == 0 and t0 <= 3 * W


def test_queue_overflow_drops_the_ninth_frame():
    mac, q, med, _ = make()
    results = [mac.enqueue(frame(v)) for v in range(9)]
    assert results == [True] * 8 + [False]
    assert mac.stats.overflow_drops == 1
    q.run_until()
    assert [v for _, v in med.sent] == list(range(8))


def test_frames_leave_in_fifo_order_back_to_back():
    mac, q, med, _ = make()
    for v in range(3):
        mac.enqueue(frame(v))
    q.run_until()
    assert med.sent == [(0, 0), (W, 1), (2 * W, 2)]


def test_cleansing_purges_queued_trickle_frames():
    mac, q, med, got = make(variant=Variant.CLEANSING, busy=lambda now: now < 2 * W)
    mac.enqueue(frame(1))
    mac.enqueue(frame(2))
    q.run_until(W // 2)
    incoming = Frame(origin=9, version=1, enqueued_at=0)
    mac.on_incoming(incoming)
    assert got == [incoming]
    assert mac.backlog == 0
    assert mac.stats.cleansing_drops == 2
    q.run_until()
    assert med.sent == []
    assert mac.stats.enqueued == mac.stats.tx + mac.stats.cleansing_drops


def test_cleansing_keeps_the_frame_on_air():
    mac, q, med, _ = make(variant=Variant.CLEANSING)
    mac.enqueue(frame(1))
    mac.enqueue(frame(2))
    q.run_until(0)
    assert mac.on_air is not None
    mac.on_incoming(Frame(origin=9, version=1, enqueued_at=0))
    assert mac.on_air.version == 1
    assert mac.stats.cleansing_drops == 1
    q.run_until()
    assert med.sent == [(0, 1)]


def test_cleansing_ignores_non_trickle_frames():
    mac, q, med, _ = make(variant=Variant.CLEANSING, busy=lambda now: now < W)
    mac.enqueue(frame(1, kind="data"))
    mac.enqueue(frame(2))
    mac.on_incoming(Frame(origin=9, version=1, enqueued_at=0))
    assert mac.backlog == 1
    q.run_until()
    assert [v for _, v in med.sent] == [1]


@pytest.mark.parametrize("variant", [Variant.CONTIKI, Variant.STANDARD])
def test_no_purge_without_cleansing(variant):
    mac, q, med, _ = make(variant=variant)
    mac.enqueue(frame(1))
    mac.enqueue(frame(2))
    mac.on_incoming(Frame(origin=9, version=1, enqueued_at=0))
    assert mac.stats.cleansing_drops == 0
    q.run_until()
    assert len(med.sent) == 2


def test_stats_merge():
    a = MacStats(tx=2, rtx=1)
    b = MacStats(tx=3, csma_drops=4)
    a.merge(b)
    assert (a.tx, a.rtx, a.csma_drops) == (5, 1, 4)
