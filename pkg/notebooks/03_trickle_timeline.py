"""
A single Trickle timer on the event queue
=========================================

Trickle doubles its interval while everything is consistent and drops back
to I_min when it hears something new. Here one node is driven by hand so
the timeline is easy to follow. Times are integer microseconds.
"""
from tricklesim.engine import EventQueue, RngStream, ms
from tricklesim.trickle import TrickleParams, Trickle

queue = EventQueue()
params = TrickleParams.from_doublings(ms(250), 3)


def transmit(version):
    print(f"  t={queue.now / 1000:8.1f} ms  broadcast version {version}")


def interval(tr, now):
    print(f"  t={now / 1000:8.1f} ms  new interval I={tr.state.i / 1000:.0f} ms, timer at {tr.state.t / 1000:.1f} ms")


node = Trickle(params, queue, RngStream(3), transmit, version=0, i=params.i_min, on_interval=interval)
node.start_interval(0)
queue.run_until(ms(2000))

# A newer version arrives while the interval is large: reset to I_min.
print("-- version 1 heard")
node.receive(1, queue.now)
queue.run_until(ms(3000))

# Hearing a consistent message suppresses the next broadcast.
print("-- consistent message heard")
node.receive(1, queue.now)
queue.run_until(ms(4000))
print(f"transmissions={node.transmissions}, suppressions={node.suppressions}")
