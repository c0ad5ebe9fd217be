"""
Cleansing on a grid
===================

A 5x5 grid with 10 m spacing and a 12 m range, so every node hears its
four direct neighbours. The update starts in the top-left corner. We
compare transmissions, MAC retransmissions, queueing time and delay with
and without Cleansing for a few I_min values.
"""
from tricklesim.config import ScenarioConfig
from tricklesim.scenarios import aggregate, make_grid, run_many

print(f"{'I_min':>6} {'variant':>28} {'tx':>7} {'rtx':>6} {'queue ms':>9} {'delay s':>8}")
for i_min_ms in (250, 500, 1000):
    for variant in ("contiki-broadcast", "contiki-broadcast+cleansing"):
        cfg = ScenarioConfig(topology="grid", rows=5, cols=5, R=1, i_min_ms=i_min_ms,
                             doublings=4, variant=variant)
        agg = aggregate(run_many(cfg, reps=40, seed=3))
        print(f"{i_min_ms:>6} {variant:>28} {agg['tx_count']['mean']:7.1f} {agg['rtx_count']['mean']:6.1f} "
              f"{agg['mean_queue_time']['mean'] / 1000:9.2f} {agg['update_delay']['mean'] / 1e6:8.2f}")

# The neighbourhood is plain geometry: 2 + 10 R metres of range.
grid = make_grid(5, 5, spacing=10.0, R=1)
print("\nnode 12 hears", sorted(grid.hears()[12]))
