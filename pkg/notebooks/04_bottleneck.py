"""
The bottleneck: one bridge node and a CSMA back-off
===================================================

Nodes 1 and 2 receive an update together. Node 3 is the only path to
node 4. If node 2 backs off, its late copy lands in node 3's fresh
interval, counts as consistent and silences node 3. Node 4 then waits a
long time. Cleansing drops such queued copies as soon as another Trickle
frame arrives.
"""
import numpy as np

from tricklesim import analysis
from tricklesim.config import ScenarioConfig
from tricklesim.scenarios import run_many, worst_decile_mean

REPS = 300

print(f"{'m':>3} {'P(bo)':>7} {'late, plain':>12} {'late, cleansing':>16} {'worst 10% delay (s)':>20}")
for m in (2, 4, 8, 14):
    row = []
    for variant in ("contiki-broadcast", "contiki-broadcast+cleansing"):
        cfg = ScenarioConfig(topology="bottleneck4", i_min_ms=125 * m, doublings=4, variant=variant)
        runs = run_many(cfg, reps=REPS, seed=1)
        late = np.mean([r.updated_interval[4] > 2 for r in runs])
        row.append((late, worst_decile_mean([r.update_delay for r in runs]) / 1e6))
    print(f"{m:>3} {analysis.p_bo_2(m):7.3f} {row[0][0]:12.3f} {row[1][0]:16.3f} "
          f"{row[0][1]:9.1f} / {row[1][1]:.1f}")

# Expected delay once node 3 is stuck: three quarters of I_min plus half of I_max.
cfg = ScenarioConfig(topology="bottleneck4", i_min_ms=1000, doublings=4)
print(f"\nanalytical stuck delay at m=8: {(0.75 * cfg.i_min + 0.5 * cfg.i_max) / 1e6:.2f} s")
