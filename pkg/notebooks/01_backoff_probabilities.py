"""
Back-off probabilities in a synchronized broadcast domain
=========================================================

When ``n`` Trickle nodes reset together and broadcast over a duty-cycled
radio, the first broadcast occupies the channel for a whole wake-up
interval ``w``. Anyone whose timer fires during that window sees a busy
channel and backs off. The ratio ``m = I_min / w`` controls how often.
"""
import numpy as np

from tricklesim import analysis

# Two nodes first. The probability falls roughly like 2/m.
for m in (2, 4, 8, 10, 16):
    print(f"m={m:2d}  P(back-off, 2 nodes) = {analysis.p_bo_2(m):.6f}")

# With more nodes a back-off becomes close to certain for small m.
ms = np.arange(2, 15, 2)
print("\n   m " + "".join(f"{m:>8d}" for m in ms))
for n in (2, 3, 5, 10):
    print(f"n={n:2d} " + "".join(f"{analysis.p_bo_n(n, m):8.3f}" for m in ms))

# The full distribution of the number of nodes that back off, and its mean,
# which is also the expected number of redundant broadcasts per interval.
res = analysis.analyze(5, 10)
print("\nn=5, m=10")
for b, p in enumerate(res.p_n_b):
    print(f"  P(b={b}) = {p:.5f}")
print(f"  sum = {res.p_n_b.sum():.12f}")
print(f"  E[redundant] = {res.expected_redundant:.5f}")
