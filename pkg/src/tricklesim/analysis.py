"""Back-off probabilities for synchronized single-hop Trickle over ContikiMAC.

Model: ``n`` nodes start an ``I_min = m * w`` interval together (k=1,
eta=1/2). The first node to fire broadcasts for ``w``; every other node
hears it at a uniform instant in that window. A node whose own timer falls
between the first broadcast and its reception backs off and later sends an
obsolete copy.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np


def _check(n=None, m=None):
    if n is not None and (int(n) != n or n < 2):
        raise ValueError(f"n must be an integer >= 2, got {n}")
    if m is not None and m < 2:
        raise ValueError(f"m = I_min / w must be >= 2, got {m}")


def p_bo_2(m):
    """Probability of a CSMA back-off between two synchronized nodes."""
    _check(m=m)
    return 2 / m - 4 / (3 * m * m)


def incomplete_beta_half(b, q):
    """Exact ``int_0^{1/2} (1-z)^b z^q dz`` via binomial expansion of ``(1-z)^b``."""
    if b < 0 or q < 0:
        raise ValueError("b and q must be non-negative")
    total = Fraction(0)
    for j in range(b + 1):
        p = q + j + 1
        total += (-1) ** j * comb(b, j) * Fraction(1, 2**p * p)
    return float(total)


def p_n_b(n, b, m):
    """Probability that exactly ``b`` of the ``n`` nodes back off in one interval."""
    _check(n, m)
    if not 0 <= b <= n - 1:
        raise ValueError(f"b must lie in [0, {n - 1}], got {b}")
    early = comb(n, b) * ((m - 1) ** (n - b) - 1) / m**n
    late = n * comb(n - 1, b) * (4 / m) ** n * incomplete_beta_half(b, 2 * n - b - 2)
    return early + late


def p_n_b_all(n, m):
    return np.array([p_n_b(n, b, m) for b in range(n)])


def p_bo_n(n, m):
    """Probability that at least one back-off occurs among ``n`` nodes."""
    _check(n, m)
    return 1 - ((m - 1) ** n + 1 / (2 * n - 1)) / m**n


def expected_redundant(n, m):
    """Expected number of obsolete (backed-off) broadcasts per interval."""
    _check(n, m)
    return n / m - (2 / m) ** n / (n + 1)


@dataclass
class AnalysisResult:
    n: int
    m: float
    p_bo_2: float
    p_n_b: np.ndarray
    p_bo_n: float
    expected_redundant: float


def analyze(n, m):
    return AnalysisResult(
        n=n,
        m=m,
        p_bo_2=p_bo_2(m),
        p_n_b=p_n_b_all(n, m),
        p_bo_n=p_bo_n(n, m),
        expected_redundant=expected_redundant(n, m),
    )


@dataclass
class McResult:
    n: int
    m: float
    reps: int
    counts: np.ndarray  # counts[b] = replications with exactly b back-offs

    @property
    def freq(self):
        return self.counts / self.reps

    @property
    def p_backoff(self):
        return 1 - self.counts[0] / self.reps

    @property
    def p_backoff_se(self):
        p = self.p_backoff
        return float(np.sqrt(p * (1 - p) / self.reps))

    @property
    def mean_b(self):
        return float(np.dot(np.arange(self.n), self.counts) / self.reps)

    @property
    def mean_b_se(self):
        b = np.arange(self.n)
        var = np.dot(b * b, self.counts) / self.reps - self.mean_b**2
        return float(np.sqrt(max(var, 0.0) / self.reps))


def mc_single_hop(n, m, reps, rng, batch=200_000):
    """Monte Carlo over the abstract model, times in units of ``w``.

    ``rng`` is a numpy Generator (or anything with ``.generator``).
    """
    _check(n)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    gen = getattr(rng, "generator", rng)
    counts = np.zeros(n, dtype=np.int64)
    done = 0
    while done < reps:
        size = min(batch, reps - done)
        t = gen.uniform(m / 2, m, size=(size, n))
        first = t.argmin(axis=1)
        t_first = t[np.arange(size), first][:, None]
        t_rx = t_first + gen.uniform(0.0, 1.0, size=(size, n))
        hit = (t >= t_first) & (t <= t_rx)
        hit[np.arange(size), first] = False
        counts += np.bincount(hit.sum(axis=1), minlength=n)[:n]
        done += size
    return McResult(n=n, m=m, reps=reps, counts=counts)
