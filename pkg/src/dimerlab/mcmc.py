"""Metropolis-Hastings sampler for the interacting model on K_n.

Moves insert a dimer on a uniformly chosen unordered pair of monomers or
delete a uniformly chosen dimer; the Hastings factor accounts for the
asymmetric proposal counts.  The energy difference of a move depends only
on the monomer count, so each step costs O(1).
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "MarkovState",
    "ChainConfig",
    "DensityEstimate",
    "log_ratio_insert",
    "log_ratio_delete",
    "step",
    "run_chain",
    "state_histogram",
]


@dataclass
class MarkovState:
    """A matching of K_n tracked with O(1) updates.

    ``partner[v]`` is the dimer partner of v or -1; ``monomers`` and
    ``dimers`` are unordered pools supporting swap-remove.
    """

    n: int
    partner: list[int]
    monomers: list[int]
    dimers: list[tuple[int, int]]

    @classmethod
    def all_monomers(cls, n: int) -> "MarkovState":
        if n < 1:
            raise DomainError(f"need at least one site, got {n}")
        return cls(n, [-1] * n, list(range(n)), [])

    @classmethod
    def max_dimers(cls, n: int) -> "MarkovState":
        """Greedy pairing (0,1), (2,3), ...; one monomer left when n is odd."""
        state = cls.all_monomers(n)
        for u in range(0, n - 1, 2):
            state.partner[u] = u + 1
            state.partner[u + 1] = u
            state.dimers.append((u, u + 1))
        state.monomers = [n - 1] if n % 2 else []
        return state

    @property
    def monomer_count(self) -> int:
        return len(self.monomers)

    @property
    def dimer_count(self) -> int:
        return len(self.dimers)

    @property
    def monomer_density(self) -> float:
        return len(self.monomers) / self.n

    def check(self) -> None:
        """Assert internal consistency (used by tests)."""
        assert len(self.monomers) + 2 * len(self.dimers) == self.n
        assert sorted(self.monomers) == [
            v for v in range(self.n) if self.partner[v] == -1]
        for u, v in self.dimers:
            assert self.partner[u] == v and self.partner[v] == u


def _delta_minus_h(n: int, h: float, j: float,
                   m_old: int, m_new: int) -> float:
    """Change in -H when the monomer count moves from m_old to m_new.

    Uses -H = a M^2/n + b M + const with a = J and
    b = log(n)/2 + h - J (the (n-1)/n and 1/n pieces combine to J/n * n).
    """
    a = j
    b = 0.5 * math.log(n) + h - (n - 1) * j / n - j / n
    return a * (m_new * m_new - m_old * m_old) / n + b * (m_new - m_old)


def log_ratio_insert(n: int, h: float, j: float,
                     monomer_count: int, dimer_count: int) -> float:
    """Log Hastings ratio for inserting a dimer on two monomers."""
    m = monomer_count
    return (_delta_minus_h(n, h, j, m, m - 2)
            + math.log(m * (m - 1) / 2.0)
            - math.log(dimer_count + 1.0))


def log_ratio_delete(n: int, h: float, j: float,
                     monomer_count: int, dimer_count: int) -> float:
    """Log Hastings ratio for deleting a dimer."""
    m = monomer_count
    return (_delta_minus_h(n, h, j, m, m + 2)
            + math.log(float(dimer_count))
            - math.log((m + 2) * (m + 1) / 2.0))


def step(state: MarkovState, h: float, j: float,
         rng: random.Random) -> bool:
    """One Metropolis-Hastings proposal; returns True when accepted.

    Proposals that are structurally impossible (insertion with fewer than
    two monomers, deletion with no dimers) count as rejections.
    """
    n = state.n
    if rng.random() < 0.5:
        m = len(state.monomers)
        if m < 2:
            return False
        log_r = log_ratio_insert(n, h, j, m, len(state.dimers))
        if log_r < 0.0 and rng.random() >= math.exp(log_r):
            return False
        i = rng.randrange(m)
        k = rng.randrange(m - 1)
        if k >= i:
            k += 1
        if i < k:
            i, k = k, i
        # Swap-remove the larger index first so the smaller stays valid.
        u = state.monomers[i]
        state.monomers[i] = state.monomers[-1]
        state.monomers.pop()
        v = state.monomers[k]
        state.monomers[k] = state.monomers[-1]
        state.monomers.pop()
        state.partner[u] = v
        state.partner[v] = u
        state.dimers.append((u, v) if u < v else (v, u))
        return True
    d = len(state.dimers)
    if d == 0:
        return False
    log_r = log_ratio_delete(n, h, j, len(state.monomers), d)
    if log_r < 0.0 and rng.random() >= math.exp(log_r):
        return False
    k = rng.randrange(d)
    u, v = state.dimers[k]
    state.dimers[k] = state.dimers[-1]
    state.dimers.pop()
    state.partner[u] = -1
    state.partner[v] = -1
    state.monomers.append(u)
    state.monomers.append(v)
    return True


@dataclass(frozen=True)
class ChainConfig:
    n: int
    h: float
    j: float
    proposals: int
    burn_in: int
    seed: int = 0
    thin: int = 1
    start: str = "monomers"  # or "dimers"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"need at least one site, got {self.n}")
        if self.j < 0.0:
            raise DomainError(f"coupling must be nonnegative, got {self.j!r}")
        if not (0 <= self.burn_in < self.proposals):
            raise DomainError("need 0 <= burn_in < proposals")
        if self.thin < 1:
            raise DomainError(f"thinning stride must be >= 1, got {self.thin}")
        if self.start not in ("monomers", "dimers"):
            raise DomainError(f"unknown start {self.start!r}")


@dataclass(frozen=True)
class DensityEstimate:
    config: ChainConfig
    mean: float
    std_error: float
    n_samples: int
    n_batches: int
    acceptance_rate: float

    def to_json_dict(self) -> dict:
        c = self.config
        return {
            "n": c.n, "h": c.h, "j": c.j, "proposals": c.proposals,
            "burn_in": c.burn_in, "thin": c.thin, "seed": c.seed,
            "start": c.start, "mean_monomer_density": self.mean,
            "std_error": self.std_error, "n_samples": self.n_samples,
            "n_batches": self.n_batches,
            "acceptance_rate": self.acceptance_rate,
        }


def _make_state(config: ChainConfig) -> MarkovState:
    if config.start == "dimers":
        return MarkovState.max_dimers(config.n)
    return MarkovState.all_monomers(config.n)


def run_chain(config: ChainConfig, n_batches: int = 20) -> DensityEstimate:
    """Estimate the mean monomer density with a batch-means error bar."""
    state = _make_state(config)
    rng = random.Random(config.seed)
    accepted = 0
    samples: list[float] = []
    for t in range(config.proposals):
        if step(state, config.h, config.j, rng):
            accepted += 1
        if t >= config.burn_in and (t - config.burn_in) % config.thin == 0:
            samples.append(state.monomer_density)
    arr = np.asarray(samples)
    usable = len(arr) - len(arr) % n_batches
    batches = arr[:usable].reshape(n_batches, -1).mean(axis=1)
    se = float(np.sqrt(np.var(batches, ddof=1) / n_batches))
    return DensityEstimate(config, float(arr.mean()), se, len(arr),
                           n_batches, accepted / config.proposals)


def state_histogram(config: ChainConfig) -> Counter:
    """Visit counts of full matchings (keyed by the sorted dimer tuple).

    Intended for small systems where the histogram can be compared with
    exact Boltzmann weights.
    """
    state = _make_state(config)
    rng = random.Random(config.seed)
    counts: Counter = Counter()
    for t in range(config.proposals):
        step(state, config.h, config.j, rng)
        if t >= config.burn_in and (t - config.burn_in) % config.thin == 0:
            counts[tuple(sorted(state.dimers))] += 1
    return counts
