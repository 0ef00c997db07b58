"""Small-time limit laws and their reference objects.

The size of the largest fragment, while it stays above half the total, is
exp(-xi) for a killed subordinator xi. The second-largest fragment is
squeezed between the running record of detached piece sizes and that record
damped by the accumulated lead factors. Rescaled by the generalized inverse
of the tail, small-time fragment sizes follow heavy-tail extreme laws.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNormalizer


@dataclass(frozen=True)
class SubordinatorSpec:
    """Killed compound-Poisson subordinator with drift.

    Jumps arrive at jump_rate; sizes come from jump_atoms ((size, rate)
    pairs) when the law is finitely supported, otherwise from jump_sampler.
    The path is sent to a graveyard at killing_rate.
    """

    drift: float
    killing_rate: float
    jump_rate: float
    jump_atoms: tuple = None
    jump_sampler: object = None
    provenance: str = ""


@dataclass(frozen=True)
class SubordinatorPath:
    """One realized event set; evaluation at any time is then deterministic."""

    drift: float
    jump_times: tuple
    jump_sizes: tuple
    kill_time: float

    def value_at(self, t):
        cut = min(t, self.kill_time)
        total = self.drift * cut
        for when, size in zip(self.jump_times, self.jump_sizes):
            if when <= cut:
                total += size
        return total

    def alive_at(self, t):
        return self.kill_time > t


def sample_subordinator_path(spec, horizon, rng):
    """Draw the event set on [0, horizon]: killing time, jump times, sizes."""
    if spec.killing_rate > 0.0:
        kill = rng.exponential(1.0 / spec.killing_rate)
    else:
        kill = math.inf
    count = rng.poisson(spec.jump_rate * horizon) if spec.jump_rate > 0.0 else 0
    times = np.sort(rng.random(count)) * horizon
    if count == 0:
        sizes = ()
    elif spec.jump_atoms is not None:
        values = np.array([a[0] for a in spec.jump_atoms])
        weights = np.array([a[1] for a in spec.jump_atoms])
        picks = rng.choice(len(values), size=count, p=weights / weights.sum())
        sizes = tuple(float(values[i]) for i in picks)
    else:
        sizes = tuple(spec.jump_sampler(rng) for _ in range(count))
    return SubordinatorPath(spec.drift, tuple(float(t) for t in times), sizes, kill)


def run_subordinator(spec, t, rng):
    """Value at time t and whether the path is still alive.

    A killed path reports its value at the killing time.
    """
    path = sample_subordinator_path(spec, t, rng)
    return path.value_at(t), path.alive_at(t)


def record_cdf(law, t, x):
    """P(running record of second pieces up to t is <= x).

    The record stays <= x exactly when no dislocation with second piece in
    (x, inf) arrives by t, so this is exp(-t * strict tail). Exact for the
    eps-truncated stream whenever x >= eps.
    """
    x = np.asarray(x, dtype=float)
    out = np.exp(-t * np.asarray(law.tail_nu2_strict(x), dtype=float))
    out = np.where(x < 0.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def extreme_cdf(x, a):
    """Heavy-tail extreme law exp(-x^(-a)) on x > 0."""
    x = np.asarray(x, dtype=float)
    safe = np.maximum(x, 1e-300)
    out = np.where(x > 0.0, np.exp(-safe ** (-a)), 0.0)
    return float(out) if out.ndim == 0 else out


def frechet_k_cdf(k, a, x):
    """Law of the k-th largest point of the limiting extremal point process.

    P(at most k-1 points above x) = sum over i < k of exp(-m) m^i / i! with
    m = x^(-a).
    """
    x = np.asarray(x, dtype=float)
    safe = np.maximum(x, 1e-300)
    m = safe ** (-a)
    total = np.zeros_like(m)
    term = np.exp(-m)
    for i in range(k):
        total = total + term
        term = term * m / (i + 1)
    out = np.where(x > 0.0, total, 0.0)
    return float(out) if out.ndim == 0 else out


def normalize_lambda2(law, t, value):
    """Rescale a fragment size by the tail's generalized inverse at 1/t."""
    denom = law.gen_inverse_f(1.0 / t)
    if denom <= 0.0:
        raise DegenerateNormalizer(
            f"gen_inverse_f(1/{t}) = 0; no nondegenerate rescaling exists")
    return value / denom
