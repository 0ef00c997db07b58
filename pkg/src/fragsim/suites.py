"""Verification suites binding simulated paths to analytic oracles.

Each suite runs replicas of a pinned scenario, computes one or more
check statistics, and returns a SuiteReport. Reports are byte-stable:
rendering excludes wall-clock measurements, so identical seed and config
give identical text no matter how many worker threads ran the replicas.

Replicas draw their streams from (seed, replica_index); aggregation is a
fold in replica-index order, which makes results independent of worker
scheduling. Suites testing a shrinking-horizon limit run a second leg at
a 10x larger horizon and assert the fit degrades, so convergence is
evidenced directionally rather than assumed.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    extreme_cdf,
    frechet_k_cdf,
    normalize_lambda2,
    record_cdf,
    run_subordinator,
)
from .errors import ConfigError, UnknownSuite
from .measures import BinaryPowerLaw, FiniteAtomic, sub_levy_transform
from .partitions import frequencies, paintbox, partition_step, trivial
from .ranked_state import dislocate, MassState, prefix_mass
from .rng import replica_rng
from .simulator import SimConfig, chi_value, make_step_kernel, record_value, run
from .stats import ks_two_sample, ks_stat, poisson_pmf_test, pooled_chi_square

PASS_EXIT = 0
FAIL_EXIT = 1
CONFIG_EXIT = 2

_SLACK = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    statistic: float
    threshold: float
    relation: str  # how statistic must compare to threshold to pass
    passed: bool
    sample_size: int
    wall_time: float


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    claim: str
    config: tuple  # sorted (key, rendered value) pairs
    seed: int
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_text(self):
        """Canonical report text. Wall times are deliberately excluded."""
        lines = [f"suite: {self.suite}",
                 f"claim: {self.claim}",
                 f"seed: {self.seed}",
                 "config: " + " ".join(f"{k}={v}" for k, v in self.config)]
        for c in self.checks:
            lines.append(
                f"check: {c.name} statistic={c.statistic:.10g} "
                f"{c.relation} threshold={c.threshold:.10g} "
                f"n={c.sample_size} {'pass' if c.passed else 'FAIL'}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def resolve_threads(threads=None):
    """Worker count: explicit argument, else FRAGSIM_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("FRAGSIM_THREADS", "").strip()
        threads = int(env) if env else 1
    threads = int(threads)
    if threads < 1:
        raise ConfigError(f"thread count {threads} must be >= 1")
    return threads


def run_replicas(worker, n, seed, threads=None):
    """Evaluate worker(index, rng) for n replicas; results in index order.

    Thread count affects scheduling only: every replica owns the stream
    derived from (seed, index), and the returned list is index-ordered.
    """
    threads = resolve_threads(threads)
    results = [None] * n
    if threads == 1:
        for i in range(n):
            results[i] = worker(i, replica_rng(seed, i))
        return results
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(worker, i, replica_rng(seed, i)): i
                   for i in range(n)}
        for fut in as_completed(futures):
            results[futures[fut]] = fut.result()
    return results


class _Stopwatch:
    def __init__(self):
        self._last = time.perf_counter()

    def lap(self):
        now = time.perf_counter()
        dt = now - self._last
        self._last = now
        return dt


def _check(name, statistic, threshold, relation, n, wall):
    statistic = float(statistic)
    if relation == "<":
        ok = statistic < threshold
    elif relation == "<=":
        ok = statistic <= threshold
    elif relation == ">":
        ok = statistic > threshold
    elif relation == ">=":
        ok = statistic >= threshold
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return CheckResult(name, statistic, float(threshold), relation, ok, n, wall)


def _echo(params, **extra):
    merged = {**params, **extra}
    return tuple(sorted((k, repr(v)) for k, v in merged.items()))


def _part(state, k):
    return state.parts[k - 1] if len(state.parts) >= k else 0.0


def _delta_default():
    return FiniteAtomic([(1.0, (0.6, 0.4))])


# ---------------------------------------------------------------- suites


def _suite_erosion(params, threads):
    law, c = params["law"], params["c"]
    t, n_rep, seed = params["t"], params["replicas"], params["seed"]
    watch = _Stopwatch()
    grid = tuple((i + 1) * t / 10.0 for i in range(10))

    # Pure erosion: a single fragment must follow the exponential exactly.
    traj = run(SimConfig(FiniteAtomic([]), t, c=c, obs_times=grid, seed=seed))
    err = max(abs(_part(s, 1) - math.exp(-c * u))
              for s, u in zip(traj.snapshots, grid))
    stray = sum(len(s.parts) != 1 for s in traj.snapshots)
    checks = [_check("pure_erosion_error", err, 1e-12, "<", 10, watch.lap()),
              _check("stray_fragments", stray, 0, "<=", 10, watch.lap())]

    # With dislocations: the eroded path must equal the unEroded path of
    # the same seed rescaled by exp(-c t), part by part.
    def worker(i, _rng):
        cfg = dict(law=law, t_end=t, obs_times=grid)
        eroded = run(SimConfig(c=c, **cfg), replica_rng(seed, i))
        plain = run(SimConfig(c=0.0, **cfg), replica_rng(seed, i))
        worst = 0.0
        for se, sp, u in zip(eroded.snapshots, plain.snapshots, grid):
            if len(se.parts) != len(sp.parts):
                return math.inf
            factor = math.exp(-c * u)
            for a, b in zip(se.parts, sp.parts):
                worst = max(worst, abs(a - b * factor))
        return worst

    devs = run_replicas(worker, n_rep, seed, threads)
    checks.append(_check("factorization_error", max(devs), 1e-12, "<",
                         n_rep, watch.lap()))
    return SuiteReport(
        "erosion",
        "pure erosion shrinks the single fragment exactly exponentially, "
        "and a positive erosion rate factors out of any dislocation path",
        _echo(params), seed, tuple(checks))


def _suite_conservation(params, threads):
    law, t = params["law"], params["t"]
    n_rep, seed = params["replicas"], params["seed"]
    watch = _Stopwatch()

    def worker(_i, rng):
        traj = run(SimConfig(law, t), rng)
        state = MassState((1.0,), 0.0, 1.0)
        worst = 0.0
        violations = 0
        for ev in traj.events:
            before = [prefix_mass(state, k) for k in range(1, 11)]
            state = dislocate(state, ev.target_rank, ev.fragments)
            worst = max(worst, abs(sum(state.parts) + state.dust - 1.0))
            for k in range(1, 11):
                if prefix_mass(state, k) > before[k - 1] + _SLACK:
                    violations += 1
        return worst, violations

    results = run_replicas(worker, n_rep, seed, threads)
    wall = watch.lap()
    checks = (
        _check("mass_balance_error", max(r[0] for r in results), 1e-9, "<",
               n_rep, wall),
        _check("prefix_increase_count", sum(r[1] for r in results), 0, "<=",
               n_rep, watch.lap()),
    )
    return SuiteReport(
        "conservation",
        "total mass is conserved at every jump and the mass of the k "
        "largest fragments never increases",
        _echo(params), seed, checks)


def _suite_poisson_counts(params, threads):
    law, t, eps = params["law"], params["t"], params["eps"]
    n_rep, seed = params["replicas"], params["seed"]
    watch = _Stopwatch()
    rate = law.truncated_mass(eps) * t

    def worker(_i, rng):
        traj = run(SimConfig(law, t, eps=eps), rng)
        return sum(ev.target_rank == 1 for ev in traj.events)

    counts = np.array(run_replicas(worker, n_rep, seed, threads))
    wall = watch.lap()
    p = poisson_pmf_test(np.bincount(counts), rate)
    checks = [_check("count_chi_square_p", p, 0.01, ">", n_rep, wall)]

    # Same content read through the pmf: frequency of n events vs the
    # Poisson mass, worst z-score over n = 0..3.
    worst_z = 0.0
    for m in range(4):
        pm = math.exp(-rate) * rate ** m / math.factorial(m)
        freq = float(np.mean(counts == m))
        se = math.sqrt(pm * (1.0 - pm) / n_rep)
        worst_z = max(worst_z, abs(freq - pm) / se)
    checks.append(_check("pmf_worst_z", worst_z, 3.0, "<", n_rep, watch.lap()))
    return SuiteReport(
        "poisson-counts",
        "rank-1 dislocations on a window form a Poisson count with the "
        "truncated-law rate",
        _echo(params, rate=rate), seed, tuple(checks))


def _suite_records(params, threads):
    law, t, eps = params["law"], params["t"], params["eps"]
    n_rep, seed = params["replicas"], params["seed"]
    watch = _Stopwatch()

    def worker(_i, rng):
        traj = run(SimConfig(law, t, eps=eps), rng)
        return record_value(traj, t)

    values = run_replicas(worker, n_rep, seed, threads)
    stat = ks_stat(values, lambda x: record_cdf(law, t, x), x_min=eps)
    checks = (_check("record_ks", stat, 0.02, "<", n_rep, watch.lap()),)
    return SuiteReport(
        "records",
        "the running max of the rank-1 second piece follows the "
        "void-probability law above the truncation level",
        _echo(params), seed, checks)


def _suite_sandwich(params, threads):
    law, t, eps = params["law"], params["t"], params["eps"]
    n_rep, seed = params["replicas"], params["seed"]
    watch = _Stopwatch()

    def worker(_i, rng):
        traj = run(SimConfig(law, t, eps=eps, obs_times=(t,)), rng)
        snap = traj.snapshots[0]
        return (_part(snap, 1), _part(snap, 2),
                record_value(traj, t), chi_value(traj, t))

    rows = run_replicas(worker, n_rep, seed, threads)
    wall = watch.lap()
    conditioned = [r for r in rows if r[0] >= 0.5]
    violations = sum(1 for _l1, l2, rec, chi in conditioned
                     if chi * rec > l2 + _SLACK or l2 > rec + _SLACK)
    checks = (
        _check("conditioning_fraction", len(conditioned) / n_rep, 0.99, ">",
               n_rep, wall),
        _check("sandwich_violations", violations, 0, "<=",
               len(conditioned), watch.lap()),
    )
    return SuiteReport(
        "sandwich",
        "on paths keeping the main fragment above one half, chi times the "
        "record bounds the second fragment below and the record bounds it "
        "above",
        _echo(params), seed, checks)


def _suite_subordinator(params, threads):
    law, t = params["law"], params["t"]
    n_rep, seed, m_max = params["replicas"], params["seed"], params["m_max"]
    watch = _Stopwatch()
    if len(law.atoms) != 1:
        raise ConfigError("the subordinator suite needs a single-atom law "
                          "so jump counts can be read off the path value")
    weight, atom = law.atoms[0]
    jump = -math.log(atom[0])
    spec = sub_levy_transform(law, 0.0, 0.0)

    def worker(_i, rng):
        return run_subordinator(spec, t, rng)

    rows = run_replicas(worker, n_rep, seed, threads)
    wall = watch.lap()
    observed = np.zeros(m_max + 2)
    alive_count = 0
    for value, alive in rows:
        alive_count += alive
        m = int(round(value / jump))
        if alive and m <= m_max and abs(value - m * jump) < 1e-9:
            observed[m] += 1
        else:
            observed[m_max + 1] += 1
    jump_rate = weight * atom[0]
    kill = spec.killing_rate
    expected = np.array(
        [n_rep * math.exp(-kill * t)
         * math.exp(-jump_rate * t) * (jump_rate * t) ** m / math.factorial(m)
         for m in range(m_max + 1)])
    expected = np.append(expected, n_rep - expected.sum())
    p = pooled_chi_square(observed, expected)
    checks = [_check("value_chi_square_p", p, 0.01, ">", n_rep, watch.lap())]

    surv = math.exp(-kill * t)
    se = math.sqrt(surv * (1.0 - surv) / n_rep)
    z = abs(alive_count / n_rep - surv) / se
    checks.append(_check("survival_z", z, 3.0, "<", n_rep, watch.lap()))
    return SuiteReport(
        "subordinator",
        "minus log of the top fragment evolves as a killed compound "
        "Poisson process whose jump law is reweighted by the first piece",
        _echo(params, jump_size=jump, jump_rate=jump_rate,
              killing_rate=kill), seed, tuple(checks))


def _eps_for_budget(law, t, budget):
    """Truncation level making the expected rank-1 event count = budget."""
    return law.gen_inverse_f(budget / t)


def _require_binary_power(name, law):
    if not isinstance(law, BinaryPowerLaw):
        raise ConfigError(f"suite {name!r} needs a binary_power law; "
                          f"its oracle depends on the tail exponent")
    return law.a


def _normalized_parts(law, t, eps, floor, ranks, n_rep, seed, threads):
    """Sample the given part ranks at time t, divided by the normalizer.

    The mass floor dusts debris far below the statistic scale; fragments
    that small can never re-enter the observed ranks, so the law of the
    observed ranks is unchanged while the fragment population stays
    linear in the event budget instead of exponential.
    """
    def worker(_i, rng):
        cfg = SimConfig(law, t, eps=eps, obs_times=(t,), mass_floor=floor)
        snap = run(cfg, rng).snapshots[0]
        return tuple(normalize_lambda2(law, t, _part(snap, k)) for k in ranks)

    return run_replicas(worker, n_rep, seed, threads)


def _suite_extreme(params, threads):
    law = params["law"]
    a = _require_binary_power("extreme", law)
    t, n_rep, seed = params["t"], params["replicas"], params["seed"]
    budget, floor = params["event_budget"], params["mass_floor"]
    watch = _Stopwatch()
    t_coarse = 10.0 * t
    eps_fine = _eps_for_budget(law, t, budget)
    eps_coarse = _eps_for_budget(law, t_coarse, budget)

    # Both legs reuse the same replica streams, which couples them and
    # stabilizes the directional comparison.
    fine = [r[0] for r in
            _normalized_parts(law, t, eps_fine, floor, (2,), n_rep, seed,
                              threads)]
    coarse = [r[0] for r in
              _normalized_parts(law, t_coarse, eps_coarse, floor, (2,),
                                n_rep, seed, threads)]
    ks_fine = ks_stat(fine, lambda x: extreme_cdf(x, a))
    ks_coarse = ks_stat(coarse, lambda x: extreme_cdf(x, a))
    wall = watch.lap()
    checks = (
        _check("extreme_ks", ks_fine, 0.05, "<", n_rep, wall),
        _check("directionality", ks_fine - ks_coarse, 0.0, "<",
               n_rep, watch.lap()),
    )
    return SuiteReport(
        "extreme",
        "the normalized second fragment approaches the extreme law "
        "exp(-x^-a) as the horizon shrinks, and the fit degrades at a "
        "10x coarser horizon",
        _echo(params, eps_fine=eps_fine, eps_coarse=eps_coarse,
              t_coarse=t_coarse, ks_coarse=round(ks_coarse, 10)),
        seed, checks)


def _suite_frechet_k(params, threads):
    law = params["law"]
    a = _require_binary_power("frechet-k", law)
    t, n_rep, seed = params["t"], params["replicas"], params["seed"]
    budget, floor = params["event_budget"], params["mass_floor"]
    watch = _Stopwatch()
    eps = _eps_for_budget(law, t, budget)

    # The k-th extreme law governs the k-th largest logged second piece,
    # which at small horizons is the (k+1)-th ranked fragment. The k-th
    # law keeps mass P(Poisson(budget) <= k-1) below the truncation cut,
    # so the budget must grow with the deepest k tested.
    rows = _normalized_parts(law, t, eps, floor, (3, 4), n_rep, seed,
                             threads)
    checks = []
    for col, k in ((0, 2), (1, 3)):
        sample = [r[col] for r in rows]
        stat = ks_stat(sample, lambda x, k=k: frechet_k_cdf(k, a, x))
        checks.append(_check(f"frechet_k{k}_ks", stat, 0.07, "<",
                             n_rep, watch.lap()))
    return SuiteReport(
        "frechet-k",
        "lower-ranked fragments, normalized the same way as the second, "
        "follow the k-record extreme laws",
        _echo(params, eps=eps), seed, tuple(checks))


def _suite_correspondence(params, threads):
    law, t, n = params["law"], params["t"], params["n"]
    n_rep, seed = params["replicas"], params["seed"]
    watch = _Stopwatch()
    kernel = make_step_kernel(law)

    # Ranked side, observed through the same finite-n paintbox channel the
    # partition side is forced through; raw top mass kept for the mean
    # cross-check, where the channel noise cancels in expectation.
    def ranked_worker(_i, rng):
        traj = run(SimConfig(law, t, obs_times=(t,)), rng)
        snap = traj.snapshots[0]
        top = frequencies(paintbox(snap, n, rng)).parts[0]
        return _part(snap, 1), top

    def partition_worker(_i, rng):
        p = partition_step(trivial(n), t, kernel, rng)
        return frequencies(p).parts[0]

    def chain_worker(_i, rng):
        p = partition_step(trivial(n), t / 2.0, kernel, rng)
        p = partition_step(p, t / 2.0, kernel, rng)
        return frequencies(p).parts[0]

    ranked = run_replicas(ranked_worker, n_rep, seed, threads)
    one_step = run_replicas(partition_worker, n_rep, seed + 1, threads)
    chain = run_replicas(chain_worker, n_rep, seed + 2, threads)
    wall = watch.lap()

    lam1 = np.array([r[0] for r in ranked])
    channel = np.array([r[1] for r in ranked])
    tops = np.array(one_step)
    checks = [_check("channel_ks", ks_two_sample(channel, tops), 0.05, "<",
                     n_rep, wall)]
    se = math.sqrt(lam1.var(ddof=1) / n_rep + tops.var(ddof=1) / n_rep)
    checks.append(_check("mean_z", abs(lam1.mean() - tops.mean()) / se,
                         3.0, "<", n_rep, watch.lap()))
    checks.append(_check("semigroup_ks", ks_two_sample(tops, np.array(chain)),
                         0.05, "<", n_rep, watch.lap()))
    return SuiteReport(
        "correspondence",
        "ranked dynamics observed through a finite paintbox agree in law "
        "with blockwise partition dynamics, and partition steps compose "
        "over split horizons",
        _echo(params), seed, tuple(checks))


def _suite_scaling(params, threads):
    law, alpha, r = params["law"], params["alpha"], params["r"]
    t, n_rep, seed = params["t"], params["replicas"], params["seed"]
    watch = _Stopwatch()

    def small_worker(_i, rng):
        cfg = SimConfig(law, t, alpha=alpha, initial_mass=r, obs_times=(t,))
        return _part(run(cfg, rng).snapshots[0], 1)

    def unit_worker(_i, rng):
        u = r ** alpha * t
        cfg = SimConfig(law, u, alpha=alpha, obs_times=(u,))
        return r * _part(run(cfg, rng).snapshots[0], 1)

    small = run_replicas(small_worker, n_rep, seed, threads)
    # Independent streams for the second sample: a two-sample test needs
    # the sides unpaired.
    unit = run_replicas(unit_worker, n_rep, seed + n_rep, threads)
    stat = ks_two_sample(small, unit)
    checks = (_check("scaling_ks", stat, 0.03, "<", n_rep, watch.lap()),)
    return SuiteReport(
        "scaling",
        "a path started from reduced mass r matches, in law, the unit "
        "path run to r^alpha t and rescaled by r",
        _echo(params), seed, checks)


_SUITES = {
    "erosion": _suite_erosion,
    "conservation": _suite_conservation,
    "poisson-counts": _suite_poisson_counts,
    "records": _suite_records,
    "sandwich": _suite_sandwich,
    "subordinator": _suite_subordinator,
    "extreme": _suite_extreme,
    "frechet-k": _suite_frechet_k,
    "correspondence": _suite_correspondence,
    "scaling": _suite_scaling,
}

_DEFAULTS = {
    "erosion": dict(law=None, c=1.0, t=1.0, replicas=50, seed=11),
    "conservation": dict(law=None, t=3.0, replicas=200, seed=13),
    "poisson-counts": dict(law=None, t=0.5, eps=0.0, replicas=10 ** 4,
                           seed=17),
    "records": dict(law=None, t=0.01, eps=1e-4, replicas=10 ** 4, seed=19),
    "sandwich": dict(law=None, t=0.01, eps=1e-4, replicas=10 ** 4, seed=23),
    "subordinator": dict(law=None, t=1.0, m_max=4, replicas=10 ** 4,
                         seed=29),
    "extreme": dict(law=None, t=1e-3, event_budget=5.0, mass_floor=1e-12,
                    replicas=10 ** 4, seed=31),
    "frechet-k": dict(law=None, t=1e-3, event_budget=7.0, mass_floor=1e-12,
                      replicas=10 ** 4, seed=37),
    "correspondence": dict(law=None, t=0.3, n=1000, replicas=2000, seed=41),
    "scaling": dict(law=None, alpha=1.0, r=0.5, t=0.4, replicas=5000,
                    seed=43),
}

_TRANSLATE = {"t_end": "t"}


def _default_law(name):
    if name in ("records", "sandwich", "extreme", "frechet-k"):
        return BinaryPowerLaw(0.5)
    if name in ("poisson-counts", "subordinator"):
        return FiniteAtomic([(1.0, (0.9, 0.1))])
    return _delta_default()


def suite_names():
    return tuple(sorted(_SUITES))


def run_suite(name, overrides=None, *, seed=None, replicas=None,
              threads=None):
    """Run one verification suite; returns its SuiteReport."""
    if name not in _SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; "
                           f"choose from {', '.join(suite_names())}")
    params = dict(_DEFAULTS[name])
    params["law"] = _default_law(name)
    for key, value in (overrides or {}).items():
        key = _TRANSLATE.get(key, key)
        if key not in params:
            raise ConfigError(f"suite {name!r} does not take {key!r}")
        params[key] = value
    if seed is not None:
        params["seed"] = int(seed)
    if replicas is not None:
        params["replicas"] = int(replicas)
    return _SUITES[name](params, threads)
