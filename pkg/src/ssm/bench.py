"""Timing harness for the offline/online split.

Measures offline propagation time against database size (and fits the growth
exponent), and compares the per-probe cost of an online query through the
precomputed factor with rerunning the whole propagation for every probe.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .embedding import query_distances, requery_full
from .labels import DatasetLayout
from .pipeline import LearnConfig, learn
from .propagation import PropagationConfig, iterate_accelerated


@dataclass
class BenchReport:
    offline: dict = field(default_factory=dict)      # N -> seconds
    exponent: float = float("nan")
    query: dict = field(default_factory=dict)        # (N, T) -> seconds per probe
    requery: dict = field(default_factory=dict)      # (N, T) -> seconds per probe

    def speedup(self, n, t):
        return self.requery[(n, t)] / self.query[(n, t)]

    def query_spread(self, n):
        """Max/min ratio of query latency across the T values measured at size n."""
        times = [v for (size, _), v in self.query.items() if size == n]
        return max(times) / min(times)


def random_database(n, dim=16, seed=0):
    """Random points split into a gallery half and a labeled half of identity pairs."""
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n + 1, dim))
    sq = (pts ** 2).sum(1)
    d = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * pts @ pts.T, 0.0))
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    n_g = n // 2
    layout = DatasetLayout(n_gallery=n_g, n_labeled=n - n_g)
    identities = np.arange(n - n_g) // 2
    return d[:n, :n], d[n, :n], layout, identities


def _median_time(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def time_offline(n, iterations=30, reps=3, seed=0):
    rng = np.random.default_rng(seed)
    p = rng.random((n, n))
    p /= p.sum(axis=1, keepdims=True)
    l = (rng.random((n, n)) < 0.01).astype(np.float64)
    cfg = PropagationConfig(iterations=iterations)
    return _median_time(lambda: iterate_accelerated(p, l, cfg), reps)


def fit_exponent(sizes, times):
    slope, _ = np.polyfit(np.log(sizes), np.log(times), 1)
    return float(slope)


def time_query(learned, dist_probe, reps=200):
    return _median_time(lambda: query_distances(learned.factor, learned.graph, dist_probe), reps)


def time_requery(dist_db, dist_probe, layout, identities, iterations=30, reps=1):
    cfg = PropagationConfig(iterations=iterations)
    return _median_time(lambda: requery_full(dist_db, dist_probe, layout, identities, cfg), reps)


def run_bench(sizes, repetitions=3, iterations=30, query_sizes=(), t_values=(10, 30, 100),
              query_reps=200, requery_reps=1, log=None):
    """Offline scaling over ``sizes``; online comparison at each of ``query_sizes``."""
    report = BenchReport()
    for n in sizes:
        report.offline[n] = time_offline(n, iterations, repetitions)
        if log:
            log(f"offline N={n} T={iterations}: {report.offline[n]:.4f}s")
    if len(sizes) >= 2:
        report.exponent = fit_exponent(list(report.offline), list(report.offline.values()))

    for n in query_sizes:
        dist_db, dist_probe, layout, identities = random_database(n)
        for t in t_values:
            cfg = LearnConfig(propagation=PropagationConfig(iterations=t))
            learned = learn(dist_db, layout, identities, cfg)
            report.query[(n, t)] = time_query(learned, dist_probe, query_reps)
            if log:
                log(f"query   N={n} T={t}: {report.query[(n, t)] * 1e3:.4f}ms/probe")
        t = iterations if iterations in t_values else t_values[0]
        report.requery[(n, t)] = time_requery(dist_db, dist_probe, layout, identities, t, requery_reps)
        if log:
            log(f"requery N={n} T={t}: {report.requery[(n, t)]:.3f}s/probe")
    return report


def format_report(report):
    lines = ["offline propagation", f"{'N':>8} {'seconds':>12}"]
    lines += [f"{n:>8} {s:>12.5f}" for n, s in report.offline.items()]
    if not np.isnan(report.exponent):
        lines.append(f"fitted exponent: {report.exponent:.2f}")
    if report.query:
        lines += ["", "online per-probe cost",
                  f"{'N':>8} {'T':>5} {'query_ms':>12} {'requery_s':>12} {'speedup':>10}"]
        for (n, t), q in report.query.items():
            rq = report.requery.get((n, t))
            extra = f"{rq:>12.4f} {rq / q:>10.0f}" if rq is not None else f"{'-':>12} {'-':>10}"
            lines.append(f"{n:>8} {t:>5} {q * 1e3:>12.4f} {extra}")
        for n in sorted({n for n, _ in report.query}):
            lines.append(f"query latency spread across T at N={n}: {report.query_spread(n):.2f}x")
    return "\n".join(lines)
