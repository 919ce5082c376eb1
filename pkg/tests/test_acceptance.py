"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np
import pytest

from oracles import phi_quadruple_sum, probe_scores_double_sum, random_labels, random_stochastic
from ssm import io as ssm_io
from ssm.bench import random_database, time_query, time_requery
from ssm.cli import main
from ssm.embedding import OnlineFactor, query
from ssm.evaluation import cmc
from ssm.graph import build_graph
from ssm.labels import DatasetLayout, build_labels
from ssm.pipeline import LearnConfig, learn, rank_baseline, rank_probes
from ssm.propagation import (
    PropagationConfig,
    accelerated_iterates,
    closed_form_oracle,
    fixed_point_residual,
    iterate_accelerated,
    oracle_iterates,
    smoothness_objective,
)
from ssm.synthetic import SyntheticSpec, generate_synthetic


def random_instance(gen, n):
    """Alternate between arbitrary stochastic matrices and kernel graphs."""
    if n < 2 or gen.random() < 0.5:
        return random_stochastic(gen, n), random_labels(gen, n)
    pts = gen.standard_normal((n, 3))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    n_g = int(gen.integers(0, n))
    layout = DatasetLayout(n_g, n - n_g)
    return build_graph(d, kernel_k=1).p, build_labels(layout, gen.integers(0, 2, n - n_g)).l


def test_1_oracle_equivalence(acceptance_report):
    gen = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(50):
        n = int(gen.integers(3, 7))
        alpha = [0.05, 0.1, 0.5][trial % 3]
        p, l = random_instance(gen, n)
        fast, slow = accelerated_iterates(p, l, alpha), oracle_iterates(p, l, alpha)
        for _ in range(31):
            worst = max(worst, float(np.abs(next(fast) - next(slow)).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 10
    acceptance_report(1, "accelerated iteration equals Kronecker oracle at every t <= 30", ok,
                      f"max gap {worst:.1e}, {elapsed:.2f}s")
    assert worst <= 1e-12
    assert elapsed < 10


def test_2_closed_form_convergence(acceptance_report):
    gen = np.random.default_rng(2)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(40):
        n = int(gen.integers(2, 7))
        p, l = random_instance(gen, n)
        q = iterate_accelerated(p, l, PropagationConfig(alpha=0.1, iterations=200)).q
        worst = max(worst, float(np.abs(q - closed_form_oracle(p, l, 0.1)).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5
    acceptance_report(2, "T=200 iteration matches closed form", ok, f"max gap {worst:.1e}, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 5


def test_3_contraction(acceptance_report):
    gen = np.random.default_rng(3)
    violations = 0
    steps_checked = 0
    for trial in range(200):
        n = int(gen.integers(2, 9))
        alpha = float(gen.choice([0.05, 0.1, 0.5, 0.9]))
        p, l = random_instance(gen, n)
        it = accelerated_iterates(p, l, alpha)
        prev_q, q = next(it), next(it)
        prev_delta = float(np.abs(q - prev_q).max())
        for _ in range(30):
            prev_q, q = q, next(it)
            delta = float(np.abs(q - prev_q).max())
            steps_checked += 1
            if delta > alpha * prev_delta + 1e-12:
                violations += 1
            prev_delta = delta
    acceptance_report(3, "successive deltas shrink by <= alpha + 1e-12", violations == 0,
                      f"{violations} violations in {steps_checked} steps")
    assert violations == 0


def test_4_probe_embedding(acceptance_report):
    gen = np.random.default_rng(4)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n_g = int(gen.integers(1, 6))
        n_l = int(gen.integers(0, 11 - n_g))
        n = n_g + n_l
        p, l = random_instance(gen, n)
        q = iterate_accelerated(p, l).q
        factor = OnlineFactor(q @ p[:n_g].T)
        row = gen.random(n)
        row /= row.sum()
        scores = query(factor, row).scores
        worst = max(worst, float(np.abs(scores - probe_scores_double_sum(row, q, p, n_g)).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5
    acceptance_report(4, "matrix-form probe scores equal brute-force double sum", ok,
                      f"max gap {worst:.1e}, {elapsed:.2f}s")
    assert worst <= 1e-12
    assert elapsed < 5


def test_5_objective_consistency(acceptance_report):
    gen = np.random.default_rng(5)
    worst_phi = worst_res = 0.0
    for _ in range(20):
        n = int(gen.integers(2, 5))
        p, l = random_instance(gen, n)
        q = gen.random((n, n))
        phi, _ = smoothness_objective(q, p, l, 0.1)
        worst_phi = max(worst_phi, abs(phi - phi_quadruple_sum(q, p)))
        q_star = closed_form_oracle(p, l, 0.1)
        worst_res = max(worst_res, fixed_point_residual(q_star, p, l, 0.1))
    ok = worst_phi <= 1e-10 and worst_res <= 1e-10
    acceptance_report(5, "quadruple-sum and vectorised smoothness agree; closed form is a fixed point", ok,
                      f"phi gap {worst_phi:.1e}, residual {worst_res:.1e}")
    assert worst_phi <= 1e-10
    assert worst_res <= 1e-10


def test_6_synthetic_efficacy(acceptance_report):
    start = time.perf_counter()
    diffs = []
    for seed in range(1, 11):
        data = generate_synthetic(SyntheticSpec(n_identities=50, images_per_identity=2, feature_dim=16,
                                                camera_offset_scale=2.0, noise_scale=0.6,
                                                n_distractors=50, seed=seed))
        learned = learn(data.db_distances, data.layout, data.labeled_identities, LearnConfig())
        ssm_rank1 = cmc(rank_probes(learned, data.probe_distances), data.truth).at(1)
        base_rank1 = cmc(rank_baseline(data.probe_gallery_distances), data.truth).at(1)
        diffs.append(ssm_rank1 - base_rank1)
    elapsed = time.perf_counter() - start
    wins = sum(d >= 0 for d in diffs)
    gain = 100 * float(np.mean(diffs))
    ok = wins >= 8 and gain >= 2.0 and elapsed < 60
    acceptance_report(6, "SSM rank-1 >= baseline on >= 8/10 seeds with >= 2pp mean gain", ok,
                      f"{wins}/10 seeds, mean gain {gain:+.1f}pp, {elapsed:.1f}s")
    assert elapsed < 60
    assert wins >= 8
    assert gain >= 2.0


@pytest.mark.slow
def test_7_online_speed_asymmetry(acceptance_report):
    start = time.perf_counter()
    n = 2000
    dist_db, dist_probe, layout, identities = random_database(n, seed=7)
    query_times = {}
    for t in (10, 30, 100):
        cfg = LearnConfig(propagation=PropagationConfig(iterations=t))
        learned = learn(dist_db, layout, identities, cfg)
        query_times[t] = time_query(learned, dist_probe, reps=500)
    slow = time_requery(dist_db, dist_probe, layout, identities, iterations=30)
    elapsed = time.perf_counter() - start
    speedup = slow / query_times[30]
    spread = max(query_times.values()) / min(query_times.values())
    ok = speedup >= 100 and spread < 2 and elapsed < 600
    acceptance_report(7, "precomputed query >= 100x faster than rerun; latency flat in T", ok,
                      f"speedup {speedup:.0f}x, T spread {spread:.2f}x, {elapsed:.0f}s")
    assert speedup >= 100
    assert spread < 2
    assert elapsed < 600


def test_8_format_round_trips(acceptance_report, tmp_path):
    gen = np.random.default_rng(8)
    m = gen.standard_normal((7, 3))
    ssm_io.write_matrix(tmp_path / "m.ssm", m)
    matrix_ok = ssm_io.read_matrix(tmp_path / "m.ssm").tobytes() == m.tobytes()

    assert main(["synth", "--out", str(tmp_path), "--identities", "12", "--distractors", "6"]) == 0
    args = [str(tmp_path / "distances.ssm"), str(tmp_path / "labels.csv")]
    assert main(["learn", *args, "--out", str(tmp_path / "a.ssm")]) == 0
    assert main(["learn", *args, "--out", str(tmp_path / "b.ssm")]) == 0
    raw = (tmp_path / "a.ssm").read_bytes()
    deterministic = raw == (tmp_path / "b.ssm").read_bytes()
    model = ssm_io.load_model(tmp_path / "a.ssm")
    model_ok = ssm_io.model_bytes(model) == raw
    ok = matrix_ok and deterministic and model_ok
    acceptance_report(8, "matrix/model files reload bit-exactly; learn is byte-deterministic", ok,
                      f"matrix {matrix_ok}, model {model_ok}, deterministic {deterministic}")
    assert ok
