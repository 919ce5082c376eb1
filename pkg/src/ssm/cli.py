"""Command-line entry point: ``ssm learn|query|eval|synth|bench``."""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io as ssm_io
from .bench import format_report, run_bench
from .embedding import OnlineFactor, RankingResult, query_distances
from .errors import ConfigError, ShapeError, SSMError
from .evaluation import GroundTruth, cmc, mean_average_precision
from .labels import DatasetLayout
from .pipeline import LearnConfig, learn
from .propagation import PropagationConfig
from .synthetic import SyntheticSpec, generate_synthetic

log = logging.getLogger("ssm")

DEFAULTS = {"alpha": 0.1, "iters": 30, "kernel_k": 7, "sparsify_knn": None,
            "early_stop_tol": 0.0, "labeled_diagonal": True}
IO_ERROR_EXIT = 8


def _learn_options(args):
    """Defaults, overridden by ``--config`` file, overridden by explicit flags."""
    opts = dict(DEFAULTS)
    if args.config:
        with open(args.config) as f:
            try:
                loaded = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: {exc}") from None
        unknown = set(loaded) - set(opts)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        opts.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return opts


def cmd_learn(args):
    opts = _learn_options(args)
    cfg = LearnConfig(
        propagation=PropagationConfig(alpha=opts["alpha"], iterations=opts["iters"],
                                      early_stop_tol=opts["early_stop_tol"]),
        kernel_k=opts["kernel_k"],
        sparsify_knn=opts["sparsify_knn"],
        labeled_diagonal=opts["labeled_diagonal"],
    )
    dist = ssm_io.load_any_matrix(args.distances)
    gallery, labeled, identities = ssm_io.read_labels(args.labels)
    order = gallery + labeled
    if sorted(order) != list(range(dist.shape[0])):
        raise ShapeError(f"labels must list every index 0..{dist.shape[0] - 1} exactly once")
    if dist.shape[0] != dist.shape[1]:
        raise ShapeError(f"distance matrix must be square, got {dist.shape}")

    layout = DatasetLayout(n_gallery=len(gallery), n_labeled=len(labeled))
    learned = learn(dist[np.ix_(order, order)], layout, identities, cfg)
    model = ssm_io.ModelFile(
        n_gallery=layout.n_gallery, n_labeled=layout.n_labeled, alpha=cfg.propagation.alpha,
        iterations=cfg.propagation.iterations, kernel_k=cfg.kernel_k,
        q=learned.model.q, r=learned.factor.r, sigmas=learned.graph.sigmas,
        manifest={
            "vertex_indices": order,
            "labeled_identities": list(identities),
            "sigma_floor": learned.graph.sigma_floor,
            "iterations_run": learned.model.iterations_run,
            "early_stop_tol": cfg.propagation.early_stop_tol,
            "sparsify_knn": cfg.sparsify_knn,
            "labeled_diagonal": cfg.labeled_diagonal,
        },
    )
    ssm_io.save_model(args.out, model)
    log.info("learned model over %d gallery + %d labeled vertices (%d iterations) -> %s",
             layout.n_gallery, layout.n_labeled, learned.model.iterations_run, args.out)
    return 0


def cmd_query(args):
    model = ssm_io.load_model(args.model)
    graph = model.probe_graph()
    factor = OnlineFactor(model.r)
    perm = model.vertex_indices
    n = model.n_gallery + model.n_labeled
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(ssm_io.RANKING_HEADER)
        for i, row in enumerate(ssm_io.iter_any_rows(args.probes)):
            if row.shape != (n,):
                raise ShapeError(f"probe row {i}: expected {n} distances, got {row.shape[0]}")
            ranking = query_distances(factor, graph, row[perm])
            ssm_io.write_rankings(writer, i, ranking, model.gallery_indices, top=args.top)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def evaluate_files(rankings_path, truth_path, allow_unmatched=False):
    probe_ids, g_idx, g_ids = ssm_io.read_truth(truth_path)
    position = {idx: pos for pos, idx in enumerate(g_idx)}
    ranked = ssm_io.read_rankings(rankings_path)
    rankings = []
    for probe in range(len(probe_ids)):
        rows = ranked.get(probe)
        if rows is None:
            raise ShapeError(f"no ranking for probe {probe}")
        try:
            order = np.array([position[g] for _, g, _ in rows], dtype=np.int64)
        except KeyError as exc:
            raise ShapeError(f"probe {probe}: gallery index {exc.args[0]} not in truth file") from None
        scores = np.empty(len(g_idx))
        scores[order] = [s for _, _, s in rows]
        rankings.append(RankingResult(scores=scores, order=order))
    unmatched = frozenset()
    if allow_unmatched:
        present = set(g_ids)
        unmatched = frozenset(i for i, pid in enumerate(probe_ids) if pid not in present)
    truth = GroundTruth(probe_identities=probe_ids, gallery_identities=g_ids, distractor_only=unmatched)
    return cmc(rankings, truth), mean_average_precision(rankings, truth)


def cmd_eval(args):
    curve, m_ap = evaluate_files(args.rankings, args.truth, args.allow_unmatched)
    ranks = [r for r in args.ranks if r <= len(curve.accuracy_at_rank)]
    print(f"{'metric':<10}{'value':>10}")
    for r in ranks:
        print(f"{'rank-' + str(r):<10}{100 * curve.at(r):>9.2f}%")
    print(f"{'mAP':<10}{100 * m_ap:>9.2f}%")
    if args.out:
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["metric", "value"])
            for r, acc in enumerate(curve.accuracy_at_rank, start=1):
                w.writerow([f"cmc@{r}", repr(float(acc))])
            w.writerow(["mAP", repr(m_ap)])
    return 0


def cmd_synth(args):
    spec = SyntheticSpec(n_identities=args.identities, images_per_identity=args.images,
                         feature_dim=args.dim, camera_offset_scale=args.offset,
                         noise_scale=args.noise, n_distractors=args.distractors, seed=args.seed)
    data = generate_synthetic(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lay = data.layout
    ssm_io.write_matrix(out / "distances.ssm", data.db_distances)
    ssm_io.write_matrix(out / "probes.ssm", data.probe_distances)
    ssm_io.write_labels(out / "labels.csv", range(lay.n_gallery),
                        range(lay.n_gallery, lay.n), data.labeled_identities.tolist())
    ssm_io.write_truth(out / "truth.csv", data.truth.probe_identities,
                       range(lay.n_gallery), data.truth.gallery_identities)
    log.info("wrote %d gallery, %d labeled, %d probes to %s",
             lay.n_gallery, lay.n_labeled, data.probe_distances.shape[0], out)
    return 0


def cmd_bench(args):
    report = run_bench(args.sizes, repetitions=args.reps, iterations=args.iters,
                       query_sizes=args.query_sizes, t_values=tuple(args.t_values),
                       log=log.info)
    text = format_report(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def build_parser():
    parser = argparse.ArgumentParser(prog="ssm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="offline: build graph, propagate labels, write model")
    p.add_argument("distances", help="database distance matrix (.ssm or .csv)")
    p.add_argument("labels", help="labels CSV with header index,block,identity")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file with learning options")
    p.add_argument("--alpha", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--kernel-k", dest="kernel_k", type=int)
    p.add_argument("--sparsify-knn", dest="sparsify_knn", type=int)
    p.add_argument("--early-stop-tol", dest="early_stop_tol", type=float)
    p.add_argument("--no-labeled-diagonal", dest="labeled_diagonal", action="store_const", const=False)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("query", help="online: rank the gallery for each probe")
    p.add_argument("model")
    p.add_argument("probes", help="probe-to-database distances, one row per probe (.ssm or .csv)")
    p.add_argument("--out")
    p.add_argument("--top", type=int, help="only emit the first TOP ranks per probe")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="CMC and mAP from a rankings CSV")
    p.add_argument("rankings")
    p.add_argument("truth", help="CSV with header role,index,identity")
    p.add_argument("--ranks", type=_int_list, default=[1, 5, 10, 20])
    p.add_argument("--allow-unmatched", action="store_true",
                   help="treat probes without a gallery match as distractor-only")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a synthetic two-camera dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--identities", type=int, default=50)
    p.add_argument("--images", type=int, default=2)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--offset", type=float, default=2.0)
    p.add_argument("--noise", type=float, default=0.6)
    p.add_argument("--distractors", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="time offline learning and online queries")
    p.add_argument("--sizes", type=_int_list, default=[250, 500, 1000])
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--query-sizes", dest="query_sizes", type=_int_list, default=[1000])
    p.add_argument("--t-values", dest="t_values", type=_int_list, default=[10, 30, 100])
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SSMError as exc:
        print(f"ssm {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"ssm {args.command}: {exc}", file=sys.stderr)
        return IO_ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
