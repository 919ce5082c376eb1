"""Supervised smoothed-manifold affinity learning for re-identification ranking."""

from .embedding import OnlineFactor, RankingResult, precompute_factor, query, query_distances
from .evaluation import CmcCurve, GroundTruth, cmc, mean_average_precision
from .graph import AffinityGraph, DistanceMatrix, build_graph, probe_transition_row
from .labels import ConstraintLabels, DatasetLayout, build_labels
from .pipeline import LearnConfig, learn, rank_baseline, rank_probes
from .propagation import (
    PropagationConfig,
    SmoothedModel,
    closed_form_oracle,
    fixed_point_residual,
    iterate_accelerated,
    iterate_oracle,
    smoothness_objective,
)
from .synthetic import SyntheticSpec, generate_synthetic

__version__ = "0.1.0"
