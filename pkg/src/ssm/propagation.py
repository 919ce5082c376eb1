"""Supervised similarity propagation.

The learned similarity is the fixed point of

    Q = alpha * P Q P^T + (1 - alpha) * L

computed by direct iteration (``iterate_accelerated``). The reference solvers
(``iterate_oracle``, ``closed_form_oracle``) work on ``vec(Q)`` with the
Kronecker transition ``kron(P, P)`` materialised, so they are limited to tiny
graphs and exist to cross-check the fast path.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, ConfigError, DomainError, ShapeError
from .labels import DatasetLayout
from .linalg import as_matrix, kron, solve_dense, unvec, vec

ORACLE_MAX_N = 8
STOCHASTIC_TOL = 1e-6


@dataclass(frozen=True)
class PropagationConfig:
    alpha: float = 0.1
    iterations: int = 30
    early_stop_tol: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ConfigError(f"iterations must be a positive integer, got {self.iterations}")
        if not self.early_stop_tol >= 0.0:
            raise ConfigError(f"early_stop_tol must be >= 0, got {self.early_stop_tol}")


@dataclass
class SmoothedModel:
    """Learned similarity over the database, in ``[gallery | labeled]`` order.

    ``r`` holds the online factor once :func:`ssm.embedding.precompute_factor`
    has been run.
    """

    q: np.ndarray
    layout: DatasetLayout
    config: PropagationConfig
    iterations_run: int
    r: Optional[np.ndarray] = None

    def block(self, rows, cols):
        """Return one of the ``XX``, ``XY``, ``YX``, ``YY`` sub-blocks, e.g. ``block("X", "Y")``."""
        pick = {"X": self.layout.gallery, "Y": self.layout.labeled}
        return self.q[pick[rows], pick[cols]]


def _check_inputs(p, l):
    p = as_matrix(p, "transition matrix")
    l = as_matrix(l, "label matrix")
    n = p.shape[0]
    if p.shape != (n, n):
        raise ShapeError(f"transition matrix must be square, got {p.shape}")
    if l.shape != p.shape:
        raise ShapeError(f"label matrix {l.shape} does not match transition matrix {p.shape}")
    if p.min(initial=0.0) < 0:
        raise DomainError("transition matrix has negative entries")
    gap = np.abs(p.sum(axis=1) - 1.0)
    if gap.max(initial=0.0) > STOCHASTIC_TOL:
        row = int(np.argmax(gap))
        raise DomainError(f"transition matrix row {row} sums to {p[row].sum()!r}, not 1")
    return p, l


def _check_oracle_scale(n):
    if n > ORACLE_MAX_N:
        raise CapacityError(f"reference solver limited to N <= {ORACLE_MAX_N}, got N = {n}")


def accelerated_iterates(p, l, alpha):
    """Yield ``Q^(0) = L, Q^(1), Q^(2), ...`` indefinitely."""
    pt = p.T.copy()
    keep = (1.0 - alpha) * l
    q = l.copy()
    yield q
    while True:
        q = alpha * ((p @ q) @ pt) + keep
        yield q


def oracle_iterates(p, l, alpha):
    """Same sequence as :func:`accelerated_iterates`, computed on ``vec(Q)``."""
    n = p.shape[0]
    _check_oracle_scale(n)
    big_p = kron(p, p)
    keep = (1.0 - alpha) * vec(l)
    qv = vec(l)
    yield unvec(qv, n, n)
    while True:
        qv = alpha * (big_p @ qv) + keep
        yield unvec(qv, n, n)


def iterate_accelerated(p, l, cfg=PropagationConfig(), layout=None):
    p, l = _check_inputs(p, l)
    if layout is None:
        layout = DatasetLayout(n_gallery=p.shape[0], n_labeled=0)
    elif layout.n != p.shape[0]:
        raise ShapeError(f"layout has {layout.n} vertices, matrices have {p.shape[0]}")

    steps = accelerated_iterates(p, l, cfg.alpha)
    q = next(steps)
    run = 0
    for run in range(1, cfg.iterations + 1):
        prev, q = q, next(steps)
        if cfg.early_stop_tol > 0 and np.abs(q - prev).max() <= cfg.early_stop_tol:
            break
    return SmoothedModel(q=q, layout=layout, config=cfg, iterations_run=run)


def iterate_oracle(p, l, cfg=PropagationConfig()):
    p, l = _check_inputs(p, l)
    steps = oracle_iterates(p, l, cfg.alpha)
    q = next(steps)
    for _ in range(cfg.iterations):
        prev, q = q, next(steps)
        if cfg.early_stop_tol > 0 and np.abs(q - prev).max() <= cfg.early_stop_tol:
            break
    return q


def closed_form_oracle(p, l, alpha):
    PropagationConfig(alpha=alpha)
    p, l = _check_inputs(p, l)
    n = p.shape[0]
    _check_oracle_scale(n)
    system = np.eye(n * n) - alpha * kron(p, p)
    return unvec((1.0 - alpha) * solve_dense(system, vec(l)), n, n)


def fixed_point_residual(q, p, l, alpha):
    """Max-norm of ``Q - alpha P Q P^T - (1 - alpha) L``."""
    q = as_matrix(q, "similarity")
    p = as_matrix(p, "transition matrix")
    l = as_matrix(l, "label matrix")
    if not (q.shape == p.shape == l.shape and q.shape[0] == q.shape[1]):
        raise ShapeError(f"shape mismatch: q {q.shape}, p {p.shape}, l {l.shape}")
    return float(np.abs(q - alpha * (p @ q @ p.T) - (1.0 - alpha) * l).max())


def smoothness_objective(q, p, l, alpha):
    """Return ``(phi, omega)``: manifold roughness of ``Q`` and its misfit to ``L``.

    ``phi`` is the Kronecker-weighted Dirichlet energy
    ``0.5 * sum_{mu,nu} K[mu,nu] (q_mu - q_nu)**2`` with ``K = kron(P, P)`` and
    ``q = vec(Q)``. ``alpha`` only weights the combined objective
    ``phi + (1 - alpha) / alpha * omega`` and is validated here for symmetry
    with the other solvers.
    """
    PropagationConfig(alpha=alpha)
    q = as_matrix(q, "similarity")
    p = as_matrix(p, "transition matrix")
    l = as_matrix(l, "label matrix")
    if not (q.shape == p.shape == l.shape and q.shape[0] == q.shape[1]):
        raise ShapeError(f"shape mismatch: q {q.shape}, p {p.shape}, l {l.shape}")
    _check_oracle_scale(q.shape[0])
    big_p = kron(p, p)
    qv = vec(q)
    diff = qv[:, None] - qv[None, :]
    phi = 0.5 * float(np.sum(big_p * diff ** 2))
    omega = float(np.sum((qv - vec(l)) ** 2))
    return phi, omega
