"""Scikit-learn style front end to the allocation solvers.

Exists for pipelines that already speak the estimator protocol: the
coefficient matrix goes in as X, the fitted attributes come out with
trailing underscores, and get_params/set_params work for grid search over
clock or scheme. The functional API in ``allocator`` remains the primary
interface; this wrapper adds nothing beyond adaptation.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .allocator import (Infeasible, ProblemInstance, Scheme, solve_analytical,
                        solve_eta, solve_oracle, solve_relaxed)
from .model import NodeCoefficients

_SOLVERS = {
    Scheme.ANALYTICAL: solve_analytical,
    Scheme.ETA: solve_eta,
    Scheme.ORACLE: solve_oracle,
}


class BatchAllocator(BaseEstimator):
    """Split a dataset across edge learners to maximize local iterations.

    The estimator is non-inductive: like clustering, it solves the
    instance given to ``fit`` and exposes the solution as attributes;
    there is no prediction on unseen data.

    Parameters
    ----------
    clock : float, default=30.0
        Global cycle budget in seconds.
    total_samples : int, default=60000
        Dataset size to split.
    scheme : {"analytical", "eta", "oracle"}, default="analytical"
        Which solver to run.

    Attributes
    ----------
    tau_ : int
        Local iterations per cycle; 0 when infeasible.
    batch_sizes_ : ndarray of shape (n_nodes,), dtype int64
        Integer batch per learner; sums to total_samples when feasible.
    feasible_ : bool
        Whether all samples fit within the clock.
    per_node_seconds_ : ndarray of shape (n_nodes,)
        Cycle time each learner commits to (0 for idle learners under
        the analytical and oracle schemes).
    relaxed_tau_ : float
        Real-valued iteration count of the continuous relaxation; NaN
        when even the relaxation is infeasible.

    Examples
    --------
    >>> X = [[1.0, 1.0, 0.0], [2.0, 1.0, 0.0]]   # rows of (c2, c1, c0)
    >>> alloc = BatchAllocator(clock=13.0, total_samples=4).fit(X)
    >>> int(alloc.tau_)
    3
    >>> alloc.batch_sizes_.sum()
    4
    """

    def __init__(self, clock: float = 30.0, total_samples: int = 60000,
                 scheme: str = "analytical"):
        self.clock = clock
        self.total_samples = total_samples
        self.scheme = scheme

    def fit(self, X, y=None):
        """Solve the allocation instance described by X.

        Parameters
        ----------
        X : array-like of shape (n_nodes, 3)
            One row per learner: columns are c2 (seconds per
            sample-iteration), c1 (seconds per sample), c0 (seconds of
            fixed exchange).
        y : ignored
            Present for estimator API compatibility.
        """
        X = check_array(X, dtype=np.float64, ensure_2d=True)
        if X.shape[1] != 3:
            raise ValueError(f"X must have 3 columns (c2, c1, c0), got {X.shape[1]}")
        try:
            scheme = Scheme(self.scheme)
        except ValueError:
            raise ValueError(
                f"scheme must be one of {[s.value for s in Scheme]}, got {self.scheme!r}"
            ) from None
        coeffs = []
        for k, (c2, c1, c0) in enumerate(X):
            try:
                coeffs.append(NodeCoefficients(c2=float(c2), c1=float(c1), c0=float(c0)))
            except ValueError as exc:
                raise ValueError(f"X row {k}: {exc}") from None
        instance = ProblemInstance(coeffs=tuple(coeffs), clock=self.clock,
                                   total_samples=self.total_samples)
        allocation = _SOLVERS[scheme](instance)
        try:
            self.relaxed_tau_ = solve_relaxed(instance).tau_real
        except Infeasible:
            self.relaxed_tau_ = math.nan
        self.tau_ = allocation.tau
        self.batch_sizes_ = np.asarray(allocation.d_int, dtype=np.int64)
        self.feasible_ = allocation.feasible
        self.per_node_seconds_ = np.asarray(allocation.per_node_time, dtype=np.float64)
        self.n_features_in_ = 3
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the integer batch sizes."""
        self.fit(X, y)
        check_is_fitted(self, "batch_sizes_")
        return self.batch_sizes_
