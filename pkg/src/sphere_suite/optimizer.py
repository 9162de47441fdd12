"""Projected gradient descent for low-energy configurations on the sphere.

Iterates move along the negative tangential gradient and are renormalized
onto the sphere.  The step starts from a Barzilai-Borwein estimate and is
shrunk until the Armijo sufficient-decrease test passes, so accepted energies
never increase.  For ``s < 0`` the distance sum is maximized.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import _pairsum
from ._validation import check_points, check_positive_int, check_random_state
from .energy import InfiniteEnergyError, KernelSpec, discrete_energy


def _objective_sign(kernel: KernelSpec) -> float:
    return -1.0 if (not kernel.is_log and kernel.s < 0.0) else 1.0


def energy_gradient(X, kernel="log", n_jobs: int = 1, tangential: bool = True) -> np.ndarray:
    """Gradient of :func:`~sphere_suite.energy.discrete_energy` with respect to each point.

    Riesz: ``2 * (-s) * sum_j (x_i - x_j) / |x_i - x_j|^{s+2}``; log: ``-2 sum_j
    (x_i - x_j) / |x_i - x_j|^2``.  The factor 2 comes from the ordered-pair
    sum.  With ``tangential=True`` the radial component is removed.
    """
    kernel = KernelSpec.parse(kernel)
    P = np.ascontiguousarray(check_points(X, min_points=2))
    N = len(P)
    out = np.empty((N, 3))
    kind = _pairsum.LOG if kernel.is_log else _pairsum.RIESZ
    s = 0.0 if kernel.is_log else kernel.s
    if n_jobs and n_jobs > 1:
        edges = np.linspace(0, N, int(n_jobs) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=int(n_jobs)) as pool:
            bad = sum(pool.map(lambda b: _pairsum.gradient_rows(P, b[0], b[1], kind, s, out[b[0]:b[1]]),
                               zip(edges[:-1], edges[1:])))
    else:
        bad = _pairsum.gradient_rows(P, 0, N, kind, s, out)
    if bad:
        raise InfiniteEnergyError("coincident points: the gradient is undefined")
    if tangential:
        out -= np.einsum("ij,ij->i", out, P)[:, None] * P
    return out


@dataclass
class OptimizerSettings:
    """Stopping and line-search parameters.

    ``grad_tol`` bounds the max-norm of the tangential gradient; ``None`` means
    ``1e-8 * N``.  ``shrink`` must lie in (0, 1).
    """

    max_iter: int = 500
    grad_tol: float | None = None
    initial_step: float | None = None
    shrink: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 40
    n_restarts: int = 3
    jitter: float = 0.5
    seed: int | None = 0

    def __post_init__(self):
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.grad_tol is not None and self.grad_tol <= 0.0:
            raise ValueError("grad_tol must be positive")
        check_positive_int(self.max_iter, "max_iter", 1)
        check_positive_int(self.n_restarts, "n_restarts", 1)


@dataclass
class OptimizerTrace:
    """Energy history of the returned run and a summary of every restart."""

    energies: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    restart: int = 0
    restart_energies: list = field(default_factory=list)


def _retract(P):
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def _descend(P, kernel, settings: OptimizerSettings, n_jobs: int):
    sign = _objective_sign(kernel)
    N = len(P)
    tol = settings.grad_tol if settings.grad_tol is not None else 1e-8 * N
    spacing = math.sqrt(4.0 * math.pi / N)
    f = sign * discrete_energy(P, kernel, n_jobs=n_jobs)
    g = sign * energy_gradient(P, kernel, n_jobs=n_jobs)
    trace = OptimizerTrace(energies=[sign * f], grad_norms=[float(np.abs(g).max())])
    step = settings.initial_step
    prev = None
    for it in range(settings.max_iter):
        gmax = float(np.abs(g).max())
        if gmax <= tol:
            trace.converged = True
            break
        if step is None or prev is None:
            step = 0.1 * spacing / gmax if settings.initial_step is None else settings.initial_step
        else:
            dx, dg = P - prev[0], g - prev[1]
            denom = abs(float(np.sum(dx * dg)))
            step = float(np.sum(dx * dx)) / denom if denom > 0.0 else step
        # never move a point by more than half the typical spacing
        step = min(step, 0.5 * spacing / gmax)
        g2 = float(np.sum(g * g))
        accepted = False
        for _ in range(settings.max_backtracks):
            trial = _retract(P - step * g)
            try:
                f_new = sign * discrete_energy(trial, kernel, n_jobs=n_jobs)
            except InfiniteEnergyError:
                f_new = math.inf
            if f_new <= f - settings.armijo * step * g2:
                accepted = True
                break
            step *= settings.shrink
        if not accepted:
            break
        prev = (P, g)
        P, f = trial, f_new
        g = sign * energy_gradient(P, kernel, n_jobs=n_jobs)
        trace.energies.append(sign * f)
        trace.grad_norms.append(float(np.abs(g).max()))
        trace.iterations = it + 1
    else:
        trace.converged = float(np.abs(g).max()) <= tol
    return P, f, trace


def _jitter(P, sigma, rng):
    noise = rng.normal(0.0, sigma, P.shape)
    noise -= np.einsum("ij,ij->i", noise, P)[:, None] * P
    return _retract(P + noise)


def minimize(initial, kernel="log", settings: OptimizerSettings | None = None, n_jobs: int = 1):
    """Best-of-restarts projected gradient descent.

    Restart 0 starts from ``initial``; later restarts add tangential Gaussian
    noise of standard deviation ``settings.jitter / sqrt(N)``.

    Returns
    -------
    points : ndarray (N, 3)
    trace : OptimizerTrace
    """
    kernel = KernelSpec.parse(kernel)
    settings = settings or OptimizerSettings()
    P0 = check_points(initial, min_points=2)
    rng = check_random_state(settings.seed)
    best = None
    energies = []
    for r in range(settings.n_restarts):
        start = P0 if r == 0 else _jitter(P0, settings.jitter / math.sqrt(len(P0)), rng)
        P, f, trace = _descend(start, kernel, settings, n_jobs)
        trace.restart = r
        energies.append(trace.energies[-1])
        if best is None or f < best[1]:
            best = (P, f, trace)
    P, _, trace = best
    trace.restart_energies = energies
    return P, trace


class EnergyMinimizer(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Estimator front end of :func:`minimize`.

    ``fit(X)`` optimizes starting from the points ``X``; ``transform`` returns
    the optimized points, so ``fit_transform`` maps a start configuration to a
    low-energy one.

    Parameters
    ----------
    kernel : str
        ``"log"`` or ``"s=<real>"``.
    max_iter, grad_tol, initial_step, shrink, armijo, n_restarts, jitter
        See :class:`OptimizerSettings`.
    random_state : int or None
    n_jobs : int

    Attributes
    ----------
    points_ : ndarray (N, 3)
    energy_ : float
    trace_ : OptimizerTrace
    """

    def __init__(self, kernel="log", max_iter=500, grad_tol=None, initial_step=None, shrink=0.5,
                 armijo=1e-4, n_restarts=3, jitter=0.5, random_state=0, n_jobs=1):
        self.kernel = kernel
        self.max_iter = max_iter
        self.grad_tol = grad_tol
        self.initial_step = initial_step
        self.shrink = shrink
        self.armijo = armijo
        self.n_restarts = n_restarts
        self.jitter = jitter
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _settings(self) -> OptimizerSettings:
        return OptimizerSettings(max_iter=self.max_iter, grad_tol=self.grad_tol,
                                 initial_step=self.initial_step, shrink=self.shrink,
                                 armijo=self.armijo, n_restarts=self.n_restarts,
                                 jitter=self.jitter, seed=self.random_state)

    def fit(self, X, y=None):
        P, trace = minimize(X, self.kernel, self._settings(), n_jobs=self.n_jobs)
        self.points_ = P
        self.trace_ = trace
        self.energy_ = trace.energies[-1]
        self.n_points_ = len(P)
        return self

    def transform(self, X=None):
        if not hasattr(self, "points_"):
            raise AttributeError("EnergyMinimizer is not fitted yet; call fit first")
        return self.points_.copy()

    def score(self, X=None, y=None) -> float:
        """Negative objective of the fitted configuration (higher is better)."""
        return -_objective_sign(KernelSpec.parse(self.kernel)) * self.energy_

    def save_checkpoint(self, path) -> None:
        """Write points, trace and parameters as JSON."""
        if not hasattr(self, "points_"):
            raise AttributeError("nothing to save; call fit first")
        payload = {"params": self.get_params(), "points": self.points_.tolist(),
                   "trace": asdict(self.trace_)}
        payload["params"]["kernel"] = str(KernelSpec.parse(self.kernel))
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load_checkpoint(cls, path) -> "EnergyMinimizer":
        """Restore a fitted estimator; calling ``fit(est.points_)`` resumes the descent."""
        data = json.loads(Path(path).read_text())
        est = cls(**data["params"])
        est.points_ = check_points(np.array(data["points"]))
        est.trace_ = OptimizerTrace(**data["trace"])
        est.energy_ = est.trace_.energies[-1]
        est.n_points_ = len(est.points_)
        return est
