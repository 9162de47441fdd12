"""Separation, covering radius and mesh ratio of point configurations.

Distances are chordal.  The covering radius is also reported as a geodesic
angle (``eta_arc``) together with ``gamma_arc = eta_arc / delta``, the mixed
convention under which most published mesh-ratio tables are stated.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from ._validation import check_points, check_random_state
from .geometry import chord_to_arc
from .tessellation import TriMesh, cell_stats, delaunay, voronoi

GOLDEN_FLOOR = (math.sqrt(5.0) - 1.0) / 2.0

REPORT_COLUMNS = ("family", "params", "N", "delta", "eta", "gamma", "delta_sqrtN", "eta_sqrtN",
                  "maxCellArea_N", "minCellArea_N", "deg5", "deg6", "deg7", "eta_arc", "gamma_arc")


@dataclass
class QualityReport:
    """Quality metrics of one configuration.

    ``gamma = eta / delta`` with both chordal; ``gamma_arc`` uses the geodesic
    covering radius.  ``cell_stats`` holds the Voronoi summary.  Failed sweep
    items carry ``error`` and NaN metrics.
    """

    N: int
    delta: float
    eta: float
    gamma: float
    delta_scaled: float
    eta_scaled: float
    eta_arc: float
    gamma_arc: float
    cell_stats: dict = field(default_factory=dict)
    family: str = ""
    params: dict = field(default_factory=dict)
    error: str | None = None

    def to_row(self) -> dict:
        cs = self.cell_stats or {}
        return {
            "family": self.family,
            "params": ";".join(f"{k}={v}" for k, v in self.params.items()),
            "N": self.N, "delta": self.delta, "eta": self.eta, "gamma": self.gamma,
            "delta_sqrtN": self.delta_scaled, "eta_sqrtN": self.eta_scaled,
            "maxCellArea_N": cs.get("max_area_N", float("nan")),
            "minCellArea_N": cs.get("min_area_N", float("nan")),
            "deg5": cs.get("deg5", 0), "deg6": cs.get("deg6", 0), "deg7": cs.get("deg7", 0),
            "eta_arc": self.eta_arc, "gamma_arc": self.gamma_arc,
        }

    def to_dict(self) -> dict:
        return asdict(self)


def _mesh(X) -> TriMesh:
    return X if isinstance(X, TriMesh) else delaunay(X)


def separation(X) -> float:
    """Minimum pairwise chordal distance, taken over the Delaunay edges.

    ``X`` may be points, a Configuration or a prebuilt :class:`TriMesh`.
    Three points or fewer fall back to the pairwise minimum.
    """
    if not isinstance(X, TriMesh):
        P = check_points(X, min_points=2)
        if len(P) < 4:
            return float(pdist(P).min())
    return float(_mesh(X).edge_lengths().min())


def separation_bruteforce(X) -> float:
    """O(N^2) pairwise minimum; the reference for :func:`separation`."""
    return float(pdist(check_points(X, min_points=2)).min())


def covering_radius(X, metric: str = "chordal") -> float:
    """Largest distance from a point of the sphere to the configuration.

    Evaluated at the Voronoi vertices (triangle circumcentres).  ``metric`` is
    ``"chordal"`` or ``"arc"`` (geodesic angle).
    """
    if metric not in ("chordal", "arc"):
        raise ValueError(f"metric must be 'chordal' or 'arc', got {metric!r}")
    eta = float(_mesh(X).circumradii.max())
    return float(chord_to_arc(eta)) if metric == "arc" else eta


def covering_radius_probe(X, n_probes: int = 1_000_000, seed=0, batch: int = 200_000) -> float:
    """Monte-Carlo lower estimate of the chordal covering radius."""
    P = check_points(X)
    tree = cKDTree(P)
    rng = check_random_state(seed)
    best = 0.0
    done = 0
    while done < n_probes:
        m = min(batch, n_probes - done)
        Q = rng.standard_normal((m, 3))
        Q /= np.linalg.norm(Q, axis=1, keepdims=True)
        best = max(best, float(tree.query(Q)[0].max()))
        done += m
    return best


def mesh_ratio(X, covering: str = "chordal") -> float:
    """``covering_radius / separation``; ``covering="arc"`` uses the geodesic covering radius."""
    mesh = _mesh(X)
    return covering_radius(mesh, covering) / separation(mesh)


def quality(X, family: str | None = None, params: dict | None = None,
            with_cells: bool = True) -> QualityReport:
    """All metrics from a single tessellation."""
    mesh = delaunay(X)
    delta = separation(mesh)
    eta = covering_radius(mesh)
    eta_arc = float(chord_to_arc(eta))
    N = mesh.n_points
    stats = cell_stats(voronoi(mesh)) if with_cells else {}
    return QualityReport(
        N=N, delta=delta, eta=eta, gamma=eta / delta, delta_scaled=delta * math.sqrt(N),
        eta_scaled=eta * math.sqrt(N), eta_arc=eta_arc, gamma_arc=eta_arc / delta,
        cell_stats=stats, family=family or getattr(X, "family", ""),
        params=dict(params if params is not None else getattr(X, "params", {}) or {}),
    )


def _failed(family, params, exc) -> QualityReport:
    nan = float("nan")
    return QualityReport(N=int(params.get("N", 0) or 0), delta=nan, eta=nan, gamma=nan,
                         delta_scaled=nan, eta_scaled=nan, eta_arc=nan, gamma_arc=nan,
                         family=family, params=dict(params), error=f"{type(exc).__name__}: {exc}")


def quality_sweep(family: str, param_list, with_cells: bool = True, **common) -> list[QualityReport]:
    """One :class:`QualityReport` per parameter set, in input order.

    Each entry of ``param_list`` is a dict of keyword arguments for
    :func:`sphere_suite.generators.generate` (or a bare integer, read as
    ``N``).  Failures are recorded in the report's ``error`` field.
    """
    from .generators import generate

    out = []
    for params in param_list:
        if not isinstance(params, dict):
            params = {"N": int(params)}
        try:
            cfg = generate(family, **{**common, **params})
            out.append(quality(cfg, cfg.family, cfg.params, with_cells=with_cells))
        except Exception as exc:  # noqa: BLE001 - collected per item
            out.append(_failed(family, params, exc))
    return out


def octahedral_separation_bound(k: int) -> float:
    """Lower bound ``(2/k^2)(2 - (k+1)^2/k^2)`` on the squared octahedral separation."""
    return 2.0 / k ** 2 * (2.0 - (k + 1) ** 2 / k ** 2)


def octahedral_mesh_bound(k: int) -> float:
    """Upper bound on the octahedral mesh ratio; ``inf`` where it is vacuous (k <= 2)."""
    denom = 2.0 - (k + 1) ** 2 / k ** 2
    if denom <= 0.0:
        return math.inf
    return 0.25 * math.sqrt((4.0 + math.pi ** 2) / denom)
