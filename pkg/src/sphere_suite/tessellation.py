"""Spherical Delaunay triangulation and Voronoi diagram from the 3-D convex hull.

For points on the unit sphere the Delaunay triangles are exactly the faces of
the convex hull and the Voronoi vertices are the outward unit normals of those
faces.  Hull faces with more than three cocircular vertices (cube faces, rings
of equal-area families) are detected with a signed-volume tolerance and
re-triangulated deterministically so that every triangle of such a face shares
one circumcentre.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, cKDTree
from sklearn.base import BaseEstimator

from ._validation import check_points
from .geometry import polygon_areas

COPLANAR_TOL = 1e-12
MERGE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Delaunay triangulation of points on the unit sphere.

    Attributes
    ----------
    points : ndarray (N, 3)
    triangles : ndarray (F, 3)
        Vertex indices, counterclockwise seen from outside.
    adjacency : ndarray (F, 3)
        ``adjacency[t, i]`` is the triangle across the edge opposite vertex
        ``triangles[t, i]``.
    circumcenters : ndarray (F, 3)
        Unit circumcentres (Voronoi vertices).
    circumradii : ndarray (F,)
        Chordal distance from the circumcentre to the farthest vertex.
    face_ids : ndarray (F,)
        Hull face each triangle belongs to; cocircular fans share an id.
    """

    points: np.ndarray
    triangles: np.ndarray
    adjacency: np.ndarray
    circumcenters: np.ndarray
    circumradii: np.ndarray
    face_ids: np.ndarray

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def edges(self) -> np.ndarray:
        """Unique undirected edges ``(i, j)`` with ``i < j``."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.linalg.norm(self.points[e[:, 0]] - self.points[e[:, 1]], axis=1)

    def euler_characteristic(self) -> int:
        return self.n_points - len(self.edges) + len(self.triangles)

    def to_off(self, path) -> None:
        """Write the triangulation as an OFF mesh."""
        lines = ["OFF", f"{self.n_points} {len(self.triangles)} {len(self.edges)}"]
        lines += [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in self.points]
        lines += [f"3 {a} {b} {c}" for a, b, c in self.triangles]
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True, eq=False)
class VoronoiDiagram:
    """Spherical Voronoi cells.

    Attributes
    ----------
    cells : list of ndarray
        Counterclockwise cell vertices per point, duplicates merged.
    areas : ndarray (N,)
    degrees : ndarray (N,)
        Number of distinct cell vertices (edges of the cell polygon).
    mesh_degrees : ndarray (N,)
        Number of Delaunay triangles at each point.  Cocircular fans give
        zero-length Voronoi edges, so this can exceed ``degrees``.
    """

    cells: list
    areas: np.ndarray
    degrees: np.ndarray
    mesh_degrees: np.ndarray

    @property
    def n_cells(self) -> int:
        return len(self.cells)


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def _neighbours(tri: np.ndarray) -> np.ndarray:
    """Triangle across the edge opposite each corner (directed-edge matching)."""
    F = len(tri)
    n = int(tri.max()) + 1
    # edge opposite corner i runs tri[i+1] -> tri[i+2]
    src = np.concatenate([tri[:, 1], tri[:, 2], tri[:, 0]]).astype(np.int64)
    dst = np.concatenate([tri[:, 2], tri[:, 0], tri[:, 1]]).astype(np.int64)
    owner = np.tile(np.arange(F), 3)
    key = src * n + dst
    order = np.argsort(key)
    rev = dst * n + src
    pos = np.searchsorted(key[order], rev)
    if np.any(pos >= len(key)) or np.any(key[order][np.minimum(pos, len(key) - 1)] != rev):
        raise ValueError("hull is not a closed oriented surface")
    nb = owner[order[pos]]
    return nb.reshape(3, F).T


def delaunay(X, coplanar_tol: float = COPLANAR_TOL) -> TriMesh:
    """Delaunay triangulation of points on the sphere.

    Parameters
    ----------
    X : array-like (N, 3) or Configuration
    coplanar_tol : float
        Two adjacent hull triangles whose four vertices span a tetrahedron of
        ``|det| <= coplanar_tol`` are treated as one cocircular face.

    Raises
    ------
    ValueError
        For fewer than 4 points, rank-deficient input, points that are not
        hull vertices or points confined to a closed hemisphere.
    """
    P = check_points(X)
    N = len(P)
    if N < 4:
        raise ValueError(f"a spherical triangulation needs at least 4 points, got {N}")
    centred = P - P.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        raise ValueError("points are coplanar; the convex hull is degenerate")
    hull = ConvexHull(P)
    if len(hull.vertices) != N:
        missing = np.setdiff1d(np.arange(N), hull.vertices)
        raise ValueError(f"{len(missing)} points are not hull vertices (duplicates?), e.g. index {missing[0]}")
    if np.any(hull.equations[:, 3] >= -coplanar_tol):
        raise ValueError("points lie in a closed hemisphere; the hull must contain the origin")
    tri = np.array(hull.simplices, dtype=np.int64)
    a, b, c = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    normal = np.cross(b - a, c - a)
    flip = np.einsum("ij,ij->i", normal, hull.equations[:, :3]) < 0.0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    normal[flip] *= -1.0

    nb = _neighbours(tri)
    F = len(tri)
    # signed volume with the far vertex of each neighbour
    parent = list(range(F))
    far = np.empty((F, 3), dtype=np.int64)
    for i in range(3):
        other = tri[nb[:, i]]
        shared = np.stack([tri[:, (i + 1) % 3], tri[:, (i + 2) % 3]], axis=1)
        mask = (other != shared[:, :1]) & (other != shared[:, 1:])
        far[:, i] = other[np.arange(F), np.argmax(mask, axis=1)]
    vol = np.einsum("ik,ijk->ij", normal, P[far] - a[:, None, :])
    for t, i in zip(*np.nonzero(np.abs(vol) <= coplanar_tol)):
        ra, rb = _find(parent, t), _find(parent, int(nb[t, i]))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([_find(parent, t) for t in range(F)])

    if np.all(roots == np.arange(F)):
        triangles = tri
        face_ids = np.arange(F)
        centers = normal / np.linalg.norm(normal, axis=1, keepdims=True)
    else:
        triangles, face_ids, centers = _refan(P, tri, normal, roots)
    # canonical form: rotate each triangle so its smallest index comes first
    triangles = _rotate_min_first(triangles)
    order = np.lexsort((triangles[:, 2], triangles[:, 1], triangles[:, 0]))
    triangles, face_ids, centers = triangles[order], face_ids[order], centers[order]
    radii = np.max(np.linalg.norm(P[triangles] - centers[:, None, :], axis=2), axis=1)
    return TriMesh(P, triangles, _neighbours(triangles), centers, radii, face_ids)


def _rotate_min_first(tri: np.ndarray) -> np.ndarray:
    k = np.argmin(tri, axis=1)
    idx = (k[:, None] + np.arange(3)[None, :]) % 3
    return np.take_along_axis(tri, idx, axis=1)


def _refan(P, tri, normal, roots):
    """Replace each group of cocircular triangles by a fan from its lowest vertex."""
    out_tri, out_face, out_center = [], [], []
    uniq, inverse = np.unique(roots, return_inverse=True)
    single = np.bincount(inverse) == 1
    keep = single[inverse]
    unit = normal / np.linalg.norm(normal, axis=1, keepdims=True)
    out_tri.append(tri[keep])
    out_face.append(roots[keep])
    out_center.append(unit[keep])
    for g in np.flatnonzero(~single):
        members = np.flatnonzero(inverse == g)
        n = normal[members].sum(axis=0)
        n /= np.linalg.norm(n)
        verts = np.unique(tri[members])
        # order the polygon counterclockwise about its normal
        ref = P[verts].mean(axis=0)
        e1 = P[verts[0]] - ref
        e1 -= e1.dot(n) * n
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        rel = P[verts] - ref
        ang = np.arctan2(rel @ e2, rel @ e1)
        ring = verts[np.argsort(ang, kind="stable")]
        start = int(np.argmin(ring))
        ring = np.roll(ring, -start)
        fan = np.array([(ring[0], ring[j], ring[j + 1]) for j in range(1, len(ring) - 1)])
        out_tri.append(fan)
        out_face.append(np.full(len(fan), uniq[g]))
        out_center.append(np.repeat(n[None, :], len(fan), axis=0))
    return np.vstack(out_tri), np.concatenate(out_face), np.vstack(out_center)


def _corner_walk(mesh: TriMesh):
    """For each point, its incident triangles in counterclockwise order."""
    tri = mesh.triangles
    F = len(tri)
    N = mesh.n_points
    # corner (t, i): vertex v = tri[t, i], next = tri[t, i+1], prev = tri[t, i+2]
    v = tri.reshape(-1)
    nxt = tri[:, [1, 2, 0]].reshape(-1)
    prv = tri[:, [2, 0, 1]].reshape(-1)
    key = v * N + nxt
    order = np.argsort(key)
    # successor of corner (v, b, c) is the corner (v, c, .)
    succ = order[np.searchsorted(key[order], v * N + prv)]
    deg = np.bincount(v, minlength=N)
    first = np.full(N, -1, dtype=np.int64)
    first[v[::-1]] = np.arange(3 * F)[::-1]
    walk = np.full((N, deg.max()), -1, dtype=np.int64)
    cur = first.copy()
    for step in range(deg.max()):
        live = deg > step
        walk[live, step] = cur[live] // 3
        cur[live] = succ[cur[live]]
    return walk, deg


def voronoi(mesh: TriMesh, merge_tol: float = MERGE_TOL) -> VoronoiDiagram:
    """Voronoi diagram dual to a Delaunay mesh.

    Cell vertices are the circumcentres of the triangles around each point in
    counterclockwise order; consecutive circumcentres closer than ``merge_tol``
    are merged.  Areas are angle excesses summed over the fan of triangles
    joining each point to its cell edges, which stays valid for cells larger
    than a hemisphere.
    """
    walk, mesh_deg = _corner_walk(mesh)
    C = mesh.circumcenters
    cells = []
    for p in range(mesh.n_points):
        ring = C[walk[p, :mesh_deg[p]]]
        gap = np.linalg.norm(ring - np.roll(ring, 1, axis=0), axis=1)
        keep = gap > merge_tol
        if not keep.any():
            keep[0] = True
        cells.append(ring[keep])
    deg = np.array([len(c) for c in cells], dtype=np.int64)
    areas = np.zeros(len(cells))
    for d in np.unique(deg):
        idx = np.flatnonzero(deg == d)
        if d < 3:
            continue
        ring = np.stack([cells[i] for i in idx])
        centre = np.broadcast_to(mesh.points[idx, None, :], ring.shape)
        fan = np.stack([centre, ring, np.roll(ring, -1, axis=1)], axis=2).reshape(-1, 3, 3)
        areas[idx] = polygon_areas(fan).reshape(len(idx), d).sum(axis=1)
    return VoronoiDiagram(cells, areas, deg, mesh_deg)


def cell_stats(diagram: VoronoiDiagram) -> dict:
    """Scaled extreme cell areas and the Voronoi degree histogram.

    Returns
    -------
    dict with ``max_area_N``, ``min_area_N``, ``histogram`` (degree -> count)
    and the pentagon/hexagon/heptagon counts ``deg5``, ``deg6``, ``deg7``.
    """
    N = diagram.n_cells
    values, counts = np.unique(diagram.degrees, return_counts=True)
    hist = {int(v): int(c) for v, c in zip(values, counts)}
    return {
        "max_area_N": float(diagram.areas.max() * N),
        "min_area_N": float(diagram.areas.min() * N),
        "histogram": hist,
        "deg5": hist.get(5, 0),
        "deg6": hist.get(6, 0),
        "deg7": hist.get(7, 0),
    }


class SphericalVoronoi(BaseEstimator):
    """Estimator wrapper: ``fit`` tessellates, ``predict`` assigns probes to cells.

    Parameters
    ----------
    coplanar_tol : float
    merge_tol : float

    Attributes
    ----------
    mesh_ : TriMesh
    diagram_ : VoronoiDiagram
    n_points_ : int
    """

    def __init__(self, coplanar_tol: float = COPLANAR_TOL, merge_tol: float = MERGE_TOL):
        self.coplanar_tol = coplanar_tol
        self.merge_tol = merge_tol

    def fit(self, X, y=None):
        self.mesh_ = delaunay(X, coplanar_tol=self.coplanar_tol)
        self.diagram_ = voronoi(self.mesh_, merge_tol=self.merge_tol)
        self.n_points_ = self.mesh_.n_points
        self._tree = cKDTree(self.mesh_.points)
        return self

    def _check_fitted(self):
        if not hasattr(self, "mesh_"):
            raise AttributeError("SphericalVoronoi is not fitted yet; call fit first")

    def predict(self, X) -> np.ndarray:
        """Index of the Voronoi cell containing each probe (nearest generator)."""
        self._check_fitted()
        Q = check_points(X)
        return self._tree.query(Q)[1]

    def transform(self, X) -> np.ndarray:
        """Chordal distance from each probe to its nearest generator."""
        self._check_fitted()
        return self._tree.query(check_points(X))[0]

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).predict(X)

    def stats(self) -> dict:
        self._check_fitted()
        return cell_stats(self.diagram_)
