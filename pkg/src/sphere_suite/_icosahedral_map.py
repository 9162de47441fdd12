"""Area preserving map from the flat icosahedron of surface area 4*pi to the sphere.

Each face is cut by its altitudes into six right triangles ``(O, M, V)``: the
face centre, an edge midpoint and a vertex.  A point ``p`` of such a triangle
is described by ``h`` (its distance from ``O`` measured along ``OM``) and ``w``
(its distance from the line ``OM``).  On the sphere the segment ``h = const``
is sent to the great arc through ``A'`` perpendicular to the arc ``c m``,
where ``A'`` is the point at angular distance ``d(h)`` from the face centre
``c``, and ``d`` satisfies ``cos d = (2/sqrt 3) cos psi`` with
``psi = sqrt(3) h^2 / 2 + pi / 6`` (so the image of the sub-triangle
``h' <= h`` keeps its area ``sqrt(3) h^2 / 2``).

Two ways of placing ``p`` on that arc are provided:

``"exact"``
    latitude ``beta`` above the arc ``c m`` with ``sin beta = w / d'(h)``.
    In the frame where ``c m`` is the equator the area element is
    ``cos(beta) d(d) d(beta)``, so this choice has unit Jacobian everywhere.
``"azimuthal"``
    the azimuth ``lambda`` at ``c`` from ``tan lambda = sin(hw/2) /
    (cos(hw/2) - 2 cos(psi)/sqrt 3)``, closed with Napier's rule
    ``tan(rho) = tan(d) / cos(lambda)``.  It matches the exact map on the
    sub-triangle boundaries but is only approximately equal-area inside.
"""

from __future__ import annotations

import numpy as np

EDGE = np.sqrt(4.0 * np.pi) / 75.0 ** 0.25
SQRT3 = np.sqrt(3.0)

_REF = np.array([[0.0, 0.0], [EDGE, 0.0], [EDGE / 2.0, EDGE * SQRT3 / 2.0]])


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def arc_offset(h):
    """Return ``(d, d')``: angular distance of ``A'`` from the face centre and its h-derivative."""
    h = np.asarray(h, dtype=np.float64)
    x = SQRT3 * h * h / 2.0
    one_minus_k = 2.0 * np.sin(x / 2.0) ** 2 + np.sin(x) / SQRT3
    k = 1.0 - one_minus_k
    d = 2.0 * np.arcsin(np.sqrt(one_minus_k / 2.0))
    root = np.sqrt(one_minus_k * (1.0 + k))
    psi = x + np.pi / 6.0
    with np.errstate(invalid="ignore", divide="ignore"):
        dprime = np.where(h > 0.0, 2.0 * h * np.sin(psi) / root, 1.0)
    return d, dprime


def face_coordinates(bary: np.ndarray):
    """Planar sub-triangle coordinates for barycentric weights of shape (p, 3).

    Returns ``(h, w, vertex_slot, other_slot)`` where ``vertex_slot`` indexes
    the nearest face vertex and ``other_slot`` the far end of the nearer edge.
    """
    p = bary @ _REF
    O = _REF.mean(axis=0)
    dist = np.linalg.norm(p[:, None, :] - _REF[None, :, :], axis=-1)
    # ties on altitudes: any consistent choice gives the same image
    vslot = np.argmin(dist, axis=1)
    s1 = (vslot + 1) % 3
    s2 = (vslot + 2) % 3
    rows = np.arange(len(p))
    oslot = np.where(dist[rows, s1] <= dist[rows, s2], s1, s2)
    M = (_REF[vslot] + _REF[oslot]) / 2.0
    u = M - O
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    rel = p - O
    h = np.einsum("ij,ij->i", rel, u)
    w = np.abs(rel[:, 0] * u[:, 1] - rel[:, 1] * u[:, 0])
    return np.maximum(h, 0.0), w, vslot, oslot


def map_to_sphere(corners: np.ndarray, bary: np.ndarray, variant: str = "azimuthal") -> np.ndarray:
    """Map points given by barycentric weights on spherical-icosahedron faces.

    Parameters
    ----------
    corners : ndarray of shape (p, 3, 3)
        Unit vectors of the face vertices for every point (counterclockwise).
    bary : ndarray of shape (p, 3)
        Barycentric weights summing to one.
    variant : {"exact", "azimuthal"}
    """
    if variant not in ("exact", "azimuthal"):
        raise ValueError(f"unknown map variant {variant!r}")
    h, w, vslot, oslot = face_coordinates(bary)
    rows = np.arange(len(h))
    c = _unit(corners.sum(axis=1))
    v = corners[rows, vslot]
    m = _unit(v + corners[rows, oslot])
    t_m = _unit(m - np.einsum("ij,ij->i", m, c)[:, None] * c)
    n_v = np.cross(c, t_m)
    n_v *= np.where(np.einsum("ij,ij->i", n_v, v) < 0.0, -1.0, 1.0)[:, None]
    d, dprime = arc_offset(h)
    if variant == "exact":
        sin_b = np.clip(w / dprime, 0.0, 1.0)
        cos_b = np.sqrt(1.0 - sin_b * sin_b)
        P = cos_b[:, None] * (np.cos(d)[:, None] * c + np.sin(d)[:, None] * t_m) + sin_b[:, None] * n_v
    else:
        k = np.cos(d)
        a = h * w / 2.0
        lam = np.arctan2(np.sin(a), np.cos(a) - k)
        rho = np.arctan2(np.sin(d), np.cos(d) * np.cos(lam))
        P = (np.cos(rho)[:, None] * c
             + np.sin(rho)[:, None] * (np.cos(lam)[:, None] * t_m + np.sin(lam)[:, None] * n_v))
    return _unit(P)
