"""Coordinates, projections, distances and spherical areas.

Points are handled as ``(n, 3)`` float arrays of unit vectors.  Spherical
coordinates use the polar angle ``phi`` measured from the north pole and the
azimuth ``theta`` normalized into ``[0, 2*pi)``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


class UnitPoint(NamedTuple):
    x: float
    y: float
    z: float


class SphCoord(NamedTuple):
    phi: float
    theta: float


def _wrap_azimuth(theta):
    theta = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    return np.where(theta >= TWO_PI, 0.0, theta)


def to_spherical(X) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(phi, theta)`` arrays for unit vectors ``X`` of shape (n, 3)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    z = np.clip(X[:, 2], -1.0, 1.0)
    phi = np.arccos(z)
    rho = np.hypot(X[:, 0], X[:, 1])
    theta = np.where(rho > 0.0, np.arctan2(X[:, 1], X[:, 0]), 0.0)
    return phi, _wrap_azimuth(theta)


def from_spherical(phi, theta) -> np.ndarray:
    """Unit vectors for polar angles ``phi`` and azimuths ``theta``."""
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    s = np.sin(phi)
    return np.stack([s * np.cos(theta), s * np.sin(theta), np.cos(phi)], axis=-1)


def from_height(z, theta) -> np.ndarray:
    """Unit vectors from height ``z = cos(phi)`` and azimuth.

    Using the height directly avoids an arccos/cos round trip, which matters
    for the generators whose defining formulas are stated in ``z``.
    """
    z = np.asarray(z, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=-1)


def convert(p):
    """Convert a single point between Cartesian and spherical coordinates.

    A :class:`SphCoord` is mapped to a :class:`UnitPoint` and anything with three
    components is mapped to a :class:`SphCoord`.  Poles get ``theta = 0``.
    """
    if isinstance(p, SphCoord) or (len(p) == 2):
        phi, theta = p
        x, y, z = from_spherical(phi, theta)
        return UnitPoint(float(x), float(y), float(z))
    v = np.asarray(p, dtype=np.float64)
    v = v / np.linalg.norm(v)
    phi, theta = to_spherical(v[None, :])
    return SphCoord(float(phi[0]), float(theta[0]))


def lambert(u, v=None) -> np.ndarray:
    """Lambert cylindrical equal-area map from ``[0, 1)^2`` to the sphere.

    ``(x, y) -> (sqrt(1-(2y-1)^2) cos 2 pi x, sqrt(1-(2y-1)^2) sin 2 pi x, 2y-1)``.
    Accepts either an ``(n, 2)`` array or two arrays.
    """
    if v is None:
        uv = np.asarray(u, dtype=np.float64)
        u, v = uv[..., 0], uv[..., 1]
    return from_height(2.0 * np.asarray(v, dtype=np.float64) - 1.0,
                       TWO_PI * np.asarray(u, dtype=np.float64))


def lambert_inverse(X) -> np.ndarray:
    """Inverse of :func:`lambert`; returns an ``(n, 2)`` array in ``[0, 1]^2``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    _, theta = to_spherical(X)
    return np.column_stack([theta / TWO_PI, (np.clip(X[:, 2], -1.0, 1.0) + 1.0) / 2.0])


def chordal_distance(a, b):
    """Euclidean distance in R^3 between unit vectors (broadcasts over rows)."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return np.sqrt(np.sum(d * d, axis=-1))


def chord_to_arc(d):
    """Geodesic angle subtended by a chord of length ``d``."""
    return 2.0 * np.arcsin(np.clip(np.asarray(d, dtype=np.float64) / 2.0, 0.0, 1.0))


def arc_to_chord(a):
    return 2.0 * np.sin(np.asarray(a, dtype=np.float64) / 2.0)


def _interior_angles(P: np.ndarray) -> np.ndarray:
    """Interior angles of spherical polygons stacked as ``(m, k, 3)``."""
    prev = np.roll(P, 1, axis=1)
    nxt = np.roll(P, -1, axis=1)
    t_prev = prev - np.sum(prev * P, axis=-1, keepdims=True) * P
    t_next = nxt - np.sum(nxt * P, axis=-1, keepdims=True) * P
    sin_part = np.sum(np.cross(t_next, t_prev) * P, axis=-1)
    cos_part = np.sum(t_next * t_prev, axis=-1)
    return np.mod(np.arctan2(sin_part, cos_part), TWO_PI)


def _check_hemisphere(P: np.ndarray) -> None:
    centre = P.sum(axis=1)
    norm = np.linalg.norm(centre, axis=-1, keepdims=True)
    if np.any(norm[..., 0] <= 0.0):
        raise ValueError("polygon is not contained in an open hemisphere")
    centre = centre / norm
    if np.any(np.einsum("mkj,mj->mk", P, centre) <= 0.0):
        raise ValueError("polygon is not contained in an open hemisphere")


def polygon_areas(P: np.ndarray) -> np.ndarray:
    """Angle-excess areas of ``m`` spherical polygons with ``k`` vertices each.

    ``P`` has shape ``(m, k, 3)``; vertices counterclockwise seen from outside.
    """
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 3 or P.shape[1] < 3:
        raise ValueError("a spherical polygon needs at least 3 vertices")
    _check_hemisphere(P)
    k = P.shape[1]
    area = _interior_angles(P).sum(axis=1) - (k - 2) * np.pi
    # collinear (great-circle) vertex lists give angles of pi and zero excess
    return np.maximum(area, 0.0)


def spherical_polygon_area(vertices: Sequence) -> float:
    """Area in steradians of one spherical polygon (Gauss-Bonnet angle excess).

    Examples
    --------
    >>> round(spherical_polygon_area(np.eye(3)), 12) == round(np.pi / 2, 12)
    True
    """
    P = np.asarray(vertices, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] < 3:
        raise ValueError("a spherical polygon needs at least 3 vertices")
    return float(polygon_areas(P[None, :, :])[0])


def cap_area(phi) -> np.ndarray:
    """Area of the polar cap of angular radius ``phi``."""
    return TWO_PI * (1.0 - np.cos(phi))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed rotation matrix (QR of a Gaussian matrix)."""
    A = rng.standard_normal((3, 3))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about ``axis`` by ``angle``."""
    k = np.asarray(axis, dtype=np.float64)
    k = k / np.linalg.norm(k)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)
