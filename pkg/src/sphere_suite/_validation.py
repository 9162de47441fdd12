"""Input validation helpers shared by the estimators and public functions."""

from __future__ import annotations

import numbers

import numpy as np

SPHERE_TOL = 1e-6
# a few ulps: rows this close to unit length are left untouched
_UNIT_NOISE = 8.0 * np.finfo(np.float64).eps


class InvalidCardinalityError(ValueError):
    """Raised when a point family is asked for an unsupported size."""


class OffSphereError(ValueError):
    """Raised when input points are not (close to) unit vectors."""


def check_points(X, *, min_points: int = 1, sphere_tol: float = SPHERE_TOL,
                 normalize: bool = True) -> np.ndarray:
    """Validate an array of points on the unit sphere.

    Parameters
    ----------
    X : array-like of shape (n_points, 3)
        Cartesian coordinates.
    min_points : int
        Minimum number of rows required.
    sphere_tol : float
        Maximum allowed deviation of ``|x|`` from 1.
    normalize : bool
        If True, rows whose norm differs from 1 by more than rounding noise
        are rescaled; unit rows are returned bit for bit.

    Returns
    -------
    ndarray of shape (n_points, 3), dtype float64
    """
    if hasattr(X, "points") and not isinstance(X, np.ndarray):
        X = X.points
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ValueError(f"expected an array of shape (n_points, 3), got {X.shape}")
    if X.shape[0] < min_points:
        raise ValueError(f"need at least {min_points} points, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points contain NaN or infinite values")
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > sphere_tol)
    if bad.size:
        i = int(bad[0])
        raise OffSphereError(
            f"point {i} has norm {norms[i]:.3g}, not within {sphere_tol:g} of the unit sphere")
    if normalize:
        off = np.abs(norms - 1.0) > _UNIT_NOISE
        if off.any():
            X = X.copy()
            X[off] /= norms[off, None]
    return X


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise InvalidCardinalityError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int or a Generator into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        seed = 0
    return np.random.default_rng(seed)
