"""Polyhedral skeletons and exact face lattices for the polyhedral families.

Every lattice point is identified by an integer key before any floating point
position is computed, so points shared by neighbouring faces are merged
exactly ("first face wins") regardless of rounding.
"""

from __future__ import annotations

import numpy as np


def _orient_ccw(vertices: np.ndarray, faces) -> np.ndarray:
    faces = np.array(faces, dtype=np.int64)
    a, b, c = (vertices[faces[:, i]] for i in range(3))
    flip = np.einsum("ij,ij->i", np.cross(b - a, c - a), a + b + c) < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return faces


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    """Unit icosahedron with a vertex at the north pole.

    One vertex adjacent to the north pole sits at azimuth 0.  Faces are
    returned counterclockwise as seen from outside.
    """
    z = 1.0 / np.sqrt(5.0)
    r = 2.0 / np.sqrt(5.0)
    upper = [(r * np.cos(2 * np.pi * j / 5), r * np.sin(2 * np.pi * j / 5), z) for j in range(5)]
    lower = [(r * np.cos(2 * np.pi * j / 5 + np.pi / 5), r * np.sin(2 * np.pi * j / 5 + np.pi / 5), -z)
             for j in range(5)]
    V = np.array([(0.0, 0.0, 1.0)] + upper + lower + [(0.0, 0.0, -1.0)])
    north, south = 0, 11
    U = lambda j: 1 + j % 5  # noqa: E731
    D = lambda j: 6 + j % 5  # noqa: E731
    faces = []
    for j in range(5):
        faces.append((north, U(j), U(j + 1)))
    for j in range(5):
        faces.append((U(j), D(j), U(j + 1)))
        faces.append((U(j + 1), D(j), D(j + 1)))
    for j in range(5):
        faces.append((south, D(j + 1), D(j)))
    return V, _orient_ccw(V, faces)


def caspar_klug_face(m: int, n: int) -> np.ndarray:
    """Integer barycentric numerators of the (m, n) lattice inside one face.

    The face spanned by ``e_mn = m e1 + n e2`` and its rotation by 60 degrees is
    laid on the triangular lattice generated by ``e1 = (1, 0)`` and
    ``e2 = (1/2, sqrt(3)/2)``.  Returns an ``(p, 3)`` array of numerators
    ``(T - U - V, U, V)`` with common denominator ``T = m^2 + mn + n^2``,
    sorted by ``(U, V)``.
    """
    T = m * m + m * n + n * n
    rows = []
    for a in range(-n, m + 1):
        for b in range(0, m + n + 1):
            U = a * (m + n) + b * n
            V = b * m - a * n
            if U >= 0 and V >= 0 and U + V <= T:
                rows.append((T - U - V, U, V))
    rows.sort(key=lambda r: (r[1], r[2]))
    return np.array(rows, dtype=np.int64)


def dedup_face_lattice(faces: np.ndarray, bary: np.ndarray):
    """Merge face-lattice points shared between faces.

    Returns ``(vertex_ids, weights)``: for every unique point, the three face
    vertex ids and the matching integer barycentric numerators, in canonical
    (face id, lattice index) order.
    """
    seen = set()
    ids, weights = [], []
    for face in faces:
        for w in bary:
            key = tuple(sorted((int(v), int(x)) for v, x in zip(face, w) if x != 0))
            if key in seen:
                continue
            seen.add(key)
            ids.append(face)
            weights.append(w)
    return np.array(ids, dtype=np.int64), np.array(weights, dtype=np.int64)


OCTAHEDRON_FACE_SIGNS = [(1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1),
                         (1, 1, -1), (-1, 1, -1), (-1, -1, -1), (1, -1, -1)]


def octahedral_lattice(k: int) -> np.ndarray:
    """Signed integer lattice ``(sx*i, sy*j, sz*(k-i-j))`` over the 8 faces."""
    seen = set()
    out = []
    for sx, sy, sz in OCTAHEDRON_FACE_SIGNS:
        for i in range(k + 1):
            for j in range(k + 1 - i):
                key = (sx * i, sy * j, sz * (k - i - j))
                if key in seen:
                    continue
                seen.add(key)
                out.append(key)
    return np.array(out, dtype=np.int64)


CUBE_FACES = [(2, 1), (2, -1), (0, 1), (0, -1), (1, 1), (1, -1)]


def cube_lattice(k: int) -> np.ndarray:
    """Integer coordinates of the k x k grid on each cube face, scaled by k-1.

    Face coordinates run over ``2a - (k-1)`` for ``a = 0..k-1`` and the fixed
    axis is ``+-(k-1)``.
    """
    q = k - 1
    seen = set()
    out = []
    for axis, sign in CUBE_FACES:
        others = [ax for ax in range(3) if ax != axis]
        for a in range(k):
            for b in range(k):
                p = [0, 0, 0]
                p[axis] = sign * q
                p[others[0]] = 2 * a - q
                p[others[1]] = 2 * b - q
                key = tuple(p)
                if key in seen:
                    continue
                seen.add(key)
                out.append(key)
    return np.array(out, dtype=np.int64)
