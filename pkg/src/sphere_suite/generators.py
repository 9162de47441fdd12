"""Point configurations on the unit sphere.

Every generator returns a :class:`Configuration` in a documented canonical
order so that deterministic families serialize bit-identically:

* ``gen_spiral``, ``fibonacci``, ``fibonacci_lattice``, ``hammersley``: by index;
* ``zonal_equal_area``, ``healpix``: north to south, ascending azimuth in a ring;
* polyhedral families: by (face id, lattice index) with the first face that
  contains a shared point keeping it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _icosahedral_map, _polyhedra
from ._validation import (InvalidCardinalityError, OffSphereError, check_points,
                          check_positive_int, check_random_state)
from .geometry import TWO_PI, from_height, lambert

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
INV_GOLDEN = GOLDEN - 1.0

FAMILIES = ("gen_spiral", "fibonacci", "fibonacci_lattice", "hammersley", "zonal_equal_area",
            "healpix", "radial_icosahedral", "cubed_sphere", "octahedral", "icos_equal_area",
            "random", "external")

ALIASES = {"zonal": "zonal_equal_area", "spiral": "gen_spiral", "fib": "fibonacci",
           "icosahedral": "radial_icosahedral", "cube": "cubed_sphere", "oct": "octahedral",
           "eq_icos": "icos_equal_area", "rand": "random"}


@dataclass(frozen=True, eq=False)
class Configuration:
    """An ordered set of unit vectors with provenance.

    Attributes
    ----------
    points : ndarray of shape (N, 3)
    family : str
    params : dict
        Family parameters (``N``, ``k``, ``m``, ``n`` ...).
    seed : int or None
    """

    points: np.ndarray
    family: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def rotated(self, R: np.ndarray) -> "Configuration":
        return Configuration(self.points @ np.asarray(R).T, self.family, dict(self.params), self.seed)


def _config(points, family, seed=None, **params):
    return Configuration(points, family, params, seed)


def _require_min(N, name="N", minimum=2):
    return check_positive_int(N, name, minimum)


def gen_spiral(N: int) -> Configuration:
    """Generalized spiral points: ``h_k = 1 - (2k-1)/N``, ``theta_k = sqrt(N pi) phi_k``."""
    N = _require_min(N)
    k = np.arange(1, N + 1, dtype=np.float64)
    h = 1.0 - (2.0 * k - 1.0) / N
    theta = np.mod(math.sqrt(N * math.pi) * np.arccos(h), TWO_PI)
    return _config(from_height(h, theta), "gen_spiral", N=N)


def fibonacci(N: int) -> Configuration:
    """Fibonacci spiral points for odd ``N = 2M + 1``.

    Heights ``2i/N`` and azimuths ``2 pi i / golden`` for ``i = -M..M``; the
    points are symmetric about the equator up to azimuth negation.
    """
    N = _require_min(N, minimum=3)
    if N % 2 == 0:
        raise InvalidCardinalityError(f"fibonacci requires odd N = 2M+1, got {N}")
    M = (N - 1) // 2
    i = np.arange(-M, M + 1)
    # fractional part first keeps the azimuth accurate for large |i|
    frac = np.mod(i * INV_GOLDEN, 1.0)
    return _config(from_height(2.0 * i / N, TWO_PI * frac), "fibonacci", N=N)


def fibonacci_numbers(k: int) -> tuple[int, int]:
    """Return ``(F_{k-1}, F_k)`` with ``F_1 = F_2 = 1``."""
    a, b = 0, 1
    for _ in range(k - 1):
        a, b = b, a + b
    return a, b


def fibonacci_lattice(k: int | None = None, mode: str = "rational", N: int | None = None) -> Configuration:
    """Fibonacci lattices on the unit square mapped by the Lambert projection.

    ``mode="rational"`` gives ``({i F_{k-1}/F_k}, i/F_k)`` for ``i = 0..F_k - 1``;
    ``mode="irrational"`` gives ``({i / golden}, i/N)`` for ``i = 0..N``
    (``N + 1`` points, both poles included).
    """
    if mode == "rational":
        k = check_positive_int(k, "k", 3)
        f_prev, f_k = fibonacci_numbers(k)
        i = np.arange(f_k)
        x = (i * f_prev % f_k) / f_k
        y = i / f_k
        return _config(lambert(x, y), "fibonacci_lattice", k=k, mode=mode, N=f_k)
    if mode == "irrational":
        N = _require_min(N)
        i = np.arange(N + 1)
        x = np.mod(i * INV_GOLDEN, 1.0)
        return _config(lambert(x, i / N), "fibonacci_lattice", mode=mode, N=N)
    raise ValueError(f"mode must be 'rational' or 'irrational', got {mode!r}")


def van_der_corput(k, base: int = 2) -> np.ndarray:
    """Radical inverse of the integers ``k`` in ``base``."""
    k = np.array(k, dtype=np.int64, ndmin=1)
    out = np.zeros(k.shape, dtype=np.float64)
    scale = 1.0 / base
    while np.any(k > 0):
        out += (k % base) * scale
        k = k // base
        scale /= base
    return out


def hammersley(N: int) -> Configuration:
    """Hammersley nodes: azimuth ``2 pi x_k``, height ``1 - 2 y_k`` with ``y_k = (2k-1)/(2N)``."""
    N = _require_min(N)
    k = np.arange(1, N + 1)
    x = van_der_corput(k, 2)
    y = (2.0 * k - 1.0) / (2.0 * N)
    return _config(from_height(1.0 - 2.0 * y, TWO_PI * x), "hammersley", N=N)


def _round_half_up(x):
    return math.floor(x + 0.5)


def zonal_partition(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Collar boundaries and cell counts of the zonal equal-area partition.

    Returns ``(phi, counts)`` where ``phi`` has the ``n + 3`` boundary polar
    angles ``0 = phi_0 < phi_1 < ... < phi_{n+2} = pi`` and ``counts`` the
    ``n + 2`` cell counts per zone (both caps included, summing to ``N``).
    """
    N = _require_min(N)
    if N == 2:
        return np.array([0.0, np.pi / 2.0, np.pi]), np.array([1, 1])
    phi_c = math.acos(1.0 - 2.0 / N)
    delta_i = math.sqrt(4.0 * math.pi / N)
    n_ideal = (math.pi - 2.0 * phi_c) / delta_i
    n = max(1, _round_half_up(n_ideal))
    delta_f = (math.pi - 2.0 * phi_c) / n
    counts = [1]
    a = 0.0
    for j in range(2, n + 2):
        area = TWO_PI * (math.cos(phi_c + (j - 2) * delta_f) - math.cos(phi_c + (j - 1) * delta_f))
        ideal = N * area / (4.0 * math.pi)
        y = _round_half_up(ideal + a)
        a += ideal - y
        counts.append(y)
    counts.append(1)
    counts = np.array(counts, dtype=np.int64)
    cum = np.cumsum(counts)
    phi = np.empty(n + 3)
    phi[0] = 0.0
    phi[1:-1] = np.arccos(1.0 - 2.0 * cum[:-1] / N)
    phi[-1] = np.pi
    return phi, counts


def _aligned_offsets(counts) -> np.ndarray:
    """Cumulative collar rotations (in turns) that stagger neighbouring collars.

    Each step adds ``(1/a - 1/b)/2 + gcd(a, b)/(2ab)`` for consecutive collar
    counts ``a`` and ``b``, which maximizes the smallest azimuthal gap between
    the cell centres of adjacent collars.
    """
    out = np.zeros(len(counts))
    off = 0.0
    for j in range(2, len(counts) - 1):
        a, b = int(counts[j - 1]), int(counts[j])
        off = (off + (1.0 / a - 1.0 / b) / 2.0 + math.gcd(a, b) / (2.0 * a * b)) % 1.0
        out[j] = off
    return out


def zonal_equal_area(N: int, seed: int | None = 0, shift: bool = True,
                     offsets: str | None = None) -> Configuration:
    """Centres of the zonal equal-area partition into ``N`` cells.

    Parameters
    ----------
    N : int
    seed : int, optional
        Seed for the random collar rotations.
    shift : bool
        ``False`` is shorthand for ``offsets="none"``.
    offsets : {"random", "aligned", "none"}, optional
        ``"random"`` rotates every collar by an independent uniform angle in
        ``[0, 2 pi)``; ``"aligned"`` uses the deterministic staggering of
        :func:`_aligned_offsets`; ``"none"`` leaves all collars unrotated.
    """
    N = _require_min(N)
    if offsets is None:
        offsets = "random" if shift else "none"
    if offsets not in ("random", "aligned", "none"):
        raise ValueError(f"offsets must be 'random', 'aligned' or 'none', got {offsets!r}")
    phi, counts = zonal_partition(N)
    if offsets == "aligned":
        turns = _aligned_offsets(counts)
    elif offsets == "random":
        rng = check_random_state(seed)
        turns = np.zeros(len(counts))
        turns[1:-1] = rng.uniform(0.0, 1.0, len(counts) - 2)
    else:
        turns = np.zeros(len(counts))
    rings = [np.array([[0.0, 0.0, 1.0]])]
    for j in range(1, len(counts) - 1):
        y = int(counts[j])
        theta = np.sort(np.mod(TWO_PI * (turns[j] + (np.arange(y) + 0.5) / y), TWO_PI))
        mid = 0.5 * (phi[j] + phi[j + 1])
        rings.append(from_height(np.full(y, math.cos(mid)), theta))
    if len(counts) > 1:
        rings.append(np.array([[0.0, 0.0, -1.0]]))
    return _config(np.vstack(rings), "zonal_equal_area", seed=seed if offsets == "random" else None,
                   N=N, offsets=offsets)


def healpix(k: int) -> Configuration:
    """HEALPix pixel centres for resolution ``k`` (``N = 12 k^2``)."""
    k = check_positive_int(k, "k", 1)
    rings = []
    for i in range(1, k + 1):
        j = np.arange(1, 4 * i + 1)
        rings.append((1.0 - i * i / (3.0 * k * k), np.pi / (2.0 * i) * (j - 0.5)))
    for i in range(k + 1, 3 * k):
        s = (i - k + 1) % 2
        j = np.arange(1, 4 * k + 1)
        rings.append((4.0 / 3.0 - 2.0 * i / (3.0 * k), np.pi / (2.0 * k) * (j - s / 2.0)))
    for i in range(k, 0, -1):
        j = np.arange(1, 4 * i + 1)
        rings.append((-(1.0 - i * i / (3.0 * k * k)), np.pi / (2.0 * i) * (j - 0.5)))
    pts = np.vstack([from_height(np.full(len(t), z), t) for z, t in rings])
    return _config(pts, "healpix", k=k, N=12 * k * k)


def _icosahedral_points(m: int, n: int):
    V, faces = _polyhedra.icosahedron()
    bary = _polyhedra.caspar_klug_face(m, n)
    ids, weights = _polyhedra.dedup_face_lattice(faces, bary)
    return V, ids, weights, m * m + m * n + n * n


def radial_icosahedral(k: int) -> Configuration:
    """Triangular ``k``-subdivision of the icosahedron faces, radially projected."""
    k = check_positive_int(k, "k", 1)
    V, ids, weights, T = _icosahedral_points(k, 0)
    P = np.einsum("pi,pij->pj", weights / T, V[ids])
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    return _config(P, "radial_icosahedral", k=k, N=10 * k * k + 2)


def icos_equal_area(m: int, n: int = 0, variant: str = "azimuthal") -> Configuration:
    """Caspar-Klug ``(m, n)`` icosahedral lattice under the equal-area map.

    ``N = 10 (m^2 + mn + n^2) + 2``.  ``variant="azimuthal"`` closes the map
    with the azimuth formula and Napier's rule; ``variant="exact"`` uses the
    unit-Jacobian placement.  See :mod:`sphere_suite._icosahedral_map`.
    """
    m = check_positive_int(m, "m", 0)
    n = check_positive_int(n, "n", 0)
    if m == 0 and n == 0:
        raise InvalidCardinalityError("icos_equal_area requires (m, n) != (0, 0)")
    V, ids, weights, T = _icosahedral_points(m, n)
    P = _icosahedral_map.map_to_sphere(V[ids], weights / T, variant)
    # lattice vertices sit exactly on icosahedron vertices
    at_vertex = weights.max(axis=1) == T
    P[at_vertex] = V[ids[at_vertex, np.argmax(weights[at_vertex], axis=1)]]
    return _config(P, "icos_equal_area", m=m, n=n, N=10 * T + 2, variant=variant)


def cubed_sphere(k: int, grid: str = "equiangular") -> Configuration:
    """``k x k`` grids on the cube faces, radially projected (``N = 6k^2 - 12k + 8``).

    ``grid="equiangular"`` spaces the grid lines uniformly in the angle seen
    from the centre (face coordinate ``tan(pi t / 4)`` for ``t`` uniform in
    ``[-1, 1]``); ``grid="uniform"`` spaces them uniformly on the face.
    """
    k = check_positive_int(k, "k", 2)
    if grid not in ("equiangular", "uniform"):
        raise ValueError(f"grid must be 'equiangular' or 'uniform', got {grid!r}")
    P = _polyhedra.cube_lattice(k) / float(k - 1)
    if grid == "equiangular":
        P = np.tan(np.pi / 4.0 * P)
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    return _config(P, "cubed_sphere", k=k, N=6 * k * k - 12 * k + 8, grid=grid)


def octahedral_map(X, Y, Z, edge: float) -> np.ndarray:
    """Equal-area map from the octahedron ``|X|+|Y|+|Z| = edge/sqrt 2`` to the sphere."""
    X, Y, Z = (np.asarray(a, dtype=np.float64) for a in (X, Y, Z))
    uz = 2.0 * Z / edge ** 2 * (math.sqrt(2.0) * edge - np.abs(Z))
    r = np.sqrt(np.maximum(0.0, 1.0 - uz * uz))
    denom = np.abs(X) + np.abs(Y)
    with np.errstate(invalid="ignore", divide="ignore"):
        ang = np.where(denom > 0.0, np.pi * np.abs(Y) / (2.0 * denom), 0.0)
    sx = np.where(X < 0.0, -1.0, 1.0)
    sy = np.where(Y < 0.0, -1.0, 1.0)
    return np.stack([sx * r * np.cos(ang), sy * r * np.sin(ang), uz], axis=-1)


def octahedral(k: int) -> Configuration:
    """Vertices of the equal-area octahedral partition (``N = 4k^2 + 2``)."""
    k = check_positive_int(k, "k", 1)
    edge = math.sqrt(2.0 * math.pi) / 3.0 ** 0.25
    lat = _polyhedra.octahedral_lattice(k).astype(np.float64)
    scale = edge / (k * math.sqrt(2.0))
    P = octahedral_map(lat[:, 0] * scale, lat[:, 1] * scale, lat[:, 2] * scale, edge)
    return _config(P, "octahedral", k=k, N=4 * k * k + 2)


def random_uniform(N: int, seed: int | None = 0) -> Configuration:
    """I.i.d. uniform points: height uniform in [-1, 1], azimuth uniform in [0, 2 pi)."""
    N = _require_min(N)
    rng = check_random_state(seed)
    z = rng.uniform(-1.0, 1.0, N)
    theta = rng.uniform(0.0, TWO_PI, N)
    return _config(from_height(z, theta), "random", seed=seed, N=N)


def load_external(path, format: str | None = None, sphere_tol: float = 1e-6) -> Configuration:
    """Read an ``x,y,z`` point file (CSV or JSON).

    Rows within ``sphere_tol`` of the unit sphere are renormalized; anything
    else raises :class:`OffSphereError`.  Malformed rows raise ``ValueError``
    naming the line.
    """
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    rows = []
    if format == "csv":
        with path.open(newline="") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                parts = [p for p in text.replace(",", " ").split()]
                try:
                    if len(parts) != 3:
                        raise ValueError
                    rows.append([float(p) for p in parts])
                except ValueError:
                    if not rows and lineno == 1 and _is_header(parts):
                        continue
                    raise ValueError(f"{path}:{lineno}: expected three numbers, got {text!r}") from None
    elif format == "json":
        data = json.loads(path.read_text())
        if isinstance(data, dict):
            data = data.get("points", data)
        for idx, row in enumerate(data):
            try:
                if len(row) != 3:
                    raise ValueError
                rows.append([float(v) for v in row])
            except (TypeError, ValueError):
                raise ValueError(f"{path}: point {idx}: expected three numbers, got {row!r}") from None
    else:
        raise ValueError(f"unknown format {format!r}")
    if not rows:
        raise ValueError(f"{path}: no points found")
    pts = np.array(rows)
    try:
        pts = check_points(pts, sphere_tol=sphere_tol)
    except OffSphereError as exc:
        raise OffSphereError(f"{path}: {exc}") from None
    return _config(pts, "external", N=len(pts), source=str(path))


def _is_header(parts) -> bool:
    return all(p.strip().lower() in ("x", "y", "z") for p in parts)


def write_points(config, path, format: str = "csv", header: list[str] | None = None) -> None:
    """Write points in canonical order; CSV rows use 17 significant digits."""
    path = Path(path)
    pts = np.asarray(getattr(config, "points", config))
    if format == "csv":
        with path.open("w", newline="") as fh:
            for line in header or []:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            for x, y, z in pts:
                w.writerow([f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])
    elif format == "json":
        payload = {"points": pts.tolist()}
        if header:
            payload["manifest"] = header
        path.write_text(json.dumps(payload, indent=1))
    else:
        raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------- dispatch

def cardinality_rule(family: str) -> str:
    return {
        "gen_spiral": "N >= 2", "hammersley": "N >= 2", "zonal_equal_area": "N >= 2",
        "random": "N >= 2", "fibonacci": "odd N = 2M+1 >= 3",
        "fibonacci_lattice": "N = F_k (rational) or N + 1 points (irrational)",
        "healpix": "N = 12k²", "radial_icosahedral": "N = 10k²+2",
        "cubed_sphere": "N = 6k²-12k+8", "octahedral": "N = 4k²+2",
        "icos_equal_area": "N = 10(m²+mn+n²)+2",
    }.get(family, "")


def canonical_family(name: str) -> str:
    name = name.strip().lower().replace("-", "_")
    name = ALIASES.get(name, name)
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    return name


def _solve_k(N, family, fn):
    for k in range(1, int(math.isqrt(max(N, 1))) + 2):
        if fn(k) == N:
            return k
    raise InvalidCardinalityError(f"{family} requires {cardinality_rule(family)}; got N = {N}")


def icos_pairs_for(N: int) -> list[tuple[int, int]]:
    """All ``(m, n)`` with ``m >= n >= 0`` and ``10(m^2+mn+n^2)+2 = N``."""
    if (N - 2) % 10 or N < 12:
        return []
    T = (N - 2) // 10
    out = []
    for n in range(0, math.isqrt(T) + 1):
        for m in range(n, math.isqrt(T) + 1):
            if m * m + m * n + n * n == T:
                out.append((m, n))
    return out


def generate(family: str, *, N: int | None = None, k: int | None = None, m: int | None = None,
             n: int | None = None, seed: int | None = 0, shift: bool = True,
             offsets: str | None = None, mode: str = "rational", variant: str = "azimuthal",
             grid: str = "equiangular") -> Configuration:
    """Build a configuration from a family name and either ``N`` or its native parameters."""
    family = canonical_family(family)
    if family == "gen_spiral":
        return gen_spiral(N)
    if family == "fibonacci":
        return fibonacci(N)
    if family == "fibonacci_lattice":
        return fibonacci_lattice(k, mode=mode, N=N)
    if family == "hammersley":
        return hammersley(N)
    if family == "zonal_equal_area":
        return zonal_equal_area(N, seed=seed, shift=shift, offsets=offsets)
    if family == "random":
        return random_uniform(N, seed=seed)
    if family == "healpix":
        k = k if k is not None else _solve_k(N, family, lambda q: 12 * q * q)
        cfg = healpix(k)
    elif family == "radial_icosahedral":
        k = k if k is not None else _solve_k(N, family, lambda q: 10 * q * q + 2)
        cfg = radial_icosahedral(k)
    elif family == "cubed_sphere":
        k = k if k is not None else _solve_k(N, family, lambda q: 6 * q * q - 12 * q + 8 if q >= 2 else -1)
        cfg = cubed_sphere(k, grid=grid)
    elif family == "octahedral":
        k = k if k is not None else _solve_k(N, family, lambda q: 4 * q * q + 2)
        cfg = octahedral(k)
    elif family == "icos_equal_area":
        if m is None:
            pairs = icos_pairs_for(N if N is not None else -1)
            if not pairs:
                raise InvalidCardinalityError(
                    f"icos_equal_area requires {cardinality_rule(family)}; got N = {N}")
            m, n = pairs[0]
        cfg = icos_equal_area(m, n or 0, variant=variant)
    else:
        raise ValueError("external configurations are loaded with load_external")
    if N is not None and cfg.N != N:
        raise InvalidCardinalityError(
            f"{family} requires {cardinality_rule(family)}; parameters give N = {cfg.N}, not {N}")
    return cfg
