"""Run manifests, report writers and the parameter grids of the mesh-ratio tables."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .generators import canonical_family, icos_pairs_for

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("artifact")
except Exception:  # noqa: BLE001 - running from a source tree
    VERSION = "0.1.0"


@dataclass
class RunManifest:
    """Everything needed to rerun a command and get the same file back."""

    command: str
    argv: list = field(default_factory=list)
    family: str | None = None
    params: dict = field(default_factory=dict)
    grid: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    version: str = VERSION

    def header_lines(self) -> list[str]:
        out = []
        for key, value in asdict(self).items():
            out.append(f"{key}: {json.dumps(value, default=str)}")
        return out


def _open_out(path):
    if path is None or str(path) == "-":
        import sys

        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline=""), True


def write_rows(rows: list[dict], path, fmt: str, manifest: RunManifest | None = None,
               columns=None) -> None:
    """Write dict rows as CSV (manifest as ``#`` comments) or JSON."""
    columns = list(columns or (rows[0].keys() if rows else []))
    fh, close = _open_out(path)
    try:
        if fmt == "json":
            payload = {"manifest": asdict(manifest) if manifest else None,
                       "rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows]}
            fh.write(json.dumps(payload, indent=1) + "\n")
        elif fmt == "csv":
            for line in (manifest.header_lines() if manifest else []):
                fh.write(f"# {line}\n")
            w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({c: _fmt(r.get(c)) for c in columns})
        else:
            raise ValueError(f"unknown format {fmt!r}")
    finally:
        if close:
            fh.close()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return "" if v is None else v


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


# ------------------------------------------------------------------ grids

TABLE_FAMILIES = {1: "gen_spiral", 2: "fibonacci", 3: "zonal_equal_area", 4: "healpix",
                  5: "radial_icosahedral", 6: "cubed_sphere", 7: "octahedral", 8: "icos_equal_area"}

# Which mesh-ratio column the published tables use: the Fibonacci table divides
# the chordal covering radius by the separation, the others the geodesic one.
TABLE_GAMMA = {1: "gamma_arc", 2: "gamma", 3: "gamma_arc", 4: "gamma_arc", 5: "gamma_arc",
               6: "gamma_arc", 7: "gamma_arc", 8: "gamma_arc"}

_N_GRID = [10, 20, 30, 40, 50, 100, 200, 300, 400, 500, 1000, 2000, 3000, 4000, 5000,
           10000, 20000, 30000, 40000, 50000, 100000, 200000, 300000, 500000]

TABLE_GRIDS = {
    1: [{"N": n} for n in _N_GRID],
    2: [{"N": n + 1} for n in _N_GRID],
    3: [{"N": n} for n in _N_GRID],
    4: [{"k": k} for k in [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25, 30, 35, 40, 45, 50,
                           60, 70, 80, 90, 100, 150]],
    5: [{"k": k} for k in [1, 2, 3, 4, 5, 6, 7, 10, 15, 20, 30, 40, 50, 60, 70, 100, 150, 200]],
    6: [{"k": k} for k in [2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25, 30, 35, 40, 45, 50, 60,
                           70, 80, 90, 100, 150, 200]],
    7: [{"k": k} for k in [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25, 30, 40, 50, 60, 70,
                           80, 90, 100, 200, 300, 400]],
    8: [{"m": m, "n": n} for m, n in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1), (4, 1),
                                      (5, 2), (7, 1), (7, 5), (12, 4), (16, 3), (16, 7), (19, 6),
                                      (19, 18), (31, 21), (37, 27), (40, 33), (42, 40), (65, 50),
                                      (90, 75), (100, 100), (131, 100), (145, 115)]],
}


def params_size(family: str, params: dict) -> int:
    """Number of points a parameter set produces."""
    family = canonical_family(family)
    if "N" in params and params["N"] is not None:
        return int(params["N"])
    k = params.get("k")
    if family == "healpix":
        return 12 * k * k
    if family == "radial_icosahedral":
        return 10 * k * k + 2
    if family == "cubed_sphere":
        return 6 * k * k - 12 * k + 8
    if family == "octahedral":
        return 4 * k * k + 2
    if family == "icos_equal_area":
        m, n = params["m"], params.get("n", 0)
        return 10 * (m * m + m * n + n * n) + 2
    if family == "fibonacci_lattice":
        from .generators import fibonacci_numbers

        return fibonacci_numbers(k)[1]
    raise ValueError(f"cannot size {family} from {params}")


def table_grid(table: int, nmax: int | None = None) -> tuple[str, list[dict]]:
    if table not in TABLE_GRIDS:
        raise ValueError(f"--table must be one of 1..8, got {table}")
    family = TABLE_FAMILIES[table]
    grid = [p for p in TABLE_GRIDS[table] if nmax is None or params_size(family, p) <= nmax]
    return family, grid


def admissible_grid(family: str, nmax: int, count: int = 20, nmin: int = 10) -> list[dict]:
    """About ``count`` log-spaced admissible parameter sets with ``N <= nmax``."""
    family = canonical_family(family)
    targets = np.unique(np.round(np.geomspace(max(nmin, 4), nmax, count)).astype(int))
    out = []
    for t in targets:
        if family in ("gen_spiral", "hammersley", "zonal_equal_area", "random"):
            p = {"N": int(t)}
        elif family == "fibonacci":
            p = {"N": int(t) if t % 2 else int(t) - 1}
        elif family == "healpix":
            p = {"k": max(1, int(round(math.sqrt(t / 12.0))))}
        elif family == "radial_icosahedral":
            p = {"k": max(1, int(round(math.sqrt((t - 2) / 10.0))))}
        elif family == "octahedral":
            p = {"k": max(1, int(round(math.sqrt((t - 2) / 4.0))))}
        elif family == "cubed_sphere":
            p = {"k": max(2, int(round(1.0 + math.sqrt(max(t - 2, 0) / 6.0))))}
        elif family == "icos_equal_area":
            m = max(1, int(round(math.sqrt((t - 2) / 10.0))))
            pairs = icos_pairs_for(10 * m * m + 2)
            p = {"m": pairs[0][0], "n": pairs[0][1]}
        else:
            raise ValueError(f"no automatic grid for family {family}")
        if params_size(family, p) <= nmax and p not in out:
            out.append(p)
    return out
