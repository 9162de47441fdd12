"""Acceptance criteria, each run at its stated tolerance.

Every criterion prints one ``PASS`` or ``FAIL`` line (plus indented details)
and then asserts.  Run ``python3 tests/test_acceptance.py`` for the summary
without pytest, or ``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import subtriangle_area_mc  # noqa: E402
from reference_tables import (CUBED_SPHERE, FIBONACCI, HEALPIX, ICOS_EQUAL_AREA, OCTAHEDRAL,  # noqa: E402
                              RADIAL_ICOSAHEDRAL, SPIRAL, ZONAL)
from sphere_suite import _icosahedral_map, _polyhedra  # noqa: E402
from sphere_suite.energy import (KernelSpec, continuous_value, discrete_energies, discrete_energy,  # noqa: E402
                                 l2_discrepancy_monte_carlo, normalize, stolarsky_l2_discrepancy)
from sphere_suite.generators import (FAMILIES, fibonacci, fibonacci_lattice, gen_spiral, generate,  # noqa: E402
                                     octahedral, random_uniform, zonal_equal_area)
from sphere_suite.geometry import spherical_polygon_area  # noqa: E402
from sphere_suite.io import TABLE_FAMILIES, TABLE_GAMMA, TABLE_GRIDS, params_size  # noqa: E402
from sphere_suite.metrics import (covering_radius, covering_radius_probe, octahedral_mesh_bound,  # noqa: E402
                                  octahedral_separation_bound, quality, separation, separation_bruteforce)
from sphere_suite.optimizer import EnergyMinimizer, energy_gradient  # noqa: E402
from sphere_suite.tessellation import delaunay, voronoi  # noqa: E402

JOBS = os.cpu_count() or 1
GOLDEN = {1: SPIRAL, 2: FIBONACCI, 3: ZONAL, 4: HEALPIX, 5: RADIAL_ICOSAHEDRAL, 6: CUBED_SPHERE,
          7: OCTAHEDRAL, 8: ICOS_EQUAL_AREA}
ENERGY_GRID = [1000, 2000, 5000, 10_000, 20_000, 25_000, 30_000, 35_000, 40_000, 45_000, 50_000]


def _key(table, params):
    if table == 8:
        return (params["m"], params["n"])
    return params.get("N", params.get("k"))


def _report(number, title, ok, details=()):
    lines = [f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"]
    lines += [f"    {d}" for d in details]
    return "\n".join(lines)


def _emit(capsys, text):
    if capsys is None:
        print(text)
    else:
        with capsys.disabled():
            print("\n" + text)


def _table_mismatches(table, nmax, tol, **kw):
    family = TABLE_FAMILIES[table]
    bad, checked = [], 0
    for params in TABLE_GRIDS[table]:
        if params_size(family, params) > nmax:
            continue
        rep = quality(generate(family, **params, **kw), with_cells=False)
        got = getattr(rep, TABLE_GAMMA[table])
        want = GOLDEN[table][_key(table, params)]
        checked += 1
        if not abs(got - want) <= tol:
            bad.append(f"table {table} {params}: got {got:.7f}, published {want:.6f}, "
                       f"diff {got - want:+.2e}")
    return checked, bad


# ------------------------------------------------------------- criteria

def criterion_1():
    limits = {1: 50_000, 2: 50_001, 4: 12 * 50 ** 2, 5: 10 * 50 ** 2 + 2, 6: 6 * 50 ** 2 - 12 * 50 + 8,
              7: 4 * 100 ** 2 + 2}
    details, total = [], 0
    for table, nmax in limits.items():
        n, bad = _table_mismatches(table, nmax, 1e-4)
        total += n
        details += bad
    return not details, [f"{total} table entries checked at 1e-4"] + details


def criterion_2():
    details, n = [], 0
    for seed in range(5):
        checked, bad = _table_mismatches(3, 50_000, 0.02, seed=seed)
        n += checked
        details += [f"seed {seed}: {b}" for b in bad]
    a = zonal_equal_area(5000, shift=False).points
    b = zonal_equal_area(5000, shift=False).points
    stable = float(np.abs(a - b).max())
    ga = quality(a, with_cells=False).gamma_arc
    gb = quality(b, with_cells=False).gamma_arc
    if not (stable <= 1e-12 and abs(ga - gb) <= 1e-12):
        details.append(f"no-shift runs differ: points {stable:.2e}, mesh ratio {abs(ga - gb):.2e}")
    _, aligned = _table_mismatches(3, 50_000, 0.02, offsets="aligned")
    info = [f"{n} (seed, N) pairs checked at 0.02; no-shift reruns identical to {stable:.1e}",
            f"info: deterministic aligned collar offsets give {len(aligned)} mismatches"]
    return not details, info + details


def _face_area(variant, face=0, n=4000):
    V, F = _polyhedra.icosahedron()
    corners = V[F[face]]
    t = np.linspace(0.0, 1.0, n + 1)[:-1, None]
    e = np.eye(3)
    bary = np.vstack([e[i] * (1 - t) + e[(i + 1) % 3] * t for i in range(3)])
    img = _icosahedral_map.map_to_sphere(np.broadcast_to(corners, (len(bary), 3, 3)).copy(), bary, variant)
    return spherical_polygon_area(img)


def _icos_checks(variant):
    details = []
    n, bad = _table_mismatches(8, 50_442, 1e-3, variant=variant)
    details += bad
    worst_face = max(abs(_face_area(variant, f) - math.pi / 5) for f in range(20))
    if worst_face > 1e-9:
        details.append(f"face area error {worst_face:.2e} > 1e-9")
    rng = np.random.default_rng(0)
    zs = []
    for trial in range(5):
        B = rng.dirichlet([1.0, 1.0, 1.0], 3)
        planar, mc, se = subtriangle_area_mc(B, variant, n_samples=1_000_000, seed=trial)
        z = (mc - planar) / se
        zs.append(z)
        if abs(z) > 3.0:
            details.append(f"sub-triangle {trial}: planar {planar:.6f}, image {mc:.6f} "
                           f"+- {se:.1e} ({z:+.1f} sigma)")
    pooled = sum(zs) / math.sqrt(len(zs))
    summary = (f"{variant}: {n} table entries at 1e-3, face area error {worst_face:.1e}, "
               f"sub-triangle z-scores {', '.join(f'{z:+.1f}' for z in zs)} (pooled {pooled:+.1f})")
    return details, summary


def criterion_3():
    details, summary = _icos_checks("azimuthal")
    other, other_summary = _icos_checks("exact")
    info = [summary, f"info: {other_summary} ({len(other)} failures)"]
    return not details, info + details


def criterion_4():
    N = 50_000
    d_sp = separation(gen_spiral(N)) * math.sqrt(N)
    fib = fibonacci(50_001).points
    mesh = delaunay(fib)
    d_fib = float(mesh.edge_lengths().min()) * math.sqrt(50_001)
    polar = np.isin(mesh.triangles, np.arange(5)).any(axis=1)
    r_fib = float(mesh.circumradii[polar].max()) * math.sqrt(50_001)
    checks = [("spiral separation", d_sp, 3.131948), ("Fibonacci separation", d_fib, 3.09207),
              ("Fibonacci polar circumradius", r_fib, 2.72812)]
    details = [f"{name}: {got:.6f} vs {want} (diff {got - want:+.1e})" for name, got, want in checks]
    return all(abs(g - w) <= 0.01 for _, g, w in checks), details


def criterion_5():
    details, worst_sep, worst_gamma = [], math.inf, -math.inf
    for k in range(1, 201):
        P = octahedral(k).points
        mesh = delaunay(P)
        d = float(mesh.edge_lengths().min())
        bound = octahedral_separation_bound(k)
        worst_sep = min(worst_sep, d * d - bound)
        if not d * d >= bound:
            details.append(f"k={k}: delta^2 = {d * d:.6e} < {bound:.6e}")
        eta = float(mesh.circumradii.max())
        gamma_arc = 2.0 * math.asin(min(eta / 2.0, 1.0)) / d
        gbound = octahedral_mesh_bound(k)
        worst_gamma = max(worst_gamma, max(eta / d, gamma_arc) - gbound)
        if not (eta / d <= gbound and gamma_arc <= gbound):
            details.append(f"k={k}: mesh ratio {gamma_arc:.6f} above bound {gbound:.6f}")
    info = [f"k = 1..200: min(delta^2 - bound) = {worst_sep:.3e}, "
            f"max(gamma - bound) = {worst_gamma:.3e}"]
    return not details, info + details


def _energy_series():
    kernels = [KernelSpec.parse(k) for k in ("log", "s=1", "s=-1", "s=2")]
    out = {}
    for family in ("gen_spiral", "zonal_equal_area"):
        rows = []
        for N in ENERGY_GRID:
            E = discrete_energies(generate(family, N=N), kernels, n_jobs=JOBS)
            rows.append({k.label: E[k] for k in kernels})
        out[family] = rows
    return out


def criterion_6():
    series = _energy_series()
    details, ok = [], True
    N = ENERGY_GRID[-1]
    for family, rows in series.items():
        last = rows[-1]
        checks = [
            ("log order1", normalize(last["log"], N, "log", 1), continuous_value("log"), 2e-3),
            ("log order2", normalize(last["log"], N, "log", 2), -0.5, 0.1),
            ("s=1 order1", normalize(last["s=1"], N, "s=1", 1), 1.0, 2e-3),
            ("s=-1 order1", normalize(last["s=-1"], N, "s=-1", 1), 4.0 / 3.0, 2e-3),
        ]
        for name, got, want, tol in checks:
            good = abs(got - want) <= tol
            ok &= good
            details.append(f"{'ok  ' if good else 'MISS'} {family} {name} at N={N}: {got:.6f} vs "
                           f"{want:.6f} (tol {tol:g})")
        s2 = [normalize(r["s=2"], n, "s=2", 1) for r, n in zip(rows, ENERGY_GRID)]
        below = all(v < 0.27 for v in s2)
        tail = s2[-5:]
        decreasing = all(b < a for a, b in zip(tail, tail[1:]))
        ok &= below and decreasing
        details.append(f"{'ok  ' if below and decreasing else 'MISS'} {family} s=2 order1 below 0.27: "
                       f"{below}; strictly decreasing over last 5: {decreasing} "
                       f"({', '.join(f'{v:.5f}' for v in tail)})")
    return ok, details


def criterion_7():
    N = 1000
    E = np.array([discrete_energy(random_uniform(N, seed=s), "s=1", n_jobs=JOBS) for s in range(50)])
    se = E.std(ddof=1) / math.sqrt(len(E))
    z = (E.mean() - 999_000) / se
    sep, cov = [], []
    for s in range(200):
        mesh = delaunay(random_uniform(N, seed=1000 + s).points)
        sep.append(float(mesh.edge_lengths().min()))
        cov.append(float(mesh.circumradii.max()))
    sep_scaled = float(np.mean(sep)) * N
    cov_scaled = float(np.mean(cov)) * math.sqrt(N / math.log(N))
    checks = [abs(z) <= 3.0, abs(sep_scaled / math.sqrt(2 * math.pi) - 1) <= 0.1,
              abs(cov_scaled / 2.0 - 1) <= 0.1]
    details = [f"s=1 energy mean {E.mean():.1f} +- {se:.1f} vs 999000 ({z:+.2f} sigma)",
               f"mean separation * N = {sep_scaled:.4f} vs sqrt(2 pi) = {math.sqrt(2 * math.pi):.4f} "
               f"({sep_scaled / math.sqrt(2 * math.pi) - 1:+.1%})",
               f"mean covering * sqrt(N / log N) = {cov_scaled:.4f} vs 2 ({cov_scaled / 2 - 1:+.1%})"]
    return all(checks), details


def criterion_8():
    details, ok = [], True
    worst = 0.0
    for cfg in (gen_spiral(100), fibonacci(1001), random_uniform(500, seed=3), octahedral(10)):
        P = cfg.points
        D = stolarsky_l2_discrepancy(P)
        lhs = discrete_energy(P, "s=-1") / len(P) ** 2 + 4 * D * D
        worst = max(worst, abs(lhs - 4 / 3))
    ok &= worst <= 1e-14
    details.append(f"identity residual {worst:.1e}")
    for cfg in (gen_spiral(100), random_uniform(100, seed=0)):
        D2 = stolarsky_l2_discrepancy(cfg.points) ** 2
        mc, se = l2_discrepancy_monte_carlo(cfg.points, n_samples=1_000_000, seed=7)
        good = abs(mc - D2) <= 3 * se
        ok &= good
        details.append(f"{cfg.family} N=100: D^2 = {D2:.6e}, Monte Carlo {mc:.6e} +- {se:.1e} "
                       f"({(mc - D2) / se:+.2f} sigma)")
    fib = stolarsky_l2_discrepancy(fibonacci(1001).points)
    rnd = [stolarsky_l2_discrepancy(random_uniform(1001, seed=s).points) for s in range(20)]
    good = all(fib < r for r in rnd)
    ok &= good
    details.append(f"Fibonacci D = {fib:.3e}; smallest of 20 random D = {min(rnd):.3e}")
    return ok, details


def _families_at(N):
    out = {}
    for family in FAMILIES:
        if family in ("external", "fibonacci_lattice"):
            continue
        try:
            out[family] = generate(family, N=N).points
        except ValueError:
            pass
    out["fibonacci_lattice/irrational"] = fibonacci_lattice(mode="irrational", N=N - 1).points
    for k in range(3, 20):
        if fibonacci_lattice(k).N == N:
            out["fibonacci_lattice/rational"] = fibonacci_lattice(k).points
    return out


def criterion_9():
    details, ok = [], True
    rng = np.random.default_rng(0)
    est = EnergyMinimizer("s=1", max_iter=5000, grad_tol=1e-12, n_restarts=1).fit(
        random_uniform(4, seed=int(rng.integers(1 << 30))).points)
    d = np.linalg.norm(est.points_[:, None] - est.points_[None], axis=-1)[np.triu_indices(4, 1)]
    err = float(np.abs(d - math.sqrt(8 / 3)).max())
    ok &= err <= 1e-6
    details.append(f"N=4 s=1: max |d - sqrt(8/3)| = {err:.1e}")

    worst_gamma, worst_gap, losses = 0.0, -math.inf, []
    for N in range(10, 101):
        est = EnergyMinimizer("log").fit(gen_spiral(N).points)
        rep = quality(est.points_, with_cells=False)
        worst_gamma = max(worst_gamma, rep.gamma_arc, rep.gamma)
        for name, P in _families_at(N).items():
            try:
                E = discrete_energy(P, "log")
            except ValueError:
                continue
            # identical configurations (e.g. the icosahedron) agree only to rounding
            gap = est.energy_ - E
            worst_gap = max(worst_gap, gap / abs(E))
            if gap > 1e-12 * abs(E):
                losses.append(f"N={N}: optimizer {est.energy_:.10f} > {name} {E:.10f}")
    ok &= worst_gamma < 0.80 and not losses
    details.append(f"N=10..100 log: largest mesh ratio {worst_gamma:.5f} (< 0.80), "
                   f"largest relative excess over any family {worst_gap:+.1e}")
    details += losses

    worst_fd = 0.0
    for trial in range(20):
        kernel = ["log", "s=1", "s=2", "s=3", "s=-1"][trial % 5]
        P = random_uniform(20, seed=500 + trial).points
        g = energy_gradient(P, kernel)
        fd = _sphere_fd(P, kernel)
        worst_fd = max(worst_fd, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
    ok &= worst_fd <= 1e-5
    details.append(f"gradient vs central differences, 20 instances: worst relative error {worst_fd:.1e}")
    return ok, details


def _sphere_fd(P, kernel, h=1e-6):
    G = np.zeros_like(P)
    for i in range(len(P)):
        a = np.array([1.0, 0.0, 0.0]) if abs(P[i, 0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        t1 = np.cross(P[i], a)
        t1 /= np.linalg.norm(t1)
        for t in (t1, np.cross(P[i], t1)):
            vals = []
            for sgn in (1.0, -1.0):
                Q = P.copy()
                Q[i] = math.cos(h) * P[i] + math.sin(h) * sgn * t
                vals.append(discrete_energy(Q, kernel))
            G[i] += (vals[0] - vals[1]) / (2 * h) * t
    return G


def _structural_grid():
    for table, family in TABLE_FAMILIES.items():
        for params in TABLE_GRIDS[table]:
            if params_size(family, params) <= 50_442:
                yield family, params
    for N in (100, 1000, 10_000):
        yield "random", {"N": N}
    for N in (100, 1000, 10_000):
        yield "hammersley", {"N": N}


def criterion_10():
    details, n = [], 0
    probe_res = 2.0 * math.sqrt(math.log(1e6) / 1e6)
    for family, params in _structural_grid():
        P = generate(family, **params).points
        N = len(P)
        tag = f"{family} {params}"
        mesh = delaunay(P)
        diagram = voronoi(mesh)
        n += 1
        if mesh.euler_characteristic() != 2:
            details.append(f"{tag}: Euler characteristic {mesh.euler_characteristic()}")
        area_err = abs(diagram.areas.sum() - 4 * math.pi)
        if area_err > 1e-9 * N:
            details.append(f"{tag}: cell areas off by {area_err:.1e}")
        if int(np.sum(6 - diagram.mesh_degrees)) != 12:
            details.append(f"{tag}: sum(6 - degree) = {int(np.sum(6 - diagram.mesh_degrees))}")
        if N <= 2000 and separation(mesh) != separation_bruteforce(P):
            details.append(f"{tag}: Delaunay separation differs from brute force")
        eta = covering_radius(mesh)
        probe = covering_radius_probe(P, n_probes=1_000_000, seed=N)
        if not (probe <= eta + 1e-12 and eta - probe <= probe_res):
            details.append(f"{tag}: covering {eta:.6e} vs probe {probe:.6e}")
    return not details, [f"{n} configurations checked"] + details


CRITERIA = {
    1: ("deterministic mesh-ratio tables", criterion_1),
    2: ("zonal equal-area table with random collar offsets", criterion_2),
    3: ("equal-area icosahedral table and area preservation", criterion_3),
    4: ("separation and covering limits", criterion_4),
    5: ("octahedral separation and mesh-ratio bounds", criterion_5),
    6: ("energy convergence to reference values", criterion_6),
    7: ("random point statistics", criterion_7),
    8: ("Stolarsky invariance and discrepancy", criterion_8),
    9: ("energy optimizer", criterion_9),
    10: ("structural invariants", criterion_10),
}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    title, fn = CRITERIA[number]
    ok, details = fn()
    _emit(capsys, _report(number, title, ok, details))
    assert ok, f"criterion {number} failed: " + "; ".join(details)


if __name__ == "__main__":
    chosen = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    results = {}
    for number in chosen:
        title, fn = CRITERIA[number]
        ok, details = fn()
        results[number] = ok
        _emit(None, _report(number, title, ok, details))
    sys.exit(0 if all(results.values()) else 1)
