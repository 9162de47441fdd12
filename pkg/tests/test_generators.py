import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import cKDTree

from sphere_suite import (InvalidCardinalityError, OffSphereError, _polyhedra, cubed_sphere, fibonacci,
                          fibonacci_lattice, gen_spiral, generate, hammersley, healpix, icos_equal_area,
                          load_external, octahedral, radial_icosahedral, random_uniform,
                          zonal_equal_area)
from sphere_suite.generators import (FAMILIES, octahedral_map, van_der_corput, write_points,
                                     zonal_partition)
from sphere_suite.geometry import rotation_about, spherical_polygon_area, to_spherical

SIZE = {
    "healpix": lambda k: 12 * k * k,
    "radial_icosahedral": lambda k: 10 * k * k + 2,
    "cubed_sphere": lambda k: 6 * k * k - 12 * k + 8,
    "octahedral": lambda k: 4 * k * k + 2,
}
BUILD = {"healpix": healpix, "radial_icosahedral": radial_icosahedral, "cubed_sphere": cubed_sphere,
         "octahedral": octahedral}


def same_set(A, B, tol=1e-12):
    return len(A) == len(B) and cKDTree(B).query(A)[0].max() < tol


def test_gen_spiral_two_points():
    P = gen_spiral(2).points
    phi, theta = to_spherical(P)
    assert np.allclose(phi, [math.pi / 3, 2 * math.pi / 3])
    expect = np.mod(math.sqrt(2 * math.pi) * np.array([math.pi / 3, 2 * math.pi / 3]), 2 * math.pi)
    assert np.allclose(theta, expect)


def test_fibonacci_equator_and_mirror():
    P = fibonacci(1001).points
    assert np.allclose(P[500], [1.0, 0.0, 0.0])
    mirrored = P[::-1] * np.array([1.0, -1.0, -1.0])
    assert np.abs(mirrored - P).max() < 1e-12
    with pytest.raises(InvalidCardinalityError):
        fibonacci(1000)


def test_fibonacci_lattice_examples():
    x = np.array([0.0, 2 / 3, 1 / 3])
    P = fibonacci_lattice(4).points
    theta = to_spherical(P)[1]
    assert np.allclose(theta[1:] / (2 * math.pi), x[1:])
    Q = fibonacci_lattice(N=4, mode="irrational").points
    assert len(Q) == 5
    assert to_spherical(Q[1:2])[1][0] / (2 * math.pi) == pytest.approx(0.6180339887, abs=1e-10)
    R = fibonacci_lattice(10).points
    assert len(R) == 55 and len(np.unique(R.round(12), axis=0)) == 55
    with pytest.raises(ValueError):
        fibonacci_lattice(2)


def test_van_der_corput_bit_reversal():
    assert list(van_der_corput([1, 5, 6])) == [0.5, 0.625, 0.375]
    theta = to_spherical(hammersley(8).points[:1])[1][0]
    assert theta == pytest.approx(math.pi)


def test_zonal_two_points_are_poles():
    P = zonal_equal_area(2).points
    assert np.allclose(P, [[0, 0, 1], [0, 0, -1]])


@pytest.mark.parametrize("N", [3, 10, 100, 777, 5000])
def test_zonal_cells_have_equal_area(N):
    phi, counts = zonal_partition(N)
    assert counts.sum() == N
    zone_area = 2 * np.pi * (np.cos(phi[:-1]) - np.cos(phi[1:]))
    assert np.allclose(zone_area / counts, 4 * np.pi / N, rtol=1e-12, atol=1e-15)


def test_zonal_offsets_modes():
    a = zonal_equal_area(700, seed=7).points
    assert np.array_equal(a, zonal_equal_area(700, seed=7).points)
    assert not np.array_equal(a, zonal_equal_area(700, seed=8).points)
    fixed = zonal_equal_area(700, shift=False)
    assert np.array_equal(fixed.points, zonal_equal_area(700, seed=123, shift=False).points)
    assert zonal_equal_area(700, offsets="aligned").params["offsets"] == "aligned"
    with pytest.raises(ValueError):
        zonal_equal_area(10, offsets="spiral")


def test_healpix_small_rings():
    P = healpix(1).points
    assert len(P) == 12
    assert np.allclose(P[:4, 2], 2 / 3)
    theta = to_spherical(P[:4])[1]
    assert np.allclose(theta, np.pi / 2 * (np.arange(1, 5) - 0.5))


@pytest.mark.parametrize("family", sorted(SIZE))
@pytest.mark.parametrize("k", [2, 3, 7, 20])
def test_cardinality_and_uniqueness(family, k):
    P = BUILD[family](k).points
    assert len(P) == SIZE[family](k)
    assert np.abs(np.linalg.norm(P, axis=1) - 1).max() < 1e-14
    assert cKDTree(P).query(P, k=2)[0][:, 1].min() > 1e-6


@pytest.mark.parametrize("mn", [(1, 0), (1, 1), (2, 1), (7, 5)])
def test_icos_equal_area_cardinality(mn):
    m, n = mn
    cfg = icos_equal_area(m, n)
    assert cfg.N == 10 * (m * m + m * n + n * n) + 2
    with pytest.raises(InvalidCardinalityError):
        icos_equal_area(0, 0)


def test_polyhedral_vertices():
    V, _ = _polyhedra.icosahedron()
    assert same_set(radial_icosahedral(1).points, V)
    assert same_set(icos_equal_area(1, 0).points, V)
    assert same_set(octahedral(1).points, np.vstack([np.eye(3), -np.eye(3)]))
    cube = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]) / math.sqrt(3)
    assert same_set(cubed_sphere(2).points, cube)


def test_radial_icosahedral_symmetry():
    P = radial_icosahedral(6).points
    V, F = _polyhedra.icosahedron()
    assert same_set(P @ rotation_about(V[0], 2 * math.pi / 5).T, P)
    c = V[F[0]].sum(axis=0)
    assert same_set(P @ rotation_about(c, 2 * math.pi / 3).T, P)


def test_cubed_sphere_symmetry():
    P = cubed_sphere(7).points
    for axis in np.eye(3):
        assert same_set(P @ rotation_about(axis, math.pi / 2).T, P)
    assert same_set(P @ rotation_about([1, 1, 1], 2 * math.pi / 3).T, P)


def _image_area(mapper, corners, n=400):
    t = np.linspace(0, 1, n + 1)[:-1, None]
    edge = np.vstack([corners[i] * (1 - t) + corners[(i + 1) % 3] * t for i in range(3)])
    return spherical_polygon_area(mapper(edge))


def test_octahedral_map_is_equal_area():
    edge = math.sqrt(2 * math.pi) / 3 ** 0.25
    a = edge / math.sqrt(2)
    mapper = lambda E: octahedral_map(E[:, 0], E[:, 1], E[:, 2], edge)
    face = np.diag([a, a, a])
    assert _image_area(mapper, face) == pytest.approx(math.pi / 2, rel=1e-9)
    # a sub-triangle of a 4-subdivided face: area fraction 1/16
    sub = np.array([[a, 0, 0], [0.75 * a, 0.25 * a, 0], [0.75 * a, 0, 0.25 * a]])
    assert _image_area(mapper, sub) == pytest.approx(math.pi / 32, rel=1e-5)


@pytest.mark.parametrize("variant", ["azimuthal", "exact"])
def test_icosahedral_map_face_area(variant):
    from sphere_suite import _icosahedral_map

    V, F = _polyhedra.icosahedron()
    for f in F[:4]:
        corners = V[f]
        mapper = lambda B: _icosahedral_map.map_to_sphere(
            np.broadcast_to(corners, (len(B), 3, 3)).copy(), B, variant)
        assert _image_area(mapper, np.eye(3), n=2000) == pytest.approx(math.pi / 5, abs=1e-9)


def test_icosahedral_exact_map_subtriangle_area():
    from oracles import subtriangle_area_mc

    planar, mc, se = subtriangle_area_mc([[0.6, 0.2, 0.2], [0.2, 0.6, 0.2], [0.3, 0.2, 0.5]],
                                         "exact", n_samples=400_000, seed=3)
    assert abs(mc - planar) < 3 * se


def test_random_uniform_determinism():
    a = random_uniform(50, seed=3).points
    assert np.array_equal(a, random_uniform(50, seed=3).points)
    assert not np.array_equal(a, random_uniform(50, seed=4).points)


def test_configuration_is_immutable():
    cfg = gen_spiral(10)
    with pytest.raises(ValueError):
        cfg.points[0, 0] = 2.0
    assert len(cfg) == cfg.N == 10


def test_generate_dispatch_and_errors():
    assert generate("healpix", N=48).params["k"] == 2
    assert generate("zonal", N=30).family == "zonal_equal_area"
    assert generate("icos_equal_area", N=72).params == {"m": 2, "n": 1, "N": 72, "variant": "azimuthal"}
    with pytest.raises(InvalidCardinalityError, match=r"healpix requires N = 12k²"):
        generate("healpix", N=1000)
    with pytest.raises(InvalidCardinalityError):
        generate("octahedral", N=100)
    with pytest.raises(InvalidCardinalityError):
        generate("gen_spiral", N=1)
    with pytest.raises(ValueError, match="unknown family"):
        generate("hexagonal", N=10)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["gen_spiral", "hammersley", "zonal_equal_area", "random"]), st.integers(2, 3000))
def test_free_families_on_sphere(family, N):
    P = generate(family, N=N).points
    assert P.shape == (N, 3)
    assert np.abs(np.linalg.norm(P, axis=1) - 1).max() < 1e-14


def test_deterministic_families_are_bit_reproducible():
    for fam, kw in [("gen_spiral", {"N": 999}), ("fibonacci", {"N": 999}), ("healpix", {"k": 5}),
                    ("octahedral", {"k": 9}), ("icos_equal_area", {"m": 3, "n": 1})]:
        assert np.array_equal(generate(fam, **kw).points, generate(fam, **kw).points)


def test_load_external_csv(tmp_path):
    f = tmp_path / "e.csv"
    f.write_text("x,y,z\n1,0,0\n0,1,0\n0,0,1\n")
    assert load_external(f).N == 3
    g = tmp_path / "p.csv"
    g.write_text("1.0000001,0,0\n0,1,0\n0,0,1\n")
    assert np.allclose(np.linalg.norm(load_external(g).points, axis=1), 1.0, atol=1e-15)
    h = tmp_path / "zero.csv"
    h.write_text("1,0,0\n0,0,0\n")
    with pytest.raises(OffSphereError):
        load_external(h)
    bad = tmp_path / "bad.csv"
    bad.write_text("1,0,0\n0,1\n")
    with pytest.raises(ValueError, match=":2:"):
        load_external(bad)


def test_write_and_reload_round_trip(tmp_path):
    cfg = fibonacci(101)
    path = tmp_path / "f.csv"
    write_points(cfg, path, header=["family: fibonacci"])
    assert np.array_equal(load_external(path).points, cfg.points)
    jpath = tmp_path / "f.json"
    write_points(cfg, jpath, format="json")
    assert np.array_equal(load_external(jpath).points, cfg.points)
    assert len(json.loads(jpath.read_text())["points"]) == 101


def test_family_registry_is_complete():
    assert set(FAMILIES) >= {"gen_spiral", "fibonacci", "healpix", "icos_equal_area", "external"}
