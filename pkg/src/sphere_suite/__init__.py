"""Point configurations on the unit sphere: generation, tessellation, quality and energy."""

from ._validation import InvalidCardinalityError, OffSphereError, check_points
from .energy import (EnergyReport, KernelSpec, continuous_value, discrete_energy,
                     epstein_zeta_triangular, expected_random_energy, normalized_series,
                     second_order_coefficient, stolarsky_l2_discrepancy)
from .generators import (Configuration, cubed_sphere, fibonacci, fibonacci_lattice, gen_spiral,
                         generate, hammersley, healpix, icos_equal_area, load_external, octahedral,
                         radial_icosahedral, random_uniform, zonal_equal_area)
from .geometry import (SphCoord, UnitPoint, chordal_distance, convert, lambert, lambert_inverse,
                       spherical_polygon_area)
from .metrics import QualityReport, covering_radius, mesh_ratio, quality, quality_sweep, separation
from .optimizer import EnergyMinimizer, energy_gradient, minimize
from .tessellation import SphericalVoronoi, TriMesh, VoronoiDiagram, cell_stats, delaunay, voronoi

__version__ = "0.1.0"

__all__ = [
    "Configuration", "EnergyMinimizer", "EnergyReport", "InvalidCardinalityError", "KernelSpec",
    "OffSphereError", "QualityReport", "SphCoord", "SphericalVoronoi", "TriMesh", "UnitPoint",
    "VoronoiDiagram", "cell_stats", "check_points", "chordal_distance", "continuous_value",
    "convert", "covering_radius", "cubed_sphere", "delaunay", "discrete_energy",
    "energy_gradient", "epstein_zeta_triangular", "expected_random_energy", "fibonacci",
    "fibonacci_lattice", "gen_spiral", "generate", "hammersley", "healpix", "icos_equal_area",
    "lambert", "lambert_inverse", "load_external", "mesh_ratio", "minimize", "normalized_series",
    "octahedral", "quality", "quality_sweep", "radial_icosahedral", "random_uniform",
    "second_order_coefficient", "separation", "spherical_polygon_area",
    "stolarsky_l2_discrepancy", "voronoi", "zonal_equal_area",
]
