from .bessel import bessel_j0, bessel_j1
from .kluyver import (
    gaussian_planar_density,
    kluyver_planar_density,
    kluyver_radial_cdf,
    kluyver_radial_density,
    quasi_gaussian_error,
)
from .short import planar_density_2, planar_density_3, planar_density_4, radial_density_2
from .tables import (
    RadialDensityTable,
    TableMissError,
    TableSet,
    default_tables,
    watson_integral_check,
)

__all__ = [
    "bessel_j0", "bessel_j1",
    "kluyver_radial_cdf", "kluyver_radial_density", "kluyver_planar_density",
    "gaussian_planar_density", "quasi_gaussian_error",
    "planar_density_2", "radial_density_2", "planar_density_3", "planar_density_4",
    "RadialDensityTable", "TableSet", "TableMissError", "default_tables",
    "watson_integral_check",
]
