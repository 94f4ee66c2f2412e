"""Fractal zeta functions, complex dimensions and Minkowski contents."""

from .analysis import (
    LogPeriodicEstimator, MinkowskiDimensionEstimator, classify, estimate_dimensions,
    fit_log_periodic, numeric_residue, pole_scan, residue_content_check,
)
from .closed_forms import (
    MeromorphicForm, cantor_distance_zeta_form, cantor_tube_zeta_form, sierpinski_relative_zeta_form,
    sphere_tube_zeta_form, string_relative_zeta_form,
)
from .core_model import (
    CantorBlock, GeneralizedCantorParams, LacunaryString, Sphere, TubeSamples, cusp_drum, string_drum,
)
from .exceptions import (
    DivergenceError, DomainError, FractalZetaError, IndependenceError, UnsupportedVariantError,
)
from .quasiperiodic import assembly_zeta, build_assembly, exponent_vectors, rationally_independent
from .spectral import spectral_zeta, spray_spectral_zeta, string_spectral_zeta
from .tube_geometry import sample_tube, tube_volume
from .zeta_numeric import distance_zeta_1d, geometric_zeta, relative_distance_zeta, tube_zeta_from_samples

__version__ = "0.1.0"
