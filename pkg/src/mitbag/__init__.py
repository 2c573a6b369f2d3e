"""Numerical verification toolkit for the large-mass (MIT bag) limit of the
three-dimensional Dirac operator on exactly solvable geometries.

The package checks, at desk scale, that the spectrum of the Dirac operator
with a large mass barrier outside a ball converges to the bag-model spectrum,
including the explicit 1/m correction functionals for eigenvalues, exterior
energies, and the intermediate Robin-type Laplacian.
"""

from .dirac_ball import (
    AngularSector,
    DiracParams,
    RadialEigenpair,
    SpectralResult,
    boundary_identity_check,
    charge_conjugation_check,
    eta_functional,
    largemass_eigenpair,
    largemass_eigenvalues,
    largemass_spectrum_signed,
    mit_eigenpair,
    mit_eigenvalues,
    mit_spectrum_signed,
    mu_functional,
    nu_minmax,
    robin_eigenpair,
    robin_laplacian_eigenvalues,
    singular_values_merged,
)
from .exterior import (
    BoundaryDatum,
    ExteriorSolution,
    SphereMode,
    TorusMode,
    agmon_decay_check,
    ball_exterior_dtn,
    effective_energy,
    exterior_energy,
    halfspace_mode_energy,
    mass_estimate_check,
    sobolev_h32_norm_sq,
    sphere_datum,
    torus_datum,
)
from .geometry import (
    BallExterior,
    BallInterior,
    CurvatureBounds,
    CurvatureData,
    FlatTorusHalfSpace,
    ModelGeometry,
    min_rescaled_weight,
    rescaled_weight,
    tubular_weight,
    weight_validity_floor,
)
from .numerics import (
    AsymptoticFit,
    SecondOrderODE,
    ShootingSolution,
    ToleranceConfig,
    find_root_bracketed,
    fit_inverse_m,
    integrate_panels,
    panel_nodes,
    slope_drift,
    solve_bvp_shooting,
)
from .special import (
    BesselKValue,
    modified_spherical_bessel_i,
    modified_spherical_bessel_i_deriv,
    modified_spherical_bessel_k,
    modified_spherical_bessel_k_scaled,
    modified_spherical_bessel_k_scaled_deriv,
    spherical_bessel_j,
    spherical_bessel_j_deriv,
)
from .transverse import (
    TransverseProblem,
    TransverseSolution,
    expansion_lambda,
    formal_profiles,
    residual_of_ansatz,
    solve_transverse,
    transverse_form,
    transverse_mass_check,
)

__version__ = "0.1.0"
