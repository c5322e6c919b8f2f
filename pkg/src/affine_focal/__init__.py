"""Equi-affine invariants of curves and codimension-2 submanifolds, affine focal sets."""

from .affine_curves import (PlanarAffineCurve, SpatialAffineCurve, affine_evolute,
                            area_function, count_vertices, cylindricity_test,
                            lift_with_area, projective_density, reconstruct_from_curvature,
                            reparam_affine_planar, spatial_invariants, support_function)
from .blaschke import (BlaschkeApparatus, Patch, blaschke_apparatus, ellipsoid_patch,
                       graph_patch, is_proper_affine_sphere, laplacian_of,
                       paraboloid_patch, sphere_patch)
from .curves import AnalyticCurve, parse_curve
from .darboux3 import (DarbouxFrame, FocalSheet, classify_by_distance, classify_singularity,
                       complete_frame, constant_Q_test, darboux_frame, flattening_points,
                       focal_sheet, visual_contour_test)
from .errors import AffineFocalError, SpecError
from .focal_n import (FrameData, QuadricSpace, bifurcation_polynomial,
                      commuting_and_semiumbilic, envelope_tangent_spaces,
                      hyperplane_section_fixture, product_curves_fixture,
                      quadric_section_fixture, regularity_probe)
from .kernels import BACKEND
from .numkit import DEFAULT_TOL, JetCurve, ToleranceConfig
from .surfaces import on_surface, parse_surface
from .umbilic import (construct_umbilic, hyperplanarity_test, inverse_construction,
                      verify_laplacian_identity)

__version__ = "0.1.0"
