"""Computational geometry of dually flat (Bregman) manifolds."""
from .chart import (Point, TangentVector, angle, dual_transport, inner_product,
                    inner_product_forms, lower_index, norm, primal_transport, raise_index)
from .divergence import (PythagorasReport, bregman, check_pythagoras, dual_bregman,
                         fenchel_young, four_param_residual, jensen, jensen_bregman,
                         parallelogram_residual, three_param_residual)
from .estimators import DualCoordinateTransformer
from .exceptions import (BasePointMismatch, BothRootsAtQ, BregmanError, DegenerateQuadratic,
                         DegenerateVector, DomainError, EmptyIntersection, NoConvergence,
                         SingularJacobian, SingularSystem)
from .generator import (BregmanGenerator, CustomGenerator, ExtendedKL, ItakuraSaito,
                        Mahalanobis, Multinoulli, euclidean, generator_from_dict,
                        generator_from_json, make_generator)
from .geodesic import Flat, Geodesic, intersect_flats_2d
from .numeric import (NewtonConfig, fd_gradient, fd_hessian, lambert_w0, lambert_w_minus1,
                      newton_solve, solve_quadratic)
from .sphere import (SphereSpec, scalar_solve_is, scalar_solve_kl, simplex_grid,
                     sphere_points, tangent_box)
from .triangle import (AngleReport, Found, GeodesicTriangle, NotFound, angle_sum,
                       double_right_flats, dual_pythagoras_flats, dual_triangle,
                       interior_angles, right_angle_flat, search_triple_right,
                       solve_double_right, solve_dual_pythagoras, solve_dual_pythagoras_is2d,
                       solve_prescribed_angles)

__version__ = "0.1.0"
