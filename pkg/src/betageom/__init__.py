"""Exact expected functionals of beta polytopes and beta cones, with an
independent Monte Carlo verification oracle."""

from .cones import (ConeSpec, expected_face_angles_cone, expected_fk_cone,
                    expected_solid_angle, expected_solid_angle_on_proper,
                    expected_upsilon, face_probability_cone, prob_full_space,
                    prob_proper, wendel_reference)
from .errors import (BetaGeomError, ConvergenceDomain, DegenerateInput,
                     DomainError, InvalidDecay, InvalidExponent,
                     NonConvergence, ResidualError, SubsetBlowup)
from .montecarlo import (Estimate, RngSpec, cone_is_full_space, discordant,
                         estimate_cone_statistics,
                         estimate_polytope_statistics, estimate_solid_angle,
                         is_face, sample_beta_point)
from .polytopes import (PolySpec, conic_volume_sums, equal_beta_angles,
                        expected_beta_content, expected_fk_poly,
                        expected_intrinsic_volume, expected_volume,
                        face_probability_poly, simplex_volume_gamma,
                        simplex_volume_moment, skeleton_lp_volume,
                        sylvester_probability, tangent_cone_dictionary)
from .quadrature import (DEFAULT_CONFIG, QuadConfig, QuadResult,
                         integrate_interval, integrate_real_line)
from .quantities import (QuantityValue, ThetaArgs, a1_quantity, a_quantity,
                         b1_quantity, b_quantity, big_A, big_B, ext_quantity,
                         ext_quantity_direct, int_quantity, theta,
                         theta_factors, theta_size_sums)
from .special import (BetaParam, GammaMultiset, c_const, f_imag, f_real,
                      kappa)

__version__ = "0.1.0"
