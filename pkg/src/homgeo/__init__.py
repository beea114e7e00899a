"""Geodesic vectors and Berwald classification for left-invariant Finsler metrics on Lie groups."""

from .geodesics import (GeodesicResidual, GeodesicSolverError, GeodesicVectorReport,
                        PreconditionError, SolverConfig, berwald_check,
                        berwald_implies_geodesic_drift, biinvariance_defect,
                        find_geodesic_vectors, geodesic_residual, randers_residual_closed_form)
from .lie import (LieAlgebra, LieAlgebraError, abelian, ad_matrix, bracket, derived_subalgebra,
                  direct_sum, heisenberg, jacobi_defect, milnor_nonunimodular, milnor_unimodular)
from .norms import (DomainError, GenericNorm, InnerProduct, NormError, RandersNorm, cartan_tensor,
                    cartan_tensor_fd, evaluate, fundamental_matrix, fundamental_tensor,
                    fundamental_tensor_fd, validate)
from .orbits import (OrbitCriticalReport, find_orbit_critical_points, geodesic_rays_on_orbit_family,
                     orbit_flow, restricted_norm, restricted_norm_derivative)
from .riemann import (ConnectionTable, ad_skew_defect, connection, levi_civita, milnor_lemma_check,
                      ricci)

__version__ = "0.1.0"
