"""doiflow: double operator integrals and gapped spectral flow on
finite-dimensional Hilbert spaces.

The library realizes the Schur-multiplier form of the double operator
integral for atomic spectral measures, weighted separable kernel
decompositions with computable multiplier-norm bounds, divided-difference
kernels of Fourier-representable functions, the derivative of matrix
functions along operator paths, and the quasi-adiabatic transport of
isolated spectral projections.
"""

from .errors import (ConfigError, ContourError, ConvergenceFailure, DoiflowError,
                     DomainError, GapError, InvalidInput, PatchError,
                     QuadratureError, ShapeError, TruncationError)
from .linalg import (EigenDecomposition, MatrixNorms, commutator, hermitian_eig,
                     hermitian_part, hs_norm, matrix_exp_i, matrix_function,
                     norms, op_norm, recover_operator_from_quadratic_form)
from .pvm import (AtomicMeasure, FinitePVM, GridMeasure, ProductPVM,
                  integrate_scalar, product_apply, product_scalar_measure,
                  pvm_from_eig, pvm_from_hermitian, scalar_measure)
from .kernels import (DecomposedKernel, FourierMeasure, Kernel, WienerFunction,
                      decomposed_one, decomposed_product, decomposed_sum,
                      decomposed_zero, divided_difference_decomposed,
                      divided_difference_kernel, exp_kernel, kernel_const_one,
                      kernel_left, kernel_right, multiplier_bound, wiener_cauchy,
                      wiener_cos, wiener_deriv, wiener_eval, wiener_exp_i,
                      wiener_sin)
from .doi import (doi_adjoint_check, doi_apply, doi_apply_decomposed,
                  doi_s2_norm, schur_matrix, trace_pairing)
from .perturbation import (OperatorPath, dk_derivative, duhamel_derivative,
                           exp_difference_bound, f_difference, fd_derivative,
                           linear_path, polynomial_path, trig_path)
from .flow import (Contour, FlowResult, SpectralPatch, WeightFunction,
                   build_weight_function, commutator_identity_check,
                   contour_for_patch, detect_patch, flow_integrate,
                   hastings_generator, hastings_kernel,
                   projection_derivative_contour, riesz_projection,
                   verify_automorphic_equivalence)
from .models import ModelBundle, build_model, random_gapped, tfim, two_level
from .rng import CounterRng, splitmix64

__version__ = "0.1.0"
