"""Transmutation operators for ``d^2/dx^2 - q`` with integrable ``q`` and
spectral-parameter power series solutions of ``v'' - q v = lambda v``."""
from .errors import (DegenerateError, DomainError, PreconditionError, TransmutationError,
                     TruncationError)
from .grid import (Grid, SampledFunction, cumulative_integral, derivative, interp_linear, l1_norm,
                   second_derivative)
from .kernel import (GoursatKernel, build_kernel, kernel_at, kernel_distance, verify_goursat_bc,
                     verify_weak_goursat)
from .lbase import (BaseSolutionPair, SLBase, build_slbase, canonical_pair, green_function,
                    polynomial_approx, solve_base_solution)
from .operator import (TransmutationSpec, apply_T, apply_T_inverse, apply_T_transpose,
                       fundamental_apply, general_apply, general_inverse_apply, project_even,
                       project_odd, relate_bases)
from .spps import SPPSSolution, dirichlet_char, find_eigenvalues, general_solution, spps_solve

__version__ = "0.1.0"
