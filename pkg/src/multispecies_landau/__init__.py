"""Multi-species Landau relaxation on velocity grids, with Fisher information diagnostics.

The modules build on each other in this order:

- ``vgrid``: uniform midpoint grid, adjoint gradient/divergence, quadrature
- ``species``: masses, couplings, exponents and the admissibility thresholds
- ``geometry``: skew rotation fields, projection tensor, center-of-mass coordinates
- ``landau``: entropy-form collision operator
- ``equilibrium``: Maxwellians and the linear Fokker-Planck reference flow
- ``functionals``: moments, entropy, Fisher information and their dissipation
- ``sphere``: Gamma calculus on S^1 and S^2
- ``dynamics``: explicit time stepping
- ``cli``: command-line driver
"""

from .dynamics import RunConfig, run, step, suggest_dt
from .equilibrium import GaussianSpec, MacroState, maxwellian
from .functionals import (
    diagnostics,
    dissipation_breakdown,
    entropy,
    entropy_dissipation,
    fisher,
    fisher_dissipation,
    fisher_dissipation_xi,
    moments,
)
from .landau import mixture_from_bumps, random_mixture, rhs
from .species import admissible_threshold, check_admissibility, make_species_set
from .state import MixtureState
from .vgrid import make_grid

__version__ = "0.1.0"
