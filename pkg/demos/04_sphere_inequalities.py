"""
Curvature inequalities on the circle and the sphere
===================================================

For a positive function phi = exp(Phi) on the unit sphere, the weighted
integrals of Gamma_2(Phi) and Gamma(Phi) satisfy
int phi Gamma_2 >= Lambda int phi Gamma, with a larger constant when phi is
even.  Random batteries probe the margins; a direction-set search hunts for
the smallest ratio.
"""

import numpy as np

from multispecies_landau.sphere import check_inequality, estimate_constant, random_field, sphere_constant

rng = np.random.default_rng(3)
for dim in (2, 3):
    for symmetric in (False, True):
        verdicts = [check_inequality(random_field(dim, rng, symmetric), symmetric) for _ in range(25)]
        ratios = [v.ratio for v in verdicts]
        print(f"d={dim} {'even   ' if symmetric else 'general'}  Lambda={sphere_constant(dim, symmetric):4.1f}"
              f"  smallest ratio {min(ratios):7.3f}  smallest margin {min(v.margin for v in verdicts):.3e}")

# A short search; the infimum is approached by small perturbations of constants.
est = estimate_constant(2, False, lmax=3, restarts=2, seed=0)
print(f"search on the circle: smallest ratio found {est.value:.4f} after {est.evaluations} evaluations")
