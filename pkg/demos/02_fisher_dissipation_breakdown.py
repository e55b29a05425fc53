"""
Where the Fisher information goes
=================================

The rate of change of I along the collision flow can be computed three ways:
directly from the pair integrand, from a single-particle field Xi built from
the gradient and Laplacian of log f, and by splitting each pair term into
parallel, radial and spherical pieces plus a remainder that only appears for
non-Maxwell exponents.  All pieces are nonnegative.

The regrouped total matches the direct form to rounding.  The Xi form is a
different discretization: for gamma = -1 it differs by several percent on
this grid, and the gap halves when h does.
"""

import numpy as np

from multispecies_landau import make_grid, make_species_set, mixture_from_bumps
from multispecies_landau.functionals import dissipation_breakdown, fisher_dissipation, fisher_dissipation_xi

grid = make_grid(2, 6.0, 32)
bumps = [[(1.0, [0.4, 0.0], 1.0)], [(0.7, [-0.4, 0.2], 1.4), (0.3, [0.5, 0.5], 1.2)]]

for gamma in (0.0, -1.0, 1.0):
    species = make_species_set([1.0, 2.0], np.ones((2, 2)), gamma * np.ones((2, 2)), 2)
    state = mixture_from_bumps(species, grid, bumps)
    b = dissipation_breakdown(state)
    print(f"gamma = {gamma:+.0f}")
    print(f"  dI/dt  direct {fisher_dissipation(state):.6f}  Xi {fisher_dissipation_xi(state):.6f}  regrouped {b.total:.6f}")
    for (i, j), p, r, s, q in zip(b.pairs, b.parallel, b.radial, b.spherical, b.remainder):
        print(f"  pair {i + 1}{j + 1}: parallel {p:.4e}  radial {r:.4e}  spherical {s:.4e}  remainder {q:.4e}")
