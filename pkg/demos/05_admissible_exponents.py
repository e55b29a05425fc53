"""
Which interaction exponents are covered
=======================================

Fisher information decreases along the flow when every pair exponent stays
within a dimension-dependent threshold.  Pairs of the same species get a
wider window than cross-species pairs, so Coulomb interactions in three
dimensions are covered for like particles only.
"""

import numpy as np

from multispecies_landau import admissible_threshold, check_admissibility, make_species_set

for dim in (2, 3):
    print(f"d={dim}: cross-species |gamma| <= {admissible_threshold(dim, False):.6f}, "
          f"same-species |gamma| <= {admissible_threshold(dim, True):.6f}")

coulomb = make_species_set([1.0, 1836.0], np.ones((2, 2)), -3.0 * np.ones((2, 2)), 3)
for v in check_admissibility(coulomb):
    print(f"pair {v.i + 1}{v.j + 1}: gamma = {v.exponent:+.1f}, threshold {v.threshold:.4f}, "
          f"{'admissible' if v.admissible else 'not admissible'} (margin {v.margin:+.4f})")
