"""Species parameters and the admissible interaction-exponent range."""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "SpeciesSet",
    "PairVerdict",
    "make_species_set",
    "admissible_threshold",
    "check_admissibility",
]


@dataclass(frozen=True, eq=False)
class SpeciesSet:
    """Masses ``m_i``, couplings ``c_ij`` and potential exponents ``gamma_ij``.

    The interaction potential between species ``i`` and ``j`` is
    ``alpha_ij(r) = r**gamma_ij``.
    """

    masses: np.ndarray
    couplings: np.ndarray
    exponents: np.ndarray
    dim: int

    @property
    def count(self):
        return len(self.masses)

    def pairs(self):
        """Ordered pairs ``(i, j)``."""
        return [(i, j) for i in range(self.count) for j in range(self.count)]

    def unordered_pairs(self):
        return [(i, j) for i in range(self.count) for j in range(i, self.count)]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def make_species_set(masses, couplings, exponents, dim):
    """Validate and freeze species parameters.

    Asymmetric coupling or exponent matrices are rejected rather than
    symmetrized.
    """
    m = np.atleast_1d(np.asarray(masses, dtype=float))
    c = np.atleast_2d(np.asarray(couplings, dtype=float))
    g = np.atleast_2d(np.asarray(exponents, dtype=float))
    s = len(m)
    if m.ndim != 1 or s < 1:
        raise ParameterError("masses must be a non-empty vector")
    if int(dim) != dim or dim < 2:
        raise ParameterError(f"dimension must be an integer >= 2, got {dim}")
    for name, mat in (("couplings", c), ("exponents", g)):
        if mat.shape != (s, s):
            raise ParameterError(f"{name} must be {s}x{s}, got shape {mat.shape}")
    for i in range(s):
        if not m[i] > 0:
            raise ParameterError(f"mass m[{i}] = {m[i]} must be positive")
    lo = -dim - 2
    for i in range(s):
        for j in range(s):
            if c[i, j] != c[j, i]:
                raise ParameterError(f"couplings not symmetric at ({i}, {j}): {c[i, j]} != {c[j, i]}")
            if g[i, j] != g[j, i]:
                raise ParameterError(f"exponents not symmetric at ({i}, {j}): {g[i, j]} != {g[j, i]}")
            if c[i, j] < 0:
                raise ParameterError(f"coupling c[{i}][{j}] = {c[i, j]} must be nonnegative")
            if not (lo < g[i, j] <= 1):
                raise ParameterError(
                    f"exponent gamma[{i}][{j}] = {g[i, j]:g} outside ({lo:g}, 1] for dim {dim}"
                )
    return SpeciesSet(_readonly(m), _readonly(c), _readonly(g), int(dim))


def admissible_threshold(dim, same_species):
    """Largest ``|gamma_ij|`` for which the Fisher information is guaranteed monotone.

    ``2 sqrt(d - 1)`` across species; ``2 sqrt(d + 3 - 1/(d - 1))`` within a
    species, where the antipodal symmetry of ``f_i(v) f_i(v_*)`` is available.
    """
    if dim < 2:
        raise ParameterError(f"dimension must be >= 2, got {dim}")
    if same_species:
        return 2.0 * np.sqrt(dim + 3.0 - 1.0 / (dim - 1.0))
    return 2.0 * np.sqrt(dim - 1.0)


@dataclass(frozen=True)
class PairVerdict:
    i: int
    j: int
    exponent: float
    threshold: float
    margin: float

    @property
    def admissible(self):
        return self.margin >= 0


def check_admissibility(species, dim=None):
    """Per ordered pair verdict ``|gamma_ij| <= threshold`` with its margin."""
    dim = species.dim if dim is None else dim
    out = []
    for i, j in species.pairs():
        gam = float(species.exponents[i, j])
        thr = admissible_threshold(dim, i == j)
        out.append(PairVerdict(i, j, gam, thr, thr - abs(gam)))
    return out
