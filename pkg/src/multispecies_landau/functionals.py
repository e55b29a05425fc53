"""Moments, entropy, Fisher information and their dissipation along the Landau flow.

Pair-grid quadratures (entropy dissipation in symmetrized form, the two forms
of the Fisher dissipation and its parallel/radial/spherical/remainder
regrouping) run over all ordered node pairs with coincident nodes excluded.
The pair weight ``F_ij = f_i(v) f_j(v_*)`` uses the same node weights as the
collision flux (see :func:`landau.node_weights`), so the symmetrized entropy
dissipation is exactly the entropy production of the discrete operator.
Derivatives of ``log f_i(v) + log f_j(v_*)`` on the pair grid are assembled
from per-species gradients and Hessians, never differenced on the pair grid.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateStateError
from .geometry import SkewBasis
from .landau import flux, flux_weights
from .vgrid import gradient, integrate

__all__ = [
    "Moments",
    "DissipationBreakdown",
    "DiagnosticsRecord",
    "moments",
    "entropy",
    "fisher",
    "entropy_dissipation",
    "fisher_dissipation",
    "fisher_dissipation_xi",
    "dissipation_breakdown",
    "xi_field",
    "diagnostics",
]


@dataclass(frozen=True)
class Moments:
    densities: np.ndarray
    momentum: np.ndarray
    energy: float
    rho: float
    u: np.ndarray
    theta: float


def moments(state):
    """Number densities, total momentum and energy, and the mixture ``rho, u, theta``."""
    grid = state.grid
    sp = state.species
    d = grid.dim
    x = grid.coordinates
    r2 = np.sum(x * x, axis=0)
    n = np.array([integrate(grid, f) for f in state.fields])
    total = float(np.sum(n))
    if not total > 0:
        raise DegenerateStateError("total number density is zero")
    P = np.array([sum(m * integrate(grid, x[a] * f) for m, f in zip(sp.masses, state.fields)) for a in range(d)])
    E = sum(0.5 * m * integrate(grid, r2 * f) for m, f in zip(sp.masses, state.fields))
    rho = float(sp.masses @ n)
    u = P / rho
    theta = (2.0 * E - rho * float(u @ u)) / (d * total)
    return Moments(n, P, float(E), rho, u, float(theta))


def entropy(state):
    """``sum_i int f_i log f_i dv`` with floored logarithms."""
    return integrate(state.grid, state.fields * state.psi)


def fisher(state):
    """Mass-weighted Fisher information ``sum_i (1/m_i) int f_i |grad log f_i|^2 dv``."""
    g2 = np.sum(state.grad_psi**2, axis=1)
    weights = 1.0 / state.species.masses
    return integrate(state.grid, np.einsum("s,s...->...", weights, state.fields * g2))


def _flat(state):
    """Per-species node arrays laid out for the compiled kernels."""
    cache = state.__dict__.setdefault("_flat_cache", {})
    if not cache:
        S = state.species.count
        n = state.grid.size
        d = state.grid.dim
        cache["f"] = np.ascontiguousarray(flux_weights(state).reshape(S, n))
        cache["a"] = np.ascontiguousarray(np.moveaxis(state.grad_psi.reshape(S, d, n), 1, 2))
        cache["H"] = np.ascontiguousarray(np.moveaxis(state.hess_psi.reshape(S, d, d, n), 3, 1))
    return cache


def entropy_dissipation(state, method="fft"):
    """Entropy production ``D = -dH/dt >= 0``.

    ``"direct"`` evaluates the symmetrized pair sum
    ``1/2 sum_ij c_ij h^{2d} sum alpha A : (u (x) u) f_i f_j^*``;
    ``"fft"`` evaluates the equal one-sided form ``sum_ij c_ij <g_i, J_ij>``
    through the collision fluxes.
    """
    sp = state.species
    grid = state.grid
    total = 0.0
    if method == "fft":
        g = state.grad_psi
        for i, j in sp.pairs():
            c = float(sp.couplings[i, j])
            if c:
                total += c / sp.masses[i] * grid.cell_volume * float(np.sum(g[i] * flux(state, i, j)))
        return total
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    fl = _flat(state)
    x = grid.points
    for i, j in sp.pairs():
        c = float(sp.couplings[i, j])
        if c:
            part = _kernels.entropy_pair_terms(
                x, fl["f"][i], fl["f"][j], fl["a"][i], fl["a"][j],
                sp.masses[i], sp.masses[j], float(sp.exponents[i, j]),
            )
            total += 0.5 * c * grid.cell_volume**2 * float(np.sum(part))
    return total


def _pair_terms(state, basis=None):
    """Raw pair sums per ordered species pair; columns as in ``_kernels``."""
    basis = SkewBasis(state.grid.dim) if basis is None else basis
    cache = state.__dict__.setdefault("_pair_terms_cache", {})
    if basis.pairs in cache:
        return cache[basis.pairs]
    sp = state.species
    fl = _flat(state)
    x = state.grid.points
    pairs = np.array(basis.pairs, dtype=np.int64)
    h2d = state.grid.cell_volume**2
    out = {}
    for i, j in sp.pairs():
        part = _kernels.fisher_pair_terms(
            x, fl["f"][i], fl["f"][j], fl["a"][i], fl["a"][j], fl["H"][i], fl["H"][j],
            pairs, sp.masses[i], sp.masses[j], float(sp.exponents[i, j]),
        )
        out[i, j] = h2d * part.sum(axis=0)
    cache[basis.pairs] = out
    return out


def fisher_dissipation(state, basis=None):
    """``dI/dt`` in rotation-derivative form (sum of a negative square and a remainder)."""
    terms = _pair_terms(state, basis)
    sp = state.species
    return float(sum(sp.couplings[i, j] * terms[i, j][_kernels.FISHER] for i, j in sp.pairs()))


def xi_field(state):
    """``Xi_i = 2 Laplacian(log f_i) + |grad log f_i|^2`` per species."""
    lap = np.trace(state.hess_psi, axis1=1, axis2=2)
    return 2.0 * lap + np.sum(state.grad_psi**2, axis=1)


def fisher_dissipation_xi(state):
    """``dI/dt`` from the symmetrized Xi form, evaluated independently of the rotation form."""
    sp = state.species
    grid = state.grid
    S, n, d = sp.count, grid.size, grid.dim
    xi = xi_field(state)
    y = np.stack([gradient(grid, xi[s]) / sp.masses[s] ** 2 for s in range(S)])
    y = np.ascontiguousarray(np.moveaxis(y.reshape(S, d, n), 1, 2))
    fl = _flat(state)
    x = grid.points
    total = 0.0
    for i, j in sp.pairs():
        c = float(sp.couplings[i, j])
        if c:
            part = _kernels.xi_pair_terms(
                x, fl["f"][i], fl["f"][j], fl["a"][i], fl["a"][j], y[i], y[j],
                sp.masses[i], sp.masses[j], float(sp.exponents[i, j]),
            )
            total += 0.5 * c * grid.cell_volume**2 * float(np.sum(part))
    return total


@dataclass(frozen=True)
class DissipationBreakdown:
    """Parallel, radial, spherical and remainder parts per unordered species pair.

    Values are normalized so that the Fisher dissipation equals
    ``sum prefactor * (-parallel - radial - spherical + remainder)``; for
    ``i != j`` both orientations ``(i, j)`` and ``(j, i)`` are included.
    """

    pairs: list
    parallel: np.ndarray
    radial: np.ndarray
    spherical: np.ndarray
    remainder: np.ndarray
    prefactor: np.ndarray
    total: float

    def as_dict(self):
        return {
            (i, j): dict(parallel=p, radial=r, spherical=s, remainder=q, prefactor=c)
            for (i, j), p, r, s, q, c in zip(
                self.pairs, self.parallel, self.radial, self.spherical, self.remainder, self.prefactor
            )
        }


def dissipation_breakdown(state, basis=None):
    """Regroup the Fisher dissipation into parallel, radial and spherical parts."""
    terms = _pair_terms(state, basis)
    sp = state.species
    upairs = sp.unordered_pairs()
    cols = {name: np.zeros(len(upairs)) for name in ("par", "rad", "sph", "rem")}
    pref = np.zeros(len(upairs))
    for idx, (i, j) in enumerate(upairs):
        mi, mj = sp.masses[i], sp.masses[j]
        # Cartesian forms carry c_ij; divide by c~_ij = c_ij (m_i m_j)^-3 (m_i + m_j)^3.
        scale = (mi * mj / (mi + mj)) ** 3
        pref[idx] = sp.couplings[i, j] / scale
        orient = [(i, j)] if i == j else [(i, j), (j, i)]
        for key, col in (("par", _kernels.PARALLEL), ("rad", _kernels.RADIAL),
                         ("sph", _kernels.SPHERICAL), ("rem", _kernels.REMAINDER)):
            cols[key][idx] = scale * sum(terms[o][col] for o in orient)
    total = float(np.sum(pref * (-cols["par"] - cols["rad"] - cols["sph"] + cols["rem"])))
    return DissipationBreakdown(upairs, cols["par"], cols["rad"], cols["sph"], cols["rem"], pref, total)


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    densities: np.ndarray
    momentum: np.ndarray
    energy: float
    rho: float
    u: np.ndarray
    theta: float
    entropy: float
    fisher: float
    entropy_dissipation: float
    fisher_dissipation: float = float("nan")
    fisher_dissipation_xi: float = float("nan")
    breakdown: DissipationBreakdown = None
    clamped_node_count: int = 0
    clamped_mass: float = 0.0
    extra: dict = field(default_factory=dict)


def diagnostics(state, dissipation=True, clamped_mass=0.0):
    """All functionals of one state; the pair-grid Fisher terms only if ``dissipation``."""
    mom = moments(state)
    kwargs = {}
    if dissipation:
        kwargs = dict(
            fisher_dissipation=fisher_dissipation(state),
            fisher_dissipation_xi=fisher_dissipation_xi(state),
            breakdown=dissipation_breakdown(state),
        )
    return DiagnosticsRecord(
        time=state.time,
        densities=mom.densities,
        momentum=mom.momentum,
        energy=mom.energy,
        rho=mom.rho,
        u=mom.u,
        theta=mom.theta,
        entropy=entropy(state),
        fisher=fisher(state),
        entropy_dissipation=entropy_dissipation(state),
        clamped_node_count=state.clamped_nodes,
        clamped_mass=clamped_mass,
        **kwargs,
    )
