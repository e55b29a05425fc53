"""Multi-species Landau collision operator in entropy form.

For species ``i`` and ``j`` the flux

    J_ij(v) = h^d sum_{v_* != v} |v - v_*|^gamma A(v - v_*) w_i(v) w_j(v_*) (g_i(v) - g_j(v_*)),

with ``g_i = grad(log f_i) / m_i``, depends on ``v - v_*`` only through the
kernel, so on the uniform grid it is a discrete convolution.  It is evaluated
with zero-padded FFTs, which reproduces the direct pair sum to rounding; the
direct sum is kept as ``method="direct"`` for cross-checks.  The collision term
is ``Q_ji = (c_ij / m_i) divergence(J_ij)``; because the divergence is the
negative adjoint of the gradient and the pair weight ``w_i(v) w_j(v_*)`` is
symmetric and nonnegative, mass, momentum and energy are conserved and
``sum_i <log f_i, Q_i> <= 0`` holds exactly in the semi-discrete system.

The node weights ``w`` equal ``f`` except in steep tails, where they are
limited against the neighbouring values (:func:`node_weights`).  With plain
``f`` the flux at a node reacts to ``log f`` of a neighbour that may be many
orders of magnitude smaller, which makes explicit time stepping unstable in
the far tails; the limiter removes that sensitivity without touching the
resolved part of the distribution.
"""

from functools import lru_cache

import numpy as np
import scipy.fft

from .state import DEFAULT_FLOOR, MixtureState
from .vgrid import divergence

__all__ = [
    "MixtureState",
    "kernel_matrix",
    "flux",
    "flux_weights",
    "node_weights",
    "collision_pair",
    "rhs",
    "mixture_from_bumps",
    "random_mixture",
]


def kernel_matrix(w, gamma):
    """``|w|^gamma (|w|^2 I - w w^T)``, zero at ``w = 0``; ``w`` has shape ``(..., d)``."""
    w = np.asarray(w, dtype=float)
    r2 = np.einsum("...i,...i->...", w, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(r2 > 0, r2 ** (0.5 * gamma), 0.0)
    d = w.shape[-1]
    return alpha[..., None, None] * (r2[..., None, None] * np.eye(d) - w[..., :, None] * w[..., None, :])


def _padded_shape(grid):
    return (2 * grid.points_per_axis,) * grid.dim


@lru_cache(maxsize=32)
def _kernel_hats(grid, gamma):
    n = grid.points_per_axis
    idx = np.arange(2 * n)
    offsets = np.where(idx < n, idx, idx - 2 * n).astype(float)
    offsets[n] = 0.0  # offset -n never occurs between nodes
    valid = np.ones(2 * n, dtype=bool)
    valid[n] = False
    mesh = np.meshgrid(*([offsets * grid.spacing] * grid.dim), indexing="ij")
    w = np.stack(mesh, axis=-1)
    K = kernel_matrix(w, gamma)
    mask = np.ones(_padded_shape(grid), dtype=bool)
    for a in range(grid.dim):
        shape = [1] * grid.dim
        shape[a] = -1
        mask = mask & valid.reshape(shape)
    K[~mask] = 0.0
    axes = tuple(range(grid.dim))
    hats = {}
    for a in range(grid.dim):
        for b in range(a, grid.dim):
            hats[a, b] = hats[b, a] = scipy.fft.rfftn(K[..., a, b], s=_padded_shape(grid), axes=axes)
    return hats


def _forward(grid, f):
    return scipy.fft.rfftn(f, s=_padded_shape(grid), axes=tuple(range(grid.dim)))


def _backward(grid, fhat):
    out = scipy.fft.irfftn(fhat, s=_padded_shape(grid), axes=tuple(range(grid.dim)))
    return out[(slice(0, grid.points_per_axis),) * grid.dim]


def neighbour_minimum(fields):
    """Smallest of the ``2d`` axis neighbours of every node; zero on the grid boundary."""
    f = np.asarray(fields, dtype=float)
    out = np.full_like(f, np.inf)
    for a in range(1, f.ndim):
        for shift in (1, -1):
            shifted = np.roll(f, shift, axis=a)
            edge = [slice(None)] * f.ndim
            edge[a] = 0 if shift == 1 else -1
            shifted[tuple(edge)] = 0.0
            np.minimum(out, shifted, out=out)
    return out


WEIGHT_CAP = 4.0


def node_weights(fields, cap=None):
    """Flux weights ``min(f, cap * neighbour_minimum(f))``.

    Equal to ``f`` wherever ``log f`` changes by less than ``log(cap)`` per
    cell.  Across steeper tails the weight of a node is at most ``cap`` times
    that of any neighbour, which bounds the sensitivity of the flux to the
    log-gradient of near-vacuum nodes.
    """
    cap = WEIGHT_CAP if cap is None else cap
    f = np.asarray(fields, dtype=float)
    return np.minimum(f, cap * neighbour_minimum(f))


def flux_weights(state):
    """Node weights of ``state`` as used by the flux (cached on the state)."""
    cache = state.__dict__
    if "_node_weights" not in cache:
        w = node_weights(state.fields)
        w.setflags(write=False)
        cache["_node_weights"] = w
    return cache["_node_weights"]


def _scaled_gradients(state):
    m = state.species.masses
    return state.grad_psi / m.reshape((-1,) + (1,) * (state.grid.dim + 1))


def _flux_fft(state, i, j, g=None, source_hats=None):
    grid = state.grid
    d = grid.dim
    g = _scaled_gradients(state) if g is None else g
    if source_hats is None:
        fj = flux_weights(state)[j]
        source_hats = [_forward(grid, fj)] + [_forward(grid, fj * g[j, b]) for b in range(d)]
    khat = _kernel_hats(grid, float(state.species.exponents[i, j]))
    conv_f = {}
    for a in range(d):
        for b in range(a, d):
            conv_f[a, b] = conv_f[b, a] = _backward(grid, khat[a, b] * source_hats[0])
    J = np.empty((d,) + grid.shape)
    for a in range(d):
        acc = sum(khat[a, b] * source_hats[1 + b] for b in range(d))
        drift = _backward(grid, acc)
        J[a] = sum(conv_f[a, b] * g[i, b] for b in range(d)) - drift
    J *= flux_weights(state)[i] * grid.cell_volume
    return J


def _flux_direct(state, i, j, chunk=256):
    grid = state.grid
    d = grid.dim
    g = _scaled_gradients(state).reshape(state.species.count, d, -1)
    x = grid.points
    wts = flux_weights(state)
    fi = wts[i].ravel()
    fj = wts[j].ravel()
    gam = float(state.species.exponents[i, j])
    J = np.zeros((grid.size, d))
    for start in range(0, grid.size, chunk):
        sl = slice(start, min(start + chunk, grid.size))
        w = x[sl, None, :] - x[None, :, :]
        K = kernel_matrix(w, gam)
        u = g[i][:, sl].T[:, None, :] - g[j].T[None, :, :]
        J[sl] = np.einsum("vsab,vsb,s->va", K, u, fj)
    J *= fi[:, None] * grid.cell_volume
    return np.ascontiguousarray(J.T).reshape((d,) + grid.shape)


def flux(state, i, j, method="fft"):
    """Entropy-form flux ``J_ij`` with shape ``(d,) + grid.shape``."""
    if method == "fft":
        return _flux_fft(state, i, j)
    if method == "direct":
        return _flux_direct(state, i, j)
    raise ValueError(f"unknown method {method!r}")


def collision_pair(state, i, j, method="fft"):
    """``Q_ji(f_j, f_i)`` at every node."""
    c = float(state.species.couplings[i, j])
    if c == 0.0:
        return np.zeros(state.grid.shape)
    return (c / state.species.masses[i]) * divergence(state.grid, flux(state, i, j, method))


def rhs(state, method="fft"):
    """``d f_i / dt = sum_j Q_ji(f_j, f_i)``, shape ``(S,) + grid.shape``."""
    grid = state.grid
    sp = state.species
    S = sp.count
    out = np.zeros((S,) + grid.shape)
    if method != "fft":
        for i, j in sp.pairs():
            out[i] += collision_pair(state, i, j, method)
        return out
    g = _scaled_gradients(state)
    wts = flux_weights(state)
    hats = {}
    for i in range(S):
        total = np.zeros((grid.dim,) + grid.shape)
        for j in range(S):
            c = float(sp.couplings[i, j])
            if c == 0.0:
                continue
            if j not in hats:
                fj = wts[j]
                hats[j] = [_forward(grid, fj)] + [_forward(grid, fj * g[j, b]) for b in range(grid.dim)]
            total += c * _flux_fft(state, i, j, g, hats[j])
        out[i] = divergence(grid, total) / sp.masses[i]
    return out


def mixture_from_bumps(species, grid, bumps, floor=DEFAULT_FLOOR, time=0.0):
    """State whose species ``i`` is a sum of Maxwellians ``(n, u, theta)`` with mass ``m_i``."""
    from .equilibrium import maxwellian

    fields = np.zeros((species.count,) + grid.shape)
    for i, species_bumps in enumerate(bumps):
        for n, u, theta in species_bumps:
            fields[i] += maxwellian(grid, species.masses[i], n, u, theta)
    return MixtureState(species, grid, fields, time, floor)


def random_mixture(species, grid, rng, bumps_per_species=2, floor=DEFAULT_FLOOR, width=(0.7, 1.4)):
    """Positive smooth state: each species a sum of anisotropic Gaussians with random parameters."""
    from .equilibrium import GaussianSpec, gaussian_field

    d = grid.dim
    fields = np.zeros((species.count,) + grid.shape)
    for i in range(species.count):
        for _ in range(bumps_per_species):
            q, _ = np.linalg.qr(rng.normal(size=(d, d)))
            scales = rng.uniform(*width, size=d) / np.sqrt(species.masses[i])
            cov = q @ np.diag(scales**2) @ q.T
            mean = rng.uniform(-1.0, 1.0, size=d)
            fields[i] += gaussian_field(grid, GaussianSpec(mean, cov, rng.uniform(0.5, 1.5)))
    return MixtureState(species, grid, fields, 0.0, floor)
