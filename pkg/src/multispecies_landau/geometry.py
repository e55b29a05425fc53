"""Collision geometry: rotation generators, the projection tensor, and centre-of-mass coordinates."""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

__all__ = [
    "SkewBasis",
    "PairPoint",
    "ZrsPoint",
    "b_vector",
    "projection_tensor",
    "apply_L",
    "to_zrs",
    "from_zrs",
    "pair_invariants",
]


@dataclass(frozen=True)
class SkewBasis:
    """Basis ``E_pq - E_qp`` (``p < q``) of skew-symmetric ``dim x dim`` matrices.

    Pairs are enumerated lexicographically unless an explicit order is given.
    Indices are zero-based.
    """

    dim: int
    pairs: tuple = None

    def __post_init__(self):
        if self.pairs is None:
            object.__setattr__(self, "pairs", tuple(combinations(range(self.dim), 2)))
        if len(self.pairs) != self.dim * (self.dim - 1) // 2 or any(p >= q for p, q in self.pairs):
            raise ValueError(f"invalid skew pair enumeration {self.pairs} for dim {self.dim}")

    @property
    def size(self):
        return len(self.pairs)

    @cached_property
    def matrices(self):
        """Array ``K`` of shape ``(M, d, d)`` with ``b_k(w) = K[k] @ w``."""
        K = np.zeros((self.size, self.dim, self.dim))
        for k, (p, q) in enumerate(self.pairs):
            K[k, p, q] = 1.0
            K[k, q, p] = -1.0
        return K

    def permuted(self, order):
        return SkewBasis(self.dim, tuple(self.pairs[k] for k in order))


def b_vector(basis, k, w):
    """``w_q e_p - w_p e_q`` for the k-th pair; vectorized over leading axes of ``w``."""
    if not 0 <= k < basis.size:
        raise IndexError(f"generator index {k} out of range [0, {basis.size})")
    w = np.asarray(w, dtype=float)
    p, q = basis.pairs[k]
    out = np.zeros_like(w)
    out[..., p] = w[..., q]
    out[..., q] = -w[..., p]
    return out


def projection_tensor(w):
    """``|w|^2 I - w (x) w``."""
    w = np.asarray(w, dtype=float)
    d = w.shape[-1]
    return np.einsum("...i,...i->...", w, w)[..., None, None] * np.eye(d) - w[..., :, None] * w[..., None, :]


@dataclass(frozen=True)
class PairPoint:
    v: np.ndarray
    v_star: np.ndarray
    m_i: float
    m_j: float


@dataclass(frozen=True)
class ZrsPoint:
    z: np.ndarray
    r: float
    sigma: np.ndarray
    degenerate: bool = False


def apply_L(basis, k, grad_i, grad_j, pair):
    """Rotation derivative ``b.grad_i / m_i - b.grad_j / m_j`` with ``b = b_k(v - v_*)``.

    When the gradients are those of ``log f_i`` at ``v`` and ``log f_j`` at
    ``v_*``, this is ``L_k`` applied to ``log(f_i(v) f_j(v_*))``.
    """
    b = b_vector(basis, k, np.asarray(pair.v) - np.asarray(pair.v_star))
    return float(b @ np.asarray(grad_i)) / pair.m_i - float(b @ np.asarray(grad_j)) / pair.m_j


_DEFAULT_SIGMA_AXIS = 0


def to_zrs(pair):
    """Centre-of-mass velocity, relative speed and relative direction."""
    v = np.asarray(pair.v, dtype=float)
    vs = np.asarray(pair.v_star, dtype=float)
    mi, mj = pair.m_i, pair.m_j
    z = (mi * v + mj * vs) / (mi + mj)
    w = v - vs
    r = float(np.linalg.norm(w))
    if r == 0.0:
        sigma = np.zeros_like(v)
        sigma[_DEFAULT_SIGMA_AXIS] = 1.0
        return ZrsPoint(z, 0.0, sigma, degenerate=True)
    return ZrsPoint(z, r, w / r)


def from_zrs(z, r, sigma, m_i, m_j):
    """Inverse of :func:`to_zrs`."""
    if r < 0:
        raise ValueError(f"relative speed must be nonnegative, got {r}")
    z = np.asarray(z, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if not np.isclose(np.linalg.norm(sigma), 1.0, rtol=0, atol=1e-12):
        raise ValueError("sigma must be a unit vector")
    tot = m_i + m_j
    return PairPoint(z + (m_j / tot) * r * sigma, z - (m_i / tot) * r * sigma, m_i, m_j)


def pair_invariants(pair):
    """Pair momentum ``m_i v + m_j v_*`` and energy ``m_i |v|^2 + m_j |v_*|^2``."""
    v = np.asarray(pair.v, dtype=float)
    vs = np.asarray(pair.v_star, dtype=float)
    return pair.m_i * v + pair.m_j * vs, float(pair.m_i * v @ v + pair.m_j * vs @ vs)
