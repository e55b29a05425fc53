"""Uniform cell-centred velocity grid and adjoint-consistent difference operators.

Scalar fields are numpy arrays of shape ``(N,) * d``; vector fields carry a
leading component axis, shape ``(d,) + (N,) * d``.  The divergence is built as
the exact negative transpose of the gradient, so that

    h^d sum(g * divergence(F)) == -h^d sum(gradient(g) . F)

holds to rounding for every pair of fields.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridMismatchError, InvalidGridError

__all__ = [
    "VelocityGrid",
    "make_grid",
    "gradient",
    "divergence",
    "hessian",
    "integrate",
    "inner",
    "log_field",
]


@dataclass(frozen=True)
class VelocityGrid:
    """Midpoint grid on the box ``[-extent, extent]^dim``.

    Nodes sit at ``-extent + (m + 1/2) h`` with ``h = 2 extent / N``.
    """

    dim: int
    extent: float
    points_per_axis: int

    @property
    def spacing(self):
        return 2.0 * self.extent / self.points_per_axis

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @property
    def size(self):
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self):
        return self.spacing**self.dim

    @cached_property
    def axis(self):
        n = self.points_per_axis
        # (2m + 1 - n) / n * extent is exactly antisymmetric in m <-> n - 1 - m
        return (2.0 * np.arange(n) + 1.0 - n) * (self.extent / n)

    @cached_property
    def coordinates(self):
        """Node coordinates, shape ``(dim,) + shape``."""
        return np.stack(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    @cached_property
    def points(self):
        """Node coordinates flattened row-major, shape ``(size, dim)``."""
        return np.ascontiguousarray(self.coordinates.reshape(self.dim, -1).T)

    def check_scalar(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise GridMismatchError(f"scalar field of shape {f.shape} on grid of shape {self.shape}")
        return f

    def check_vector(self, F):
        F = np.asarray(F, dtype=float)
        if F.shape != (self.dim,) + self.shape:
            raise GridMismatchError(
                f"vector field of shape {F.shape} on grid expecting {(self.dim,) + self.shape}"
            )
        return F


def make_grid(dim, extent, points_per_axis):
    """Build a :class:`VelocityGrid`, validating its parameters."""
    if dim not in (2, 3):
        raise InvalidGridError(f"dim must be 2 or 3, got {dim}")
    if not extent > 0:
        raise InvalidGridError(f"extent must be positive, got {extent}")
    if int(points_per_axis) != points_per_axis:
        raise InvalidGridError(f"points_per_axis must be an integer, got {points_per_axis}")
    n = int(points_per_axis)
    if n < 8 or n % 2:
        raise InvalidGridError(f"points_per_axis must be even and >= 8, got {n}")
    return VelocityGrid(int(dim), float(extent), n)


def _diff(f, axis, h):
    # Central differences inside, second-order one-sided rows at both ends.
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = f[2:] - f[:-2]
    out[0] = -3.0 * f[0] + 4.0 * f[1] - f[2]
    out[-1] = 3.0 * f[-1] - 4.0 * f[-2] + f[-3]
    out /= 2.0 * h
    return np.moveaxis(out, 0, axis)


def _diff_transpose(g, axis, h):
    # Exact transpose of the matrix applied by _diff.
    g = np.moveaxis(g, axis, 0)
    out = np.zeros_like(g)
    out[2:] += g[1:-1]
    out[:-2] -= g[1:-1]
    out[0] -= 3.0 * g[0]
    out[1] += 4.0 * g[0]
    out[2] -= g[0]
    out[-1] += 3.0 * g[-1]
    out[-2] -= 4.0 * g[-1]
    out[-3] += g[-1]
    out /= 2.0 * h
    return np.moveaxis(out, 0, axis)


def gradient(grid, f):
    """Second-order gradient of a scalar field, shape ``(dim,) + grid.shape``."""
    f = grid.check_scalar(f)
    return np.stack([_diff(f, a, grid.spacing) for a in range(grid.dim)])


def divergence(grid, F):
    """Divergence defined as the negative adjoint of :func:`gradient`."""
    F = grid.check_vector(F)
    out = np.zeros(grid.shape)
    for a in range(grid.dim):
        out -= _diff_transpose(F[a], a, grid.spacing)
    return out


def hessian(grid, f):
    """Second derivatives by applying the gradient stencil twice.

    Returns shape ``(dim, dim) + grid.shape``; symmetric exactly because the
    one-dimensional stencils along different axes commute.
    """
    g = gradient(grid, f)
    h = grid.spacing
    return np.stack([np.stack([_diff(g[b], a, h) for b in range(grid.dim)]) for a in range(grid.dim)])


def integrate(grid, f):
    """Midpoint quadrature ``h^d sum f``."""
    return grid.cell_volume * float(np.sum(f))


def inner(grid, f, g):
    """Quadrature inner product; vector fields are contracted over components."""
    return grid.cell_volume * float(np.sum(np.asarray(f) * np.asarray(g)))


def log_field(f, floor=1e-30):
    """Return ``(log(max(f, floor)), number of clamped nodes)``."""
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    f = np.asarray(f, dtype=float)
    clamped = f < floor
    return np.log(np.where(clamped, floor, f)), int(np.count_nonzero(clamped))
