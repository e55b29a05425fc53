"""The mixture state shared by the collision operator, functionals and integrators."""

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import GridMismatchError
from .vgrid import gradient, hessian, log_field

__all__ = ["MixtureState", "DEFAULT_FLOOR"]

DEFAULT_FLOOR = 1e-30


@dataclass(frozen=True, eq=False)
class MixtureState:
    """Distributions ``f_i`` of all species on one grid at time ``time``.

    ``fields`` has shape ``(S,) + grid.shape`` and is stored read-only.
    Inside logarithms values below ``floor`` are replaced by ``floor``.
    """

    species: object
    grid: object
    fields: np.ndarray
    time: float = 0.0
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        f = np.array(self.fields, dtype=float)
        if f.shape != (self.species.count,) + self.grid.shape:
            raise GridMismatchError(
                f"fields of shape {f.shape} do not match {self.species.count} species on grid {self.grid.shape}"
            )
        if self.species.dim != self.grid.dim:
            raise GridMismatchError(f"species configured for d={self.species.dim}, grid has d={self.grid.dim}")
        f.setflags(write=False)
        object.__setattr__(self, "fields", f)

    def with_fields(self, fields, time=None):
        return replace(self, fields=fields, time=self.time if time is None else time)

    @cached_property
    def _logs(self):
        return [log_field(f, self.floor) for f in self.fields]

    @property
    def psi(self):
        """``log max(f_i, floor)`` per species, shape ``(S,) + grid.shape``."""
        return np.stack([p for p, _ in self._logs])

    @property
    def clamped_nodes(self):
        return sum(c for _, c in self._logs)

    @cached_property
    def grad_psi(self):
        """Shape ``(S, d) + grid.shape``."""
        return np.stack([gradient(self.grid, p) for p, _ in self._logs])

    @cached_property
    def hess_psi(self):
        """Shape ``(S, d, d) + grid.shape``."""
        return np.stack([hessian(self.grid, p) for p, _ in self._logs])
