"""Filter-augmented optimal control problem."""

from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.errors import DimensionMismatchError
from loopshaped_mpc.domain.models.filter_bank import FilterBank
from loopshaped_mpc.domain.models.ocp import OcpDefinition


@dataclass(frozen=True)
class AugmentedOcp:
    """An OCP over (x, x_s) and the auxiliary input nu, built around ``original``.

    ``ocp`` is solved like any other problem; plant inputs are recovered as
    u = C_s x_s + D_s nu. ``interval_mean`` holds (C_bar, D_bar), the maps to the mean of u over
    one hold interval of the grid, when the problem constrains that mean.
    """

    original: OcpDefinition
    bank: FilterBank
    ocp: OcpDefinition
    interval_mean: tuple[FloatArray, FloatArray] | None = None

    def __post_init__(self) -> None:
        if self.ocp.state_dim != self.original.state_dim + self.bank.n_states:
            raise DimensionMismatchError("augmented state must stack the state and filter states")
        if self.ocp.input_dim != self.bank.n_inputs:
            raise DimensionMismatchError("augmented input dimension must equal the bank's")

    @property
    def state_dim(self) -> int:
        return self.ocp.state_dim

    @property
    def filter_dim(self) -> int:
        return self.bank.n_states

    @property
    def input_dim(self) -> int:
        return self.ocp.input_dim

    def split(self, z: FloatArray) -> tuple[FloatArray, FloatArray]:
        """Split an augmented state into the original state and the filter state."""
        n = self.original.state_dim
        return z[..., :n], z[..., n:]

    def recover(self, z: FloatArray, nu: FloatArray) -> FloatArray:
        _, x_s = self.split(z)
        return x_s @ self.bank.c.T + nu @ self.bank.d.T

    def recover_mean(self, z: FloatArray, nu: FloatArray) -> FloatArray:
        """Mean plant input over the hold starting at ``z``; the node value without maps."""
        if self.interval_mean is None:
            return self.recover(z, nu)
        _, x_s = self.split(z)
        mean_c, mean_d = self.interval_mean
        return np.asarray(x_s @ mean_c.T + nu @ mean_d.T)
