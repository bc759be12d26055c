"""Cost terms implementing ``CostTermProtocol``."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from loopshaped_mpc.domain.contracts.cost_term import CostTermProtocol
from loopshaped_mpc.domain.models.arrays import FloatArray, frozen_array
from loopshaped_mpc.domain.models.errors import DimensionMismatchError

Reference = FloatArray | Callable[[float], FloatArray]
ResidualFn = Callable[[FloatArray, float], FloatArray]
ResidualJacobianFn = Callable[[FloatArray, float], FloatArray]


def _check_weight(weight: FloatArray) -> FloatArray:
    matrix = frozen_array(weight)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"cost weight must be square, got {matrix.shape}")
    if not np.allclose(matrix, matrix.T):
        raise ValueError("cost weight must be symmetric")
    if matrix.size and np.min(np.linalg.eigvalsh(matrix)) < -1e-12 * max(1.0, np.abs(matrix).max()):
        raise ValueError("cost weight must be positive semidefinite")
    return matrix


class QuadraticCost:
    """0.5 (v - ref(t))' W (v - ref(t)) with a constant or time-varying reference."""

    def __init__(self, weight: FloatArray, reference: Reference | None = None) -> None:
        self._weight = _check_weight(weight)
        self._reference = reference

    @property
    def weight(self) -> FloatArray:
        return self._weight

    def reference(self, t: float) -> FloatArray:
        if self._reference is None:
            return np.zeros(self._weight.shape[0])
        if callable(self._reference):
            return np.asarray(self._reference(t), dtype=float)
        return np.asarray(self._reference, dtype=float)

    def value(self, v: FloatArray, t: float) -> float:
        error = v - self.reference(t)
        return 0.5 * float(error @ self._weight @ error)

    def gradient(self, v: FloatArray, t: float) -> FloatArray:
        return self._weight @ (v - self.reference(t))

    def hessian(self, v: FloatArray, t: float) -> FloatArray:
        return np.array(self._weight)


# The two names document which argument a quadratic term is attached to.
QuadraticStateCost = QuadraticCost
QuadraticInputCost = QuadraticCost


@dataclass(frozen=True)
class ZeroCost:
    dim: int

    def value(self, v: FloatArray, t: float) -> float:
        return 0.0

    def gradient(self, v: FloatArray, t: float) -> FloatArray:
        return np.zeros(self.dim)

    def hessian(self, v: FloatArray, t: float) -> FloatArray:
        return np.zeros((self.dim, self.dim))


@dataclass(frozen=True)
class EmbeddedCost:
    """Applies ``inner`` to the slice ``[offset, offset + inner_dim)`` of a ``dim`` vector."""

    inner: CostTermProtocol
    offset: int
    inner_dim: int
    dim: int

    def __post_init__(self) -> None:
        if self.offset < 0 or self.offset + self.inner_dim > self.dim:
            raise DimensionMismatchError(
                f"slice [{self.offset}, {self.offset + self.inner_dim}) "
                f"exceeds dimension {self.dim}"
            )

    def _part(self, v: FloatArray) -> FloatArray:
        return v[self.offset : self.offset + self.inner_dim]

    def value(self, v: FloatArray, t: float) -> float:
        return self.inner.value(self._part(v), t)

    def gradient(self, v: FloatArray, t: float) -> FloatArray:
        gradient = np.zeros(self.dim)
        gradient[self.offset : self.offset + self.inner_dim] = self.inner.gradient(self._part(v), t)
        return gradient

    def hessian(self, v: FloatArray, t: float) -> FloatArray:
        hessian = np.zeros((self.dim, self.dim))
        block = slice(self.offset, self.offset + self.inner_dim)
        hessian[block, block] = self.inner.hessian(self._part(v), t)
        return hessian


class SumCost:
    def __init__(self, terms: Sequence[CostTermProtocol]) -> None:
        if not terms:
            raise ValueError("a sum of costs needs at least one term")
        self._terms = tuple(terms)

    def value(self, v: FloatArray, t: float) -> float:
        return sum(term.value(v, t) for term in self._terms)

    def gradient(self, v: FloatArray, t: float) -> FloatArray:
        return sum((term.gradient(v, t) for term in self._terms[1:]), self._terms[0].gradient(v, t))

    def hessian(self, v: FloatArray, t: float) -> FloatArray:
        return sum((term.hessian(v, t) for term in self._terms[1:]), self._terms[0].hessian(v, t))


class PenaltyCost:
    """Quadratic penalty 0.5 w |g(v, t)|^2 with a Gauss-Newton Hessian w J'J.

    Without an analytic ``jacobian`` the residual is differentiated by central differences.
    """

    def __init__(
        self,
        residual: ResidualFn,
        weight: float,
        dim: int,
        jacobian: ResidualJacobianFn | None = None,
        fd_step: float = 1e-6,
    ) -> None:
        if not weight > 0.0:
            raise ValueError(f"penalty weight must be positive, got {weight}")
        self._residual = residual
        self._weight = weight
        self._dim = dim
        self._jacobian = jacobian
        self._fd_step = fd_step

    def _residual_jacobian(self, v: FloatArray, t: float) -> FloatArray:
        if self._jacobian is not None:
            return np.asarray(self._jacobian(v, t), dtype=float)
        columns = []
        for i in range(self._dim):
            h = self._fd_step * max(1.0, abs(float(v[i])))
            step = np.zeros(self._dim)
            step[i] = h
            columns.append((self._residual(v + step, t) - self._residual(v - step, t)) / (2.0 * h))
        return np.stack(columns, axis=-1)

    def value(self, v: FloatArray, t: float) -> float:
        residual = np.asarray(self._residual(v, t), dtype=float)
        return 0.5 * self._weight * float(residual @ residual)

    def gradient(self, v: FloatArray, t: float) -> FloatArray:
        residual = np.asarray(self._residual(v, t), dtype=float)
        return self._weight * self._residual_jacobian(v, t).T @ residual

    def hessian(self, v: FloatArray, t: float) -> FloatArray:
        jacobian = self._residual_jacobian(v, t)
        return self._weight * jacobian.T @ jacobian
