"""State-carrying value types shared across the library."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    HERMITICITY_TOL,
    SubsystemLayout,
    as_layout,
    is_hermitian,
    partial_trace,
    permute_subsystems,
    permuted_dims,
)

#: normalization slack: Tr rho may sit in (0, 1 + TRACE_TOL]
TRACE_TOL = 1e-10

DIM_CAP_ENV = "MARKOVGAP_DIM_CAP"
DEFAULT_DIM_CAP = 4096


class CapExceededError(ValueError):
    """Requested construction exceeds the configured dense-dimension cap."""


def dim_cap(override: int | None = None) -> int:
    """Active dense-dimension cap: explicit override, else the
    MARKOVGAP_DIM_CAP environment variable, else 4096."""
    if override is not None:
        return int(override)
    env = os.environ.get(DIM_CAP_ENV)
    if env is not None:
        return int(env)
    return DEFAULT_DIM_CAP


def check_cap(dim: int, override: int | None = None) -> None:
    cap = dim_cap(override)
    if dim > cap:
        raise CapExceededError(f"dimension {dim} exceeds cap {cap}")


@dataclass(frozen=True)
class DensityOperator:
    """Possibly subnormalized positive operator with a subsystem layout."""

    mat: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        layout = as_layout(self.layout)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "layout", layout)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density operator must be square, got {mat.shape}")
        if layout.total_dim != mat.shape[0]:
            raise ValueError(
                f"layout {layout.dims} does not match matrix dimension {mat.shape[0]}"
            )
        if not is_hermitian(mat):
            raise ValueError("density operator is not Hermitian within tolerance")
        eigs = np.linalg.eigvalsh(mat)
        scale = max(1.0, float(eigs.max(initial=0.0)))
        if eigs.min(initial=0.0) < -HERMITICITY_TOL * scale:
            raise ValueError(f"density operator has negative eigenvalue {eigs.min()}")
        tr = float(mat.trace().real)
        if not (0.0 < tr <= 1.0 + TRACE_TOL):
            raise ValueError(f"trace {tr} outside (0, 1]")

    @classmethod
    def from_matrix(
        cls, mat: np.ndarray, dims: Sequence[int] | SubsystemLayout | None = None
    ) -> "DensityOperator":
        mat = np.asarray(mat, dtype=complex)
        if dims is None:
            dims = (mat.shape[0],)
        return cls(mat, as_layout(dims))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(self.mat.trace().real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.trace - 1.0) <= TRACE_TOL

    def marginal(self, keep: Sequence[int]) -> "DensityOperator":
        keep = sorted(set(int(i) for i in keep))
        mat = partial_trace(self.mat, self.layout, keep)
        dims = tuple(self.layout.dims[i] for i in keep)
        return DensityOperator(mat, SubsystemLayout(dims))

    def permute(self, perm: Sequence[int]) -> "DensityOperator":
        mat = permute_subsystems(self.mat, self.layout, perm)
        return DensityOperator(mat, SubsystemLayout(permuted_dims(self.layout, perm)))

    def grouped(self, groups: Sequence[Sequence[int]]) -> "DensityOperator":
        """Reinterpret contiguous index groups as single factors (no data change)."""
        flat = [i for g in groups for i in g]
        if flat != list(range(len(self.layout))):
            raise ValueError("groups must partition the layout contiguously, in order")
        dims = tuple(int(np.prod([self.layout.dims[i] for i in g])) for g in groups)
        return DensityOperator(self.mat, SubsystemLayout(dims))


@dataclass(frozen=True)
class PureStateVector:
    """Normalized state vector with a subsystem layout."""

    amplitudes: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        layout = as_layout(self.layout)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "layout", layout)
        if layout.total_dim != amp.shape[0]:
            raise ValueError("layout does not match amplitude vector length")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state vector norm {norm} is not 1 within 1e-10")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def to_density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)

    def marginal(self, keep: Sequence[int]) -> DensityOperator:
        return self.to_density().marginal(keep)
