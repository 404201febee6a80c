"""Constructors and validators for the state families used throughout:
antisymmetric-subspace states, Werner states and the U(x)U twirl, explicit
Markov states, random states, purifications and random channels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import permutations as all_permutations
from pathlib import Path
from typing import Sequence

import numpy as np

from . import serialize
from .linalg import (
    SubsystemLayout,
    as_layout,
    dagger,
    partial_trace,
    permutation_operator,
    permutation_sign,
    permute_subsystems,
)
from .measures import cmi
from .operators import (
    CapExceededError,
    DensityOperator,
    PureStateVector,
    TRACE_TOL,
    check_cap,
    dim_cap,
)
from .rng import SplitMix64, haar_unitary


# ---------------------------------------------------------------------------
# Antisymmetric subspace
# ---------------------------------------------------------------------------


def antisym_projector(d: int, k: int, cap: int | None = None) -> np.ndarray:
    """Projector onto the k-fold antisymmetric subspace of (C^d)^(x k),
    built as (1/k!) sum_pi sgn(pi) R(pi).

    For k > d the subspace is empty; the zero matrix is returned with a
    warning rather than an error.
    """
    d, k = int(d), int(k)
    if k < 2:
        raise ValueError(f"need k >= 2 tensor factors, got {k}")
    if d < 1:
        raise ValueError(f"local dimension must be positive, got {d}")
    total = d**k
    check_cap(total, cap)
    if k > d:
        warnings.warn(f"antisymmetric subspace is empty for k={k} > d={d}; returning 0")
        return np.zeros((total, total), dtype=complex)

    idx = np.arange(total)
    weights = d ** (k - 1 - np.arange(k))
    digits = (idx[:, None] // weights[None, :]) % d
    proj = np.zeros((total, total), dtype=complex)
    norm = 1.0 / math.factorial(k)
    for perm in all_permutations(range(k)):
        dest_weights = np.array([d ** (k - 1 - perm[m]) for m in range(k)])
        target = digits @ dest_weights
        proj[target, idx] += permutation_sign(perm) * norm
    return proj


def antisym_state(d: int, cap: int | None = None) -> DensityOperator:
    """Normalized projector onto the antisymmetric subspace of C^d (x) C^d."""
    if d < 2:
        raise ValueError(f"need local dimension >= 2, got {d}")
    proj = antisym_projector(d, 2, cap)
    return DensityOperator(proj * (2.0 / (d * (d - 1))), (d, d))


def uniform_antisym_state(d: int, k: int, cap: int | None = None) -> DensityOperator:
    """Uniform state on the k-fold antisymmetric subspace, layout of k factors
    of dimension d; factors 0 and 1 play the roles of A and B."""
    if not 2 <= k <= d:
        raise ValueError(f"need 2 <= k <= d, got k={k}, d={d}")
    proj = antisym_projector(d, k, cap)
    rank = math.comb(d, k)
    return DensityOperator(proj / rank, (d,) * k)


# ---------------------------------------------------------------------------
# Werner family and the U (x) U twirl
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WernerParameter:
    """Flip-operator expectation f in [-1, 1] for dimension d >= 2."""

    d: int
    f: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"need d >= 2, got {self.d}")
        if not -1.0 <= self.f <= 1.0:
            raise ValueError(f"flip expectation must lie in [-1, 1], got {self.f}")


def swap_operator(d: int) -> np.ndarray:
    """Flip operator F on C^d (x) C^d."""
    return permutation_operator((d, d), (1, 0))


def werner_state(param: WernerParameter, cap: int | None = None) -> DensityOperator:
    """W(f) = (1+f)/2 * P_sym / dim_sym + (1-f)/2 * P_anti / dim_anti."""
    d, f = param.d, param.f
    check_cap(d * d, cap)
    flip = swap_operator(d)
    eye = np.eye(d * d, dtype=complex)
    p_sym = (eye + flip) / 2.0
    p_anti = (eye - flip) / 2.0
    dim_sym = d * (d + 1) // 2
    dim_anti = d * (d - 1) // 2
    mat = (1.0 + f) / 2.0 * p_sym / dim_sym + (1.0 - f) / 2.0 * p_anti / dim_anti
    return DensityOperator(mat, (d, d))


def uu_twirl(rho: DensityOperator) -> tuple[WernerParameter, DensityOperator]:
    """Project onto the Werner family: the closed form of averaging g (x) g
    conjugations over the unitary group.

    Returns the Werner parameter (with antisymmetric weight Tr(P_anti rho))
    and the twirled state; the trace of the input is preserved.
    """
    dims = rho.layout.dims
    if len(dims) != 2 or dims[0] != dims[1]:
        raise ValueError(f"twirl needs a bipartite layout with equal dims, got {dims}")
    d = dims[0]
    flip = swap_operator(d)
    tr = rho.trace
    f_raw = float(np.einsum("ij,ji->", flip, rho.mat).real) / tr
    f = float(np.clip(f_raw, -1.0, 1.0))
    param = WernerParameter(d, f)
    twirled = werner_state(param)
    if abs(tr - 1.0) > TRACE_TOL:
        twirled = DensityOperator(twirled.mat * tr, (d, d))
    return param, twirled


# ---------------------------------------------------------------------------
# Markov states (direct sum of tensor products over C)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarkovBlock:
    """One direct-sum block: weight p, C-factor dims, and the two factor states
    on A (x) C_L and C_R (x) B."""

    p: float
    dim_cl: int
    dim_cr: int
    left: DensityOperator
    right: DensityOperator

    def __post_init__(self):
        if self.p <= 0.0:
            raise ValueError(f"block probability must be positive, got {self.p}")
        if self.dim_cl < 1 or self.dim_cr < 1:
            raise ValueError("block factor dimensions must be >= 1")
        if not self.left.is_normalized:
            raise ValueError("left factor state is not normalized")
        if not self.right.is_normalized:
            raise ValueError("right factor state is not normalized")


@dataclass(frozen=True)
class MarkovSpec:
    """Explicit direct-sum-of-tensor-products description of a Markov state."""

    blocks: tuple[MarkovBlock, ...]
    dim_a: int
    dim_b: int

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("Markov description needs at least one block")
        total_p = sum(b.p for b in blocks)
        if abs(total_p - 1.0) > 1e-12:
            raise ValueError(f"block probabilities sum to {total_p}, not 1")
        for b in blocks:
            if b.left.dim != self.dim_a * b.dim_cl:
                raise ValueError(
                    f"left factor has dim {b.left.dim}, expected {self.dim_a * b.dim_cl}"
                )
            if b.right.dim != b.dim_cr * self.dim_b:
                raise ValueError(
                    f"right factor has dim {b.right.dim}, expected {b.dim_cr * self.dim_b}"
                )

    @property
    def dim_c(self) -> int:
        return sum(b.dim_cl * b.dim_cr for b in self.blocks)

    def to_json_dict(self) -> dict:
        return {
            "dimA": self.dim_a,
            "dimB": self.dim_b,
            "blocks": [
                {
                    "p": b.p,
                    "dimCL": b.dim_cl,
                    "dimCR": b.dim_cr,
                    "left": serialize.complex_matrix_to_json(b.left.mat),
                    "right": serialize.complex_matrix_to_json(b.right.mat),
                }
                for b in self.blocks
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MarkovSpec":
        dim_a = int(data["dimA"])
        dim_b = int(data["dimB"])
        blocks = []
        for raw in data["blocks"]:
            dim_cl = int(raw["dimCL"])
            dim_cr = int(raw["dimCR"])
            left = DensityOperator(
                serialize.complex_matrix_from_json(raw["left"]), (dim_a, dim_cl)
            )
            right = DensityOperator(
                serialize.complex_matrix_from_json(raw["right"]), (dim_cr, dim_b)
            )
            blocks.append(MarkovBlock(float(raw["p"]), dim_cl, dim_cr, left, right))
        return cls(tuple(blocks), dim_a, dim_b)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(serialize.dumps(self.to_json_dict()) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "MarkovSpec":
        return cls.from_json_dict(serialize.loads(Path(path).read_text()))


def build_markov_raw(
    blocks: Sequence[tuple[float, int, int, np.ndarray, np.ndarray]],
    dim_a: int,
    dim_b: int,
) -> np.ndarray:
    """Assemble the direct-sum state matrix on A (x) B (x) C from raw block
    data (p, dim_cl, dim_cr, left matrix, right matrix); no validation."""
    dim_c = sum(cl * cr for _, cl, cr, _, _ in blocks)
    out = np.zeros((dim_a, dim_b, dim_c, dim_a, dim_b, dim_c), dtype=complex)
    offset = 0
    for p, cl, cr, left, right in blocks:
        joint = np.kron(left, right)  # ordering A, C_L, C_R, B
        joint = permute_subsystems(joint, (dim_a, cl, cr, dim_b), (0, 2, 3, 1))
        ci = cl * cr
        t = joint.reshape(dim_a, dim_b, ci, dim_a, dim_b, ci)
        out[:, :, offset : offset + ci, :, :, offset : offset + ci] += p * t
        offset += ci
    dim = dim_a * dim_b * dim_c
    return out.reshape(dim, dim)


def build_markov_state(spec: MarkovSpec) -> DensityOperator:
    """Realize a MarkovSpec as a density operator with layout (A, B, C); the
    C space embeds the blocks at consecutive offsets in listed order."""
    mat = build_markov_raw(
        [(b.p, b.dim_cl, b.dim_cr, b.left.mat, b.right.mat) for b in spec.blocks],
        spec.dim_a,
        spec.dim_b,
    )
    return DensityOperator(mat, (spec.dim_a, spec.dim_b, spec.dim_c))


def is_markov_state(rho: DensityOperator, tol: float = 1e-8) -> bool:
    """True iff I(A:B|C) <= tol, with A, B the first two factors and C the rest."""
    if len(rho.layout) < 3:
        raise ValueError("membership check needs at least three subsystems")
    c = list(range(2, len(rho.layout)))
    return cmi(rho, [0], [1], c) <= tol


# ---------------------------------------------------------------------------
# Random states, purification, channels
# ---------------------------------------------------------------------------


def random_density(
    layout: SubsystemLayout | Sequence[int], rank: int, seed: int
) -> DensityOperator:
    """Hilbert-Schmidt-style random state G G^dagger / Tr(G G^dagger) with G a
    seeded total_dim x rank complex Gaussian matrix."""
    layout = as_layout(layout)
    total = layout.total_dim
    if not 1 <= rank <= total:
        raise ValueError(f"rank must be in [1, {total}], got {rank}")
    rng = SplitMix64(seed)
    g = rng.complex_gaussians((total, rank))
    mat = g @ dagger(g)
    mat /= mat.trace().real
    return DensityOperator(mat, layout)


def random_pure_state(layout: SubsystemLayout | Sequence[int], seed: int) -> PureStateVector:
    layout = as_layout(layout)
    rng = SplitMix64(seed)
    amp = rng.complex_gaussians(layout.total_dim)
    amp /= np.linalg.norm(amp)
    return PureStateVector(amp, layout)


def random_unitary(d: int, seed: int) -> np.ndarray:
    return haar_unitary(d, SplitMix64(seed))


def purify(rho: DensityOperator) -> PureStateVector:
    """Purification into system (x) reference with reference dimension equal
    to the rank of the state; tracing out the reference recovers the input."""
    if not rho.is_normalized:
        raise ValueError("can only purify a normalized state")
    lam, vec = np.linalg.eigh(rho.mat)
    scale = float(lam.max(initial=0.0))
    keep = lam > 1e-10 * scale
    lam, vec = lam[keep], vec[:, keep]
    order = np.argsort(lam, kind="stable")[::-1]
    lam, vec = lam[order], vec[:, order]
    amp = (vec * np.sqrt(lam)).reshape(-1)  # index (system, reference), row-major
    amp /= np.linalg.norm(amp)
    dims = rho.layout.dims + (int(lam.size),)
    return PureStateVector(amp, dims)


def ghz_state(parties: int = 3, d: int = 2) -> PureStateVector:
    """(|0...0> + ... + |d-1...d-1>) / sqrt(d) on `parties` factors."""
    amp = np.zeros(d**parties, dtype=complex)
    diagonal_step = sum(d**m for m in range(parties))  # index of |j,...,j> is j * step
    for j in range(d):
        amp[j * diagonal_step] = 1.0
    amp /= np.linalg.norm(amp)
    return PureStateVector(amp, (d,) * parties)


def maximally_entangled_state(d: int) -> PureStateVector:
    amp = np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)
    return PureStateVector(amp, (d, d))


@dataclass(frozen=True)
class QuantumChannel:
    """Kraus representation of a completely positive map."""

    kraus: tuple[np.ndarray, ...]
    dim_in: int
    dim_out: int

    def __post_init__(self):
        for k in self.kraus:
            if k.shape != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"Kraus operator shape {k.shape} != ({self.dim_out}, {self.dim_in})"
                )

    def apply(self, mat: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for k in self.kraus:
            out += k @ mat @ dagger(k)
        return out

    def apply_to(self, rho: DensityOperator) -> DensityOperator:
        if len(rho.layout) != 1 or rho.dim != self.dim_in:
            raise ValueError("apply_to expects a single-factor state of matching dim")
        return DensityOperator(self.apply(rho.mat), (self.dim_out,))

    def kraus_sum(self) -> np.ndarray:
        out = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for k in self.kraus:
            out += dagger(k) @ k
        return out

    @property
    def is_trace_preserving(self) -> bool:
        return bool(np.abs(self.kraus_sum() - np.eye(self.dim_in)).max() <= 1e-10)

    def on_factor(self, layout: SubsystemLayout | Sequence[int], which: int) -> "QuantumChannel":
        """Extend to identity (x) channel (x) identity on a multi-factor layout."""
        dims = as_layout(layout).dims
        if dims[which] != self.dim_in:
            raise ValueError("factor dimension does not match channel input")
        left = int(np.prod(dims[:which])) if which else 1
        right = int(np.prod(dims[which + 1 :])) if which + 1 < len(dims) else 1
        eye_l, eye_r = np.eye(left), np.eye(right)
        kraus = tuple(np.kron(np.kron(eye_l, k), eye_r) for k in self.kraus)
        total_in = left * self.dim_in * right
        total_out = left * self.dim_out * right
        return QuantumChannel(kraus, total_in, total_out)


def random_cptp(
    dim_in: int,
    dim_out: int,
    kraus_count: int,
    seed: int,
    scale: float = 1.0,
) -> QuantumChannel:
    """Random channel from a seeded isometry (orthonormalized Gaussian
    columns); scale < 1 gives a trace-non-increasing variant with
    sum K^dagger K = scale * identity."""
    if kraus_count < 1:
        raise ValueError("need at least one Kraus operator")
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"scale must lie in (0, 1], got {scale}")
    rows = kraus_count * dim_out
    if rows < dim_in:
        raise ValueError(
            f"kraus_count * dim_out = {rows} must be >= dim_in = {dim_in} for an isometry"
        )
    rng = SplitMix64(seed)
    g = rng.complex_gaussians((rows, dim_in))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    iso = q * phases
    root = math.sqrt(scale)
    kraus = tuple(
        root * iso[j * dim_out : (j + 1) * dim_out, :] for j in range(kraus_count)
    )
    return QuantumChannel(kraus, dim_in, dim_out)
