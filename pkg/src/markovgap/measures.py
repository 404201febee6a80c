"""Entropic and divergence functionals.

All outputs are in nats.  Divergences return :class:`DivergenceValue` so that
support-conditional infinities flow through optimizers as ordinary values
instead of exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import serialize
from .linalg import SUPPORT_TOL, dagger, partial_trace, psd_power, psd_sqrt, support_projector
from .operators import DensityOperator, TRACE_TOL
from .rng import SplitMix64, derive, haar_unitary

#: products of eigenvalue weights below this absolute size count as zero overlap
OVERLAP_FLOOR = 1e-12

#: half-width of the alpha window around 1 where Renyi entropies dispatch to
#: the von Neumann limit (the naive formula loses the stated 1e-6 agreement)
ALPHA_ONE_WINDOW = 1e-4


@dataclass(frozen=True, order=True)
class DivergenceValue:
    """A divergence in nats; ``finite`` is False for the +infinity sentinel."""

    value: float
    finite: bool = True

    @classmethod
    def infinite(cls) -> "DivergenceValue":
        return cls(value=math.inf, finite=False)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"DivergenceValue({self.value!r})" if self.finite else "DivergenceValue(inf)"


def _mat(state) -> np.ndarray:
    if isinstance(state, DensityOperator):
        return state.mat
    return np.asarray(state, dtype=complex)


def _trace(mat: np.ndarray) -> float:
    return float(mat.trace().real)


def _require_normalized(state) -> np.ndarray:
    mat = _mat(state)
    if abs(_trace(mat) - 1.0) > TRACE_TOL:
        raise ValueError(f"state must be normalized, trace is {_trace(mat)}")
    return mat


def _supported_eigs(mat: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(mat)
    scale = float(np.abs(lam).max(initial=0.0))
    if scale == 0.0:
        return lam[:0]
    return lam[lam > SUPPORT_TOL * scale]


def _entropy_of_eigs(lam: np.ndarray) -> float:
    if lam.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def von_neumann_entropy(state) -> float:
    """H(rho) = -Tr rho log rho, for a normalized state."""
    mat = _require_normalized(state)
    return _entropy_of_eigs(_supported_eigs(mat))


def _marginal_entropy(rho: DensityOperator, keep: Sequence[int]) -> float:
    if not keep:
        return 0.0
    mat = partial_trace(rho.mat, rho.layout, keep)
    return _entropy_of_eigs(_supported_eigs(mat))


def _check_disjoint(*sets: Iterable[int]) -> list[list[int]]:
    as_lists = [sorted(set(int(i) for i in s)) for s in sets]
    flat = [i for s in as_lists for i in s]
    if len(flat) != len(set(flat)):
        raise ValueError(f"index sets overlap: {as_lists}")
    return as_lists


def conditional_entropy(rho: DensityOperator, a: Iterable[int], b: Iterable[int]) -> float:
    """H(A|B) = H(AB) - H(B)."""
    _require_normalized(rho)
    a, b = _check_disjoint(a, b)
    return _marginal_entropy(rho, a + b) - _marginal_entropy(rho, b)


def mutual_information(rho: DensityOperator, a: Iterable[int], b: Iterable[int]) -> float:
    """I(A:B) = H(A) + H(B) - H(AB)."""
    _require_normalized(rho)
    a, b = _check_disjoint(a, b)
    return _marginal_entropy(rho, a) + _marginal_entropy(rho, b) - _marginal_entropy(rho, a + b)


def cmi(
    rho: DensityOperator, a: Iterable[int], b: Iterable[int], c: Iterable[int] = ()
) -> float:
    """Conditional mutual information I(A:B|C) = H(AC) + H(BC) - H(C) - H(ABC).

    An empty C reduces to the mutual information.
    """
    _require_normalized(rho)
    a, b, c = _check_disjoint(a, b, c)
    return (
        _marginal_entropy(rho, a + c)
        + _marginal_entropy(rho, b + c)
        - _marginal_entropy(rho, c)
        - _marginal_entropy(rho, a + b + c)
    )


def renyi_entropy(state, alpha: float) -> float:
    """H_alpha = log(Tr rho^alpha) / (1 - alpha) for normalized rho.

    Inside |alpha - 1| <= 1e-4 the von Neumann limit is returned; the direct
    formula drifts by ~|alpha - 1| * Var(log rho) / 2 there.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    mat = _require_normalized(state)
    if abs(alpha - 1.0) <= ALPHA_ONE_WINDOW:
        return _entropy_of_eigs(_supported_eigs(mat))
    lam = _supported_eigs(mat)
    return float(np.log(np.sum(lam**alpha)) / (1.0 - alpha))


def naive_renyi_cmi(
    rho: DensityOperator,
    alpha: float,
    a: Iterable[int],
    b: Iterable[int],
    c: Iterable[int] = (),
) -> float:
    """Linear Renyi combination H_a(AC) + H_a(BC) - H_a(C) - H_a(ABC).

    Not a divergence; can be negative.
    """
    _require_normalized(rho)
    a, b, c = _check_disjoint(a, b, c)

    def h(keep: list[int]) -> float:
        if not keep:
            return 0.0
        sub = DensityOperator(partial_trace(rho.mat, rho.layout, keep), tuple(
            rho.layout.dims[i] for i in keep
        ))
        return renyi_entropy(sub, alpha)

    return h(a + c) + h(b + c) - h(c) - h(a + b + c)


def _eig_pair(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eigh(mat)
    return lam, vec


def _support_mass_outside(
    lam_r: np.ndarray, vec_r: np.ndarray, lam_s: np.ndarray, vec_s: np.ndarray
) -> float:
    """Weight of rho lying outside the support of sigma."""
    scale = float(np.abs(lam_s).max(initial=0.0))
    dead = lam_s <= SUPPORT_TOL * scale if scale > 0.0 else np.ones_like(lam_s, dtype=bool)
    if not dead.any():
        return 0.0
    ov = np.abs(dagger(vec_r) @ vec_s[:, dead]) ** 2
    return float(np.clip(lam_r, 0.0, None) @ ov.sum(axis=1))


def relative_entropy(rho, sigma) -> DivergenceValue:
    """Umegaki relative entropy (1/Tr rho) Tr[rho (log rho - log sigma)]."""
    mat_r, mat_s = _mat(rho), _mat(sigma)
    tr_r = _trace(mat_r)
    lam_r, vec_r = _eig_pair(mat_r)
    lam_s, vec_s = _eig_pair(mat_s)
    if _support_mass_outside(lam_r, vec_r, lam_s, vec_s) > SUPPORT_TOL * tr_r:
        return DivergenceValue.infinite()

    scale_r = float(np.abs(lam_r).max(initial=0.0))
    live_r = lam_r > SUPPORT_TOL * scale_r
    scale_s = float(np.abs(lam_s).max(initial=0.0))
    live_s = lam_s > SUPPORT_TOL * scale_s
    ov = np.abs(dagger(vec_r[:, live_r]) @ vec_s[:, live_s]) ** 2
    term_r = float(np.sum(lam_r[live_r] * np.log(lam_r[live_r])))
    term_s = float(lam_r[live_r] @ (ov @ np.log(lam_s[live_s])))
    return DivergenceValue((term_r - term_s) / tr_r)


def renyi_divergence(rho, sigma, alpha: float) -> DivergenceValue:
    """Petz Renyi divergence log(Tr rho^a sigma^(1-a) / Tr rho) / (a - 1).

    alpha = 1 dispatches to the relative entropy; alpha <= 0 is rejected.
    For alpha > 1 the support condition supp rho <= supp sigma is required,
    otherwise the value is infinite.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if alpha == 1.0:
        return relative_entropy(rho, sigma)
    mat_r, mat_s = _mat(rho), _mat(sigma)
    tr_r = _trace(mat_r)
    lam_r, vec_r = _eig_pair(mat_r)
    lam_s, vec_s = _eig_pair(mat_s)
    if alpha > 1.0 and _support_mass_outside(lam_r, vec_r, lam_s, vec_s) > SUPPORT_TOL * tr_r:
        return DivergenceValue.infinite()

    scale_r = float(np.abs(lam_r).max(initial=0.0))
    live_r = lam_r > SUPPORT_TOL * scale_r
    scale_s = float(np.abs(lam_s).max(initial=0.0))
    live_s = lam_s > SUPPORT_TOL * scale_s
    ov = np.abs(dagger(vec_r[:, live_r]) @ vec_s[:, live_s]) ** 2
    total = float(
        (lam_r[live_r] ** alpha) @ ov @ (lam_s[live_s] ** (1.0 - alpha))
    )
    if total <= OVERLAP_FLOOR:
        return DivergenceValue.infinite()
    return DivergenceValue((math.log(total) - math.log(tr_r)) / (alpha - 1.0))


def zero_relative_entropy(rho, sigma) -> DivergenceValue:
    """0-relative entropy -log Tr(P_rho sigma), the alpha -> 0+ limit."""
    mat_r, mat_s = _mat(rho), _mat(sigma)
    proj = support_projector(mat_r)
    overlap = float(np.einsum("ij,ji->", proj, mat_s).real)
    if overlap <= OVERLAP_FLOOR:
        return DivergenceValue.infinite()
    return DivergenceValue(-math.log(overlap))


def sqrt_overlap_norm(rho, sigma) -> float:
    """||sqrt(rho) sqrt(sigma)||_1, summed over singular values of the product
    of the two square roots; unlike eigenvalues of sqrt(rho) sigma sqrt(rho),
    rounding noise enters that sum linearly rather than under a square root."""
    mat_r, mat_s = _mat(rho), _mat(sigma)
    return float(np.linalg.svd(psd_sqrt(mat_r) @ psd_sqrt(mat_s), compute_uv=False).sum())


def fidelity(rho, sigma) -> float:
    """Generalized fidelity ||sqrt(rho) sqrt(sigma)||_1 plus the subnormalized
    correction sqrt((1 - Tr rho)(1 - Tr sigma)), clamped to [0, 1]."""
    mat_r, mat_s = _mat(rho), _mat(sigma)
    gap_r = max(0.0, 1.0 - _trace(mat_r))
    gap_s = max(0.0, 1.0 - _trace(mat_s))
    return float(min(1.0, sqrt_overlap_norm(mat_r, mat_s) + math.sqrt(gap_r * gap_s)))


def purified_distance(rho, sigma) -> float:
    """P(rho, sigma) = sqrt(1 - F^2)."""
    f = fidelity(rho, sigma)
    return math.sqrt(max(0.0, 1.0 - f * f))


def min_relative_entropy(rho, sigma) -> DivergenceValue:
    """-log F^2(rho, sigma); infinite for orthogonal supports."""
    f = fidelity(rho, sigma)
    if f <= 0.0:
        return DivergenceValue.infinite()
    return DivergenceValue(-2.0 * math.log(f))


def sandwiched_renyi_divergence(rho, sigma, alpha: float) -> DivergenceValue:
    """Sandwiched Renyi divergence; at alpha = 1/2 it equals -log F^2."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if alpha == 1.0:
        return relative_entropy(rho, sigma)
    mat_r, mat_s = _mat(rho), _mat(sigma)
    tr_r = _trace(mat_r)
    if alpha > 1.0:
        lam_r, vec_r = _eig_pair(mat_r)
        lam_s, vec_s = _eig_pair(mat_s)
        if _support_mass_outside(lam_r, vec_r, lam_s, vec_s) > SUPPORT_TOL * tr_r:
            return DivergenceValue.infinite()
    exponent = (1.0 - alpha) / (2.0 * alpha)
    frame = psd_power(mat_s, exponent)
    pinched = frame @ mat_r @ frame
    pinched = (pinched + dagger(pinched)) / 2.0
    lam = np.clip(np.linalg.eigvalsh(pinched), 0.0, None)
    total = float(np.sum(lam**alpha))
    if total <= OVERLAP_FLOOR:
        return DivergenceValue.infinite()
    return DivergenceValue((math.log(total) - math.log(tr_r)) / (alpha - 1.0))


# ---------------------------------------------------------------------------
# Witness search: states where the linear Renyi combination goes negative
# ---------------------------------------------------------------------------

WITNESS_DIMS = (2, 2, 2)
WITNESS_KINDS = ("hs_random", "sparse_classical", "rotated_classical")


@dataclass(frozen=True)
class NaiveCmiWitness:
    """A state with naive Renyi CMI below threshold, replayable from
    (seed, sample_index)."""

    seed: int
    sample_index: int
    kind: str
    alpha: float
    value: float
    mat: np.ndarray
    dims: tuple[int, int, int]


def witness_sample(seed: int, index: int, dims: tuple[int, int, int] = WITNESS_DIMS):
    """Deterministic sample ``index`` of the witness-search stream.

    Cycles three families: Hilbert-Schmidt random states of cycling rank,
    sparse classical (diagonal) states, and sparse classical states conjugated
    by a random product unitary.
    """
    total = int(np.prod(dims))
    rng = SplitMix64(derive(seed, index))
    kind = WITNESS_KINDS[index % 3]
    if kind == "hs_random":
        rank = 1 + (index // 3) % total
        g = rng.complex_gaussians((total, rank))
        mat = g @ dagger(g)
        mat /= mat.trace().real
    else:
        size = 2 + (index // 3) % (total - 1)
        positions = rng.permutation(total)[:size]
        weights = rng.uniforms(size) ** 3
        weights = np.clip(weights, 1e-12, None)
        weights /= weights.sum()
        diag = np.zeros(total)
        diag[positions] = weights
        mat = np.diag(diag).astype(complex)
        if kind == "rotated_classical":
            local = [haar_unitary(d, rng) for d in dims]
            u = local[0]
            for v in local[1:]:
                u = np.kron(u, v)
            mat = u @ mat @ dagger(u)
    return mat, kind


def find_naive_cmi_witness(
    seed: int,
    alphas: Sequence[float] = (0.5, 2.0),
    threshold: float = -0.01,
    max_samples: int = 100_000,
    dims: tuple[int, int, int] = WITNESS_DIMS,
) -> NaiveCmiWitness:
    """Scan the seeded sample stream until some alpha gives a naive Renyi CMI
    below ``threshold``.  Raises LookupError if the budget is exhausted."""
    for index in range(max_samples):
        mat, kind = witness_sample(seed, index, dims)
        rho = DensityOperator(mat, dims)
        for alpha in alphas:
            value = naive_renyi_cmi(rho, alpha, [0], [1], [2])
            if value < threshold:
                return NaiveCmiWitness(
                    seed=seed,
                    sample_index=index,
                    kind=kind,
                    alpha=float(alpha),
                    value=float(value),
                    mat=mat,
                    dims=dims,
                )
    raise LookupError(f"no witness below {threshold} within {max_samples} samples")


def witness_to_json_dict(w: NaiveCmiWitness) -> dict:
    return {
        "seed": w.seed,
        "sample_index": w.sample_index,
        "kind": w.kind,
        "alpha": w.alpha,
        "value": w.value,
        "dims": list(w.dims),
        "state": serialize.complex_matrix_to_json(w.mat),
    }


def save_witness(w: NaiveCmiWitness, path: str | Path) -> None:
    Path(path).write_text(serialize.dumps(witness_to_json_dict(w)) + "\n")


def load_witness(path: str | Path) -> NaiveCmiWitness:
    data = serialize.loads(Path(path).read_text())
    return NaiveCmiWitness(
        seed=int(data["seed"]),
        sample_index=int(data["sample_index"]),
        kind=str(data["kind"]),
        alpha=float(data["alpha"]),
        value=float(data["value"]),
        mat=serialize.complex_matrix_from_json(data["state"]),
        dims=tuple(int(d) for d in data["dims"]),
    )


def replay_witness(w: NaiveCmiWitness) -> float:
    """Regenerate the state from (seed, sample_index) and recompute the value;
    raises if the regenerated state does not match the stored one."""
    mat, kind = witness_sample(w.seed, w.sample_index, w.dims)
    if kind != w.kind or np.abs(mat - w.mat).max() > 1e-12:
        raise ValueError("stored witness does not match its regeneration")
    return naive_renyi_cmi(DensityOperator(mat, w.dims), w.alpha, [0], [1], [2])
