"""Dense complex-matrix kernel: tensor products, partial traces, subsystem
permutations, spectral calculus, support projectors and the trace norm.

Conventions: subsystem 0 is the leftmost tensor factor and basis indices are
row-major, so index ``I`` of a ``(d_0, ..., d_{k-1})`` layout has digit
``i_0`` most significant.  Permutations map slot -> destination slot: under
``perm``, the factor currently at slot ``m`` moves to slot ``perm[m]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

#: relative tolerance for Hermiticity / positivity checks (max-entry scale)
HERMITICITY_TOL = 1e-10
#: relative support threshold: eigenvalues below tol * lambda_max count as zero
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered local dimensions of a tensor-factor decomposition."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("layout needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise ValueError(f"all local dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, i):
        return self.dims[i]


def as_layout(layout: SubsystemLayout | Sequence[int]) -> SubsystemLayout:
    if isinstance(layout, SubsystemLayout):
        return layout
    return SubsystemLayout(tuple(layout))


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    return bool(np.abs(m - dagger(m)).max() <= tol * scale)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square operators."""
    return np.kron(a, b)


def tensor_many(*ops: np.ndarray) -> np.ndarray:
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _check_square(op: np.ndarray) -> np.ndarray:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"operator must be square, got shape {op.shape}")
    return op


def partial_trace(
    op: np.ndarray, layout: SubsystemLayout | Sequence[int], keep: Iterable[int]
) -> np.ndarray:
    """Trace out every subsystem not in ``keep``; kept factors stay in layout order.

    ``keep`` may be empty, in which case the full trace is returned as a 1x1
    matrix.
    """
    op = _check_square(op)
    layout = as_layout(layout)
    dims = layout.dims
    if layout.total_dim != op.shape[0]:
        raise ValueError(
            f"layout {dims} has total dimension {layout.total_dim}, "
            f"operator has dimension {op.shape[0]}"
        )
    keep = sorted(set(int(i) for i in keep))
    if keep and (keep[0] < 0 or keep[-1] >= len(dims)):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    k = len(dims)
    t = op.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * k > len(letters):
        raise ValueError("too many subsystems for einsum-based partial trace")
    row = letters[:k]
    col = "".join(letters[k + i] if i in keep else row[i] for i in range(k))
    out = "".join(row[i] for i in keep) + "".join(letters[k + i] for i in keep)
    res = np.einsum(f"{row}{col}->{out}", t)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(d_keep, d_keep)


def permuted_dims(
    layout: SubsystemLayout | Sequence[int], perm: Sequence[int]
) -> tuple[int, ...]:
    """Local dimensions after moving slot ``m`` to slot ``perm[m]``."""
    dims = as_layout(layout).dims
    inv = invert_permutation(perm)
    return tuple(dims[inv[m]] for m in range(len(dims)))


def _check_permutation(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of range({n})")
    return perm


def invert_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    inv = [0] * len(perm)
    for m, dest in enumerate(perm):
        inv[dest] = m
    return tuple(inv)


def compose_permutations(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Composite ``p after q``: slot m -> q[m] -> p[q[m]]."""
    return tuple(p[q[m]] for m in range(len(q)))


def permutation_sign(perm: Sequence[int]) -> int:
    """Parity of a permutation via cycle decomposition."""
    perm = tuple(perm)
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permute_subsystems(
    op: np.ndarray, layout: SubsystemLayout | Sequence[int], perm: Sequence[int]
) -> np.ndarray:
    """Conjugate ``op`` by the permutation moving slot ``m`` to slot ``perm[m]``."""
    op = _check_square(op)
    layout = as_layout(layout)
    dims = layout.dims
    if layout.total_dim != op.shape[0]:
        raise ValueError("layout does not match operator dimension")
    k = len(dims)
    perm = _check_permutation(perm, k)
    inv = invert_permutation(perm)
    axes = list(inv) + [k + m for m in inv]
    t = op.reshape(dims + dims).transpose(axes)
    return np.ascontiguousarray(t.reshape(op.shape))


def permutation_operator(
    layout: SubsystemLayout | Sequence[int], perm: Sequence[int]
) -> np.ndarray:
    """Unitary representation R(perm) on equal-dimension factors.

    Satisfies R(p) @ R(q) == R(compose_permutations(p, q)).
    """
    layout = as_layout(layout)
    dims = layout.dims
    if len(set(dims)) != 1:
        raise ValueError(f"permutation operator needs equal local dimensions, got {dims}")
    d = dims[0]
    k = len(dims)
    perm = _check_permutation(perm, k)
    total = d**k
    idx = np.arange(total)
    weights = d ** (k - 1 - np.arange(k))
    digits = (idx[:, None] // weights[None, :]) % d  # digits[:, m] = i_m
    dest_weights = np.array([d ** (k - 1 - perm[m]) for m in range(k)])
    target = digits @ dest_weights
    r = np.zeros((total, total), dtype=complex)
    r[target, idx] = 1.0
    return r


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a
    Hermitian operator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def support_mask(self, tol: float = SUPPORT_TOL) -> np.ndarray:
        scale = float(np.abs(self.eigenvalues).max()) if self.source_dim else 0.0
        if scale == 0.0:
            return np.zeros(self.source_dim, dtype=bool)
        return np.abs(self.eigenvalues) > tol * scale


def spectral_decompose(h: np.ndarray, tol: float = HERMITICITY_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian operator, eigenvalues descending."""
    h = _check_square(h)
    if not is_hermitian(h, tol):
        raise ValueError("operator is not Hermitian within tolerance")
    lam, vec = np.linalg.eigh(h)
    order = np.argsort(lam, kind="stable")[::-1]
    return SpectralDecomposition(
        eigenvalues=lam[order].copy(), eigenvectors=vec[:, order].copy(), source_dim=h.shape[0]
    )


def apply_spectral_function(
    h: np.ndarray,
    f: Callable[[float], float],
    zero_policy: str = "map_to_zero",
    support_tol: float = SUPPORT_TOL,
) -> np.ndarray:
    """Evaluate ``sum_i f(lambda_i) v_i v_i^dagger`` on the support of ``h``.

    ``zero_policy`` controls eigenvalues below the support threshold:
    ``"map_to_zero"`` sends them to 0 (the ``rho log rho`` convention),
    ``"error"`` rejects rank-deficient input.
    """
    if zero_policy not in ("map_to_zero", "error"):
        raise ValueError(f"unknown zero_policy {zero_policy!r}")
    dec = spectral_decompose(h)
    mask = dec.support_mask(support_tol)
    if zero_policy == "error" and not mask.all():
        raise ValueError("operator is rank deficient and zero_policy='error'")
    vals = np.zeros(dec.source_dim, dtype=complex)
    kept = [complex(f(float(x))) for x in dec.eigenvalues[mask]]
    if kept and not np.all(np.isfinite(kept)):
        raise ValueError("function is not finite on the supported spectrum")
    vals[mask] = kept
    v = dec.eigenvectors
    return (v * vals) @ dagger(v)


def psd_power(h: np.ndarray, p: float, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    """``h ** p`` for Hermitian PSD ``h``, taken on the support (0 outside)."""
    dec = spectral_decompose(h)
    lam = np.clip(dec.eigenvalues.real, 0.0, None)
    mask = dec.support_mask(support_tol)
    vals = np.zeros_like(lam)
    vals[mask] = lam[mask] ** p
    v = dec.eigenvectors
    return (v * vals) @ dagger(v)


def psd_sqrt(h: np.ndarray, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    return psd_power(h, 0.5, support_tol)


def support_projector(h: np.ndarray, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue above
    ``tol * lambda_max``; input must be Hermitian PSD."""
    dec = spectral_decompose(h)
    lam = dec.eigenvalues.real
    scale = float(np.abs(lam).max()) if lam.size else 0.0
    if scale > 0.0 and lam.min() < -HERMITICITY_TOL * max(1.0, scale):
        raise ValueError("operator is not positive semidefinite")
    mask = lam > tol * scale if scale > 0.0 else np.zeros_like(lam, dtype=bool)
    v = dec.eigenvectors[:, mask]
    return v @ dagger(v)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values (Schatten 1-norm)."""
    m = _check_square(m)
    return float(np.linalg.svd(m, compute_uv=False).sum())
