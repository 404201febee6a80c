"""Reproduction tables, property-suite runner, and their file formats.

The CSV table schema is fixed: ``d,k,cmi_formula,cmi_dense,delta0_paper,
delta0_twirl,separated``.  Property reports are JSON objects
``{suite, seed, properties: [{name, samples, worst_margin, pass}]}``; a run
fails (exit status 1) when any listed property fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import serialize
from .formulas import LN2, LOG_SQRT_4_3, antisym_cmi_binomial, antisym_cmi_exact, half_point
from .linalg import (
    apply_spectral_function,
    dagger,
    partial_trace,
    permutation_operator,
    compose_permutations,
    trace_norm,
)
from .measures import (
    cmi,
    conditional_entropy,
    fidelity,
    min_relative_entropy,
    mutual_information,
    relative_entropy,
    renyi_divergence,
    sqrt_overlap_norm,
    zero_relative_entropy,
)
from .operators import DensityOperator, dim_cap
from .optimize import (
    SearchConfig,
    antisym_d0_lower,
    fidelity_markov_gap_upper,
    make_objective,
    purified_duality_check,
    renyi_markov_gap_upper,
    run_markov_restart,
    markov_structures,
    _MarkovParam,
    _reduce_restarts,
    smoothed_d0_lower,
    uhlmann_fidelity,
)
from .rng import SplitMix64, derive, haar_unitary
from .states import (
    MarkovBlock,
    MarkovSpec,
    antisym_projector,
    antisym_state,
    build_markov_state,
    is_markov_state,
    purify,
    random_cptp,
    random_density,
    random_pure_state,
    swap_operator,
    uniform_antisym_state,
    uu_twirl,
)

DEFAULT_SEED = 1729


@dataclass(frozen=True)
class RunConfig:
    """Run-wide options for tables and property suites.

    ``tol = None`` means every property uses its documented slack; an explicit
    tolerance overrides all of them (so a corrupted tolerance forces failures).
    """

    log_base: str = "nats"
    tol: float | None = None
    seed: int = DEFAULT_SEED
    dim_cap: int | None = None
    output_format: str = "csv"
    output_path: str | None = None

    def __post_init__(self):
        if self.log_base not in ("nats", "bits"):
            raise ValueError(f"log_base must be nats or bits, got {self.log_base!r}")
        if self.tol is not None and self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.dim_cap is not None and self.dim_cap < 4:
            raise ValueError("dim_cap must be >= 4")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be csv or json, got {self.output_format!r}")

    @property
    def unit_scale(self) -> float:
        return 1.0 / LN2 if self.log_base == "bits" else 1.0


# ---------------------------------------------------------------------------
# Reproduction table
# ---------------------------------------------------------------------------

TABLE_HEADER = "d,k,cmi_formula,cmi_dense,delta0_paper,delta0_twirl,separated"


@dataclass(frozen=True)
class TableRow:
    d: int
    k: int
    cmi_formula: float
    cmi_dense: float | None
    delta0_paper: float
    delta0_twirl: float
    separated: bool


def table_rows(config: RunConfig, d_list: Sequence[int]) -> list[TableRow]:
    """One row per dimension at k = ceil((d+1)/2); all values in config units.
    The dense CMI column is filled only when d^k fits the dimension cap."""
    cap = dim_cap(config.dim_cap)
    scale = config.unit_scale
    rows = []
    for d in d_list:
        d = int(d)
        k = half_point(d)
        formula = antisym_cmi_exact(d)
        dense: float | None = None
        if d**k <= cap:
            rho = uniform_antisym_state(d, k, cap)
            dense = cmi(rho, [0], [1], list(range(2, k))) * scale
        rows.append(
            TableRow(
                d=d,
                k=k,
                cmi_formula=formula * scale,
                cmi_dense=dense,
                delta0_paper=LOG_SQRT_4_3 * scale,
                delta0_twirl=LN2 * scale,
                separated=LOG_SQRT_4_3 > formula,
            )
        )
    return rows


def table_to_csv(rows: Sequence[TableRow]) -> str:
    lines = [TABLE_HEADER]
    for r in rows:
        dense = serialize.format_float(r.cmi_dense) if r.cmi_dense is not None else ""
        lines.append(
            ",".join(
                [
                    str(r.d),
                    str(r.k),
                    serialize.format_float(r.cmi_formula),
                    dense,
                    serialize.format_float(r.delta0_paper),
                    serialize.format_float(r.delta0_twirl),
                    "true" if r.separated else "false",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def table_to_json(rows: Sequence[TableRow]) -> str:
    payload = [
        {
            "d": r.d,
            "k": r.k,
            "cmi_formula": r.cmi_formula,
            "cmi_dense": r.cmi_dense,
            "delta0_paper": r.delta0_paper,
            "delta0_twirl": r.delta0_twirl,
            "separated": r.separated,
        }
        for r in rows
    ]
    return serialize.dumps({"rows": payload}) + "\n"


def parse_table_csv(text: str) -> list[TableRow]:
    lines = [ln for ln in text.strip().split("\n") if ln]
    if lines[0] != TABLE_HEADER:
        raise ValueError(f"unexpected table header {lines[0]!r}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append(
            TableRow(
                d=int(parts[0]),
                k=int(parts[1]),
                cmi_formula=float(parts[2]),
                cmi_dense=float(parts[3]) if parts[3] else None,
                delta0_paper=float(parts[4]),
                delta0_twirl=float(parts[5]),
                separated=parts[6] == "true",
            )
        )
    return rows


def run_table(config: RunConfig, d_list: Sequence[int]) -> list[TableRow]:
    """Compute the table and write it to config.output_path when set."""
    rows = table_rows(config, d_list)
    if config.output_path:
        text = table_to_csv(rows) if config.output_format == "csv" else table_to_json(rows)
        Path(config.output_path).write_text(text)
    return rows


# ---------------------------------------------------------------------------
# Property suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PropertyResult:
    name: str
    samples: int
    worst_margin: float
    passed: bool


def _result(name: str, samples: int, margin: float, slack: float, tol: float | None) -> PropertyResult:
    effective = tol if tol is not None else slack
    return PropertyResult(name, samples, float(margin), bool(margin <= effective))


ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10)) + tuple(
    float(a) for a in np.linspace(1.1, 3.0, 10)
)


def _random_pair(seed: int, dim: int, ranks: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    a = random_density((dim,), ranks[0], derive(seed, 0)).mat
    b = random_density((dim,), ranks[1], derive(seed, 1)).mat
    return a, b


# -- algebra ----------------------------------------------------------------


def prop_partial_trace_total(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rng = SplitMix64(derive(seed, i))
        dims = (2, 3, 2)
        mat = rng.complex_gaussians((12, 12))
        full = partial_trace(mat, dims, [])[0, 0]
        margin = max(margin, abs(full - mat.trace()))
    return _result("partial_trace_total_equals_trace", samples, margin, 1e-10, tol)


def prop_partial_trace_composition(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rng = SplitMix64(derive(seed, 100 + i))
        dims = (2, 2, 3)
        mat = rng.complex_gaussians((12, 12))
        step = partial_trace(partial_trace(mat, dims, [0, 1]), (2, 2), [0])
        direct = partial_trace(mat, dims, [0])
        margin = max(margin, float(np.abs(step - direct).max()))
    return _result("partial_trace_composes", samples, margin, 1e-12, tol)


def prop_permutation_group_law(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rng = SplitMix64(derive(seed, 200 + i))
        k = 2 + int(rng.integers(1, 4)[0])  # k in 2..5
        p = tuple(int(x) for x in rng.permutation(k))
        q = tuple(int(x) for x in rng.permutation(k))
        dims = (2,) * k
        lhs = permutation_operator(dims, p) @ permutation_operator(dims, q)
        rhs = permutation_operator(dims, compose_permutations(p, q))
        margin = max(margin, float(np.abs(lhs - rhs).max()))
    return _result("permutation_operator_group_law", samples, margin, 1e-12, tol)


def prop_spectral_identity(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rng = SplitMix64(derive(seed, 300 + i))
        g = rng.complex_gaussians((6, 6))
        h = (g + dagger(g)) / 2.0
        back = apply_spectral_function(h, lambda x: x)
        margin = max(margin, float(np.abs(back - h).max()))
    return _result("spectral_function_identity", samples, margin, 1e-10, tol)


def prop_trace_norm_unitary_invariance(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rng = SplitMix64(derive(seed, 400 + i))
        m = rng.complex_gaussians((5, 5))
        u = haar_unitary(5, rng)
        v = haar_unitary(5, rng)
        margin = max(margin, abs(trace_norm(u @ m @ v) - trace_norm(m)))
    return _result("trace_norm_unitary_invariance", samples, margin, 1e-9, tol)


# -- measures ---------------------------------------------------------------


def prop_alpha_monotonicity(seed: int, tol: float | None, pairs: int = 50) -> PropertyResult:
    margin = 0.0
    for i in range(pairs):
        a, b = _random_pair(derive(seed, 500 + i), 3, (3, 3))
        values = [float(renyi_divergence(a, b, alpha)) for alpha in ALPHA_GRID]
        for lo, hi in zip(values, values[1:]):
            margin = max(margin, lo - hi)
    return _result("renyi_divergence_alpha_monotone", pairs, margin, 1e-9, tol)


def prop_alpha_continuity(seed: int, tol: float | None, pairs: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(pairs):
        a, b = _random_pair(derive(seed, 600 + i), 3, (3, 3))
        d1 = float(relative_entropy(a, b))
        for alpha in (1.0 - 1e-5, 1.0 + 1e-5):
            margin = max(margin, abs(float(renyi_divergence(a, b, alpha)) - d1))
    return _result("renyi_divergence_alpha_to_one", pairs, margin, 1e-4, tol)


DPI_ALPHAS = (0.3, 0.7, 1.5, 2.0)


def _divergence_bundle(a: np.ndarray, b: np.ndarray) -> list[float]:
    out = [
        float(zero_relative_entropy(a, b)),
        float(relative_entropy(a, b)),
        float(min_relative_entropy(a, b)),
    ]
    out += [float(renyi_divergence(a, b, alpha)) for alpha in DPI_ALPHAS]
    return out


def prop_dpi_channels(seed: int, tol: float | None, maps: int = 50) -> PropertyResult:
    margin = 0.0
    for i in range(maps):
        s = derive(seed, 700 + i)
        a, b = _random_pair(s, 4, (4, 4))
        channel = random_cptp(4, 4, 3, derive(s, 2))
        a2, b2 = channel.apply(a), channel.apply(b)
        for before, after in zip(_divergence_bundle(a, b), _divergence_bundle(a2, b2)):
            margin = max(margin, after - before)
    return _result("data_processing_under_cptp", maps, margin, 1e-9, tol)


def prop_dpi_partial_trace(seed: int, tol: float | None, maps: int = 50) -> PropertyResult:
    margin = 0.0
    for i in range(maps):
        s = derive(seed, 800 + i)
        a = random_density((2, 3), 6, derive(s, 0)).mat
        b = random_density((2, 3), 6, derive(s, 1)).mat
        a2 = partial_trace(a, (2, 3), [0])
        b2 = partial_trace(b, (2, 3), [0])
        for before, after in zip(_divergence_bundle(a, b), _divergence_bundle(a2, b2)):
            margin = max(margin, after - before)
    return _result("data_processing_under_partial_trace", maps, margin, 1e-9, tol)


def _bloch_state(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    return 0.5 * np.array([[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]], dtype=complex)


def _min_over_sigma_b(rho_ab: np.ndarray, reference_a: np.ndarray) -> float:
    """min over qubit sigma_B of D1(rho_AB || reference_A (x) sigma_B) by a
    Bloch-ball grid plus coordinate refinement."""

    def objective(v: np.ndarray) -> float:
        if np.linalg.norm(v) >= 1.0 - 1e-9:
            return math.inf
        return float(relative_entropy(rho_ab, np.kron(reference_a, _bloch_state(v))))

    best_v, best = np.zeros(3), objective(np.zeros(3))
    for r in (0.25, 0.5, 0.75, 0.9):
        for theta in np.linspace(0.0, math.pi, 5):
            for phi in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
                v = r * np.array(
                    [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
                )
                val = objective(v)
                if val < best:
                    best, best_v = val, v
    step = 0.2
    v = best_v.copy()
    while step > 1e-8:
        improved = False
        for coord in range(3):
            for sign in (1.0, -1.0):
                trial = v.copy()
                trial[coord] += sign * step
                val = objective(trial)
                if val < best:
                    best, v = val, trial
                    improved = True
        if not improved:
            step *= 0.5
    return best


def prop_variational_conditional_entropy(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    eye = np.eye(2, dtype=complex)
    for i in range(samples):
        rho = random_density((2, 2), 4, derive(seed, 900 + i))
        target = -conditional_entropy(rho, [0], [1])
        found = _min_over_sigma_b(rho.mat, eye)
        margin = max(margin, abs(found - target))
    return _result("variational_conditional_entropy", samples, margin, 1e-6, tol)


def prop_variational_mutual_information(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rho = random_density((2, 2), 4, derive(seed, 1000 + i))
        target = mutual_information(rho, [0], [1])
        rho_a = partial_trace(rho.mat, (2, 2), [0])
        found = _min_over_sigma_b(rho.mat, rho_a)
        margin = max(margin, abs(found - target))
    return _result("variational_mutual_information", samples, margin, 1e-6, tol)


def prop_strong_subadditivity(seed: int, tol: float | None, samples: int = 200) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rank = 1 + i % 8
        rho = random_density((2, 2, 2), rank, derive(seed, 1100 + i))
        margin = max(margin, -cmi(rho, [0], [1], [2]))
    return _result("strong_subadditivity", samples, margin, 1e-9, tol)


def prop_dmin_ge_d0(seed: int, tol: float | None, pairs: int = 200) -> PropertyResult:
    margin = 0.0
    for i in range(pairs):
        s = derive(seed, 1200 + i)
        a, b = _random_pair(s, 3, (1 + i % 3, 3))
        margin = max(
            margin, float(zero_relative_entropy(a, b)) - float(min_relative_entropy(a, b))
        )
    return _result("dmin_dominates_d0", pairs, margin, 1e-9, tol)


def prop_trace_norm_ptrace_monotone(seed: int, tol: float | None, samples: int = 50) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        s = derive(seed, 1300 + i)
        a = random_density((2, 2), 4, derive(s, 0)).mat
        b = random_density((2, 2), 4, derive(s, 1)).mat
        inner = sqrt_overlap_norm(a, b)
        outer = sqrt_overlap_norm(
            partial_trace(a, (2, 2), [0]), partial_trace(b, (2, 2), [0])
        )
        margin = max(margin, inner - outer)
    return _result("sqrt_overlap_norm_ptrace_monotone", samples, margin, 1e-9, tol)


# -- markov -----------------------------------------------------------------


def prop_antisym_projector_laws(seed: int, tol: float | None) -> PropertyResult:
    cases = [(2, 2), (3, 2), (4, 2), (4, 3), (5, 3), (6, 4)]
    margin = 0.0
    for d, k in cases:
        p = antisym_projector(d, k)
        margin = max(margin, float(np.abs(p @ p - p).max()))
        margin = max(margin, float(np.abs(p - dagger(p)).max()))
        margin = max(margin, abs(float(p.trace().real) - math.comb(d, k)))
    return _result("antisym_projector_laws", len(cases), margin, 1e-9, tol)


def prop_antisym_marginals(seed: int, tol: float | None) -> PropertyResult:
    cases = [(3, 2), (4, 3), (5, 3), (6, 4)]
    margin = 0.0
    for d, k in cases:
        rho = uniform_antisym_state(d, k)
        marginal = rho.marginal([0, 1])
        margin = max(margin, float(np.abs(marginal.mat - antisym_state(d).mat).max()))
    return _result("antisym_marginal_is_bipartite_antisym", len(cases), margin, 1e-10, tol)


def _random_markov_spec(seed: int, dim_a: int = 2, dim_b: int = 2) -> MarkovSpec:
    rng = SplitMix64(seed)
    n_blocks = 1 + int(rng.integers(1, 3)[0])
    weights = rng.uniforms(n_blocks) + 0.1
    weights /= weights.sum()
    blocks = []
    for j in range(n_blocks):
        cl = 1 + int(rng.integers(1, 2)[0])
        cr = 1 + int(rng.integers(1, 2)[0])
        left = random_density((dim_a, cl), dim_a * cl, derive(seed, 10 + 2 * j))
        right = random_density((cr, dim_b), cr * dim_b, derive(seed, 11 + 2 * j))
        blocks.append(MarkovBlock(float(weights[j]), cl, cr, left, right))
    total = sum(b.p for b in blocks)
    blocks = [MarkovBlock(b.p / total, b.dim_cl, b.dim_cr, b.left, b.right) for b in blocks]
    return MarkovSpec(tuple(blocks), dim_a, dim_b)


def prop_markov_build_membership(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        spec = _random_markov_spec(derive(seed, 1400 + i))
        rho = build_markov_state(spec)
        margin = max(margin, cmi(rho, [0], [1], list(range(2, len(rho.layout)))))
    return _result("built_markov_states_have_zero_cmi", samples, margin, 1e-8, tol)


def prop_twirl_preserves_weight(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        d = 2 + i % 3
        rho = random_density((d, d), d * d, derive(seed, 1500 + i))
        anti = antisym_projector(d, 2)
        _, twirled = uu_twirl(rho)
        before = float(np.einsum("ij,ji->", anti, rho.mat).real)
        after = float(np.einsum("ij,ji->", anti, twirled.mat).real)
        margin = max(margin, abs(before - after))
    return _result("twirl_preserves_antisym_weight", samples, margin, 1e-10, tol)


def prop_twirl_product_nonneg(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rng = SplitMix64(derive(seed, 1600 + i))
        d = 2 + i % 3
        a = rng.complex_gaussians(d)
        a /= np.linalg.norm(a)
        b = rng.complex_gaussians(d)
        b /= np.linalg.norm(b)
        product = np.kron(np.outer(a, a.conj()), np.outer(b, b.conj()))
        param, _ = uu_twirl(DensityOperator(product, (d, d)))
        margin = max(margin, -param.f)
    return _result("separable_products_twirl_to_nonneg_f", samples, margin, 1e-12, tol)


def prop_twirl_haar_validation(seed: int, tol: float | None, samples: int = 400) -> PropertyResult:
    """Monte-Carlo g (x) g averaging approaches the closed-form twirl."""
    rho = random_density((2, 2), 4, derive(seed, 1700))
    _, closed = uu_twirl(rho)
    rng = SplitMix64(derive(seed, 1701))
    acc = np.zeros_like(rho.mat)
    for _ in range(samples):
        g = haar_unitary(2, rng)
        u = np.kron(g, g)
        acc += u @ rho.mat @ dagger(u)
    acc /= samples
    margin = float(np.abs(acc - closed.mat).max())
    return _result("haar_sampled_twirl_validation", samples, margin, 0.05, tol)


def prop_purify_round_trip(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rank = 1 + i % 4
        rho = random_density((4,), rank, derive(seed, 1800 + i))
        psi = purify(rho)
        back = psi.marginal([0]).mat
        margin = max(margin, float(np.abs(back - rho.mat).max()))
    return _result("purify_partial_trace_round_trip", samples, margin, 1e-10, tol)


# -- optimization -----------------------------------------------------------

_SUITE_SEARCH = SearchConfig(restarts=4, iters=400)


def prop_sandwich_consistency(seed: int, tol: float | None) -> PropertyResult:
    rho = uniform_antisym_state(4, 3)
    cfg = SearchConfig(restarts=_SUITE_SEARCH.restarts, iters=_SUITE_SEARCH.iters, seed=seed)
    lower = antisym_d0_lower(4, 3)
    upper = renyi_markov_gap_upper(rho, 0.0, cfg)
    margin = max(0.0, lower.value - upper.value)
    return _result("upper_bounds_dominate_lower_bounds", 1, margin, 1e-8, tol)


def prop_candidate_reevaluation(seed: int, tol: float | None, samples: int = 4) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        rho = random_density((2, 2, 2), 4, derive(seed, 1900 + i))
        cfg = SearchConfig(restarts=3, iters=250, seed=derive(seed, 1950 + i))
        rep = fidelity_markov_gap_upper(rho, cfg)
        sigma = build_markov_state(rep.candidate)
        again = float(min_relative_entropy(rho.mat, sigma.mat))
        margin = max(margin, abs(again - rep.value))
        margin = max(margin, cmi(sigma, [0], [1], [2]))
    return _result("upper_candidates_reevaluate_and_stay_markov", samples, margin, 1e-8, tol)


def prop_alpha_monotone_fixed_candidate(seed: int, tol: float | None) -> PropertyResult:
    rho = uniform_antisym_state(4, 3)
    block = MarkovBlock(
        1.0,
        2,
        2,
        random_density((4, 2), 8, derive(seed, 2000)),
        random_density((2, 4), 8, derive(seed, 2001)),
    )
    sigma = build_markov_state(MarkovSpec((block,), 4, 4))
    values = [float(renyi_divergence(rho.mat, sigma.mat, alpha)) for alpha in ALPHA_GRID]
    margin = 0.0
    for lo, hi in zip(values, values[1:]):
        margin = max(margin, lo - hi)
    return _result("gap_values_alpha_monotone_on_fixed_candidate", len(ALPHA_GRID), margin, 1e-9, tol)


def prop_smoothing_monotone(seed: int, tol: float | None) -> PropertyResult:
    rho = uniform_antisym_state(4, 3)
    cfg = SearchConfig(restarts=2, iters=100, seed=seed)
    values = [smoothed_d0_lower(rho, eps, cfg).value for eps in (0.0, 0.05, 0.1, 0.2, 0.4)]
    margin = 0.0
    for lo, hi in zip(values, values[1:]):
        margin = max(margin, lo - hi)
    return _result("smoothed_lower_bound_monotone_in_eps", len(values), margin, 1e-12, tol)


def prop_restart_order_independence(seed: int, tol: float | None) -> PropertyResult:
    rho = random_density((2, 2, 2), 4, derive(seed, 2100))
    cfg = SearchConfig(restarts=4, iters=150, seed=derive(seed, 2101))
    structures = markov_structures(2, cfg.blocks)
    n = max(cfg.restarts, len(structures))
    forward = [run_markov_restart(rho, "relent", None, cfg, r, structures) for r in range(n)]
    backward = [run_markov_restart(rho, "relent", None, cfg, r, structures) for r in reversed(range(n))]
    best_f = _reduce_restarts(forward)
    best_b = _reduce_restarts(backward)
    margin = abs(best_f.value - best_b.value) + abs(best_f.restart_index - best_b.restart_index)
    return _result("restart_order_independent_reports", n, margin, 1e-15, tol)


# -- appendix ---------------------------------------------------------------


def prop_uhlmann_matches_fidelity(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        s = derive(seed, 2200 + i)
        a = random_density((2,), 1 + i % 2, derive(s, 0))
        b = random_density((2,), 2, derive(s, 1))
        searched = uhlmann_fidelity(a, b, seed=derive(s, 2))
        margin = max(margin, abs(searched - fidelity(a.mat, b.mat)))
    return _result("uhlmann_search_matches_fidelity", samples, margin, 1e-6, tol)


def prop_duality_common_value(seed: int, tol: float | None, samples: int = 10) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        s = derive(seed, 2300 + i)
        psi = random_pure_state((2, 2, 2, 2), derive(s, 0))
        spec = _random_markov_spec_c2(derive(s, 1))
        rec = purified_duality_check(psi, spec, channel_seed=derive(s, 2))
        margin = max(margin, rec.common_deviation)
        margin = max(margin, rec.purified_value - rec.fidelity_abd - 1e-12)
    return _result("purified_duality_common_value", samples, margin, 1e-6, tol)


def _random_markov_spec_c2(seed: int) -> MarkovSpec:
    """Two-block qubit-C candidate on qubits A, B."""
    rng = SplitMix64(seed)
    w = float(rng.uniforms(1)[0]) * 0.8 + 0.1
    blocks = (
        MarkovBlock(
            w,
            1,
            1,
            random_density((2, 1), 2, derive(seed, 1)),
            random_density((1, 2), 2, derive(seed, 2)),
        ),
        MarkovBlock(
            1.0 - w,
            1,
            1,
            random_density((2, 1), 1, derive(seed, 3)),
            random_density((1, 2), 1, derive(seed, 4)),
        ),
    )
    return MarkovSpec(blocks, 2, 2)


def prop_channel_dmin_monotone(seed: int, tol: float | None, samples: int = 20) -> PropertyResult:
    margin = 0.0
    for i in range(samples):
        s = derive(seed, 2400 + i)
        psi = random_pure_state((2, 2, 2, 2), derive(s, 0))
        spec = _random_markov_spec_c2(derive(s, 1))
        rec = purified_duality_check(psi, spec, channel_seed=derive(s, 2))
        margin = max(margin, rec.dmin_after_channel - rec.dmin_before_channel)
    return _result("channel_on_b_cannot_increase_dmin", samples, margin, 1e-9, tol)


PROPERTY_SUITES: dict[str, list[Callable[[int, float | None], PropertyResult]]] = {
    "algebra": [
        prop_partial_trace_total,
        prop_partial_trace_composition,
        prop_permutation_group_law,
        prop_spectral_identity,
        prop_trace_norm_unitary_invariance,
    ],
    "measures": [
        prop_alpha_monotonicity,
        prop_alpha_continuity,
        prop_dpi_channels,
        prop_dpi_partial_trace,
        prop_variational_conditional_entropy,
        prop_variational_mutual_information,
        prop_strong_subadditivity,
        prop_dmin_ge_d0,
        prop_trace_norm_ptrace_monotone,
    ],
    "markov": [
        prop_antisym_projector_laws,
        prop_antisym_marginals,
        prop_markov_build_membership,
        prop_twirl_preserves_weight,
        prop_twirl_product_nonneg,
        prop_twirl_haar_validation,
        prop_purify_round_trip,
    ],
    "optimization": [
        prop_sandwich_consistency,
        prop_candidate_reevaluation,
        prop_alpha_monotone_fixed_candidate,
        prop_smoothing_monotone,
        prop_restart_order_independence,
    ],
    "appendix": [
        prop_uhlmann_matches_fidelity,
        prop_duality_common_value,
        prop_channel_dmin_monotone,
    ],
}


def suite_report(config: RunConfig, suite: str) -> dict:
    """Run one named suite (or "all") and return the report dictionary."""
    if suite == "all":
        properties = []
        for name, fns in PROPERTY_SUITES.items():
            for fn in fns:
                r = fn(config.seed, config.tol)
                properties.append(
                    {
                        "name": f"{name}/{r.name}",
                        "samples": r.samples,
                        "worst_margin": r.worst_margin,
                        "pass": r.passed,
                    }
                )
    elif suite in PROPERTY_SUITES:
        properties = []
        for fn in PROPERTY_SUITES[suite]:
            r = fn(config.seed, config.tol)
            properties.append(
                {
                    "name": r.name,
                    "samples": r.samples,
                    "worst_margin": r.worst_margin,
                    "pass": r.passed,
                }
            )
    else:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(PROPERTY_SUITES)} or 'all'")
    return {"suite": suite, "seed": config.seed, "properties": properties}


def run_property_suite(config: RunConfig, suite: str) -> tuple[int, dict]:
    """Run a suite, write the JSON report when output_path is set, and return
    (exit_status, report): status 0 when every property passed, else 1."""
    report = suite_report(config, suite)
    status = 0 if all(p["pass"] for p in report["properties"]) else 1
    if config.output_path:
        Path(config.output_path).write_text(serialize.dumps(report) + "\n")
    return status, report
