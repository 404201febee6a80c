"""Figure rendering for the report path: the CMI decay curve against the
constant lower bounds, with the crossover dimension marked."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .formulas import LN2, LOG_SQRT_4_3, antisym_cmi_exact, crossover_scan
from .report import TableRow


def render_separation_figure(
    rows: Sequence[TableRow],
    path: str | Path,
    log_base: str = "nats",
) -> Path:
    """Plot the table's CMI values against the two constant lower bounds and
    the 4/(d-1) decay envelope; returns the written path."""
    scale = 1.0 / LN2 if log_base == "bits" else 1.0
    unit = "bits" if log_base == "bits" else "nats"
    d_rows = [r.d for r in rows]
    d_lo, d_hi = (min(d_rows), max(d_rows)) if d_rows else (3, 40)
    d_curve = list(range(max(3, min(d_lo, 3)), max(d_hi, 40) + 1))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(
        d_curve,
        [antisym_cmi_exact(d) * scale for d in d_curve],
        color="C0",
        lw=1.5,
        label="I(A:B|C), exact",
    )
    ax.plot(
        d_curve,
        [4.0 / (d - 1) * scale for d in d_curve],
        color="C0",
        ls=":",
        lw=1.0,
        label="4/(d-1) envelope",
    )
    ax.axhline(LOG_SQRT_4_3 * scale, color="C3", ls="--", lw=1.2, label="log sqrt(4/3)")
    ax.axhline(LN2 * scale, color="C2", ls="-.", lw=1.2, label="log 2 (twirl)")
    crossing = crossover_scan(min(d_curve), max(d_curve))
    if crossing is not None:
        ax.axvline(crossing, color="0.4", lw=0.8)
        ax.annotate(
            f"d = {crossing}",
            xy=(crossing, LOG_SQRT_4_3 * scale),
            xytext=(crossing + 1, LOG_SQRT_4_3 * scale * 1.6),
            fontsize=9,
        )
    if d_rows:
        ax.plot(
            d_rows,
            [r.cmi_formula for r in rows],
            "o",
            color="C0",
            ms=4,
            label="table rows",
        )
        dense = [(r.d, r.cmi_dense) for r in rows if r.cmi_dense is not None]
        if dense:
            ax.plot(
                [d for d, _ in dense],
                [v for _, v in dense],
                "x",
                color="C1",
                ms=6,
                label="dense check",
            )
    ax.set_yscale("log")
    ax.set_xlabel("local dimension d")
    ax.set_ylabel(f"value ({unit})")
    ax.set_title("Conditional mutual information vs constant lower bound")
    ax.legend(fontsize=8, loc="upper right")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
