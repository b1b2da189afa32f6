"""Figure rendering for the demo reports (written next to the CSV output)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_curve_figure(curve, path) -> None:
    """Misidentification rate of the naive distinguisher vs. sample count."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.sample_counts, curve.error_rates, "o-", color="tab:blue")
    ax.axhline(0.5, color="gray", linestyle=":", linewidth=1, label="coin flip")
    ax.set_xscale("symlog", linthresh=1)
    ax.set_ylim(-0.02, 0.6)
    ax.set_xlabel("samples")
    ax.set_ylabel("error rate")
    ax.set_title(
        f"ML distinguisher on the coin pair (h={curve.h}, eps={curve.eps:g}, "
        f"{curve.trials} trials)"
    )
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_gap_figure(reports, path) -> None:
    """Full surplus vs. lookahead revenue, with their ratio on a twin axis."""
    hs = [r.h for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(hs, [r.full_surplus for r in reports], "o-", label="full surplus")
    ax.plot(
        hs, [r.lookahead_revenue for r in reports], "s-", label="lookahead revenue"
    )
    ax.plot(hs, [r.revenue_bound for r in reports], "--", label="2(1+eps) baseline")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("value range h")
    ax.set_ylabel("monetary units")
    ax.legend(loc="upper left")
    ax2 = ax.twinx()
    ax2.plot(hs, [r.ratio for r in reports], "^:", color="tab:red")
    ax2.set_ylabel("surplus / revenue", color="tab:red")
    ax2.tick_params(axis="y", labelcolor="tab:red")
    if reports:
        ax.set_title(f"surplus vs. extractable revenue (eps={reports[0].eps:g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
