"""PNG figures written next to the CSV/JSON report of each command."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import SQRT2_PLUS_1  # noqa: E402

STYLE = {"figure.figsize": (9, 3.6), "font.size": 9, "axes.grid": True,
         "grid.alpha": 0.3, "savefig.dpi": 120}


def _numbers(rows, key):
    out = []
    for r in rows:
        v = r.get(key)
        if isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v):
            out.append(float(v))
    return out


def _k_and_power(report, axes):
    rows = [r for r in report.rows if r.get("source", "sample") == "sample"]
    ks = [v for v in _numbers(rows, "k_value") if v > 0]
    ax = axes[0]
    if ks:
        lo, hi = min(ks), max(ks)
        bins = [lo * (hi / lo) ** (i / 40) for i in range(41)] if hi > lo else 20
        ax.hist(ks, bins=bins, color="C0")
        ax.set_xscale("log")
    if report.command == "gsd-bound" or any(
            r.get("case_formula_k") is not None for r in rows):
        ax.axvline(SQRT2_PLUS_1, color="C3", ls="--", label=r"$\sqrt{2}+1$")
        ax.legend()
    ax.set_xlabel("finite k")
    ax.set_ylabel("count")
    _power_hist(rows, axes[1])


def _power_hist(rows, ax):
    powers = _numbers(rows, "power")
    if powers:
        ax.hist(powers, bins=40, color="C1")
    ax.set_xlabel("per-state polygamy power")
    ax.set_ylabel("count")


def _w(report, axes):
    rows = report.rows
    for n in sorted({r["n"] for r in rows}):
        sub = [r for r in rows if r["n"] == n]
        pairs_sq = [sum(v * v for k, v in r.items()
                        if k.startswith("pair_") and v is not None) for r in sub]
        axes[0].scatter(pairs_sq, [r["joint"] ** 2 for r in sub], s=6, label=f"n={n}")
    axes[0].plot([0, 1], [0, 1], color="k", lw=0.8)
    axes[0].set_xlabel(r"$\sum_i C_a(\rho_{A_1A_i})^2$")
    axes[0].set_ylabel(r"$C(A_1|\mathrm{rest})^2$")
    axes[0].legend(fontsize=7)
    axes[1].scatter([r["n"] for r in rows], [abs(r["defect"]) for r in rows], s=6)
    axes[1].set_xlabel("n")
    axes[1].set_ylabel("|defect|")


def _polygon(report, axes):
    res = _numbers(report.rows, "min_residual")
    axes[0].hist(res, bins=50, color="C2")
    axes[0].set_xlabel("smallest polygon residual")
    axes[0].set_ylabel("count")
    qa = _numbers(report.rows, "q_A")
    qbc = [r["q_B"] + r["q_C"] for r in report.rows]
    axes[1].scatter(qbc, qa, s=3)
    top = max(qbc + qa + [1.0])
    axes[1].plot([0, top], [0, top], color="k", lw=0.8)
    axes[1].set_xlabel(r"$Q_{B|AC}+Q_{C|AB}$")
    axes[1].set_ylabel(r"$Q_{A|BC}$")


def _assist(report, axes):
    rows = [r for r in report.rows if r.get("oracle") is not None]
    if rows:
        axes[0].scatter([r["oracle"] for r in rows],
                        [r["assisted"] for r in rows], s=8)
        axes[0].plot([0, 1], [0, 1], color="k", lw=0.8)
        axes[0].set_xlabel("closed form")
        axes[0].set_ylabel("optimizer")
        axes[1].hist([r["gap"] for r in rows], bins=30)
        axes[1].set_xlabel("closed form - optimizer")
    else:
        axes[0].hist(_numbers(report.rows, "assisted"), bins=30)
        axes[0].set_xlabel("assisted value")
        axes[1].axis("off")


def _one_to_group(report, axes):
    _power_hist(report.rows, axes[0])
    axes[1].scatter(_numbers(report.rows, "q_B"), _numbers(report.rows, "q_C"), s=3)
    axes[1].set_xlabel(r"$Q_{B|AC}$")
    axes[1].set_ylabel(r"$Q_{C|AB}$")


def render(report, out_dir: str | Path) -> list[str]:
    """Draw the command's figure; returns the written file names."""
    if report.command == "verify":
        return []
    if report.command in ("kset", "gsd-bound"):
        draw = _k_and_power
    elif report.command == "power":
        draw = _k_and_power if "k_kind" in report.rows[0] else _one_to_group
    else:
        draw = {"w-saturation": _w, "polygon": _polygon,
                "assist": _assist}[report.command]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2)
        draw(report, axes)
        fig.suptitle(report.command)
        fig.tight_layout()
        name = f"{report.command}.png"
        fig.savefig(out / name)
        plt.close(fig)
    return [name]
