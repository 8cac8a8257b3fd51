"""SVG figures for BER sweeps and arch sweeps (matplotlib, Agg backend)."""
from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_ber(series: dict, path) -> None:
    """Log-log plot of post-decoding BER against pre-decoding BER.

    Parameters
    ----------
    series : dict
        Label -> list of :class:`~nbldpc.bench.TrialRecord`.
    path : str or Path
        Output file; the format follows the suffix (normally ``.svg``).

    Points with zero observed post-decoding errors cannot sit on a log axis;
    they are drawn at the upper end of their confidence interval with a
    downward marker.
    """
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    lo_all, hi_all = [], []
    for label, recs in series.items():
        recs = sorted(recs, key=lambda r: r.pre_ecc_ber)
        seen = [r for r in recs if r.post_symbol_errors > 0 and r.pre_ecc_ber > 0]
        bound = [r for r in recs if r.post_symbol_errors == 0 and r.pre_ecc_ber > 0]
        line = None
        if seen:
            x = [r.pre_ecc_ber for r in seen]
            y = [r.post_ecc_ber for r in seen]
            yerr = [[r.post_ecc_ber - r.post_ci_low for r in seen],
                    [r.post_ci_high - r.post_ecc_ber for r in seen]]
            line = ax.errorbar(x, y, yerr=yerr, marker="o", capsize=3, label=label)
            lo_all += [r.post_ci_low for r in seen if r.post_ci_low > 0]
        if bound:
            color = line[0].get_color() if line else None
            ax.plot([r.pre_ecc_ber for r in bound], [r.post_ci_high for r in bound],
                    linestyle="none", marker="v", color=color,
                    label=f"{label} (no errors, 95% upper bound)" if line else f"{label} (upper bound)")
            lo_all += [r.post_ci_high for r in bound]
        hi_all += [r.pre_ecc_ber for r in recs if r.pre_ecc_ber > 0]
    if hi_all:
        lo = min(lo_all + hi_all)
        hi = max(hi_all)
        ref = [10 ** math.floor(math.log10(lo)), 10 ** math.ceil(math.log10(hi))]
        ax.plot(ref, ref, color="0.6", linestyle="--", linewidth=1, label="no coding")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("pre-ECC BER")
    ax.set_ylabel("post-ECC BER")
    ax.grid(True, which="both", linewidth=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_fom(rows, path, x="n_ci", y="fom_proxy", group="n_vi") -> None:
    """Line plot of an arch-sweep metric, one line per value of ``group``."""
    by = defaultdict(list)
    for r in rows:
        by[r[group]].append((float(r[x]), float(r[y])))
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for g, pts in sorted(by.items(), key=lambda kv: float(kv[0])):
        pts.sort()
        ax.plot([a for a, _ in pts], [b for _, b in pts], marker="o", label=f"{group}={g}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.grid(True, linewidth=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
