"""Figure rendering for campaign reports.

Plots are written as PNG files next to the CSV report; nothing is shown
interactively.  Zero-error points are drawn as open markers pinned to the
resolution floor 1/trials so the log axis stays finite.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_METRIC_LABELS = {
    "ber": "bit error rate",
    "fer": "frame error rate",
    "msr": "miss synchronization rate",
}


def _series_key(record) -> tuple:
    return (record.code_rate, record.L, record.lambda_b)


def _series_label(key: tuple) -> str:
    rate, length, lam_b = key
    parts = []
    if rate:
        parts.append(f"R={rate:g}")
    if length:
        parts.append(f"L={length}")
    parts.append(f"$\\lambda_b$={lam_b:g}")
    return ", ".join(parts)


def render_metric_plot(records, metric_name: str, path) -> Path:
    """Semilog error-rate curves versus combined signal intensity."""
    path = Path(path)
    series: dict[tuple, list] = {}
    for r in records:
        if r.metric_name == metric_name:
            series.setdefault(_series_key(r), []).append(r)

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for key in sorted(series):
        pts = sorted(series[key], key=lambda r: r.lambda_s)
        xs = [p.lambda_s for p in pts]
        ys = [p.rate for p in pts]
        floors = [1.0 / p.trials for p in pts]
        drawn = [y if y > 0 else f for y, f in zip(ys, floors)]
        line, = ax.semilogy(xs, drawn, marker="o", label=_series_label(key))
        zeros_x = [x for x, y in zip(xs, ys) if y == 0]
        zeros_y = [f for y, f in zip(ys, floors) if y == 0]
        if zeros_x:
            ax.semilogy(
                zeros_x, zeros_y, linestyle="none", marker="v",
                markerfacecolor="white", color=line.get_color(),
            )
    ax.set_xlabel(r"combined signal intensity $\lambda_s$ (photons/symbol)")
    ax.set_ylabel(_METRIC_LABELS.get(metric_name, metric_name))
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_campaign_plots(records, out_dir, stem: str) -> list[Path]:
    out = Path(out_dir)
    metrics = sorted({r.metric_name for r in records})
    return [
        render_metric_plot(records, m, out / f"{stem}_{m}.png") for m in metrics
    ]


def render_waveform_plot(waveform, path, v_thd: float | None = None) -> Path:
    """Time-domain trace of a synthesized detector output."""
    path = Path(path)
    t = waveform.times() * 1e6
    fig, ax = plt.subplots(figsize=(7.0, 3.2))
    ax.plot(t, waveform.samples, linewidth=0.8)
    if v_thd is not None:
        ax.axhline(v_thd, color="tab:red", linestyle="--", linewidth=0.8,
                   label=f"threshold {v_thd:g} V")
        ax.legend(fontsize=8)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("amplitude (V)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
