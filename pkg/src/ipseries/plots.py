"""Static SVG figures rendered from the JSON form of a report.

Output is deterministic: the SVG hash salt is fixed and no date metadata is
written.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.path import Path as MplPath  # noqa: E402
from matplotlib.patches import PathPatch  # noqa: E402
from skimage.measure import find_contours  # noqa: E402

from .breaks import KINDS  # noqa: E402
from .core import MonthDate  # noqa: E402

_RC = {"svg.hashsalt": "ipseries", "svg.fonttype": "none", "font.size": 8}
SERIES_STYLE = {"trademarks": ("Trademarks", "black"), "patents": ("Patents", "red")}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def _time_axis(span: dict) -> np.ndarray:
    start = MonthDate.parse(span["start"])
    return start.year + (start.month - 1) / 12 + np.arange(span["n"]) / 12


def _frac_year(text: str) -> float:
    d = MonthDate.parse(text)
    return d.year + (d.month - 1) / 12


def plot_decomposition(dec: dict, t: np.ndarray, title: str, path: Path) -> Path:
    """Four stacked panels: observed, trend, seasonal, remainder."""
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(4, 1, figsize=(7, 7), sharex=True)
        for ax, key in zip(axes, ("observed", "trend", "seasonal", "remainder")):
            y = np.array([np.nan if v is None else v for v in dec[key]], dtype=float)
            ax.plot(t, y, color="black", lw=0.7, gid=f"panel-{key}")
            ax.set_ylabel(key)
        axes[0].set_title(title)
        axes[-1].set_xlabel("Time")
        fig.tight_layout()
        return _save(fig, path)


def significance_contours(mask: np.ndarray) -> list[np.ndarray]:
    """Closed outlines (row, col) of the true regions in ``mask``."""
    padded = np.pad(np.asarray(mask, dtype=float), 1)
    return [c - 1.0 for c in find_contours(padded, 0.5)]


def plot_cross_wavelet(spec: dict, t: np.ndarray, path: Path) -> Path:
    """Heatmap of log2 cross power with significance outlines and COI shading."""
    power = np.asarray(spec["power"], dtype=float)
    periods = np.asarray(spec["periods"], dtype=float)
    coi = np.asarray(spec["coi"], dtype=float)
    signif = np.asarray(spec["signif"], dtype=bool)
    logp = np.log2(np.maximum(periods, 1e-12))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(8, 4.5))
        ax.imshow(np.log2(np.maximum(power, 1e-12)), aspect="auto", origin="lower",
                  cmap="jet", interpolation="nearest",
                  extent=(t[0], t[-1], logp[0], logp[-1]))
        dt = (t[-1] - t[0]) / max(len(t) - 1, 1)
        dlp = (logp[-1] - logp[0]) / max(len(logp) - 1, 1)
        for k, c in enumerate(significance_contours(signif)):
            xy = np.column_stack([t[0] + c[:, 1] * dt, logp[0] + c[:, 0] * dlp])
            patch = PathPatch(MplPath(xy, closed=True), fill=False, ec="black", lw=1.0,
                              gid=f"signif-contour-{k}")
            ax.add_patch(patch)
        coi_log = np.log2(np.clip(coi, 2.0 ** logp[0], 2.0 ** logp[-1]))
        ax.fill_between(t, coi_log, logp[-1], color="white", alpha=0.5, gid="coi")
        ticks = np.arange(np.ceil(logp[0]), np.floor(logp[-1]) + 1)
        ax.set_yticks(ticks)
        ax.set_yticklabels([f"{2**v:g}" for v in ticks])
        ax.set_ylim(logp[0], logp[-1])
        ax.set_ylabel("Period (months)")
        ax.set_xlabel("Time")
        ax.set_title("Cross-wavelet power, Trademarks and Patents")
        fig.tight_layout()
        return _save(fig, path)


def plot_fluctuation(panels: dict, title: str, path: Path) -> Path:
    """2x2 grid of fluctuation processes with red critical boundaries."""
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(2, 2, figsize=(8, 6))
        for ax, kind in zip(axes.ravel(), KINDS):
            p = panels[kind]
            g = np.asarray(p["grid"], dtype=float)
            ax.plot(g, p["path"], color="black", lw=0.7)
            b = np.asarray(p["boundary"], dtype=float)
            ax.plot(g, b, color="red", lw=0.8)
            ax.plot(g, -b, color="red", lw=0.8)
            ax.axhline(0, color="grey", lw=0.5)
            ax.set_title(kind, gid=f"panel-{kind}")
            ax.set_xlabel("Time")
            ax.set_ylabel("Empirical fluctuation process")
        fig.suptitle(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_breakpoints(report: dict, t: np.ndarray, path: Path) -> Path:
    """Both series with break lines and confidence-interval whiskers."""
    clean = report["decomposition"]
    breaks = report.get("table3", {})
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(8, 4))
        lo = min(min(clean[k]["observed"]) for k in SERIES_STYLE)
        for key, (label, colour) in SERIES_STYLE.items():
            ax.plot(t, clean[key]["observed"], color=colour, lw=0.7, label=label)
            for k, b in enumerate(breaks.get(key, {}).get("breaks", [])):
                x = _frac_year(b["date"])
                ax.axvline(x, color=colour, ls="--", lw=0.8, gid=f"break-{key}-{k}")
                if b["ci_low"] and b["ci_high"]:
                    y = lo * (0.6 if key == "trademarks" else 0.3)
                    ax.errorbar(x, y, xerr=[[x - _frac_year(b["ci_low"])],
                                            [_frac_year(b["ci_high"]) - x]],
                                color=colour, capsize=3, lw=1.0, fmt="none", gid=f"ci-{key}-{k}")
        ax.legend(loc="upper left")
        ax.set_xlabel("Time")
        ax.set_ylabel("Monthly count")
        fig.tight_layout()
        return _save(fig, path)


def emit_plots(report, out_dir) -> list[Path]:
    """Write fig1..fig5 as SVG for every stage that completed."""
    data = report if isinstance(report, dict) else report.to_dict()
    stages = data.get("stages", {})
    ok = lambda s: stages.get(s, {}).get("status") == "ok"  # noqa: E731
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if "span" not in data:
        return []
    t = _time_axis(data["span"])
    written = []
    if ok("decomposition"):
        dec = data["decomposition"]
        written.append(plot_decomposition(dec["trademarks"], t, "Decomposition of Trademarks",
                                          out / "fig1.svg"))
        written.append(plot_decomposition(dec["patents"], t, "Decomposition of Patents",
                                          out / "fig2.svg"))
    if ok("cross_wavelet"):
        written.append(plot_cross_wavelet(data["cross_wavelet"], t, out / "fig3.svg"))
    if ok("fluctuation"):
        written.append(plot_fluctuation(data["efp"]["trademarks"],
                                        "Fluctuation processes, Trademarks", out / "fig4.svg"))
        written.append(plot_fluctuation(data["efp"]["patents"],
                                        "Fluctuation processes, Patents", out / "fig4_patents.svg"))
    if ok("decomposition"):
        written.append(plot_breakpoints(data, t, out / "fig5.svg"))
    return written
