"""Render report tables as Markdown, CSV or JSON.

Everything here works from the JSON form of a report, so a saved
``report.json`` can be re-rendered without recomputation.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .breaks import KINDS, break_clusters
from .core import MonthDate

SERIES_LABEL = {"trademarks": "Trademarks", "patents": "Patents"}
SEGMENT_LABEL_FULL = "Full dataset"


def _month(text: str | None) -> str:
    if not text:
        return ""
    return MonthDate.parse(text).label()


def _int(v: float) -> str:
    # half-to-even rounding, so 14468.5 renders as 14468
    return str(int(round(v)))


def _level_pct(level: float | None) -> str:
    return f"{level * 100:g}%"


def table1(report: dict) -> tuple[list[str], list[list[str]]]:
    head = ["Variable", "Minimum", "1st Quartile", "Median", "Mean", "3rd Quartile",
            "Maximum", "Standard Deviation", "Skewness", "Kurtosis"]
    rows = []
    for key, label in SERIES_LABEL.items():
        s = report["table1"][key]
        rows.append([label, _int(s["min"]), _int(s["q1"]), _int(s["median"]), _int(s["mean"]),
                     _int(s["q3"]), _int(s["max"]), f"{s['sd']:.3f}", f"{s['skewness']:.3f}",
                     f"{s['kurtosis']:.2f}"])
    return head, rows


def table2(report: dict) -> tuple[list[str], list[list[str]]]:
    head = ["Variable", *[k.replace("Rec", "REC") for k in KINDS]]
    rows = []
    for key, label in SERIES_LABEL.items():
        t = report["table2"][key]
        rows.append([label, *[t[k]["p_label"] for k in KINDS]])
    return head, rows


def table3(report: dict) -> tuple[list[str], list[list[str]]]:
    """Breaks side by side; co-occurring breaks share a row."""
    pct = (1 - report["provenance"]["config"]["alpha"]) * 100
    lo, hi = f"{(100 - pct) / 2:g}%", f"{100 - (100 - pct) / 2:g}%"
    head = [f"Trademarks {lo}", "Trademarks Breakpoint", f"Trademarks {hi}",
            f"Patents {lo}", "Patents Breakpoint", f"Patents {hi}"]
    by_date = {}
    for key in SERIES_LABEL:
        for b in report["table3"][key]["breaks"]:
            by_date[(key, b["date"])] = [_month(b["ci_low"]), _month(b["date"]), _month(b["ci_high"])]
    tm = [MonthDate.parse(b["date"]) for b in report["table3"]["trademarks"]["breaks"]]
    pt = [MonthDate.parse(b["date"]) for b in report["table3"]["patents"]["breaks"]]
    tm_set = set(tm)
    rows = []
    for cluster in break_clusters(tm, pt):
        row = [""] * 6
        # a shared month appears twice in the cluster; assign one per series
        members = list(cluster)
        for d in members:
            if d in tm_set and not row[1]:
                row[0:3] = by_date[("trademarks", str(d))]
            elif d in pt:
                row[3:6] = by_date[("patents", str(d))]
        rows.append(row)
    return head, rows


def table4(report: dict) -> tuple[list[str], list[list[str]]]:
    head = ["Segment", "Start", "End", "Months"]
    rows = [[str(s["label"]), _month(s["start"]), _month(s["end"]), str(s["length"])]
            for s in report["table4"]["segments"]]
    return head, rows


def _johansen_cell(j: dict, r: int) -> str:
    if "error" in j:
        return "n/a"
    stat = j["trace"][str(r)]
    level = j["level"][str(r)]
    if level is None:
        return f"{stat:.2f}"
    idx = j["levels"].index(level)
    return f"{stat:.2f} v {j['critical_values'][str(r)][idx]:.2f} ({_level_pct(level)})"


def _pz_cell(p: dict) -> str:
    if "error" in p:
        return "n/a"
    if p["level"] is None:
        return f"{p['statistic']:.4f}"
    idx = p["levels"].index(p["level"])
    return f"{p['statistic']:.4f} v {p['critical_values'][idx]:.4f} ({_level_pct(p['level'])})"


def table5(report: dict) -> tuple[list[str], list[list[str]]]:
    head = ["Segment", "Johansen r<=1", "Johansen r=0", "Phillips-Ouliaris Pz"]
    rows = []
    for row in report["table5"]:
        label = "Full timeseries" if row["label"] == 0 else str(row["label"])
        rows.append([label, _johansen_cell(row["johansen"], 1),
                     _johansen_cell(row["johansen"], 0), _pz_cell(row["pz"])])
    return head, rows


def table6(report: dict) -> tuple[list[str], list[list[str]]]:
    head = ["Variable", "Segment", "KPSS", "ADF", "PP"]
    rows = []
    for row in report["table6"]:
        seg = SEGMENT_LABEL_FULL if row["label"] == 0 else str(row["label"])
        cells = ["" if row[t] is None else str(row[t]) for t in ("kpss", "adf", "pp")]
        rows.append([SERIES_LABEL[row["series"]], seg, *cells])
    return head, rows


TABLES = {
    "table1": (table1, "Descriptive statistics", "descriptives"),
    "table2": (table2, "Fluctuation test p-values", "fluctuation"),
    "table3": (table3, "Break dates with confidence intervals", "breakpoints"),
    "table4": (table4, "Segments between break clusters", "segments"),
    "table5": (table5, "Cointegration tests", "cointegration"),
    "table6": (table6, "Differences needed for stationarity", "integration_order"),
}


def available_tables(report: dict) -> list[str]:
    stages = report.get("stages", {})
    return [k for k, (_, _, st) in TABLES.items() if stages.get(st, {}).get("status") == "ok"]


def to_markdown(head: list[str], rows: list[list[str]], title: str = "") -> str:
    lines = [f"### {title}", ""] if title else []
    lines.append("| " + " | ".join(head) + " |")
    lines.append("|" + "|".join("---" for _ in head) + "|")
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def to_csv(head: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(head)
    w.writerows(rows)
    return buf.getvalue()


def render_table(report: dict, name: str, fmt: str = "md") -> str:
    fn, title, _ = TABLES[name]
    head, rows = fn(report)
    if fmt == "md":
        return to_markdown(head, rows, title)
    if fmt == "csv":
        return to_csv(head, rows)
    raise ValueError(f"unsupported table format {fmt!r}")


def emit_tables(report, out_dir, formats=("json", "md", "csv")) -> list[Path]:
    """Write tables for every requested format; returns the paths written.

    ``json`` writes a single ``report.json``; ``md`` and ``csv`` write one file
    per available table.
    """
    data = report if isinstance(report, dict) else report.to_dict()
    text_json = report.to_json() if hasattr(report, "to_json") else (
        json.dumps(data, sort_keys=True, indent=1, allow_nan=False) + "\n")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / "report.json"
        p.write_text(text_json, encoding="utf-8", newline="\n")
        written.append(p)
    for fmt in ("md", "csv"):
        if fmt not in formats:
            continue
        for name in available_tables(data):
            p = out / f"{name}.{fmt}"
            p.write_text(render_table(data, name, fmt), encoding="utf-8", newline="")
            written.append(p)
    return written
