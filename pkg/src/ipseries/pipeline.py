"""End-to-end analysis of the trademark / patent pair.

Each stage records ``ok``, ``failed`` or ``skipped`` with a reason. A failure
never aborts the run: stages that depend on it are skipped and the report is
still produced.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .breaks import KINDS, boundary, breakpoint_confint, date_breakpoints, derive_segments, efp, sctest
from .core import DEFAULT_KEEP, Segment, bundled_csv_bytes, parse_csv, slice_segment, to_monthly_series
from .descriptives import decompose_additive, rank_correlation, summary_stats
from .errors import IpseriesError
from .integration import TESTS, johansen_trace, ndiffs, phillips_ouliaris_pz
from .prep import DEFAULT_THRESHOLD, MIN_LENGTH as OUTLIER_MIN_LENGTH, detect_outliers, replace_outliers
from .wavelet import cross_wavelet

SERIES = ("trademarks", "patents")
MIN_BREAK_LENGTH = 60
FORMATS = ("json", "md", "csv", "svg")

STAGES = (
    "ingest",
    "truncate",
    "outliers",
    "descriptives",
    "decomposition",
    "correlations",
    "cross_wavelet",
    "fluctuation",
    "breakpoints",
    "segments",
    "cointegration",
    "integration_order",
)

DEPENDS = {
    "ingest": (),
    "truncate": ("ingest",),
    "outliers": ("truncate",),
    "descriptives": ("outliers",),
    "decomposition": ("outliers",),
    "correlations": ("outliers",),
    "cross_wavelet": ("outliers",),
    "fluctuation": ("outliers",),
    "breakpoints": ("outliers",),
    "segments": ("breakpoints",),
    "cointegration": ("segments",),
    "integration_order": ("outliers",),
}


@dataclass(frozen=True)
class PipelineConfig:
    """Run settings. ``input=None`` uses the bundled data file."""

    input: str | None = None
    truncate_to: int = DEFAULT_KEEP
    outlier_threshold: float = DEFAULT_THRESHOLD
    h: float = 0.15
    alpha: float = 0.05
    johansen_lags: int = 2
    formats: tuple[str, ...] = FORMATS
    stages: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 0.5)")
        if not 0 < self.h < 1:
            raise ValueError("h must lie in (0, 1)")
        if self.truncate_to < 1:
            raise ValueError("truncate_to must be positive")
        if self.johansen_lags < 2:
            raise ValueError("johansen_lags must be >= 2")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ValueError(f"unknown formats {sorted(bad)}; choose from {FORMATS}")
        if self.stages is not None:
            unknown = set(self.stages) - set(STAGES)
            if unknown:
                raise ValueError(f"unknown stages {sorted(unknown)}")

    def echo(self) -> dict:
        d = asdict(self)
        d["input"] = Path(self.input).name if self.input else "<bundled>"
        d["formats"] = list(self.formats)
        d["stages"] = None if self.stages is None else list(self.stages)
        return d


@dataclass
class StageRecord:
    status: str
    reason: str = ""


@dataclass
class PipelineReport:
    """Structured output of a run; :meth:`to_dict` is the JSON form."""

    config: PipelineConfig
    stages: dict[str, StageRecord] = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    input_error: bool = False

    @property
    def failed(self) -> bool:
        return any(r.status == "failed" for r in self.stages.values())

    @property
    def exit_code(self) -> int:
        if self.input_error:
            return 2
        return 1 if self.failed else 0

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.data.items()}
        out["provenance"] = self.provenance
        out["stages"] = {k: {"reason": r.reason, "status": r.status} for k, r in self.stages.items()}
        return _jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) or math.isinf(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _needed(requested) -> set[str]:
    if requested is None:
        return set(STAGES)
    need: set[str] = set()
    todo = list(requested)
    while todo:
        s = todo.pop()
        if s not in need:
            need.add(s)
            todo.extend(DEPENDS[s])
    return need


def _rounded(a, digits: int = 6):
    return np.round(np.asarray(a, dtype=float), digits)


def run_pipeline(config: PipelineConfig) -> PipelineReport:
    """Execute every stage in order and return the report."""
    rep = PipelineReport(config)
    need = _needed(config.stages)
    ctx: dict = {}
    passthrough: set[str] = set()  # skipped stages whose input flows on unchanged

    def stage(name, fn, policy=None):
        for dep in DEPENDS[name]:
            st = rep.stages[dep].status
            if st != "ok" and dep not in passthrough:
                rep.stages[name] = StageRecord("skipped", f"depends on {dep} ({st})")
                return
        if name not in need:
            rep.stages[name] = StageRecord("skipped", "not requested")
            return
        if policy is not None:
            why = policy()
            if why:
                rep.stages[name] = StageRecord("skipped", why)
                return
        try:
            fn()
        except (IpseriesError, ValueError, OSError, np.linalg.LinAlgError) as exc:
            rep.stages[name] = StageRecord("failed", f"{type(exc).__name__}: {exc}")
            if name == "ingest":
                rep.input_error = True
            return
        rep.stages[name] = StageRecord("ok")

    # ---- ingest / truncate
    def ingest():
        data = Path(config.input).read_bytes() if config.input else bundled_csv_bytes()
        ctx["sha256"] = hashlib.sha256(data).hexdigest()
        ctx["raw"] = parse_csv(data)
        rep.data["input"] = {"rows": len(ctx["raw"])}

    def truncate():
        raw = ctx["raw"]
        ctx["series"] = {c: to_monthly_series(raw, c, config.truncate_to) for c in SERIES}
        s = ctx["series"]["trademarks"]
        rep.data["span"] = {"end": str(s.end), "n": len(s), "start": str(s.start)}

    stage("ingest", ingest)
    stage("truncate", truncate)

    # ---- outliers (short series pass through unchanged)
    def outliers():
        ctx["clean"] = {}
        out = {}
        for c in SERIES:
            s = ctx["series"][c]
            r = detect_outliers(s, config.outlier_threshold)
            ctx["clean"][c] = replace_outliers(s, r)
            out[c] = [dict(f.to_dict(), replacement=float(ctx["clean"][c].values[f.index]))
                      for f in r.flags]
        rep.data["outliers"] = out

    def outlier_policy():
        n = len(ctx["series"]["trademarks"])
        if n < OUTLIER_MIN_LENGTH:
            ctx["clean"] = dict(ctx["series"])
            passthrough.add("outliers")
            return f"series too short for outlier detection ({n} < {OUTLIER_MIN_LENGTH})"
        return None

    stage("outliers", outliers, outlier_policy)

    clean = ctx.get("clean", {})

    def descriptives():
        rep.data["table1"] = {c: summary_stats(clean[c]).to_dict() for c in SERIES}

    def decomposition():
        out = {}
        for c in SERIES:
            d = decompose_additive(clean[c])
            out[c] = {
                "figures": _rounded(d.figures),
                "observed": d.observed,
                "remainder": _rounded(d.remainder),
                "seasonal": _rounded(d.seasonal),
                "trend": _rounded(d.trend),
            }
        rep.data["decomposition"] = out

    def correlations():
        t, p = clean["trademarks"], clean["patents"]
        rep.data["correlations"] = {
            "kendall": rank_correlation(t, p, "kendall"),
            "spearman": rank_correlation(t, p, "spearman"),
        }

    def wavelet():
        spec = cross_wavelet(clean["trademarks"], clean["patents"], alpha=config.alpha)
        inside = spec.inside_coi()
        short = spec.periods[:, None] < 24
        years = np.array([d.year for d in clean["trademarks"].dates()])
        post = years[None, :] >= 1995

        def frac(mask):
            m = inside & mask
            return float(spec.signif[m].mean()) if m.any() else None

        d = spec.to_dict()
        d["summary"] = {
            "signif_fraction_inside_coi": frac(np.ones_like(inside)),
            "short_period_signif_post_1995": frac(short & post),
            "short_period_signif_pre_1995": frac(short & ~post),
        }
        rep.data["cross_wavelet"] = d

    stage("descriptives", descriptives)
    stage("decomposition", decomposition)
    stage("correlations", correlations)
    stage("cross_wavelet", wavelet)

    # ---- fluctuation tests (table 2)
    def fluctuation():
        t2 = {}
        paths = {}
        for c in SERIES:
            t2[c], paths[c] = {}, {}
            for kind in KINDS:
                proc = efp(clean[c], kind, config.h)
                res = sctest(proc, config.alpha)
                t2[c][kind] = res.to_dict()
                paths[c][kind] = dict(proc.to_dict(), grid=_rounded(proc.grid(), 8),
                                      boundary=_rounded(boundary(proc, config.alpha), 8))
        rep.data["table2"] = t2
        rep.data["efp"] = paths

    stage("fluctuation", fluctuation)

    # ---- break dating (table 3) and segments (table 4)
    def too_short():
        n = len(clean["trademarks"])
        if n < MIN_BREAK_LENGTH:
            return f"series too short ({n} < {MIN_BREAK_LENGTH})"
        return None

    def breakpoints():
        ctx["bps"] = {}
        for c in SERIES:
            b = date_breakpoints(clean[c], config.h)
            ctx["bps"][c] = breakpoint_confint(clean[c], b, 1 - config.alpha)
        rep.data["table3"] = {c: ctx["bps"][c].to_dict() for c in SERIES}

    def segments():
        s = clean["trademarks"]
        segs = derive_segments(ctx["bps"]["trademarks"], ctx["bps"]["patents"], s.start, s.end)
        ctx["segments"] = list(segs)
        rep.data["table4"] = {
            "clusters": [[str(d) for d in c] for c in segs.clusters],
            "segments": segs.to_list(),
        }

    stage("breakpoints", breakpoints, too_short)
    stage("segments", segments)

    full = None
    if "trademarks" in clean:
        s = clean["trademarks"]
        full = Segment(0, s.start, s.end)

    # ---- cointegration (table 5)
    def cointegration():
        rows = []
        for seg in [full, *ctx["segments"]]:
            row = {"end": str(seg.end), "label": seg.label, "n": len(seg), "start": str(seg.start)}
            a = slice_segment(clean["trademarks"], seg)
            b = slice_segment(clean["patents"], seg)
            try:
                j = johansen_trace(a, b, config.johansen_lags)
                row["johansen"] = dict(j.to_dict(),
                                       level={str(r): j.level_exceeded(r) for r in j.trace})
            except IpseriesError as exc:
                row["johansen"] = {"error": f"{type(exc).__name__}: {exc}"}
            try:
                po = phillips_ouliaris_pz(a, b)
                row["pz"] = dict(po.to_dict(), level=po.level_exceeded())
            except IpseriesError as exc:
                row["pz"] = {"error": f"{type(exc).__name__}: {exc}"}
            rows.append(row)
        rep.data["table5"] = rows

    stage("cointegration", cointegration, too_short)

    # ---- integration order (table 6)
    def integration_order():
        segs = [full]
        if rep.stages["segments"].status == "ok":
            segs += ctx["segments"]
        rows = []
        for seg in segs:
            for c in SERIES:
                x = slice_segment(clean[c], seg)
                row = {"label": seg.label, "series": c}
                for t in TESTS:
                    try:
                        r = ndiffs(x, t, config.alpha)
                        row[t] = r.d
                        row[f"{t}_capped"] = r.capped
                    except IpseriesError as exc:
                        row[t] = None
                        row[f"{t}_error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
        rep.data["table6"] = rows

    stage("integration_order", integration_order)

    rep.provenance = {
        "config": config.echo(),
        "input_sha256": ctx.get("sha256"),
        "version": __version__,
    }
    return rep
