"""Study batteries: recognition ratios, information-loss regressions,
quarterly coefficient series, gap diagnostics, and multi-outcome horse races.

Each battery returns machine-readable tables (every number tagged with its
spec id, variant, and N) plus notes; write_battery lays them out as one
subdirectory per battery with stable file names and fixed float formatting,
so identical inputs yield byte-identical output.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import pandas as pd

from .corpus import RETURN_CONTROLS, quarter_key
from .econometrics import (
    DegenerateSampleError,
    RankDeficiencyError,
    RegressionResult,
    RegressionSpec,
    ZeroVarianceError,
    fit_fe_ols,
    gap,
    horse_race,
    interaction_fit,
)

logger = logging.getLogger(__name__)

FIT_COLUMNS = [
    "battery", "model_id", "spec_id", "variant", "dep", "term",
    "coef", "se", "tstat", "pvalue", "stars", "adj_r2", "nobs", "n_clusters",
]

MODEL_COLUMNS = ["battery", "model_id", "spec_id", "variant", "dep",
                 "adj_r2", "nobs", "n_clusters", "n_fe_groups"]


@dataclass
class BatteryReport:
    name: str
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _fit_rows(result: RegressionResult, battery: str, variant: str, model_id: str) -> list[dict]:
    rows = []
    for r in result.to_rows():
        rows.append({
            "battery": battery,
            "model_id": model_id,
            "spec_id": r["spec_id"],
            "variant": variant,
            "dep": r["dep"],
            "term": r["term"],
            "coef": r["coef"],
            "se": r["se"],
            "tstat": r["tstat"],
            "pvalue": r["pvalue"],
            "stars": r["stars"],
            "adj_r2": r["adj_r2"],
            "nobs": r["nobs"],
            "n_clusters": r["n_clusters"],
        })
    return rows


def _model_row(result: RegressionResult, battery: str, variant: str, model_id: str) -> dict:
    return {
        "battery": battery,
        "model_id": model_id,
        "spec_id": result.spec_id,
        "variant": variant,
        "dep": result.dep,
        "adj_r2": result.adj_r2,
        "nobs": result.nobs,
        "n_clusters": result.n_clusters,
        "n_fe_groups": result.n_fe_groups,
    }


# ---------------------------------------------------------------------------
# Recognition ratios
# ---------------------------------------------------------------------------

def recognition_report(hits: Sequence[tuple[bool, bool]]) -> dict[str, float]:
    """Percent of documents with firm hit, year hit, both, and either."""
    if not hits:
        raise ValueError("recognition report needs at least one document")
    n = len(hits)
    firm = sum(1 for f, _ in hits if f)
    year = sum(1 for _, y in hits if y)
    both = sum(1 for f, y in hits if f and y)
    either = sum(1 for f, y in hits if f or y)
    return {
        "firm_pct": 100.0 * firm / n,
        "year_pct": 100.0 * year / n,
        "firm_and_year_pct": 100.0 * both / n,
        "firm_or_year_pct": 100.0 * either / n,
    }


def recognition_battery(
    hits_by_variant: dict[str, Sequence[tuple[bool, bool]]],
    model_id: str = "",
) -> BatteryReport:
    rows = []
    for variant in sorted(hits_by_variant):
        stats = recognition_report(hits_by_variant[variant])
        rows.append({"model_id": model_id, "variant": variant,
                     "n_docs": len(hits_by_variant[variant]), **stats})
    table = pd.DataFrame(
        rows,
        columns=["model_id", "variant", "n_docs",
                 "firm_pct", "year_pct", "firm_and_year_pct", "firm_or_year_pct"],
    )
    return BatteryReport(name="recognition", tables={"recognition": table})


# ---------------------------------------------------------------------------
# Information-loss battery
# ---------------------------------------------------------------------------

def information_loss_battery(
    frame: pd.DataFrame,
    variants: Sequence[str],
    model_id: str = "",
    dep: str = "DGTW",
    measure: str = "Sentiment",
    controls: Sequence[str] = tuple(RETURN_CONTROLS),
    raw_variant: str = "RAW",
) -> BatteryReport:
    """Solo and raw-vs-anonymized horse-race regressions, with and without controls.

    Emits per-spec coefficient tables plus coefficient/adj-R2 delta summaries
    against the raw variant.
    """
    report = BatteryReport(name="information_loss")
    if not variants:
        report.notes.append("no variants requested; zero specifications run")
        report.tables["fits"] = pd.DataFrame(columns=FIT_COLUMNS)
        report.tables["models"] = pd.DataFrame(columns=MODEL_COLUMNS)
        report.tables["deltas"] = pd.DataFrame()
        return report

    signal_cols = {v: f"{measure}_{v}" for v in variants}
    absent = [c for c in signal_cols.values() if c not in frame.columns]
    if absent:
        raise KeyError(f"variant signal column(s) missing from frame: {absent}")
    usable_controls = [c for c in controls if c in frame.columns]
    skipped_controls = [c for c in controls if c not in frame.columns]
    if skipped_controls:
        report.notes.append(f"controls absent from frame and skipped: {skipped_controls}")

    fits: list[dict] = []
    models: list[dict] = []
    solo: dict[tuple[str, bool], RegressionResult] = {}
    horse: dict[tuple[str, bool], RegressionResult | None] = {}

    for with_controls in (False, True):
        tag = "wc" if with_controls else "nc"
        ctrl = tuple(usable_controls) if with_controls else ()
        for v in variants:
            spec = RegressionSpec(
                dep=dep,
                regressors=(signal_cols[v],) + ctrl,
                spec_id=f"solo_{v}_{tag}",
            )
            res = fit_fe_ols(spec, frame)
            solo[(v, with_controls)] = res
            fits.extend(_fit_rows(res, report.name, v, model_id))
            models.append(_model_row(res, report.name, v, model_id))
        if raw_variant in variants:
            for v in variants:
                if v == raw_variant:
                    continue
                spec = RegressionSpec(
                    dep=dep,
                    regressors=(signal_cols[raw_variant], signal_cols[v]) + ctrl,
                    spec_id=f"horse_{raw_variant}_{v}_{tag}",
                )
                try:
                    res = horse_race(spec, frame)
                except (RankDeficiencyError, ZeroVarianceError) as exc:
                    horse[(v, with_controls)] = None
                    report.notes.append(f"horse race {raw_variant} vs {v} ({tag}) degenerate: {exc}")
                    continue
                horse[(v, with_controls)] = res
                fits.extend(_fit_rows(res, report.name, v, model_id))
                models.append(_model_row(res, report.name, v, model_id))

    deltas = []
    if raw_variant in variants:
        for with_controls in (False, True):
            raw_solo = solo[(raw_variant, with_controls)]
            raw_col = signal_cols[raw_variant]
            for v in variants:
                if v == raw_variant:
                    continue
                v_solo = solo[(v, with_controls)]
                h = horse.get((v, with_controls))
                deltas.append({
                    "model_id": model_id,
                    "variant": v,
                    "controls": "yes" if with_controls else "no",
                    "coef_solo_raw": raw_solo.coef[raw_col],
                    "coef_solo_variant": v_solo.coef[signal_cols[v]],
                    "coef_solo_delta": raw_solo.coef[raw_col] - v_solo.coef[signal_cols[v]],
                    "adj_r2_solo_raw": raw_solo.adj_r2,
                    "adj_r2_solo_variant": v_solo.adj_r2,
                    "adj_r2_delta": raw_solo.adj_r2 - v_solo.adj_r2,
                    "coef_horse_raw": float("nan") if h is None else h.coef[raw_col],
                    "coef_horse_variant": float("nan") if h is None else h.coef[signal_cols[v]],
                    "nobs": v_solo.nobs,
                })

    report.tables["fits"] = pd.DataFrame(fits, columns=FIT_COLUMNS)
    report.tables["models"] = pd.DataFrame(models, columns=MODEL_COLUMNS)
    report.tables["deltas"] = pd.DataFrame(deltas)
    return report


# ---------------------------------------------------------------------------
# Quarterly coefficient series
# ---------------------------------------------------------------------------

def quarterly_series(
    frame: pd.DataFrame,
    model_id: str = "",
    dep: str = "DGTW",
    raw_col: str = "Sentiment_RAW",
    trf_col: str = "Sentiment_TRF",
    controls: Sequence[str] = tuple(RETURN_CONTROLS),
    date_col: str = "announcement_date",
    min_extra_rows: int = 5,
) -> BatteryReport:
    """Per-quarter fits for the raw and anonymized signals plus their difference.

    Independent variables are re-standardized within each quarter because
    each quarter is fit on its own sample. Quarters with fewer rows than
    regressors + clusters + min_extra_rows are skipped and reported.
    """
    report = BatteryReport(name="quarterly")
    usable_controls = [c for c in controls if c in frame.columns]
    work = frame.copy()
    work["_quarter"] = work[date_col].map(quarter_key)

    rows = []
    fits: list[dict] = []
    for quarter, block in sorted(work.groupby("_quarter"), key=lambda kv: kv[0]):
        n_dates = block[date_col].nunique()
        k = 1 + len(usable_controls)
        required = k + n_dates + min_extra_rows
        if len(block) < required:
            report.notes.append(
                f"quarter {quarter} skipped: {len(block)} rows < {required} required"
            )
            logger.info("quarterly series: skipping %s (%d rows)", quarter, len(block))
            continue
        coefs = {}
        failed = False
        for label, col in (("RAW", raw_col), ("TRF", trf_col)):
            spec = RegressionSpec(
                dep=dep,
                regressors=(col,) + tuple(usable_controls),
                spec_id=f"quarter_{quarter}_{label}",
            )
            try:
                res = fit_fe_ols(spec, block)
            except (DegenerateSampleError, RankDeficiencyError, ZeroVarianceError) as exc:
                report.notes.append(f"quarter {quarter} ({label}) skipped: {exc}")
                failed = True
                break
            coefs[label] = res.coef[col]
            fits.extend(_fit_rows(res, report.name, label, model_id))
        if failed:
            continue
        rows.append({
            "quarter": quarter,
            "coeff_RAW": coefs["RAW"],
            "coeff_TRF": coefs["TRF"],
            "difference": coefs["RAW"] - coefs["TRF"],
        })

    report.tables["series"] = pd.DataFrame(rows, columns=["quarter", "coeff_RAW", "coeff_TRF", "difference"])
    report.tables["fits"] = pd.DataFrame(fits, columns=FIT_COLUMNS)
    return report


# ---------------------------------------------------------------------------
# Gap battery
# ---------------------------------------------------------------------------

GAP_DETERMINANTS = [
    "Uncertainty_RAW", "Uncertainty_TRF", "ln_Size",
    "TNIC3TSIMM", "TNIC3HHI", "Coverage", "EntityPct_TRF",
]


def gap_battery(
    frame: pd.DataFrame,
    model_id: str = "",
    dep: str = "DGTW",
    raw_col: str = "Sentiment_RAW",
    trf_col: str = "Sentiment_TRF",
    controls: Sequence[str] = tuple(RETURN_CONTROLS),
    determinants: Sequence[str] | None = None,
) -> BatteryReport:
    """Gap determinants (univariate FE regressions) and gap-interaction fits.

    The gap is the absolute raw-vs-anonymized score difference per document;
    determinant regressions explain it, and the interaction fit tests whether
    a larger gap weakens the anonymized signal.
    """
    report = BatteryReport(name="gap")
    for col in (raw_col, trf_col):
        if col not in frame.columns:
            raise KeyError(f"column {col!r} required for the gap battery")
    work = frame.copy()
    work["Gap"] = gap(work[raw_col], work[trf_col])

    if determinants is None:
        determinants = [c for c in GAP_DETERMINANTS if c in work.columns]
    fits: list[dict] = []
    models: list[dict] = []
    if not determinants:
        report.notes.append("no gap determinants available; section empty")
    for d in determinants:
        if d not in work.columns:
            raise KeyError(f"gap determinant column {d!r} not in frame")
        spec = RegressionSpec(dep="Gap", regressors=(d,), spec_id=f"gap_on_{d}")
        try:
            res = fit_fe_ols(spec, work)
        except (DegenerateSampleError, RankDeficiencyError, ZeroVarianceError) as exc:
            report.notes.append(f"gap determinant {d} degenerate: {exc}")
            continue
        fits.extend(_fit_rows(res, report.name, d, model_id))
        models.append(_model_row(res, report.name, d, model_id))

    interaction_rows: list[dict] = []
    usable_controls = tuple(c for c in controls if c in work.columns)
    spec = RegressionSpec(
        dep=dep,
        regressors=(trf_col,) + usable_controls,
        spec_id="trf_x_gap",
    )
    try:
        res = interaction_fit(spec, "Gap", work)
        interaction_rows = _fit_rows(res, report.name, "TRF", model_id)
        models.append(_model_row(res, report.name, "TRF", model_id))
    except (DegenerateSampleError, RankDeficiencyError, ZeroVarianceError) as exc:
        report.notes.append(f"gap interaction fit degenerate: {exc}")

    report.tables["determinants"] = pd.DataFrame(fits, columns=FIT_COLUMNS)
    report.tables["interactions"] = pd.DataFrame(interaction_rows, columns=FIT_COLUMNS)
    report.tables["models"] = pd.DataFrame(models, columns=MODEL_COLUMNS)
    return report


# ---------------------------------------------------------------------------
# Multi-outcome battery
# ---------------------------------------------------------------------------

MULTITASK_DESIGNS = [
    {
        "spec_id": "volatility",
        "dep": "Vol_post",
        "signals": ("Uncertainty_RAW", "Uncertainty_TRF"),
        "controls": ("Vol_pre", "Alpha_pre", "AbsAbnRet", "ln_Size", "ln_BM"),
    },
    {
        "spec_id": "capex",
        "dep": "Capx_t+2",
        "signals": ("Investment_RAW", "Investment_TRF"),
        "controls": ("Capx_t", "Leverage", "ln_TotalAsset"),
    },
    {
        "spec_id": "sales_growth",
        "dep": "SaleChange_t",
        "signals": ("Economy_RAW", "Economy_TRF"),
        "controls": ("SaleChange_t-2", "ln_BM", "ln_TotalAsset", "Tangibility"),
    },
    {
        "spec_id": "value_added_growth",
        "dep": "ValueAddChange_t",
        "signals": ("Economy_RAW", "Economy_TRF"),
        "controls": ("ValueAddChange_t-2", "ln_BM", "ln_TotalAsset", "Tangibility"),
    },
]


def multitask_battery(frame: pd.DataFrame, model_id: str = "") -> BatteryReport:
    """Raw-vs-anonymized horse races on the four forward-looking outcomes."""
    report = BatteryReport(name="multitask")
    fits: list[dict] = []
    models: list[dict] = []
    for design in MULTITASK_DESIGNS:
        needed = (design["dep"],) + design["signals"] + design["controls"]
        absent = [c for c in needed if c not in frame.columns]
        if absent:
            raise KeyError(f"{design['spec_id']}: column(s) missing from frame: {absent}")
        spec = RegressionSpec(
            dep=design["dep"],
            regressors=design["signals"] + design["controls"],
            spec_id=design["spec_id"],
        )
        try:
            res = horse_race(spec, frame)
        except (DegenerateSampleError, RankDeficiencyError, ZeroVarianceError) as exc:
            report.notes.append(f"{design['spec_id']} degenerate: {exc}")
            continue
        fits.extend(_fit_rows(res, report.name, "", model_id))
        models.append(_model_row(res, report.name, "", model_id))
    report.tables["fits"] = pd.DataFrame(fits, columns=FIT_COLUMNS)
    report.tables["models"] = pd.DataFrame(models, columns=MODEL_COLUMNS)
    return report


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def render_summary(report: BatteryReport) -> str:
    """Human-readable fixed-width rendering of a battery's fit tables."""
    lines = [f"battery: {report.name}", "=" * (9 + len(report.name)), ""]
    for table_name in sorted(report.tables):
        table = report.tables[table_name]
        if table.empty or "term" not in table.columns:
            continue
        lines.append(f"-- {table_name} --")
        for spec_id, block in table.groupby("spec_id", sort=True):
            head = block.iloc[0]
            lines.append(
                f"[{spec_id}] dep={head['dep']} N={head['nobs']} "
                f"clusters={head['n_clusters']} adjR2={head['adj_r2']:.4f}"
            )
            for _, row in block.iterrows():
                lines.append(
                    f"    {row['term']:<32} {row['coef']:>10.3f}{row['stars']:<3} ({row['tstat']:.3f})"
                )
            lines.append("")
    if "series" in report.tables and not report.tables["series"].empty:
        lines.append("-- quarterly coefficients --")
        for _, row in report.tables["series"].iterrows():
            lines.append(
                f"    {row['quarter']}: RAW={row['coeff_RAW']:.4f} "
                f"TRF={row['coeff_TRF']:.4f} diff={row['difference']:.4f}"
            )
        lines.append("")
    if "recognition" in report.tables:
        lines.append("-- recognition ratios --")
        for _, row in report.tables["recognition"].iterrows():
            lines.append(
                f"    {row['variant']}: firm={row['firm_pct']:.2f} year={row['year_pct']:.2f} "
                f"and={row['firm_and_year_pct']:.2f} or={row['firm_or_year_pct']:.2f} "
                f"(n={row['n_docs']})"
            )
        lines.append("")
    if report.notes:
        lines.append("-- notes --")
        lines.extend(f"    {note}" for note in report.notes)
        lines.append("")
    lines.append("preprocessing: winsorize 1/99, standardize independents, "
                 "interactions of standardized constituents, date FE absorbed; "
                 "adj R2 counts absorbed dummies in df")
    return "\n".join(lines) + "\n"


def write_battery(report: BatteryReport, out_root) -> None:
    """One subdirectory per battery: CSV per table, notes.txt, summary.txt."""
    from pathlib import Path

    directory = Path(out_root) / report.name
    directory.mkdir(parents=True, exist_ok=True)
    for table_name in sorted(report.tables):
        report.tables[table_name].to_csv(
            directory / f"{table_name}.csv", index=False, float_format="%.10g",
            lineterminator="\n",
        )
    (directory / "notes.txt").write_text(
        "".join(f"{n}\n" for n in report.notes), encoding="utf-8"
    )
    (directory / "summary.txt").write_text(render_summary(report), encoding="utf-8")
