"""Corpus and panel ingestion: documents, trading calendar, headline filters,
daily aggregation, and the signal/panel join.

Corpus input is line-delimited JSON records; the panel is a delimited table
whose header uses the canonical control/outcome names in PANEL_COLUMNS.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence
from zoneinfo import ZoneInfo

import pandas as pd

from .tokenizers import Tokenizer, WordTokenizer

logger = logging.getLogger(__name__)

EASTERN = ZoneInfo("America/New_York")
MARKET_CLOSE = dt.time(16, 0, 0)
TRANSCRIPT_TOKEN_CAP = 15000


class Variant(str, Enum):
    RAW = "RAW"
    SM = "SM"
    TRF = "TRF"
    LLM = "LLM"
    NUM = "NUM"
    PLC = "PLC"
    OBJ = "OBJ"
    OTH = "OTH"


class DocumentKind(str, Enum):
    TRANSCRIPT = "transcript"
    HEADLINE = "headline"


@dataclass(frozen=True)
class Document:
    doc_id: str
    firm_id: str
    ticker: str
    timestamp: dt.datetime  # must be timezone-aware
    kind: DocumentKind
    source: str
    text: str
    org_mentions: int | None = None  # headlines only
    year: int | None = None          # identity truth for recognition tests

    def __post_init__(self) -> None:
        if self.timestamp.tzinfo is None:
            raise ValueError(f"document {self.doc_id}: timestamp must carry a timezone")


class CorpusFormatError(ValueError):
    pass


def read_corpus(
    path: str | Path,
    tokenizer: Tokenizer | None = None,
    token_cap: int = TRANSCRIPT_TOKEN_CAP,
) -> list[Document]:
    """Read a JSONL corpus; transcripts longer than the token cap are dropped.

    Required fields: doc_id, firm_id, ticker, timestamp (ISO-8601 with zone),
    kind, source, text. Optional: org_mentions, year.
    """
    tok = tokenizer or WordTokenizer()
    docs: list[Document] = []
    dropped = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                ts = dt.datetime.fromisoformat(rec["timestamp"])
                doc = Document(
                    doc_id=str(rec["doc_id"]),
                    firm_id=str(rec["firm_id"]),
                    ticker=str(rec["ticker"]),
                    timestamp=ts,
                    kind=DocumentKind(rec["kind"]),
                    source=str(rec.get("source", "")),
                    text=str(rec["text"]),
                    org_mentions=rec.get("org_mentions"),
                    year=rec.get("year"),
                )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: {exc}") from exc
            if doc.kind == DocumentKind.TRANSCRIPT and tok.count(doc.text) > token_cap:
                dropped += 1
                logger.info("dropping %s: transcript exceeds %d tokens", doc.doc_id, token_cap)
                continue
            docs.append(doc)
    if dropped:
        logger.info("ingestion dropped %d over-length transcripts", dropped)
    return docs


def write_corpus(path: str | Path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            rec = {
                "doc_id": d.doc_id,
                "firm_id": d.firm_id,
                "ticker": d.ticker,
                "timestamp": d.timestamp.isoformat(),
                "kind": d.kind.value,
                "source": d.source,
                "text": d.text,
            }
            if d.org_mentions is not None:
                rec["org_mentions"] = d.org_mentions
            if d.year is not None:
                rec["year"] = d.year
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Trading calendar and announcement dates
# ---------------------------------------------------------------------------

class CalendarError(ValueError):
    pass


class TradingCalendar:
    """Set of valid trading dates loaded from a file (one ISO date per line)."""

    def __init__(self, dates: Iterable[dt.date]):
        self._dates = sorted(set(dates))
        if not self._dates:
            raise CalendarError("trading calendar is empty")
        self._set = set(self._dates)

    @classmethod
    def from_file(cls, path: str | Path) -> "TradingCalendar":
        dates = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    dates.append(dt.date.fromisoformat(line))
                except ValueError as exc:
                    raise CalendarError(f"{path}: line {lineno}: {exc}") from exc
        return cls(dates)

    def __contains__(self, day: dt.date) -> bool:
        return day in self._set

    @property
    def first(self) -> dt.date:
        return self._dates[0]

    @property
    def last(self) -> dt.date:
        return self._dates[-1]

    def next_on_or_after(self, day: dt.date) -> dt.date:
        if day > self.last:
            raise CalendarError(f"{day} is beyond the calendar range (ends {self.last})")
        import bisect
        i = bisect.bisect_left(self._dates, day)
        return self._dates[i]

    def next_after(self, day: dt.date) -> dt.date:
        return self.next_on_or_after(day + dt.timedelta(days=1))


def announcement_date(timestamp: dt.datetime, calendar: TradingCalendar) -> dt.date:
    """Map an event timestamp to its announcement trading day.

    Strictly before 16:00 ET on a trading day maps to that day; anything else
    (at/after the close, or a non-trading day) maps to the next trading day.
    """
    if timestamp.tzinfo is None:
        raise ValueError("timestamp must be timezone-aware")
    local = timestamp.astimezone(EASTERN)
    day = local.date()
    if day in calendar and local.time() < MARKET_CLOSE:
        return day
    return calendar.next_after(day)


# ---------------------------------------------------------------------------
# Headline filtering
# ---------------------------------------------------------------------------

_STOCK_WORD_RE = re.compile(r"\bstocks?\b", re.IGNORECASE)

HEADLINE_FILTER_RULES = ("source", "single_org", "weekend", "stock_word", "duplicate")


@dataclass
class HeadlineFilterResult:
    kept: list[Document]
    drop_counts: dict[str, int] = field(default_factory=dict)

    @property
    def dropped(self) -> int:
        return sum(self.drop_counts.values())


def _normalized_headline(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip().casefold()


def filter_headlines(headlines: Sequence[Document], source: str = "Yahoo") -> HeadlineFilterResult:
    """Apply the headline retention rules in a fixed, documented order.

    Order: source match, single-organization mention, non-weekend (ET),
    no 'stock'/'stocks' word, then dedup on normalized text. Each dropped
    headline is attributed to its first failing rule, so the drop counts sum
    to raw minus kept.
    """
    counts = {rule: 0 for rule in HEADLINE_FILTER_RULES}
    seen: set[str] = set()
    kept: list[Document] = []
    for h in headlines:
        if h.source != source:
            counts["source"] += 1
            continue
        if h.org_mentions is None:
            raise ValueError(f"headline {h.doc_id} lacks an org_mentions count")
        if h.org_mentions != 1:
            counts["single_org"] += 1
            continue
        if h.timestamp.astimezone(EASTERN).weekday() >= 5:
            counts["weekend"] += 1
            continue
        if _STOCK_WORD_RE.search(h.text):
            counts["stock_word"] += 1
            continue
        norm = _normalized_headline(h.text)
        if norm in seen:
            counts["duplicate"] += 1
            continue
        seen.add(norm)
        kept.append(h)
    return HeadlineFilterResult(kept=kept, drop_counts=counts)


def dedup_transcripts(
    docs: Sequence[Document], calendar: TradingCalendar
) -> list[Document]:
    """One transcript per firm-day: keep the earliest timestamp, log the rest."""
    by_key: dict[tuple[str, dt.date], Document] = {}
    for d in sorted(docs, key=lambda d: (d.firm_id, d.timestamp)):
        key = (d.firm_id, announcement_date(d.timestamp, calendar))
        if key in by_key:
            logger.info("duplicate transcript %s for %s on %s dropped", d.doc_id, *key)
            continue
        by_key[key] = d
    return list(by_key.values())


# ---------------------------------------------------------------------------
# Signal records, aggregation, and the panel join
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignalRecord:
    doc_id: str
    firm_id: str
    announcement_date: dt.date
    variant: Variant
    model_id: str
    measure: str  # Sentiment, Uncertainty, Investment, Economy
    value: float | None

    @property
    def missing(self) -> bool:
        return self.value is None


SIGNAL_COLUMNS = ["doc_id", "firm_id", "announcement_date", "variant", "model_id", "measure", "value"]


def signals_to_frame(records: Iterable[SignalRecord]) -> pd.DataFrame:
    rows = [{
        "doc_id": r.doc_id,
        "firm_id": r.firm_id,
        "announcement_date": pd.Timestamp(r.announcement_date),
        "variant": r.variant.value,
        "model_id": r.model_id,
        "measure": r.measure,
        "value": float("nan") if r.value is None else float(r.value),
    } for r in records]
    return pd.DataFrame(rows, columns=SIGNAL_COLUMNS)


def aggregate_daily(signals: pd.DataFrame) -> pd.DataFrame:
    """Collapse to one value per (firm, day, variant, model, measure).

    The mean ignores missing values; a group with only missing values stays
    missing. Transcript signals are already one-per-day after dedup, so the
    mean is the identity there.
    """
    keys = ["firm_id", "announcement_date", "variant", "model_id", "measure"]
    out = (
        signals.groupby(keys, as_index=False, sort=True)["value"]
        .mean()  # skipna by default; all-NaN groups yield NaN
    )
    return out


class JoinIntegrityError(ValueError):
    pass


@dataclass
class JoinReport:
    frame: pd.DataFrame
    unmatched_signals: int
    unmatched_panel: int


def pivot_signals(daily: pd.DataFrame, model_id: str | None = None) -> pd.DataFrame:
    """Wide layout: one column per measure_variant (e.g. Sentiment_RAW).

    The wide frame is per extractor model; pass ``model_id`` to select one
    when several are present.
    """
    if model_id is not None:
        daily = daily[daily["model_id"] == model_id]
    models = sorted(daily["model_id"].unique())
    if len(models) > 1:
        raise JoinIntegrityError(
            f"signals span several extractor models {models}; pivot one model_id at a time"
        )
    dup = daily.duplicated(["firm_id", "announcement_date", "variant", "measure"])
    if dup.any():
        bad = daily[dup].iloc[0]
        raise JoinIntegrityError(
            "duplicate signal after aggregation for "
            f"({bad['firm_id']}, {bad['announcement_date']}, {bad['variant']}, {bad['measure']})"
        )
    wide = daily.pivot_table(
        index=["firm_id", "announcement_date"],
        columns=["measure", "variant"],
        values="value",
        aggfunc="first",
    )
    wide.columns = [f"{measure}_{variant}" for measure, variant in wide.columns]
    return wide.reset_index()


def join_panel(signals_wide: pd.DataFrame, panel: pd.DataFrame) -> JoinReport:
    """Inner join on (firm_id, announcement_date); unmatched counts per side."""
    keys = ["firm_id", "announcement_date"]
    for k in keys:
        if k not in signals_wide.columns or k not in panel.columns:
            raise JoinIntegrityError(f"join key {k!r} missing")
    if panel.duplicated(keys).any():
        raise JoinIntegrityError("panel has duplicate (firm_id, announcement_date) rows")
    merged = signals_wide.merge(panel, on=keys, how="inner")
    report = JoinReport(
        frame=merged,
        unmatched_signals=len(signals_wide) - len(merged),
        unmatched_panel=len(panel) - len(merged),
    )
    if report.unmatched_signals or report.unmatched_panel:
        logger.info(
            "panel join: %d signal rows and %d panel rows unmatched",
            report.unmatched_signals, report.unmatched_panel,
        )
    return report


def quarter_key(day: dt.date | pd.Timestamp) -> str:
    ts = pd.Timestamp(day)
    return f"{ts.year}Q{(ts.month - 1) // 3 + 1}"


# ---------------------------------------------------------------------------
# Panel schema
# ---------------------------------------------------------------------------

PANEL_KEYS = ["firm_id", "announcement_date"]

PANEL_OUTCOMES = ["DGTW", "Vol_post", "Capx_t+2", "SaleChange_t", "ValueAddChange_t"]

PANEL_CONTROLS = [
    "FE",
    "DGTW_t-1", "DGTW_t-2", "DGTW_t-3", "DGTW_t-22_t-4", "DGTW_t-253_t-23",
    "ln_Size", "ln_BM", "ln_Turnover",
    "Vol_pre", "Alpha_pre", "AbsAbnRet",
    "Capx_t", "Leverage", "ln_TotalAsset", "Tangibility",
    "SaleChange_t-2", "ValueAddChange_t-2",
    "TNIC3TSIMM", "TNIC3HHI", "Coverage", "Nasdaq",
]

PANEL_COLUMNS = PANEL_KEYS + PANEL_OUTCOMES + PANEL_CONTROLS

RETURN_CONTROLS = [
    "FE", "DGTW_t-1", "DGTW_t-2", "DGTW_t-3", "DGTW_t-22_t-4", "DGTW_t-253_t-23",
    "ln_Size", "ln_BM", "ln_Turnover",
]


def load_panel(path: str | Path) -> pd.DataFrame:
    """Read the panel table; keys are required, other columns picked up as present."""
    panel = pd.read_csv(path)
    missing = [k for k in PANEL_KEYS if k not in panel.columns]
    if missing:
        raise CorpusFormatError(f"panel {path} lacks key column(s) {missing}")
    panel["firm_id"] = panel["firm_id"].astype(str)
    panel["announcement_date"] = pd.to_datetime(panel["announcement_date"])
    return panel
