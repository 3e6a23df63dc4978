"""Seeded synthetic data: corpus, panel, calendar, gazetteer, and the
deterministic mock-response synthesizer that drives hermetic end-to-end runs.

Documents carry lowercase marker words (tone, clarity, capital-program and
macro-outlook phrases) that survive anonymization, so mock extraction stays
correlated across text variants; a hash jitter that grows with placeholder
density reproduces anonymization-induced noise.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import re
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .anonymizer import anonymize
from .corpus import Document, DocumentKind, PANEL_COLUMNS, TradingCalendar, announcement_date
from .entities import PLACEHOLDER_RE, EntityCategory
from .gateway.prompts import PromptKind
from .recognizer import RecognizerConfig, recognize

TONE_WORDS = {
    "dire": 0.05, "weak": 0.20, "soft": 0.35, "steady": 0.50,
    "solid": 0.65, "strong": 0.80, "exceptional": 0.95,
}
CLARITY_WORDS = {
    "clear": 0.15, "adequate": 0.35, "mixed": 0.55, "limited": 0.75, "minimal": 0.90,
}
CAPITAL_WORDS = {
    "expand sharply": "Increase substantially",
    "expand": "increase",
    "hold": "no change",
    "trim": "decrease",
    "cut deeply": "decrease substantially",
}
MACRO_WORDS = {
    "brightening sharply": "Increase substantially",
    "brightening": "increase",
    "unchanged": "no change",
    "dimming": "decrease",
    "dimming sharply": "decrease substantially",
}

FIRMS = [
    ("Sharpline Dynamics", "SHD"),
    ("Bluehaven Retail Group", "BRG"),
    ("Norcliff Energy", "NCE"),
    ("Veltrix Therapeutics", "VLX"),
    ("Quarrymont Materials", "QMT"),
    ("Arcadia Freight Systems", "AFS"),
    ("Lumenbridge Software", "LBS"),
    ("Pinefield Foods", "PFF"),
    ("Westmark Financial", "WMF"),
    ("Helixon Instruments", "HLX"),
]

# Two tickers deliberately left out of the gazetteer so anonymized texts can
# still leak them and recognition rates stay strictly between 0 and 100.
UNMASKED_TICKERS = {"QMT", "WMF"}

EXECUTIVES = [
    ("Dana Whitfield", "Omar Castellanos"),
    ("Priya Raghavan", "Tom Eldridge"),
    ("Ingrid Solberg", "Marcus Bell"),
    ("Yuki Tanaka", "Elena Brandt"),
    ("Carl Jensen", "Ada Nkemelu"),
    ("Sofia Marini", "Gregor Hale"),
    ("Li Wen", "Tessa Okafor"),
    ("Ruth Calloway", "Jonas Pirkl"),
    ("Miguel Arroyo", "Hana Vesela"),
    ("Nadia Fromm", "Peter Quill"),
]

PLACES = ["Germany", "Japan", "Texas", "Singapore", "Brazil"]
REGIONS = ["the Midwest", "the Pacific Rim"]
PRODUCTS = ["the Atlas 9 platform", "the Cobalt line"]
EVENTS = ["the Harvest Expo"]
NORPS = ["European", "Brazilian"]


def build_gazetteer() -> dict[str, tuple[str, ...]]:
    orgs = [name for name, _t in FIRMS]
    orgs += [t for _n, t in FIRMS if t not in UNMASKED_TICKERS]
    persons = [p for pair in EXECUTIVES for p in pair]
    return {
        "ORG": tuple(orgs),
        "PERSON": tuple(persons),
        "GPE": tuple(PLACES),
        "LOC": tuple(REGIONS),
        "PRODUCT": tuple(PRODUCTS),
        "EVENT": tuple(EVENTS),
        "NORP": tuple(NORPS),
    }


def gazetteer_lines(gazetteer: dict[str, tuple[str, ...]]) -> str:
    lines = []
    for etype in sorted(gazetteer):
        for term in gazetteer[etype]:
            lines.append(f"{etype}\t{term}")
    return "\n".join(lines) + "\n"


def build_calendar(start: dt.date = dt.date(2023, 11, 1), end: dt.date = dt.date(2025, 1, 31)) -> TradingCalendar:
    """All weekdays in the window; holidays are irrelevant for synthetic data."""
    days = []
    day = start
    while day <= end:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return TradingCalendar(days)


def calendar_lines(calendar: TradingCalendar) -> str:
    day = calendar.first
    out = []
    while day <= calendar.last:
        if day in calendar:
            out.append(day.isoformat())
        day += dt.timedelta(days=1)
    return "\n".join(out) + "\n"


def _transcript_text(
    firm: str, ticker: str, ceo: str, cfo: str, quarter: str, year: int,
    tone: str, clarity: str, capital: str, macro: str | None,
    revenue: float, growth: float, place: str, region: str, product: str,
    event: str | None, rng: np.random.Generator,
) -> str:
    sentences = [
        f"Good morning and welcome to the {firm} (Ticker: {ticker}) earnings call for {quarter} {year}.",
        f"Speaking today are {ceo}, chief executive, and {cfo}, chief financial officer.",
        f"Revenue reached ${revenue:.1f} million, up {growth:.1f}% from a year ago.",
        f"Management described overall momentum as {tone} across the portfolio.",
        f"Adoption of {product} accelerated across {region}.",
        f"Demand in {place} trended in line with the fiscal year {year} plan.",
        f"Guidance visibility remains {clarity} heading into next quarter.",
        f"On the capital program we intend to {capital} relative to this year.",
    ]
    if event is not None:
        sentences.append(f"We also presented the roadmap at {event}.")
    if macro is not None:
        sentences.append(f"Our macro outlook is {macro} for the coming quarter.")
    sentences.append(f"{cfo} noted that operating margin was {rng.integers(8, 30)}% in the quarter.")
    sentences.append("We will now open the line for questions.")
    return " ".join(sentences)


def make_corpus(seed: int = 0, n_docs: int = 20) -> tuple[list[Document], TradingCalendar]:
    """Transcripts for FIRMS across quarters, two announcement dates per quarter."""
    rng = np.random.default_rng(seed)
    calendar = build_calendar()
    quarters = [("Q1", 2024, dt.date(2024, 2, 6), dt.date(2024, 2, 7)),
                ("Q2", 2024, dt.date(2024, 5, 7), dt.date(2024, 5, 8)),
                ("Q3", 2024, dt.date(2024, 8, 6), dt.date(2024, 8, 7)),
                ("Q4", 2024, dt.date(2024, 11, 5), dt.date(2024, 11, 6))]
    docs: list[Document] = []
    i = 0
    while len(docs) < n_docs:
        firm_idx = i % len(FIRMS)
        q_idx = (i // len(FIRMS)) % len(quarters)
        firm, ticker = FIRMS[firm_idx]
        ceo, cfo = EXECUTIVES[firm_idx]
        qname, year, day_a, day_b = quarters[q_idx]
        day = day_a if firm_idx < len(FIRMS) // 2 else day_b
        tone = list(TONE_WORDS)[rng.integers(0, len(TONE_WORDS))]
        clarity = list(CLARITY_WORDS)[rng.integers(0, len(CLARITY_WORDS))]
        capital = list(CAPITAL_WORDS)[rng.integers(0, len(CAPITAL_WORDS))]
        macro = None if rng.random() < 0.15 else list(MACRO_WORDS)[rng.integers(0, len(MACRO_WORDS))]
        text = _transcript_text(
            firm, ticker, ceo, cfo, qname, year, tone, clarity, capital, macro,
            revenue=float(rng.uniform(80, 900)),
            growth=float(rng.uniform(-8, 25)),
            place=PLACES[rng.integers(0, len(PLACES))],
            region=REGIONS[rng.integers(0, len(REGIONS))],
            product=PRODUCTS[rng.integers(0, len(PRODUCTS))],
            event=None if rng.random() < 0.5 else EVENTS[0],
            rng=rng,
        )
        hour = int(rng.integers(9, 15))
        ts = dt.datetime(day.year, day.month, day.day, hour, 0,
                         tzinfo=dt.timezone(dt.timedelta(hours=-5)))
        docs.append(Document(
            doc_id=f"doc{i:03d}",
            firm_id=f"F{firm_idx:03d}",
            ticker=ticker,
            timestamp=ts,
            kind=DocumentKind.TRANSCRIPT,
            source="synthetic",
            text=text,
            year=year,
        ))
        i += 1
    return docs, calendar


def doc_tone(doc_text: str) -> float | None:
    for word, level in TONE_WORDS.items():
        if f"momentum as {word}" in doc_text:
            return level
    return None


def make_panel(docs: list[Document], calendar: TradingCalendar, seed: int = 0) -> pd.DataFrame:
    """Panel rows keyed to the documents' firm-days; the day-0 return loads on tone."""
    rng = np.random.default_rng(seed + 1)
    date_effect: dict[dt.date, float] = {}
    rows = []
    for doc in docs:
        day = announcement_date(doc.timestamp, calendar)
        if day not in date_effect:
            date_effect[day] = float(rng.normal(0.0, 0.8))
        tone = doc_tone(doc.text)
        tone = 0.5 if tone is None else tone
        clarity = next((lvl for w, lvl in CLARITY_WORDS.items() if f"remains {w}" in doc.text), 0.5)
        capital_word = next((w for w in CAPITAL_WORDS if f"intend to {w} relative" in doc.text), "hold")
        capital_level = {"expand sharply": 2, "expand": 1, "hold": 0, "trim": -1, "cut deeply": -2}[capital_word]
        macro_word = next((w for w in MACRO_WORDS if f"outlook is {w} for" in doc.text), None)
        macro_level = 0 if macro_word is None else {"brightening sharply": 2, "brightening": 1,
                                                    "unchanged": 0, "dimming": -1, "dimming sharply": -2}[macro_word]
        row = {
            "firm_id": doc.firm_id,
            "announcement_date": day.isoformat(),
            "DGTW": 6.0 * (tone - 0.5) + date_effect[day] + float(rng.normal(0, 1.0)),
            "Vol_post": 0.30 + 0.40 * clarity + float(rng.normal(0, 0.05)),
            "Capx_t+2": 0.05 + 0.015 * capital_level + float(rng.normal(0, 0.01)),
            "SaleChange_t": 0.02 * macro_level + float(rng.normal(0, 0.03)),
            "ValueAddChange_t": 0.025 * macro_level + float(rng.normal(0, 0.04)),
            "FE": 0.8 * (tone - 0.5) + float(rng.normal(0, 0.3)),
            "DGTW_t-1": float(rng.normal(0, 1.2)),
            "DGTW_t-2": float(rng.normal(0, 1.2)),
            "DGTW_t-3": float(rng.normal(0, 1.2)),
            "DGTW_t-22_t-4": float(rng.normal(0, 3.0)),
            "DGTW_t-253_t-23": float(rng.normal(0, 8.0)),
            "ln_Size": float(rng.normal(8.0, 1.2)),
            "ln_BM": float(rng.normal(-0.8, 0.5)),
            "ln_Turnover": float(rng.normal(0.7, 0.4)),
            "Vol_pre": 0.28 + float(rng.normal(0, 0.04)),
            "Alpha_pre": float(rng.normal(0, 0.02)),
            "AbsAbnRet": abs(float(rng.normal(0, 2.0))),
            "Capx_t": 0.05 + float(rng.normal(0, 0.012)),
            "Leverage": float(rng.uniform(0.05, 0.6)),
            "ln_TotalAsset": float(rng.normal(7.5, 1.0)),
            "Tangibility": float(rng.uniform(0.1, 0.7)),
            "SaleChange_t-2": float(rng.normal(0.01, 0.03)),
            "ValueAddChange_t-2": float(rng.normal(0.01, 0.04)),
            "TNIC3TSIMM": float(rng.uniform(0.5, 6.0)),
            "TNIC3HHI": float(rng.uniform(0.05, 0.6)),
            "Coverage": float(rng.uniform(1, 25)),
            "Nasdaq": int(rng.integers(0, 2)),
        }
        rows.append(row)
    return pd.DataFrame(rows, columns=PANEL_COLUMNS)


# ---------------------------------------------------------------------------
# Deterministic mock responses
# ---------------------------------------------------------------------------

def _hash_unit(payload: str, salt: str) -> float:
    digest = hashlib.sha256(f"{salt}\x00{payload}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / float(1 << 64)


def _jitter(payload: str, salt: str) -> float:
    # Noise grows with placeholder density: anonymized text reads noisier.
    n_placeholders = len(PLACEHOLDER_RE.findall(payload))
    amplitude = 0.01 + 0.30 * min(1.0, n_placeholders / 15.0)
    return (2.0 * _hash_unit(payload, salt) - 1.0) * amplitude


def _marker_level(payload: str, prefix: str, table: dict[str, float]) -> float | None:
    for word, level in table.items():
        if f"{prefix}{word}" in payload:
            return level
    return None


def _marker_word(payload: str, prefix: str, table: dict[str, str]) -> str | None:
    # Longest marker first so "expand sharply" is not shadowed by "expand".
    for word in sorted(table, key=len, reverse=True):
        if f"{prefix}{word}" in payload:
            return table[word]
    return None


_TICKER_RE = re.compile(r"\(Ticker: ([A-Z0-9.\-]{1,10})\)")
_YEAR_RE = re.compile(r"\b(19\d{2}|20\d{2})\b")


@dataclass
class MockSynthesizer:
    """Deterministic (kind, payload) -> response text; no state, no network."""

    recognizer_config: RecognizerConfig

    def __call__(self, kind: PromptKind, payload: str) -> str:
        if kind in (PromptKind.SENTIMENT_TRANSCRIPT, PromptKind.SENTIMENT_NEWS):
            tone = _marker_level(payload, "momentum as ", TONE_WORDS)
            if tone is None:
                return "**Direction Estimate: NA**,**Magnitude Estimate: 0**"
            level = min(1.0, max(0.0, tone + _jitter(payload, "sentiment")))
            direction = 1 if level >= 0.5 else 0
            magnitude = round(abs(2.0 * level - 1.0), 2)
            return f"**Direction Estimate: {direction}**,**Magnitude Estimate: {magnitude:.2f}**"
        if kind == PromptKind.UNCERTAINTY:
            clarity = _marker_level(payload, "remains ", CLARITY_WORDS)
            base = 0.5 if clarity is None else clarity
            level = min(1.0, max(0.0, base + _jitter(payload, "uncertainty")))
            return f"**Uncertainty Score: {level:.2f}**"
        if kind == PromptKind.INVESTMENT:
            choice = _marker_word(payload, "intend to ", CAPITAL_WORDS)
            if choice is None:
                return "**no information is provided**"
            return f"**{choice} - the stated capital program points this way.**"
        if kind == PromptKind.ECONOMY:
            choice = _marker_word(payload, "outlook is ", MACRO_WORDS)
            if choice is None:
                return "**no information is provided**"
            return f"**{choice} - the stated macro outlook points this way.**"
        if kind == PromptKind.RECOGNIZE:
            ticker = None
            m = _TICKER_RE.search(payload)
            if m:
                ticker = m.group(1)
            year = None
            y = _YEAR_RE.search(payload)
            if y:
                year = int(y.group(1))
            if ticker is None:
                ticker = f"Z{int(_hash_unit(payload, 'ticker') * 675):03d}"
            if year is None:
                year = 1900 + int(_hash_unit(payload, "year") * 100)
            return f"**Company Estimate: {ticker}**,**Year Estimate: {year}**"
        if kind == PromptKind.ANONYMIZE:
            # Mask everything but geography, so this variant differs from a
            # full recognizer mask the way a second tagger would.
            spans = recognize(payload, self.recognizer_config)
            masked, _ = anonymize(payload, spans, categories=[
                EntityCategory.NUMBERS, EntityCategory.OBJECTS, EntityCategory.OTHERS,
            ])
            return masked
        raise ValueError(f"mock synthesizer has no rule for kind {kind!r}")


def make_information_loss_frame(
    seed: int,
    n_firms: int = 40,
    n_dates: int = 10,
    snr: float = 2.0,
    beta: float = 2.0,
    noise_sd: float = 1.0,
) -> pd.DataFrame:
    """Planted-signal frame: returns load on the raw score; the anonymized
    score is the raw score plus noise with std 1/snr."""
    rng = np.random.default_rng(seed)
    n = n_firms * n_dates
    dates = pd.to_datetime(
        [dt.date(2024, 1, 2) + dt.timedelta(days=7 * d) for d in range(n_dates)]
    )
    raw = rng.normal(0.0, 1.0, size=n)
    trf = raw + rng.normal(0.0, 1.0 / snr, size=n)
    date_idx = np.repeat(np.arange(n_dates), n_firms)
    date_fx = rng.normal(0.0, 1.0, size=n_dates)
    y = beta * raw + date_fx[date_idx] + rng.normal(0.0, noise_sd, size=n)
    return pd.DataFrame({
        "firm_id": [f"F{i % n_firms:03d}" for i in range(n)],
        "announcement_date": dates[date_idx],
        "DGTW": y,
        "Sentiment_RAW": raw,
        "Sentiment_TRF": trf,
    })
