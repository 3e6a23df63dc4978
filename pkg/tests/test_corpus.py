import datetime as dt
from zoneinfo import ZoneInfo

import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonpipe.corpus import (
    CalendarError,
    CorpusFormatError,
    Document,
    DocumentKind,
    JoinIntegrityError,
    SignalRecord,
    TradingCalendar,
    Variant,
    aggregate_daily,
    announcement_date,
    dedup_transcripts,
    filter_headlines,
    join_panel,
    pivot_signals,
    quarter_key,
    read_corpus,
    signals_to_frame,
    write_corpus,
)

ET = ZoneInfo("America/New_York")


@pytest.fixture(scope="module")
def calendar() -> TradingCalendar:
    # Weekdays across two months; enough range for the rules below.
    days = []
    day = dt.date(2024, 1, 1)
    while day <= dt.date(2024, 2, 29):
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return TradingCalendar(days)


class TestAnnouncementDate:
    def test_before_close_same_day(self, calendar):
        ts = dt.datetime(2024, 1, 9, 15, 0, tzinfo=ET)  # Tuesday 15:00
        assert announcement_date(ts, calendar) == dt.date(2024, 1, 9)

    def test_after_close_next_trading_day(self, calendar):
        ts = dt.datetime(2024, 1, 9, 17, 30, tzinfo=ET)
        assert announcement_date(ts, calendar) == dt.date(2024, 1, 10)

    def test_friday_evening_rolls_to_monday(self, calendar):
        ts = dt.datetime(2024, 1, 12, 17, 30, tzinfo=ET)  # Friday
        assert announcement_date(ts, calendar) == dt.date(2024, 1, 15)

    def test_exactly_at_close_counts_as_after(self, calendar):
        ts = dt.datetime(2024, 1, 9, 16, 0, 0, tzinfo=ET)
        assert announcement_date(ts, calendar) == dt.date(2024, 1, 10)

    def test_weekend_morning_rolls_forward(self, calendar):
        ts = dt.datetime(2024, 1, 13, 10, 0, tzinfo=ET)  # Saturday
        assert announcement_date(ts, calendar) == dt.date(2024, 1, 15)

    def test_other_zone_converted_to_eastern(self, calendar):
        # 21:30 UTC == 16:30 ET in January: after close.
        ts = dt.datetime(2024, 1, 9, 21, 30, tzinfo=dt.timezone.utc)
        assert announcement_date(ts, calendar) == dt.date(2024, 1, 10)

    def test_naive_timestamp_rejected(self, calendar):
        with pytest.raises(ValueError):
            announcement_date(dt.datetime(2024, 1, 9, 12, 0), calendar)

    def test_beyond_calendar_raises(self, calendar):
        ts = dt.datetime(2024, 2, 29, 17, 0, tzinfo=ET)
        with pytest.raises(CalendarError):
            announcement_date(ts, calendar)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=50_000))
    def test_monotone_in_timestamp(self, minutes):
        cal = TradingCalendar(
            [dt.date(2024, 1, 1) + dt.timedelta(days=d) for d in range(0, 80)
             if (dt.date(2024, 1, 1) + dt.timedelta(days=d)).weekday() < 5]
        )
        base = dt.datetime(2024, 1, 2, 0, 0, tzinfo=ET)
        t1 = base + dt.timedelta(minutes=minutes)
        t2 = t1 + dt.timedelta(minutes=173)
        assert announcement_date(t1, cal) <= announcement_date(t2, cal)


def _headline(doc_id, text, source="Yahoo", org_mentions=1, weekday=2):
    # weekday: 0=Mon ... 5=Sat
    day = dt.date(2024, 1, 8) + dt.timedelta(days=weekday)
    return Document(
        doc_id=doc_id, firm_id="F1", ticker="TCK",
        timestamp=dt.datetime(day.year, day.month, day.day, 10, 0, tzinfo=ET),
        kind=DocumentKind.HEADLINE, source=source, text=text, org_mentions=org_mentions,
    )


class TestHeadlineFilter:
    def test_keeps_clean_headline(self):
        result = filter_headlines([_headline("h1", "Acme unveils new chip")])
        assert [d.doc_id for d in result.kept] == ["h1"]
        assert result.dropped == 0

    def test_rules_in_order_with_counts(self):
        headlines = [
            _headline("h1", "Acme unveils new chip"),
            _headline("h2", "Tech stocks rally"),                      # stock word
            _headline("h3", "Acme results", source="OtherWire"),       # source
            _headline("h4", "Acme and Bolt merge", org_mentions=2),    # single org
            _headline("h5", "Acme weekend recap", weekday=5),          # Saturday
            _headline("h6", "acme unveils  NEW chip"),                 # duplicate (normalized)
            _headline("h7", "Stock buyback announced"),                # stock word, capitalized
        ]
        result = filter_headlines(headlines)
        assert [d.doc_id for d in result.kept] == ["h1"]
        assert result.drop_counts == {
            "source": 1, "single_org": 1, "weekend": 1, "stock_word": 2, "duplicate": 1,
        }
        assert result.dropped == len(headlines) - len(result.kept)

    def test_stock_word_is_whole_word(self):
        result = filter_headlines([_headline("h1", "Livestock futures climb")])
        assert len(result.kept) == 1  # 'stock' inside a word does not count

    def test_first_failing_rule_attribution(self):
        # fails source and stock word; attributed to source (first in order)
        result = filter_headlines([_headline("h1", "stocks dip", source="OtherWire")])
        assert result.drop_counts["source"] == 1
        assert result.drop_counts["stock_word"] == 0

    def test_missing_org_mentions_rejected(self):
        bad = _headline("h1", "Acme results", org_mentions=None)
        with pytest.raises(ValueError, match="org_mentions"):
            filter_headlines([bad])


class TestAggregation:
    def _records(self, values, firm="F1"):
        return [
            SignalRecord(doc_id=f"d{i}", firm_id=firm, announcement_date=dt.date(2024, 1, 9),
                         variant=Variant.RAW, model_id="m", measure="Sentiment", value=v)
            for i, v in enumerate(values)
        ]

    def test_mean_of_two(self):
        daily = aggregate_daily(signals_to_frame(self._records([0.4, 0.6])))
        assert daily["value"].tolist() == [pytest.approx(0.5)]

    def test_singleton_identity(self):
        daily = aggregate_daily(signals_to_frame(self._records([0.7])))
        assert daily["value"].tolist() == [pytest.approx(0.7)]

    def test_missing_excluded(self):
        daily = aggregate_daily(signals_to_frame(self._records([0.2, None, 0.8])))
        assert daily["value"].tolist() == [pytest.approx(0.5)]

    def test_all_missing_stays_missing(self):
        daily = aggregate_daily(signals_to_frame(self._records([None, None])))
        assert daily["value"].isna().all()

    def test_permutation_invariant(self):
        a = aggregate_daily(signals_to_frame(self._records([0.1, 0.5, 0.9])))
        b = aggregate_daily(signals_to_frame(self._records([0.9, 0.1, 0.5])))
        pd.testing.assert_frame_equal(a, b)


class TestJoin:
    def _signals_wide(self):
        records = [
            SignalRecord("d1", "F1", dt.date(2024, 1, 9), Variant.RAW, "m", "Sentiment", 0.5),
            SignalRecord("d2", "F2", dt.date(2024, 1, 9), Variant.RAW, "m", "Sentiment", -0.2),
            SignalRecord("d3", "F3", dt.date(2024, 1, 10), Variant.RAW, "m", "Sentiment", 0.1),
        ]
        return pivot_signals(aggregate_daily(signals_to_frame(records)))

    def test_inner_join_and_unmatched_counts(self):
        panel = pd.DataFrame({
            "firm_id": ["F1", "F2"],
            "announcement_date": pd.to_datetime(["2024-01-09", "2024-01-09"]),
            "DGTW": [1.0, -0.5],
        })
        report = join_panel(self._signals_wide(), panel)
        assert len(report.frame) == 2
        assert report.unmatched_signals == 1
        assert report.unmatched_panel == 0
        assert "Sentiment_RAW" in report.frame.columns

    def test_empty_panel_empty_frame(self):
        panel = pd.DataFrame({"firm_id": pd.Series(dtype=str),
                              "announcement_date": pd.Series(dtype="datetime64[ns]")})
        report = join_panel(self._signals_wide(), panel)
        assert report.frame.empty
        assert report.unmatched_signals == 3

    def test_fixture_matches_key_intersection(self):
        wide = self._signals_wide()
        panel_keys = [("F1", "2024-01-09"), ("F3", "2024-01-10"), ("F9", "2024-01-09")]
        panel = pd.DataFrame({
            "firm_id": [k[0] for k in panel_keys],
            "announcement_date": pd.to_datetime([k[1] for k in panel_keys]),
            "DGTW": [0.0, 0.0, 0.0],
        })
        signal_keys = {(row.firm_id, str(row.announcement_date.date()))
                       for row in wide.itertuples()}
        expected = signal_keys & set(panel_keys)
        report = join_panel(wide, panel)
        assert len(report.frame) == len(expected) == 2

    def test_duplicate_signal_key_is_integrity_error(self):
        records = [
            SignalRecord("d1", "F1", dt.date(2024, 1, 9), Variant.RAW, "m", "Sentiment", 0.5),
            SignalRecord("d2", "F1", dt.date(2024, 1, 9), Variant.RAW, "m", "Sentiment", 0.7),
        ]
        frame = signals_to_frame(records)  # not aggregated: duplicates remain
        with pytest.raises(JoinIntegrityError):
            pivot_signals(frame)

    def test_duplicate_panel_key_is_integrity_error(self):
        panel = pd.DataFrame({
            "firm_id": ["F1", "F1"],
            "announcement_date": pd.to_datetime(["2024-01-09", "2024-01-09"]),
            "DGTW": [1.0, 2.0],
        })
        with pytest.raises(JoinIntegrityError):
            join_panel(self._signals_wide(), panel)


class TestCorpusIO:
    def _doc(self, doc_id="t1", text="hello world", kind=DocumentKind.TRANSCRIPT):
        return Document(
            doc_id=doc_id, firm_id="F1", ticker="TCK",
            timestamp=dt.datetime(2024, 1, 9, 10, 0, tzinfo=ET),
            kind=kind, source="synthetic", text=text, year=2024,
        )

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        docs = [self._doc(), self._doc("t2", "second doc")]
        write_corpus(path, docs)
        loaded = read_corpus(path)
        assert [d.doc_id for d in loaded] == ["t1", "t2"]
        assert loaded[0].timestamp == docs[0].timestamp

    def test_token_cap_drops_long_transcripts(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_corpus(path, [self._doc(), self._doc("big", "word " * 20)])
        loaded = read_corpus(path, token_cap=10)
        assert [d.doc_id for d in loaded] == ["t1"]

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"doc_id": "a"}\n')
        with pytest.raises(CorpusFormatError, match="line 1"):
            read_corpus(path)

    def test_naive_timestamp_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"doc_id": "a", "firm_id": "F", "ticker": "T", '
            '"timestamp": "2024-01-09T10:00:00", "kind": "transcript", "text": "x"}\n'
        )
        with pytest.raises(CorpusFormatError, match="timezone"):
            read_corpus(path)


class TestDedupTranscripts:
    def test_keeps_earliest_per_firm_day(self, calendar):
        early = Document("a", "F1", "T", dt.datetime(2024, 1, 9, 9, 0, tzinfo=ET),
                         DocumentKind.TRANSCRIPT, "s", "x")
        late = Document("b", "F1", "T", dt.datetime(2024, 1, 9, 11, 0, tzinfo=ET),
                        DocumentKind.TRANSCRIPT, "s", "y")
        kept = dedup_transcripts([late, early], calendar)
        assert [d.doc_id for d in kept] == ["a"]


def test_quarter_key():
    assert quarter_key(dt.date(2024, 2, 6)) == "2024Q1"
    assert quarter_key(dt.date(2024, 11, 5)) == "2024Q4"


def test_pivot_rejects_mixed_models_without_selection():
    records = [
        SignalRecord("d1", "F1", dt.date(2024, 1, 9), Variant.RAW, "model-a", "Sentiment", 0.5),
        SignalRecord("d1", "F1", dt.date(2024, 1, 9), Variant.RAW, "model-b", "Sentiment", 0.6),
    ]
    daily = aggregate_daily(signals_to_frame(records))
    with pytest.raises(JoinIntegrityError, match="model"):
        pivot_signals(daily)
    wide = pivot_signals(daily, model_id="model-a")
    assert wide["Sentiment_RAW"].iloc[0] == pytest.approx(0.5)
