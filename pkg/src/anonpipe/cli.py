"""Batch pipeline front end.

Subcommands:
  synth      generate a seeded synthetic corpus/panel/calendar/gazetteer
  anonymize  corpus -> text variants, entity maps, span sidecar, entity stats
  extract    variants -> per-document signal records via the model gateway
  recognize  anonymized variants -> firm/year recognition report
  evaluate   signals + panel -> battery tables (machine-readable)
  report     battery tables -> text summaries + plot-data files

Exit codes: 0 success, 2 usage, 3 unreadable input, 4 provider/auth,
5 integrity or configuration, 1 unexpected. Failures print one JSON error
object to stderr. Every step is resumable: it skips itself when its recorded
input fingerprint matches and its outputs exist.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pandas as pd

from . import anonymizer, corpus, evaluation, synthetic
from .entities import EntityCategory
from .gateway import (
    AuthError,
    HttpChatProvider,
    IdentityTruth,
    LLMGateway,
    MockProvider,
    PromptKind,
    ProviderConfig,
    ResponseCache,
    TransportError,
    ordinal_score,
    sentiment_score,
)
from .recognizer import (
    GazetteerFormatError,
    RecognizerConfig,
    load_external_spans,
    load_gazetteer,
    recognize,
)

logger = logging.getLogger("anonpipe")

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_PROVIDER = 4
EXIT_INTEGRITY = 5

CATEGORY_VARIANTS = {
    corpus.Variant.NUM: (EntityCategory.NUMBERS,),
    corpus.Variant.PLC: (EntityCategory.PLACES,),
    corpus.Variant.OBJ: (EntityCategory.OBJECTS,),
    corpus.Variant.OTH: (EntityCategory.OTHERS,),
}

MEASURE_LABELS = {
    "sentiment": "Sentiment",
    "uncertainty": "Uncertainty",
    "investment": "Investment",
    "economy": "Economy",
}

# Non-sentiment measures run on the raw text and the full anonymization only.
RAW_TRF_ONLY = {"Uncertainty", "Investment", "Economy"}

DEFAULTS: dict = {
    "out": "out",
    "corpus": None,
    "panel": None,
    "calendar": None,
    "gazetteer": None,
    "variants": ["RAW", "TRF", "NUM", "PLC", "OBJ", "OTH"],
    "measures": ["sentiment", "uncertainty", "investment", "economy"],
    "batteries": ["information_loss", "quarterly", "gap", "multitask"],
    "controls": list(corpus.RETURN_CONTROLS),
    "provider": {"name": "mock", "model": "mock-1"},
    "sidecars": {},
    "headline_source": "Yahoo",
    "jobs": 1,
    "seed": 0,
}


class InputError(RuntimeError):
    pass


class ConfigError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Configuration and resume plumbing
# ---------------------------------------------------------------------------

_PATH_KEYS = ("corpus", "panel", "calendar", "gazetteer", "out")


def load_settings(args: argparse.Namespace) -> dict:
    """Merge flag > config file > default, per key.

    Path-valued entries in the config file are resolved relative to the
    config file's directory; path flags stay relative to the working dir.
    """
    settings = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {config_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config {config_path}: {exc}") from exc
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        base = Path(config_path).resolve().parent
        for key in _PATH_KEYS:
            if file_cfg.get(key):
                file_cfg[key] = str((base / file_cfg[key]).resolve())
        if file_cfg.get("sidecars"):
            file_cfg["sidecars"] = {
                k: str((base / v).resolve()) for k, v in file_cfg["sidecars"].items()
            }
        settings.update(file_cfg)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value not in (None, []):
            settings[key] = value
    return settings


def _file_sha(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _fingerprint(inputs: list[Path], params: dict) -> str:
    h = hashlib.sha256()
    for p in sorted(inputs):
        h.update(str(p).encode())
        h.update(_file_sha(p).encode())
    h.update(json.dumps(params, sort_keys=True, default=str).encode())
    return h.hexdigest()


def _resume(out: Path, step: str, fingerprint: str, outputs: list[Path]) -> bool:
    manifest = out / "manifests" / f"{step}.json"
    if manifest.exists():
        try:
            recorded = json.loads(manifest.read_text())
        except json.JSONDecodeError:
            return False
        if recorded.get("fingerprint") == fingerprint and all(p.exists() for p in outputs):
            print(f"{step}: up to date, skipping")
            return True
    return False


def _record(out: Path, step: str, fingerprint: str) -> None:
    manifest_dir = out / "manifests"
    manifest_dir.mkdir(parents=True, exist_ok=True)
    (manifest_dir / f"{step}.json").write_text(
        json.dumps({"fingerprint": fingerprint}, indent=2)
    )


def _require(settings: dict, *keys: str) -> None:
    missing = [k for k in keys if not settings.get(k)]
    if missing:
        raise ConfigError(f"missing required setting(s): {missing}")


def _build_provider(settings: dict, recognizer_config: RecognizerConfig) -> object:
    cfg = dict(DEFAULTS["provider"])
    cfg.update(settings["provider"] or {})
    name = cfg.pop("name", "mock")
    try:
        provider_config = ProviderConfig(name=name, **cfg)
    except TypeError as exc:
        raise ConfigError(f"bad provider settings: {exc}") from exc
    if name == "mock":
        return MockProvider(
            config=provider_config,
            synthesizer=synthetic.MockSynthesizer(recognizer_config),
        )
    if name == "http":
        return HttpChatProvider(provider_config)
    raise ConfigError(f"unknown provider {name!r} (expected 'mock' or 'http')")


def _recognizer_config(settings: dict) -> RecognizerConfig:
    config = RecognizerConfig()
    if settings.get("gazetteer"):
        path = Path(settings["gazetteer"])
        if not path.exists():
            raise InputError(f"gazetteer file not found: {path}")
        config = config.with_gazetteer(load_gazetteer(path))
    return config


def _load_documents(settings: dict) -> tuple[list[corpus.Document], corpus.TradingCalendar]:
    _require(settings, "corpus", "calendar")
    corpus_path = Path(settings["corpus"])
    calendar_path = Path(settings["calendar"])
    for p in (corpus_path, calendar_path):
        if not p.exists():
            raise InputError(f"input file not found: {p}")
    calendar = corpus.TradingCalendar.from_file(calendar_path)
    docs = corpus.read_corpus(corpus_path)
    transcripts = [d for d in docs if d.kind == corpus.DocumentKind.TRANSCRIPT]
    headlines = [d for d in docs if d.kind == corpus.DocumentKind.HEADLINE]
    kept = corpus.dedup_transcripts(transcripts, calendar)
    if headlines:
        result = corpus.filter_headlines(headlines, source=settings["headline_source"])
        logger.info("headline filter drops: %s", result.drop_counts)
        kept += result.kept
    kept.sort(key=lambda d: d.doc_id)
    return kept, calendar


def _variant_list(settings: dict) -> list[corpus.Variant]:
    try:
        return [corpus.Variant(v.upper()) for v in settings["variants"]]
    except ValueError as exc:
        raise ConfigError(f"unknown variant in {settings['variants']}: {exc}") from exc


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    seed = int(settings["seed"])
    docs, calendar = synthetic.make_corpus(seed=seed)
    panel = synthetic.make_panel(docs, calendar, seed=seed)
    corpus.write_corpus(out / "corpus.jsonl", docs)
    panel.to_csv(out / "panel.csv", index=False, float_format="%.10g", lineterminator="\n")
    (out / "calendar.txt").write_text(synthetic.calendar_lines(calendar))
    (out / "gazetteer.tsv").write_text(synthetic.gazetteer_lines(synthetic.build_gazetteer()))
    # Paths are config-file-relative so the directory can be moved wholesale.
    config = {
        "corpus": "corpus.jsonl",
        "panel": "panel.csv",
        "calendar": "calendar.txt",
        "gazetteer": "gazetteer.tsv",
        "out": ".",
        "variants": ["RAW", "TRF", "LLM", "NUM", "PLC", "OBJ", "OTH"],
        "controls": ["FE", "ln_Size"],
        "seed": seed,
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n")
    print(f"synth: wrote {len(docs)} documents, panel, calendar, gazetteer to {out}")
    return EXIT_OK


def cmd_anonymize(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out = Path(settings["out"])
    docs, calendar = _load_documents(settings)
    variants = _variant_list(settings)
    recognizer_config = _recognizer_config(settings)

    categories_flag = getattr(args, "categories", None)
    if categories_flag:
        chosen = frozenset(EntityCategory(c.upper()) for c in categories_flag)
        label_by_set = {
            frozenset({EntityCategory.NUMBERS}): corpus.Variant.NUM,
            frozenset({EntityCategory.PLACES}): corpus.Variant.PLC,
            frozenset({EntityCategory.OBJECTS}): corpus.Variant.OBJ,
            frozenset({EntityCategory.OTHERS}): corpus.Variant.OTH,
            frozenset(EntityCategory): corpus.Variant.TRF,
        }
        if chosen not in label_by_set:
            raise ConfigError("--categories must name one category or all four")
        variants = [corpus.Variant.RAW, label_by_set[chosen]]

    inputs = [Path(settings["corpus"]), Path(settings["calendar"])]
    if settings.get("gazetteer"):
        inputs.append(Path(settings["gazetteer"]))
    fingerprint = _fingerprint(inputs, {"variants": [v.value for v in variants]})
    outputs = [out / "spans.jsonl", out / "entity_stats.csv"]
    if _resume(out, "anonymize", fingerprint, outputs):
        return EXIT_OK

    sidecars = settings.get("sidecars") or {}
    gateway = None
    if corpus.Variant.LLM in variants:
        provider = _build_provider(settings, recognizer_config)
        gateway = LLMGateway(provider, cache=ResponseCache(out / "cache"))

    for v in variants:
        (out / "variants" / v.value).mkdir(parents=True, exist_ok=True)
    (out / "maps").mkdir(parents=True, exist_ok=True)

    stats_records: list[corpus.SignalRecord] = []
    all_spans: list[tuple[str, list]] = []

    def process(doc: corpus.Document):
        spans = recognize(doc.text, recognizer_config)
        emap = anonymizer.build_entity_map(spans)
        day = corpus.announcement_date(doc.timestamp, calendar)
        per_doc = []
        for v in variants:
            # Entity% convention: span-based variants use the raw-text basis
            # (tokens of the spans that variant masks over raw tokens); the
            # model-anonymized variant counts placeholder tokens in its own
            # output instead, since no span offsets exist for it.
            pct = None
            if v == corpus.Variant.RAW:
                text_v = doc.text
            elif v == corpus.Variant.LLM:
                result = gateway.llm_anonymize(doc.text)
                text_v = result.text
                pct = anonymizer.entity_percentage(text_v, basis=anonymizer.PercentageBasis.ANONYMIZED)
                (out / "maps" / f"{doc.doc_id}.llm.json").write_text(json.dumps({
                    "placeholders": result.placeholders,
                    "truncated": result.truncated,
                }, indent=2))
            elif v == corpus.Variant.SM:
                sidecar = sidecars.get("SM")
                if not sidecar:
                    raise ConfigError("variant SM needs config sidecars.SM pointing at a span file")
                ext = load_external_spans(doc.text, sidecar, doc_id=doc.doc_id)
                text_v, sm_map = anonymizer.anonymize(doc.text, ext)
                (out / "maps" / f"{doc.doc_id}.sm.json").write_text(
                    json.dumps(sm_map.to_dict(), indent=2, ensure_ascii=False))
                pct = anonymizer.entity_percentage(doc.text, ext, anonymizer.PercentageBasis.RAW)
            else:
                cats = CATEGORY_VARIANTS.get(v)
                text_v = anonymizer.apply_map(doc.text, spans, emap, cats)
                masked_spans = spans if cats is None else [s for s in spans if s.category in cats]
                pct = anonymizer.entity_percentage(doc.text, masked_spans, anonymizer.PercentageBasis.RAW)
            (out / "variants" / v.value / f"{doc.doc_id}.txt").write_text(text_v, encoding="utf-8")
            if pct is not None:
                per_doc.append(corpus.SignalRecord(
                    doc_id=doc.doc_id, firm_id=doc.firm_id, announcement_date=day,
                    variant=v, model_id="recognizer", measure="EntityPct", value=pct,
                ))
        (out / "maps" / f"{doc.doc_id}.json").write_text(json.dumps(emap.to_dict(), indent=2, ensure_ascii=False))
        return doc.doc_id, spans, per_doc

    results = _parallel_map(process, docs, int(settings["jobs"]))
    results.sort(key=lambda r: r[0])
    with open(out / "spans.jsonl", "w", encoding="utf-8") as fh:
        for doc_id, spans, _recs in results:
            for span in spans:
                fh.write(json.dumps({
                    "doc_id": doc_id, "start": span.start, "end": span.end,
                    "type": span.entity_type, "surface": span.surface,
                }, ensure_ascii=False) + "\n")
    for _doc_id, _spans, recs in results:
        stats_records.extend(recs)
    corpus.signals_to_frame(stats_records).to_csv(
        out / "entity_stats.csv", index=False, float_format="%.10g", lineterminator="\n"
    )
    _record(out, "anonymize", fingerprint)
    print(f"anonymize: {len(docs)} documents x {len(variants)} variants -> {out / 'variants'}")
    return EXIT_OK


def _read_variant_text(out: Path, variant: corpus.Variant, doc_id: str) -> str:
    path = out / "variants" / variant.value / f"{doc_id}.txt"
    if not path.exists():
        raise InputError(f"variant file missing (run anonymize first): {path}")
    return path.read_text(encoding="utf-8")


def cmd_extract(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out = Path(settings["out"])
    docs, calendar = _load_documents(settings)
    variants = _variant_list(settings)
    measures = [MEASURE_LABELS[m] for m in settings["measures"]]
    recognizer_config = _recognizer_config(settings)
    provider = _build_provider(settings, recognizer_config)
    gateway = LLMGateway(provider, cache=ResponseCache(out / "cache"))
    model_id = provider.config.model

    fingerprint = _fingerprint(
        [Path(settings["corpus"]), Path(settings["calendar"])],
        {"variants": [v.value for v in variants], "measures": measures,
         "provider": provider.config.provider_id},
    )
    if _resume(out, f"extract_{model_id}", fingerprint, [out / "signals.csv"]):
        return EXIT_OK

    jobs = int(settings["jobs"])

    def extract_doc(item) -> list[corpus.SignalRecord]:
        doc, variant = item
        text = _read_variant_text(out, variant, doc.doc_id)
        day = corpus.announcement_date(doc.timestamp, calendar)
        records = []
        for measure in measures:
            if measure in RAW_TRF_ONLY and variant not in (corpus.Variant.RAW, corpus.Variant.TRF):
                continue
            if measure == "Sentiment":
                kind = (PromptKind.SENTIMENT_NEWS if doc.kind == corpus.DocumentKind.HEADLINE
                        else PromptKind.SENTIMENT_TRANSCRIPT)
                result = gateway.complete(kind, text)
                value = sentiment_score(result.direction, result.magnitude)
            elif measure == "Uncertainty":
                value = gateway.complete(PromptKind.UNCERTAINTY, text).uncertainty
            elif measure == "Investment":
                result = gateway.complete(PromptKind.INVESTMENT, text)
                value = None if result.category is None else ordinal_score(result.category)
                value = None if value is None else float(value)
            elif measure == "Economy":
                result = gateway.complete(PromptKind.ECONOMY, text)
                value = None if result.category is None else ordinal_score(result.category)
                value = None if value is None else float(value)
            else:
                raise ConfigError(f"unknown measure {measure!r}")
            records.append(corpus.SignalRecord(
                doc_id=doc.doc_id, firm_id=doc.firm_id, announcement_date=day,
                variant=variant, model_id=model_id, measure=measure, value=value,
            ))
        return records

    work = [(doc, v) for doc in docs for v in variants]
    nested = _parallel_map(extract_doc, work, jobs)
    records = [r for batch in nested for r in batch]
    frame = corpus.signals_to_frame(records)

    # Accumulate across extractor models: rows from other models are kept, a
    # re-run with the same model replaces its own rows.
    signals_path = out / "signals.csv"
    if signals_path.exists():
        existing = pd.read_csv(signals_path, parse_dates=["announcement_date"])
        existing["firm_id"] = existing["firm_id"].astype(str)
        existing = existing[existing["model_id"] != model_id]
        frame = pd.concat([existing, frame], ignore_index=True)
    frame = frame.sort_values(
        by=["model_id", "doc_id", "variant", "measure"], kind="mergesort"
    ).reset_index(drop=True)
    frame.to_csv(signals_path, index=False, float_format="%.10g", lineterminator="\n")
    _record(out, f"extract_{model_id}", fingerprint)
    print(f"extract: {len(records)} signal records ({model_id}) -> {signals_path}")
    return EXIT_OK


def cmd_recognize(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out = Path(settings["out"])
    docs, _calendar = _load_documents(settings)
    variants = [v for v in _variant_list(settings) if v != corpus.Variant.RAW]
    recognizer_config = _recognizer_config(settings)
    provider = _build_provider(settings, recognizer_config)
    gateway = LLMGateway(provider, cache=ResponseCache(out / "cache"))

    fingerprint = _fingerprint(
        [Path(settings["corpus"])],
        {"variants": [v.value for v in variants], "provider": provider.config.provider_id},
    )
    outputs = [out / "recognition.csv"]
    if _resume(out, "recognize", fingerprint, outputs):
        return EXIT_OK

    rows = []
    hits_by_variant: dict[str, list[tuple[bool, bool]]] = {}
    for doc in docs:
        truth = IdentityTruth(ticker=doc.ticker, year=doc.year or doc.timestamp.year)
        for v in variants:
            text = _read_variant_text(out, v, doc.doc_id)
            outcome = gateway.recognize_identity(text, truth)
            rows.append({
                "doc_id": doc.doc_id, "variant": v.value,
                "firm_hit": outcome.firm_hit, "year_hit": outcome.year_hit,
                "ticker_guess": "" if outcome.result is None else outcome.result.ticker_guess,
                "year_guess": "" if outcome.result is None else outcome.result.year_guess,
            })
            hits_by_variant.setdefault(v.value, []).append((outcome.firm_hit, outcome.year_hit))

    pd.DataFrame(rows).to_csv(out / "recognition.csv", index=False, lineterminator="\n")
    report = evaluation.recognition_battery(hits_by_variant, model_id=provider.config.model)
    evaluation.write_battery(report, out / "reports")
    _record(out, "recognize", fingerprint)
    print(f"recognize: {len(rows)} documents x variants -> {out / 'recognition.csv'}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out = Path(settings["out"])
    _require(settings, "panel")
    panel_path = Path(settings["panel"])
    signals_path = out / "signals.csv"
    if not panel_path.exists():
        raise InputError(f"panel file not found: {panel_path}")
    if not signals_path.exists():
        raise InputError(f"signals file not found (run extract first): {signals_path}")

    inputs = [panel_path, signals_path]
    stats_path = out / "entity_stats.csv"
    if stats_path.exists():
        inputs.append(stats_path)
    fingerprint = _fingerprint(inputs, {
        "batteries": settings["batteries"], "controls": settings["controls"],
        "variants": settings["variants"],
    })
    reports_dir = out / "reports"
    if _resume(out, "evaluate", fingerprint, [reports_dir]):
        return EXIT_OK

    signals = pd.read_csv(signals_path, parse_dates=["announcement_date"])
    signals["firm_id"] = signals["firm_id"].astype(str)
    panel = corpus.load_panel(panel_path)

    stats_wide = None
    if stats_path.exists():
        stats = pd.read_csv(stats_path, parse_dates=["announcement_date"])
        stats["firm_id"] = stats["firm_id"].astype(str)
        stats_wide = corpus.pivot_signals(corpus.aggregate_daily(stats))

    models = sorted(signals["model_id"].astype(str).unique())
    join_summary = {}
    for model_id in models:
        daily = corpus.aggregate_daily(signals[signals["model_id"] == model_id])
        wide = corpus.pivot_signals(daily)
        if stats_wide is not None:
            wide = wide.merge(stats_wide, on=corpus.PANEL_KEYS, how="left")
        join = corpus.join_panel(wide, panel)
        frame = join.frame
        join_summary[model_id] = {
            "rows": len(frame),
            "unmatched_signals": join.unmatched_signals,
            "unmatched_panel": join.unmatched_panel,
        }

        controls = [c for c in settings["controls"] if c in frame.columns]
        variants = [v for v in settings["variants"] if f"Sentiment_{v}" in frame.columns]
        target = reports_dir if len(models) == 1 else reports_dir / model_id
        for name in settings["batteries"]:
            if name == "information_loss":
                report = evaluation.information_loss_battery(
                    frame, variants, model_id=model_id, controls=controls)
            elif name == "quarterly":
                report = evaluation.quarterly_series(frame, model_id=model_id, controls=controls)
            elif name == "gap":
                report = evaluation.gap_battery(frame, model_id=model_id, controls=controls)
            elif name == "multitask":
                report = evaluation.multitask_battery(frame, model_id=model_id)
            else:
                raise ConfigError(f"unknown battery {name!r}")
            evaluation.write_battery(report, target)
    (out / "join_report.json").write_text(json.dumps(join_summary, indent=2))
    _record(out, "evaluate", fingerprint)
    print(f"evaluate: {len(settings['batteries'])} batteries x {len(models)} model(s) -> {reports_dir}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    settings = load_settings(args)
    out = Path(settings["out"])
    reports_dir = out / "reports"
    if not reports_dir.exists():
        raise InputError(f"no battery outputs found (run evaluate first): {reports_dir}")
    plot_dir = out / "plot"
    plot_dir.mkdir(parents=True, exist_ok=True)

    lines = ["pipeline report", "===============", ""]
    for summary in sorted(reports_dir.rglob("summary.txt")):
        lines.append(f"## {summary.parent.relative_to(reports_dir)}")
        lines.append(summary.read_text(encoding="utf-8"))
        lines.append("")
    (out / "report.txt").write_text("\n".join(lines), encoding="utf-8")

    for series in sorted(reports_dir.rglob("series.csv")):
        rel = series.parent.relative_to(reports_dir)
        stem = "quarterly_sentiment" if str(rel) == "quarterly" \
            else f"quarterly_sentiment_{str(rel.parent).replace('/', '_')}"
        (plot_dir / f"{stem}.csv").write_text(series.read_text(encoding="utf-8"))
    print(f"report: text summary -> {out / 'report.txt'}; plot data -> {plot_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anonpipe",
        description="entity anonymization of financial text and information-loss evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, help="document-level parallelism")
        p.add_argument("--seed", type=int, help="seed for synthetic-data paths")

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic corpus and panel")
    common(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_anon = sub.add_parser("anonymize", help="produce anonymized text variants and entity stats")
    common(p_anon)
    p_anon.add_argument("--corpus")
    p_anon.add_argument("--calendar")
    p_anon.add_argument("--gazetteer")
    p_anon.add_argument("--variants", nargs="+")
    p_anon.add_argument("--categories", nargs="+",
                        choices=["numbers", "places", "objects", "others"],
                        help="mask only these categories (single category or all four)")
    p_anon.set_defaults(func=cmd_anonymize)

    p_ext = sub.add_parser("extract", help="extract signal records from text variants")
    common(p_ext)
    p_ext.add_argument("--corpus")
    p_ext.add_argument("--calendar")
    p_ext.add_argument("--gazetteer")
    p_ext.add_argument("--variants", nargs="+")
    p_ext.add_argument("--provider", dest="provider_name", choices=["mock", "http"])
    p_ext.add_argument("--prompts", dest="measures", nargs="+",
                       choices=sorted(MEASURE_LABELS))
    p_ext.set_defaults(func=cmd_extract)

    p_rec = sub.add_parser("recognize", help="test firm/year recognition on anonymized variants")
    common(p_rec)
    p_rec.add_argument("--corpus")
    p_rec.add_argument("--calendar")
    p_rec.add_argument("--gazetteer")
    p_rec.add_argument("--variants", nargs="+")
    p_rec.add_argument("--provider", dest="provider_name", choices=["mock", "http"])
    p_rec.set_defaults(func=cmd_recognize)

    p_eval = sub.add_parser("evaluate", help="run regression batteries on signals + panel")
    common(p_eval)
    p_eval.add_argument("--panel")
    p_eval.add_argument("--variants", nargs="+")
    p_eval.add_argument("--batteries", nargs="+")
    p_eval.set_defaults(func=cmd_evaluate)

    p_rep = sub.add_parser("report", help="render text summaries and plot data")
    common(p_rep)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "provider_name", None):
        args.provider = {"name": args.provider_name}
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, corpus.CorpusFormatError, GazetteerFormatError) as exc:
        print(json.dumps({"error": "input", "message": str(exc)}), file=sys.stderr)
        return EXIT_INPUT
    except (AuthError, TransportError) as exc:
        print(json.dumps({"error": "provider", "message": str(exc)}), file=sys.stderr)
        return EXIT_PROVIDER
    except (ConfigError, ValueError, KeyError) as exc:
        print(json.dumps({"error": "integrity", "message": str(exc)}), file=sys.stderr)
        return EXIT_INTEGRITY


if __name__ == "__main__":
    sys.exit(main())
