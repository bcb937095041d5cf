"""Command-line entry point: one subcommand per analysis pipeline.

Every artifact embeds (JSON) or references (CSV, via a digest column plus
a .manifest.json sidecar) the RunManifest of the run that produced it, so
`verify` can later re-hash the inputs.  Exit codes: 0 success, 1 validation
problem (including bad flags), 2 transport failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Any, Callable

try:
    import tomllib                  # Python 3.11+
except ModuleNotFoundError:         # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import __version__, attacks, corpus, metaeval, metrics, regression, semdiv, syntax, textstats
from .errors import TransportError, ValidationError
from .llmops import (
    PromptKind,
    HttpChatTransport,
    RecordingTransport,
    ReplayTransport,
    invalid_output_report,
    judge_summary,
    summarize_with_retry,
)
from .manifest import RunManifest, build_manifest, file_digest, verify_manifest

DIRECTION_REGRESSION_PRESETS = {
    # direction -> (year levels, base year group)
    "hDe-En": (("1800-1850", "1850+"), "1800-1850"),
    "hEn-De": (("-1800", "1800-1850", "1850+"), "-1800"),
}


class _CliParser(argparse.ArgumentParser):
    def error(self, message: str):     # argparse would exit(2); bad flags are validation errors
        raise ValidationError(message)


def _manifest_digest(manifest: RunManifest) -> str:
    import hashlib

    payload = json.dumps(manifest.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def _write_json(path: str, payload: dict, manifest: RunManifest) -> None:
    payload = dict(payload)
    payload["manifest"] = manifest.to_dict()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows: list[list], manifest: RunManifest) -> None:
    digest = _manifest_digest(manifest)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header + ["manifest"])
        for row in rows:
            writer.writerow(row + [digest])
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def _emit(args, name: str, json_payload: dict, csv_table: tuple[list[str], list[list]],
          manifest: RunManifest) -> str:
    os.makedirs(args.out, exist_ok=True)
    if args.format == "csv":
        path = os.path.join(args.out, f"{name}.csv")
        header, rows = csv_table
        _write_csv(path, header, rows, manifest)
    else:
        path = os.path.join(args.out, f"{name}.json")
        _write_json(path, json_payload, manifest)
    print(path)
    return path


def _load_candidates(path: str) -> dict[tuple[str, str], str]:
    candidates: dict[tuple[str, str], str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            for key in ("doc_id", "system_id", "summary"):
                if key not in obj:
                    raise ValidationError(f"{path}: line {line_no}: missing key {key!r}")
            key = (obj["doc_id"], obj["system_id"])
            if key in candidates:
                raise ValidationError(f"{path}: line {line_no}: duplicate candidate {key}")
            candidates[key] = obj["summary"]
    if not candidates:
        raise ValidationError(f"{path}: no candidate summaries")
    return candidates


def _transport_from_args(args):
    if getattr(args, "replay", None):
        return ReplayTransport(args.replay)
    if not getattr(args, "endpoint", None):
        raise ValidationError("either --replay FIXTURES_DIR or --endpoint URL is required")
    transport = HttpChatTransport(
        endpoint=args.endpoint,
        model=args.model,
        credential_env=args.credential_env,
    )
    if getattr(args, "record", None):
        return RecordingTransport(transport, args.record)
    return transport


# --------------------------------------------------------------------------
# Subcommand implementations.  Each returns the process exit code.


def _cmd_stats(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    stats = textstats.corpus_stats(loaded)
    manifest = build_manifest("stats", [args.corpus], policy_id=stats.policy_id)
    payload = stats.to_dict()
    header = list(payload.keys())
    _emit(args, "stats", payload, (header, [[payload[k] for k in header]]), manifest)
    return 0


def _cmd_divergence(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    jaccard = textstats.jaccard_divergence(loaded, per_pair=args.per_pair)
    histogram = textstats.year_histogram(loaded, bin_width=args.bin_width)
    manifest = build_manifest(
        "divergence", [args.corpus], policy_id=textstats.DEFAULT_POLICY.policy_id
    )
    payload = {
        "jaccard": jaccard,
        "jaccard_mode": "per_pair_mean" if args.per_pair else "corpus_vocabulary",
        "year_histogram": {str(k): v for k, v in histogram.items()},
        "bin_width": args.bin_width,
    }
    rows = [["jaccard", jaccard]] + [[f"years_{k}", v] for k, v in histogram.items()]
    _emit(args, "divergence", payload, (["key", "value"], rows), manifest)
    return 0


def _cmd_similarity(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    table = corpus.ingest_embeddings(args.embeddings)
    report = semdiv.corpus_similarity(loaded, table)
    manifest = build_manifest("similarity", [args.corpus, args.embeddings])
    payload = report.to_dict()
    rows = [[doc_id, value] for doc_id, value in sorted(report.per_document.items())]
    rows.append(["__corpus_mean__", report.corpus_mean])
    _emit(args, "similarity", payload, (["doc_id", "cosine"], rows), manifest)
    return 0


def _cmd_mdd(args) -> int:
    parsed = syntax.parse_conllu(args.conllu)
    report = syntax.corpus_mdd(
        parsed,
        exclude_punct=not args.include_punct,
        include_root=args.include_root,
        macro=args.macro,
    )
    manifest = build_manifest("mdd", [args.conllu])
    payload = {args.name: report.to_dict()} if args.name else report.to_dict()
    rows = [[doc_id, value] for doc_id, value in sorted(report.per_document.items())]
    rows.append(["__corpus__", report.corpus_mdd])
    _emit(args, "mdd", payload, (["doc_id", "mdd"], rows), manifest)
    return 0


def _cmd_score(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    candidates = _load_candidates(args.candidates)
    ingested = corpus.ingest_scores(args.scores) if args.scores else None
    table = metrics.score_systems(loaded, candidates, ingested)
    inputs = [args.corpus, args.candidates] + ([args.scores] if args.scores else [])
    manifest = build_manifest("score", inputs, policy_id=textstats.DEFAULT_POLICY.policy_id)
    payload = {
        "rows": [
            {"doc_id": r.doc_id, "system_id": r.system_id, "metric_name": r.metric_name,
             "value": r.value, "provenance": r.provenance}
            for r in table.rows
        ],
    }
    rows = [[r.doc_id, r.system_id, r.metric_name, repr(r.value)] for r in table.rows]
    _emit(args, "scores", payload, (list(corpus.SCORE_COLUMNS), rows), manifest)
    return 0


def _cmd_correlate(args) -> int:
    scores = corpus.ingest_scores(args.scores)
    records = corpus.ingest_annotations(args.annotations)
    dimensions = [args.dimension] if args.dimension else list(corpus.RATING_DIMENSIONS)
    matrix: dict[str, dict[str, Any]] = {}
    rows: list[list] = []
    for dimension in dimensions:
        results = metaeval.metric_human_correlation(
            scores, records, dimension, pool_raters=args.pool_raters
        )
        matrix[dimension] = {
            metric: {"rho": r.rho, "n": r.n, "p_value": r.p_value,
                     "stars": r.stars, "formatted": r.formatted()}
            for metric, r in results.items()
        }
        for metric, r in sorted(results.items()):
            rows.append([dimension, metric, r.rho, r.n, r.p_value, r.stars_str])
    manifest = build_manifest("correlate", [args.scores, args.annotations])
    _emit(args, "correlate", {"correlations": matrix},
          (["dimension", "metric", "rho", "n", "p_value", "stars"], rows), manifest)
    return 0


def _cmd_agree(args) -> int:
    records = corpus.ingest_annotations(args.annotations)
    dimensions = [args.dimension] if args.dimension else list(corpus.RATING_DIMENSIONS)
    agreement: dict[str, float] = {}
    for dimension in dimensions:
        agreement[dimension] = metaeval.interannotator_agreement(
            records, dimension, min_overlap=args.min_overlap
        )
    means = {
        dimension: metaeval.rating_means(records, dimension)
        for dimension in dimensions
    }
    formatted = {dimension: metaeval.format_rating_table(m) for dimension, m in means.items()}
    manifest = build_manifest("agree", [args.annotations])
    rows = [["agreement", dim, value] for dim, value in agreement.items()]
    for dimension, table in means.items():
        for system_id, kinds in table.items():
            for kind, mean in kinds.items():
                rows.append([f"mean_{kind}", f"{dimension}/{system_id}", mean])
    payload = {"agreement": agreement, "rating_means": means, "rating_means_formatted": formatted}
    _emit(args, "agree", payload, (["kind", "key", "value"], rows), manifest)
    return 0


def _cmd_regress(args) -> int:
    rows = regression.load_feature_table(args.features)
    year_levels = None
    base_year = args.base_year
    if args.direction in DIRECTION_REGRESSION_PRESETS:
        year_levels, preset_base = DIRECTION_REGRESSION_PRESETS[args.direction]
        base_year = base_year or preset_base
    if not base_year:
        raise ValidationError("--base-year is required for directions without a preset")
    base_model = args.base_model or sorted({r.model_id for r in rows})[0]
    report = regression.fit_eq1(
        rows, base_year_group=base_year, base_model=base_model,
        year_levels=year_levels, ddof=args.ddof,
    )
    numeric = {
        "Similarity": [r.similarity for r in rows],
        "Length": [r.length for r in rows],
        "MDD": [r.mdd for r in rows],
    }
    vif_table = regression.vif(numeric)
    manifest = build_manifest("regress", [args.features])
    payload = report.to_dict()
    payload["vif"] = vif_table
    payload["base_year_group"] = base_year
    payload["base_model"] = base_model
    out_rows = [
        [name, c["beta"], c["std_err"], c["t"], c["p_value"], c["formatted"]]
        for name, c in payload["terms"].items()
    ]
    _emit(args, "regress", payload,
          (["term", "beta", "std_err", "t", "p_value", "formatted"], out_rows), manifest)
    return 0


def _cmd_attack_gen(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    os.makedirs(args.out, exist_ok=True)
    if args.attack == "omission":
        if args.docs:
            doc_ids = args.docs
        else:
            doc_ids = attacks.select_omission_candidates(
                loaded, min_sents=args.min_sents, max_sents=args.max_sents
            )
            if not doc_ids:
                raise ValidationError(
                    f"no documents with {args.min_sents}-{args.max_sents} sentences"
                )
        cases = attacks.make_omission_cases(loaded, doc_ids, args.fractions, args.seed)
    elif args.attack == "entity-swap":
        mapping = []
        for item in args.map:
            if "=" not in item:
                raise ValidationError(f"--map entries look like SOURCE=REPLACEMENT, got {item!r}")
            src, dst = item.split("=", 1)
            mapping.append((src, dst))
        by_id = {p.id: p for p in loaded.pairs}
        if args.doc not in by_id:
            raise ValidationError(f"unknown document id {args.doc!r}")
        attacked, counts = attacks.swap_entities(by_id[args.doc].document, mapping)
        cases = [attacks.AttackCase(
            case_id=f"{args.doc}__swap", source_doc_id=args.doc, attack_type="entity_swap",
            params={"mapping": [list(kv) for kv in mapping], "counts": counts},
            attacked_document=attacked,
        )]
    else:   # negation: human-written rewrite is registered, never generated
        by_id = {p.id: p for p in loaded.pairs}
        if args.doc not in by_id:
            raise ValidationError(f"unknown document id {args.doc!r}")
        with open(args.attacked_file, encoding="utf-8") as fh:
            attacked = fh.read()
        cases = [attacks.AttackCase(
            case_id=f"{args.doc}__negation", source_doc_id=args.doc, attack_type="negation",
            params={"description": args.description},
            attacked_document=attacked,
        )]
    path = os.path.join(args.out, "cases.jsonl")
    attacks.save_cases(cases, path)
    manifest = build_manifest(
        "attack-gen", [args.corpus], seeds={"master": args.seed} if args.attack == "omission" else {},
    )
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")
    print(path)
    return 0


def _cmd_attack_score(args) -> int:
    cases = attacks.load_cases(args.cases)
    judgments = attacks.load_judgments(args.judgments)
    table = attack_table = attacks.attack_accuracy(judgments, cases)
    manifest = build_manifest("attack-score", [args.cases, args.judgments])
    payload = {
        "accuracy": {f"{attack}/{task}": value for (attack, task), value in attack_table.items()}
    }
    rows = [[attack, task, value] for (attack, task), value in table.items()]
    _emit(args, "attack_accuracy", payload, (["attack_type", "task", "accuracy"], rows), manifest)
    return 0


def _cmd_decay(args) -> int:
    runs: dict[str, dict[float, str]] = {}
    with open(args.runs, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            for key in ("doc_id", "drop_fraction", "summary"):
                if key not in obj:
                    raise ValidationError(f"{args.runs}: line {line_no}: missing key {key!r}")
            runs.setdefault(obj["doc_id"], {})[float(obj["drop_fraction"])] = obj["summary"]
    curve = attacks.decay_curve(runs, lang=args.lang)
    manifest = build_manifest("decay", [args.runs])
    rows = [[p.fraction, p.mean, p.ci_half_width] for p in curve.points]
    _emit(args, "decay", curve.to_dict(), (["fraction", "mean", "ci_half_width"], rows), manifest)
    return 0


def _cmd_summarize(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    transport = _transport_from_args(args)
    kind = PromptKind(args.kind, args.prompt_direction or args.direction)
    pairs = loaded.pairs[: args.limit] if args.limit else loaded.pairs
    results = []
    for pair in pairs:
        results.append(summarize_with_retry(
            pair, kind, args.target_lang or pair.lang_tgt, transport,
            temperature=args.temperature, max_rounds=args.max_rounds,
            model=args.model, system_id=args.system_id,
        ))
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "summaries.jsonl")
    with open(out_path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps({
                "doc_id": r.doc_id, "system_id": r.system_id, "summary": r.text,
                "valid": r.valid, "temperature": r.temperature,
                "truncated_input_words": r.truncated_input_words,
                "attempts": [
                    {"detected_lang": a.detected_lang, "valid": a.valid} for a in r.attempts
                ],
            }, ensure_ascii=False) + "\n")
    manifest = build_manifest("summarize", [args.corpus])
    report = invalid_output_report(results, label=f"{args.kind}/{args.direction}")
    _write_json(os.path.join(args.out, "invalid_outputs.json"), report, manifest)
    print(out_path)
    return 0


def _cmd_judge(args) -> int:
    loaded = corpus.load_corpus(args.corpus, args.direction)
    by_id = {p.id: p for p in loaded.pairs}
    candidates = _load_candidates(args.candidates)
    transport = _transport_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    ok_rows: list[list] = []
    failures: list[dict] = []
    for (doc_id, system_id), summary in sorted(candidates.items()):
        if doc_id not in by_id:
            raise ValidationError(f"candidate {doc_id!r} not in the corpus")
        pair = by_id[doc_id]
        result = judge_summary(
            pair.document, pair.summary, summary, transport,
            temperature=args.temperature, model=args.model,
            doc_id=doc_id, system_id=system_id,
        )
        if result.parse_ok:
            ok_rows.append([
                doc_id, system_id, args.rater_id, "llm",
                result.coherence, result.consistency, result.fluency, result.relevance,
            ])
        else:
            failures.append({"doc_id": doc_id, "system_id": system_id,
                             "raw_response": result.raw_response})
    manifest = build_manifest("judge", [args.corpus, args.candidates])
    ratings_path = os.path.join(args.out, "llm_ratings.csv")
    _write_csv(ratings_path, list(corpus.ANNOTATION_COLUMNS), ok_rows, manifest)
    if failures:
        with open(os.path.join(args.out, "judge_failures.jsonl"), "w", encoding="utf-8") as fh:
            for row in failures:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(ratings_path)
    return 0


def _cmd_match(args) -> int:
    documents = []
    with open(args.documents, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                documents.append((obj["title"], obj.get("lang", "de"), obj))
    wiki = []
    with open(args.wiki, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                wiki.append((obj["title"], obj.get("summary", "")))
    result = corpus.match_summaries(documents, wiki)
    manifest = build_manifest("match", [args.documents, args.wiki])
    payload = {
        "matched": [
            {"document_title": doc[0], "wiki_title": entry[0]}
            for doc, entry in result.matched
        ],
        "unmatched_documents": [doc[0] for doc in result.unmatched_documents],
        "unmatched_wiki": [entry[0] for entry in result.unmatched_wiki],
        "ambiguities": list(result.ambiguities),
    }
    rows = (
        [["matched", doc[0], entry[0]] for doc, entry in result.matched]
        + [["unmatched_document", doc[0], ""] for doc in result.unmatched_documents]
        + [["unmatched_wiki", entry[0], ""] for entry in result.unmatched_wiki]
    )
    _emit(args, "match", payload, (["status", "document_title", "wiki_title"], rows), manifest)
    return 0


def _cmd_verify(args) -> int:
    problems: list[str] = []
    for path in args.reports:
        if path.endswith(".csv"):
            sidecar = path + ".manifest.json"
            if not os.path.exists(sidecar):
                problems.append(f"{path}: no manifest sidecar {sidecar}")
                continue
            with open(sidecar, encoding="utf-8") as fh:
                manifest = json.load(fh)
        else:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
            manifest = payload.get("manifest")
            if manifest is None:
                problems.append(f"{path}: no embedded manifest")
                continue
        for problem in verify_manifest(manifest):
            problems.append(f"{path}: {problem}")
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return 1
    print(f"verified {len(args.reports)} report(s): all input digests match")
    return 0


# --------------------------------------------------------------------------
# Parser assembly.


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", default=None, help="output directory (default: .)")
    sub.add_argument("--format", choices=("json", "csv"), default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--config", default=None, help="optional TOML config file")


def _add_transport(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--endpoint", default=None, help="chat-completions URL")
    sub.add_argument("--model", default="", help="model name sent to the endpoint")
    sub.add_argument("--credential-env", default="CLCTS_API_KEY",
                     help="environment variable holding the API key")
    sub.add_argument("--replay", default=None, metavar="FIXTURES_DIR",
                     help="serve recorded responses instead of calling the network")
    sub.add_argument("--record", default=None, metavar="FIXTURES_DIR",
                     help="record live responses for later replay")
    sub.add_argument("--temperature", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="clcts", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("stats", help="corpus size/length/compression statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    p = subs.add_parser("divergence", help="vocabulary overlap and year histogram")
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    p.add_argument("--per-pair", action="store_true")
    p.add_argument("--bin-width", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=_cmd_divergence)

    p = subs.add_parser("similarity", help="document/summary embedding similarity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    p.add_argument("--embeddings", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_similarity)

    p = subs.add_parser("mdd", help="mean dependency distance from a CoNLL-U file")
    p.add_argument("--conllu", required=True)
    p.add_argument("--name", default="", help="dataset label for the report")
    p.add_argument("--include-punct", action="store_true")
    p.add_argument("--include-root", action="store_true")
    p.add_argument("--macro", action="store_true", help="per-sentence macro average")
    _add_common(p)
    p.set_defaults(func=_cmd_mdd)

    p = subs.add_parser("score", help="native ROUGE plus ingested/derived metric rows")
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    p.add_argument("--candidates", required=True, help="JSONL {doc_id, system_id, summary}")
    p.add_argument("--scores", default=None, help="ingested neural-metric CSV")
    _add_common(p)
    p.set_defaults(func=_cmd_score)

    p = subs.add_parser("correlate", help="metric vs human-rating correlation matrix")
    p.add_argument("--scores", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--dimension", choices=corpus.RATING_DIMENSIONS, default=None)
    p.add_argument("--pool-raters", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_correlate)

    p = subs.add_parser("agree", help="inter-annotator agreement and rating means")
    p.add_argument("--annotations", required=True)
    p.add_argument("--dimension", choices=corpus.RATING_DIMENSIONS, default=None)
    p.add_argument("--min-overlap", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=_cmd_agree)

    p = subs.add_parser("regress", help="document-feature regression with VIF")
    p.add_argument("--features", required=True)
    p.add_argument("--direction", default="", help="preset year grouping (hDe-En, hEn-De)")
    p.add_argument("--base-year", default=None)
    p.add_argument("--base-model", default=None)
    p.add_argument("--ddof", type=int, default=0, choices=(0, 1),
                   help="0: population sd (default), 1: sample sd")
    _add_common(p)
    p.set_defaults(func=_cmd_regress)

    p = subs.add_parser("attack-gen", help="generate or register contamination probes")
    p.add_argument("attack", choices=("omission", "entity-swap", "negation"))
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    p.add_argument("--fraction", dest="fractions", type=float, action="append", default=None,
                   help="omission fraction; repeatable")
    p.add_argument("--docs", nargs="*", default=None)
    p.add_argument("--min-sents", type=int, default=100)
    p.add_argument("--max-sents", type=int, default=150)
    p.add_argument("--doc", default=None, help="document id for entity-swap/negation")
    p.add_argument("--map", nargs="*", default=[], help="SOURCE=REPLACEMENT pairs")
    p.add_argument("--attacked-file", default=None, help="negation rewrite text file")
    p.add_argument("--description", default="", help="negation plot-change description")
    _add_common(p)
    p.set_defaults(func=_cmd_attack_gen)

    p = subs.add_parser("attack-score", help="attack accuracy from judgments")
    p.add_argument("--cases", required=True)
    p.add_argument("--judgments", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_attack_score)

    p = subs.add_parser("decay", help="scaled score decay over omission fractions")
    p.add_argument("--runs", required=True, help="JSONL {doc_id, drop_fraction, summary}")
    p.add_argument("--lang", default="en")
    _add_common(p)
    p.set_defaults(func=_cmd_decay)

    p = subs.add_parser("summarize", help="summarize a corpus through a chat transport")
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    p.add_argument("--kind", choices=("e2e", "e2e_title", "pipeline"), default="e2e")
    p.add_argument("--prompt-direction", default=None,
                   help="template direction when it differs from the corpus direction")
    p.add_argument("--target-lang", default=None)
    p.add_argument("--max-rounds", type=int, default=2)
    p.add_argument("--limit", type=int, default=0, help="only the first N documents")
    p.add_argument("--system-id", default="chat-model")
    _add_transport(p)
    _add_common(p)
    p.set_defaults(func=_cmd_summarize)

    p = subs.add_parser("judge", help="LLM-as-judge ratings for candidate summaries")
    p.add_argument("--corpus", required=True)
    p.add_argument("--direction", required=True, choices=corpus.DIRECTIONS)
    p.add_argument("--candidates", required=True)
    p.add_argument("--rater-id", default="llm-judge")
    _add_transport(p)
    _add_common(p)
    p.set_defaults(func=_cmd_judge)

    p = subs.add_parser("match", help="match documents to wiki summaries by title")
    p.add_argument("--documents", required=True, help="JSONL with title/lang")
    p.add_argument("--wiki", required=True, help="JSONL with title/summary")
    _add_common(p)
    p.set_defaults(func=_cmd_match)

    p = subs.add_parser("verify", help="re-hash a report's inputs against its manifest")
    p.add_argument("reports", nargs="+")
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    return parser


_CONFIG_KEYS = ("out", "format", "seed", "endpoint", "model", "replay", "record", "temperature")


def _apply_config(args: argparse.Namespace) -> None:
    """Precedence: explicit flags > config file > built-in defaults."""
    config: dict[str, Any] = {}
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            config = tomllib.load(fh)
    for key in _CONFIG_KEYS:
        if getattr(args, key, None) in (None, ""):
            if key in config:
                setattr(args, key, config[key])
    if getattr(args, "out", None) in (None, ""):
        args.out = "."
    if getattr(args, "format", None) in (None, ""):
        args.format = "json"
    if getattr(args, "seed", None) is None:
        args.seed = 0
    if getattr(args, "temperature", None) is None:
        args.temperature = 0.7 if args.subcommand == "summarize" else 0.0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args)
        if args.subcommand == "attack-gen" and args.fractions is None:
            args.fractions = [0.3]
        func: Callable = args.func
        return func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
