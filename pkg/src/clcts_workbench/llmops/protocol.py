"""The summarization and judging protocols built on top of a transport.

Covers input truncation (word budgets per input language), the
wrong-language retry loop with its invalid-output bookkeeping, the
retrieve-then-summarize orchestration for extractive front-ends, and the
LLM-as-judge flow that parses four Likert ratings out of a response.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from ..corpus import SummaryPair, _parse_lang, validate_rating
from ..errors import ValidationError
from ..textstats import split_sentences
from .langdetect import detect_language
from .prompts import PromptKind, render_prompt
from .transport import ChatRequest, Transport

#: Word budgets by input language; words are whitespace-delimited.
TRUNCATION_BUDGETS = {"de": 2048, "en": 3000}

SUMMARIZE_TEMPERATURE = 0.7
JUDGE_TEMPERATURE = 0.0
RETRIEVAL_CAP = 100


def truncate_for_model(text: str, lang: str, budget: int | None = None) -> tuple[str, int]:
    """Keep the first `budget` whitespace-delimited words (language default
    when budget is None); never splits a word, returns the original object
    when already under budget."""
    if budget is None:
        code, _ = _parse_lang(lang)
        if code not in TRUNCATION_BUDGETS:
            raise ValidationError(
                f"no default word budget for language {lang!r}; pass budget explicitly"
            )
        budget = TRUNCATION_BUDGETS[code]
    if budget <= 0:
        raise ValidationError(f"budget must be positive, got {budget}")
    words = text.split()
    if len(words) <= budget:
        return text, len(words)
    return " ".join(words[:budget]), budget


@dataclass(frozen=True)
class Attempt:
    raw: str
    detected_lang: str
    valid: bool


@dataclass(frozen=True)
class SummaryResult:
    doc_id: str
    system_id: str
    text: str
    attempts: tuple[Attempt, ...]
    temperature: float
    truncated_input_words: int
    valid: bool


def _prompt_for(doc: SummaryPair, kind: PromptKind) -> tuple[str, int]:
    if kind.kind in ("e2e", "pipeline"):
        body, words = truncate_for_model(doc.document, doc.lang_src)
        return render_prompt(kind, text=body), words
    if kind.kind == "e2e_title":
        return render_prompt(kind, title=doc.title, author=doc.author), 0
    raise ValidationError(f"kind {kind.kind!r} is not a summarization prompt")


def summarize_with_retry(
    doc: SummaryPair,
    kind: PromptKind,
    target_lang: str,
    transport: Transport,
    temperature: float = SUMMARIZE_TEMPERATURE,
    max_rounds: int = 2,
    model: str = "",
    system_id: str = "chat-model",
) -> SummaryResult:
    """Query until the output is in the target language or the budget runs
    out: at most max_rounds + 1 transport calls, every attempt logged.  A
    result whose last attempt is still wrong-language is marked invalid and
    feeds the invalid-output report."""
    prompt, input_words = _prompt_for(doc, kind)
    want, _ = _parse_lang(target_lang)
    request = ChatRequest(prompt=prompt, temperature=temperature, model=model)
    attempts: list[Attempt] = []
    for _ in range(max_rounds + 1):
        raw = transport.complete(request)
        detected, _confidence = detect_language(raw)
        ok = detected == want
        attempts.append(Attempt(raw=raw, detected_lang=detected, valid=ok))
        if ok:
            break
    last = attempts[-1]
    return SummaryResult(
        doc_id=doc.id,
        system_id=system_id,
        text=last.raw,
        attempts=tuple(attempts),
        temperature=temperature,
        truncated_input_words=input_words,
        valid=last.valid,
    )


def retrieve_then_summarize(
    doc: SummaryPair,
    extracted_sentence_indices: list[int],
    transport: Transport,
    kind: PromptKind | None = None,
    target_lang: str | None = None,
    cap: int = RETRIEVAL_CAP,
    temperature: float = SUMMARIZE_TEMPERATURE,
    max_rounds: int = 2,
    model: str = "",
    system_id: str = "retrieve-chat-model",
) -> SummaryResult:
    """Feed an extractive front-end's sentences to the chat model.

    Indices are deduplicated, restored to document order, and capped at the
    first `cap` positions; the joined text then goes through the ordinary
    retry protocol."""
    if not extracted_sentence_indices:
        raise ValidationError("empty sentence index list")
    sentences = split_sentences(doc.document, doc.lang_src)
    bad = [i for i in extracted_sentence_indices if not 0 <= i < len(sentences)]
    if bad:
        raise ValidationError(
            f"sentence indices out of range for {doc.id!r} "
            f"({len(sentences)} sentences): {sorted(set(bad))}"
        )
    kept = sorted(set(extracted_sentence_indices))[:cap]
    reduced = " ".join(sentences[i] for i in kept)
    if kind is None:
        kind = PromptKind("e2e", "hDe-En")
    if target_lang is None:
        target_lang = doc.lang_tgt
    return summarize_with_retry(
        replace(doc, document=reduced), kind, target_lang, transport,
        temperature=temperature, max_rounds=max_rounds, model=model,
        system_id=system_id,
    )


def invalid_output_report(results: list[SummaryResult], label: str = "") -> dict:
    """Invalid-output bookkeeping in count-over-total form, e.g. "3/328"."""
    invalid = sum(1 for r in results if not r.valid)
    total = len(results)
    return {
        "label": label,
        "invalid": invalid,
        "total": total,
        "display": f"{invalid}/{total}",
        "attempts_total": sum(len(r.attempts) for r in results),
    }


@dataclass(frozen=True)
class JudgeResult:
    doc_id: str
    system_id: str
    coherence: float | None
    consistency: float | None
    fluency: float | None
    relevance: float | None
    raw_response: str
    parse_ok: bool


_RATING_RE = {
    dim: re.compile(rf"{dim}\s*[:=]?\s*([0-9]+(?:\.[0-9]+)?)", re.IGNORECASE)
    for dim in ("coherence", "consistency", "fluency", "relevance")
}


def parse_judge_response(raw: str) -> dict[str, float] | None:
    """Extract the four ratings; None when any is missing or off the
    1.0-5.0 half-point grid (an off-grid judge answer is data, not a bug)."""
    ratings: dict[str, float] = {}
    for dim, pattern in _RATING_RE.items():
        match = pattern.search(raw)
        if not match:
            return None
        value = float(match.group(1))
        try:
            ratings[dim] = validate_rating(value, context=dim)
        except ValidationError:
            return None
    return ratings


def judge_summary(
    source: str,
    reference: str,
    candidate: str,
    transport: Transport,
    temperature: float = JUDGE_TEMPERATURE,
    model: str = "",
    doc_id: str = "",
    system_id: str = "",
) -> JudgeResult:
    """One LLM-as-judge call: render the judging prompt, query once, parse.

    Unparseable responses come back with parse_ok=False and the raw text
    retained; they are a data state, not an exception."""
    prompt = render_prompt(
        PromptKind("judge", "en"),
        source=source, reference=reference, candidate=candidate,
    )
    raw = transport.complete(ChatRequest(prompt=prompt, temperature=temperature, model=model))
    ratings = parse_judge_response(raw)
    if ratings is None:
        return JudgeResult(
            doc_id=doc_id, system_id=system_id,
            coherence=None, consistency=None, fluency=None, relevance=None,
            raw_response=raw, parse_ok=False,
        )
    return JudgeResult(
        doc_id=doc_id, system_id=system_id,
        coherence=ratings["coherence"], consistency=ratings["consistency"],
        fluency=ratings["fluency"], relevance=ratings["relevance"],
        raw_response=raw, parse_ok=True,
    )
