"""Prompt templates as versioned data files, one per (kind, direction).

The six summarization templates are fixed protocol strings and rendering
is pure byte substitution: the file content around the placeholders is
reproduced exactly.  The judge template wraps the annotation guidelines;
its framing is a reconstruction (status "reconstructed" below) since no
canonical wrapper text exists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from ..errors import ValidationError


@dataclass(frozen=True)
class PromptKind:
    kind: str           # e2e | e2e_title | pipeline | judge
    direction: str      # hDe-En, hEn-De, De-En, En-De, en


#: (kind, direction) -> (template file, status). "canonical" templates are
#: protocol constants; "reconstructed" ones are best-effort wrappers.
TEMPLATES: dict[tuple[str, str], tuple[str, str]] = {
    ("e2e", "hDe-En"): ("e2e__hDe-En.txt", "canonical"),
    ("e2e", "hEn-De"): ("e2e__hEn-De.txt", "canonical"),
    ("e2e_title", "De-En"): ("e2e_title__De-En.txt", "canonical"),
    ("e2e_title", "En-De"): ("e2e_title__En-De.txt", "canonical"),
    ("pipeline", "hDe-En"): ("pipeline__hDe-En.txt", "canonical"),
    ("pipeline", "hEn-De"): ("pipeline__hEn-De.txt", "canonical"),
    ("judge", "en"): ("judge__en.txt", "reconstructed"),
}

#: Bracket placeholder -> field name expected from the caller.  The German
#: templates use German placeholder spellings for the same fields.
PLACEHOLDER_FIELDS = {
    "Text": "text",
    "Title": "title",
    "Titel": "title",
    "Author": "author",
    "Autor": "author",
    "Source": "source",
    "Reference": "reference",
    "Candidate": "candidate",
}

_PLACEHOLDER_RE = re.compile(r"\[(" + "|".join(PLACEHOLDER_FIELDS) + r")\]")


def available_templates() -> list[tuple[str, str]]:
    return sorted(TEMPLATES)


def template_text(kind: PromptKind) -> str:
    key = (kind.kind, kind.direction)
    if key not in TEMPLATES:
        raise ValidationError(
            f"no template for kind={kind.kind!r} direction={kind.direction!r}; "
            f"available: {available_templates()}"
        )
    filename, _ = TEMPLATES[key]
    ref = resources.files("clcts_workbench").joinpath(f"data/prompts/{filename}")
    return ref.read_text(encoding="utf-8")


def template_status(kind: PromptKind) -> str:
    key = (kind.kind, kind.direction)
    if key not in TEMPLATES:
        raise ValidationError(f"no template for {key}")
    return TEMPLATES[key][1]


def render_prompt(kind: PromptKind, **fields: str) -> str:
    """Instantiate a template; every placeholder must be supplied.

    Replacement is literal, so brackets inside the field values survive
    untouched and the template bytes around them are preserved exactly.
    """
    template = template_text(kind)
    pieces: list[str] = []
    last = 0
    for match in _PLACEHOLDER_RE.finditer(template):
        field = PLACEHOLDER_FIELDS[match.group(1)]
        if field not in fields:
            raise ValidationError(
                f"missing value for placeholder [{match.group(1)}] (field {field!r})"
            )
        pieces.append(template[last:match.start()])
        pieces.append(str(fields[field]))
        last = match.end()
    pieces.append(template[last:])
    return "".join(pieces)
