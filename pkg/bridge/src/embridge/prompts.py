"""Instruction-prompt rendering for the supported encoder families.

This is an independent implementation of the prompt contract; byte-level
agreement with the classifier side is enforced against a shared golden
file (``verify_against_golden``) rather than by sharing code.

``ME5`` and ``BGEV1`` embed the full emotion list into one prompt per
record; ``BGEV2`` asks about a single emotion per prompt, so each record
produces one prompt per emotion.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .errors import ConfigError, ContractError, DataError

TEMPLATE_IDS = ("ME5", "BGEV1", "BGEV2")
PER_EMOTION_TEMPLATES = ("BGEV2",)

_BODIES = {
    "ME5": (
        "Instruct: Classify the emotions expressed in the given text "
        "snippet by identifying whether each of the following emotions is "
        "present: {}.\n\nQuery: "
    ),
    "BGEV1": (
        "<instruct> Represent this text for identifying the presence of "
        "emotions: {}\n<query> "
    ),
    "BGEV2": (
        "<instruct> Represent this text for identifying the presence of "
        "the emotion {}\n<query> "
    ),
}


def is_per_emotion(template_id: str) -> bool:
    if template_id not in TEMPLATE_IDS:
        raise ConfigError(
            f"unknown template {template_id!r}; expected one of {list(TEMPLATE_IDS)}"
        )
    return template_id in PER_EMOTION_TEMPLATES


def enumerate_emotions(names: Sequence[str]) -> str:
    """"a" / "a and b" / "a, b, and c" prose enumeration."""
    names = list(names)
    if not names:
        raise ConfigError("emotion list must be non-empty")
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def render_prompt(
    template_id: str,
    text: str,
    emotion: str | None = None,
    emotions: Sequence[str] = (),
) -> str:
    per_emotion = is_per_emotion(template_id)
    emotions = list(emotions)
    if not emotions:
        raise ConfigError("emotions must be non-empty")
    if per_emotion:
        if emotion is None:
            raise ConfigError(f"template {template_id} requires an emotion")
        if emotion not in emotions:
            raise ConfigError(
                f"emotion {emotion!r} not in emotion list {emotions}"
            )
        return _BODIES[template_id].format(emotion) + text
    if emotion is not None:
        raise ConfigError(
            f"template {template_id} does not take a per-prompt emotion"
        )
    return _BODIES[template_id].format(enumerate_emotions(emotions)) + text


def verify_against_golden(path: str | Path) -> int:
    """Render every case in the shared golden file and require byte
    equality.  Returns the number of cases checked; any mismatch is a hard
    error because it means the two components' prompt contracts drifted.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"golden prompt file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None
    cases = doc.get("cases")
    if not isinstance(cases, list) or not cases:
        raise DataError(f"{path}: expected a non-empty 'cases' list")
    for i, case in enumerate(cases):
        rendered = render_prompt(
            case["template_id"],
            case["text"],
            emotion=case.get("emotion"),
            emotions=case["emotions"],
        )
        if rendered != case["rendered"]:
            raise ContractError(
                f"{path}: case {i} ({case['template_id']}) renders "
                f"differently from the golden file; prompt contract drifted"
            )
    return len(cases)
