"""Accessors for the data files bundled with the package."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .dataset import ScoreTable, load_score_table


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(resources.files("emokit") / "data" / name)


def golden_prompt_cases() -> list[dict]:
    """The canonical prompt renderings every embedding component must match."""
    with open(data_path("golden_prompts.json"), encoding="utf-8") as fh:
        return json.load(fh)["cases"]


def reference_scores(name: str) -> ScoreTable:
    """Load one of the bundled reference score tables by file stem."""
    return load_score_table(data_path(f"{name}.csv"))
