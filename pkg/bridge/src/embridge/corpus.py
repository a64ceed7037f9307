"""Reader for the labeled-corpus CSV contract (``id,text,<emotions...>``).

The bridge consumes only ids, texts, and the emotion column order; label
cells are validated (0/1) but not kept.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError


@dataclass(frozen=True)
class Corpus:
    ids: tuple[str, ...]
    texts: tuple[str, ...]
    emotions: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def k(self) -> int:
        return len(self.emotions)


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"corpus file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}") from None
    if not rows:
        raise DataError(f"{path}: empty file, expected a header row")
    header = rows[0]
    if len(header) < 3 or header[0] != "id" or header[1] != "text":
        raise DataError(
            f"{path}: header must be id,text,<emotions...>, got {header[:3]}"
        )
    emotions = tuple(header[2:])
    if len(set(emotions)) != len(emotions):
        raise DataError(f"{path}: duplicate emotion columns")

    ids: list[str] = []
    texts: list[str] = []
    seen: set[str] = set()
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(
                f"{path}:{r}: expected {len(header)} cells, got {len(row)}"
            )
        if row[0] in seen:
            raise DataError(f"{path}:{r}: duplicate record id {row[0]!r}")
        seen.add(row[0])
        for j, cell in enumerate(row[2:]):
            if cell not in ("0", "1"):
                raise DataError(
                    f"{path}:{r}: label cell for {emotions[j]!r} must be "
                    f"0 or 1, got {cell!r}"
                )
        ids.append(row[0])
        texts.append(row[1])
    if not ids:
        raise DataError(f"{path}: no records")
    return Corpus(ids=tuple(ids), texts=tuple(texts), emotions=emotions)
