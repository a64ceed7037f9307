"""End-to-end extraction: corpus -> prompts -> encoder -> EMBS file."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import load_corpus
from .embsio import PER_EMOTION, SHARED, write_embs
from .encoder import get_encoder
from .errors import ConfigError
from .prompts import TEMPLATE_IDS, is_per_emotion, render_prompt, verify_against_golden


@dataclass(frozen=True)
class BridgeConfig:
    """Everything one extraction run needs.

    ``golden`` optionally points at the shared golden prompt file; when
    set, the run refuses to encode anything if this package's renderings
    have drifted from it.
    """

    dataset: str
    output: str
    encoder: str = "stub"
    template_id: str = "ME5"
    batch_size: int = 16
    device: str = "cpu"
    golden: str | None = None

    def __post_init__(self) -> None:
        if self.template_id not in TEMPLATE_IDS:
            raise ConfigError(
                f"unknown template {self.template_id!r}; "
                f"expected one of {list(TEMPLATE_IDS)}"
            )
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise ConfigError(
                f"batch_size must be a positive integer, got {self.batch_size!r}"
            )


def extract(cfg: BridgeConfig) -> Path:
    """Embed every record of the corpus and write one EMBS file.

    ME5/BGEV1 produce one SHARED row per record; BGEV2 produces a
    PER_EMOTION file with one row per (record, emotion) pair, record-major
    in the corpus's emotion order.  Output bytes are a pure function of
    (corpus, encoder, template), so reruns are byte-identical.
    """
    corpus = load_corpus(cfg.dataset)
    if cfg.golden is not None:
        verify_against_golden(cfg.golden)
    enc = get_encoder(cfg.encoder, device=cfg.device)

    per_emotion = is_per_emotion(cfg.template_id)
    emotions = list(corpus.emotions)
    if per_emotion:
        prompts = [
            render_prompt(cfg.template_id, text, emotion=em, emotions=emotions)
            for text in corpus.texts
            for em in emotions
        ]
        variant = PER_EMOTION
    else:
        prompts = [
            render_prompt(cfg.template_id, text, emotions=emotions)
            for text in corpus.texts
        ]
        variant = SHARED

    chunks = [
        enc.encode_batch(prompts[i : i + cfg.batch_size])
        for i in range(0, len(prompts), cfg.batch_size)
    ]
    vectors = np.vstack(chunks)

    out = Path(cfg.output)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_embs(
        out,
        vectors,
        corpus.ids,
        variant=variant,
        emotions=emotions,
        encoder=enc.name,
        template_id=cfg.template_id,
        extra={"normalized": True, "producer": "embridge"},
    )
    return out
