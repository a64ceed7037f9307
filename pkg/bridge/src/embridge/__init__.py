"""embridge: prompt-conditioned embedding extraction into EMBS files.

Reads labeled-corpus CSVs, renders instruction prompts (validated against
a shared golden file), encodes them with a pluggable encoder (a
deterministic sha256 stub ships by default), L2-normalizes, and writes the
self-describing EMBS binary format consumed by the classifier toolkit.
"""
from .corpus import Corpus, load_corpus
from .embsio import MAGIC, PER_EMOTION, SHARED, VERSION, write_embs
from .encoder import StubEncoder, get_encoder
from .errors import BridgeError, ConfigError, ContractError, DataError
from .extract import BridgeConfig, extract
from .prompts import (
    TEMPLATE_IDS,
    enumerate_emotions,
    is_per_emotion,
    render_prompt,
    verify_against_golden,
)

__version__ = "0.1.0"

__all__ = [
    "BridgeConfig",
    "BridgeError",
    "ConfigError",
    "ContractError",
    "Corpus",
    "DataError",
    "MAGIC",
    "PER_EMOTION",
    "SHARED",
    "StubEncoder",
    "TEMPLATE_IDS",
    "VERSION",
    "enumerate_emotions",
    "extract",
    "get_encoder",
    "is_per_emotion",
    "load_corpus",
    "render_prompt",
    "verify_against_golden",
    "write_embs",
]
