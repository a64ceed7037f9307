"""Encoders that turn prompt strings into fixed-width vectors.

Only the deterministic stub ships here: it hashes prompt bytes into a
repeatable pseudo-random direction, so cross-component integration tests
need no model downloads.  Real encoder ids fail fast with a configuration
error; the extraction pipeline, file format, and prompt contract are
identical either way.
"""
from __future__ import annotations

import hashlib
import struct

import numpy as np

from .errors import ConfigError

_U32_MAX = 4294967296.0  # 2**32


class StubEncoder:
    """Maps each prompt to an L2-normalized vector derived from sha256.

    The vector is a pure function of the prompt bytes and the dimension:
    the digest of the prompt seeds a counter-mode stream of sha256 blocks,
    each block yielding eight little-endian u32 words scaled into [-1, 1).
    """

    def __init__(self, d: int = 32):
        if d < 1:
            raise ConfigError(f"embedding dimension must be positive, got {d}")
        self.d = int(d)

    @property
    def name(self) -> str:
        return f"stub-sha256-{self.d}"

    def _raw(self, prompt: str) -> np.ndarray:
        seed = hashlib.sha256(prompt.encode("utf-8")).digest()
        needed = self.d * 4
        blocks = []
        counter = 0
        while sum(len(b) for b in blocks) < needed:
            blocks.append(
                hashlib.sha256(seed + struct.pack("<I", counter)).digest()
            )
            counter += 1
        stream = b"".join(blocks)[:needed]
        words = np.frombuffer(stream, dtype="<u4").astype(np.float64)
        return words / _U32_MAX * 2.0 - 1.0

    def encode_batch(self, prompts: list[str]) -> np.ndarray:
        """(len(prompts), d) float32 matrix of unit-norm rows."""
        out = np.empty((len(prompts), self.d), dtype=np.float64)
        for i, prompt in enumerate(prompts):
            vec = self._raw(prompt)
            norm = float(np.linalg.norm(vec))
            if norm < 1e-12:  # unreachable for sha256 output; belt and braces
                vec = np.zeros(self.d)
                vec[0] = 1.0
                norm = 1.0
            out[i] = vec / norm
        return out.astype(np.float32)


def get_encoder(encoder_id: str, device: str = "cpu") -> StubEncoder:
    """Resolve an encoder id.

    ``stub`` (default width 32) and ``stub-<d>`` are always available.
    Anything else would need model weights, which this environment does
    not provide, so it is a configuration error.  ``device`` is accepted
    as a hint and ignored by the stub.
    """
    del device
    if encoder_id == "stub":
        return StubEncoder()
    if encoder_id.startswith("stub-"):
        suffix = encoder_id[len("stub-") :]
        try:
            d = int(suffix)
        except ValueError:
            raise ConfigError(
                f"bad stub dimension {suffix!r} in encoder id {encoder_id!r}"
            ) from None
        return StubEncoder(d)
    raise ConfigError(
        f"encoder {encoder_id!r} is not available; use 'stub' or 'stub-<dim>'"
    )
