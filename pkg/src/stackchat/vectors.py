"""Deterministic text vectors and cosine similarity for the retrievers.

The default embedder is a hashed term-frequency vectorizer with L2
normalization: dependency-free, identical across processes, and
swappable for pretrained sentence encoders behind the same interface.
"""

from __future__ import annotations

import hashlib
import math
from typing import Protocol

from .textnorm import normalize

DEFAULT_DIM = 256


class Embedder(Protocol):
    dim: int

    def embed(self, text: str) -> list[float]: ...


def _bucket(token: str, dim: int) -> int:
    digest = hashlib.md5(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dim


class HashedTfEmbedder:
    """Term frequencies hashed into a fixed-width L2-normalized vector."""

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def embed(self, text: str) -> list[float]:
        vec = [0.0] * self.dim
        for token in normalize(text):
            vec[_bucket(token, self.dim)] += 1.0
        norm = math.sqrt(sum(v * v for v in vec))
        if norm > 0:
            vec = [v / norm for v in vec]
        return vec


def cosine(a: list[float], b: list[float]) -> float:
    """Inner product over norm product; zero vectors score 0."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    denom = math.sqrt(na) * math.sqrt(nb)
    if denom == 0.0:
        return 0.0
    return dot / denom
