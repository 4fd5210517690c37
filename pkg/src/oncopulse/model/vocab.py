"""Token vocabulary for visit histories."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..errors import VocabularyError


class Vocabulary:
    """Immutable token-to-index mapping, sorted for reproducibility."""

    def __init__(self, tokens: Iterable[str]):
        self._tokens = tuple(tokens)
        if len(set(self._tokens)) != len(self._tokens):
            raise VocabularyError("duplicate tokens in vocabulary")
        self._index = {t: i for i, t in enumerate(self._tokens)}

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Vocabulary":
        return cls(sorted(set(tokens)))

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    @property
    def tokens(self) -> tuple[str, ...]:
        return self._tokens

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise VocabularyError(f"unknown token: {token!r}") from None

    def encode(self, tokens: Iterable[str], strict: bool = True) -> np.ndarray:
        """Token ids as int64; unknown tokens raise, or are dropped when not strict."""
        ids = []
        for t in tokens:
            i = self._index.get(t)
            if i is None:
                if strict:
                    raise VocabularyError(f"unknown token: {t!r}")
                continue
            ids.append(i)
        return np.asarray(ids, dtype=np.int64)

    def to_dict(self) -> dict:
        return {"tokens": list(self._tokens)}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(d["tokens"])
