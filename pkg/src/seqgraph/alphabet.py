"""Token alphabets and encoded sequences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import IngestionError


@dataclass(frozen=True)
class AlphabetIndex:
    """Ordered bijection between token strings and dense integer ids.

    The token order is fixed at construction and defines the row/column
    order of every matrix and feature vector built on top of it.
    """

    tokens: tuple[str, ...]
    _ids: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        if len(tokens) < 1:
            raise ValueError("alphabet must contain at least one token")
        ids = {tok: i for i, tok in enumerate(tokens)}
        if len(ids) != len(tokens):
            raise ValueError("alphabet tokens must be unique")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "_ids", ids)

    @classmethod
    def from_observed(cls, token_lists: Iterable[Iterable[str]]) -> "AlphabetIndex":
        """Sorted union of every token seen, so column order is corpus-order independent."""
        seen: set[str] = set()
        for toks in token_lists:
            seen.update(toks)
        if not seen:
            raise ValueError("no tokens observed")
        return cls(tuple(sorted(seen)))

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise KeyError(f"token {token!r} not in alphabet") from None

    def token_of(self, event_id: int) -> str:
        return self.tokens[event_id]

    def encode(self, tokens: Iterable[str], sequence_id: str = "?") -> np.ndarray:
        ids = self._ids
        out = np.empty(0, dtype=np.int64)
        try:
            out = np.fromiter((ids[t] for t in tokens), dtype=np.int64)
        except KeyError as exc:
            bad = exc.args[0]
            raise IngestionError(
                f"sequence {sequence_id!r}: token {bad!r} is not in the alphabet",
                sequence_id=sequence_id,
                token=bad,
            ) from None
        return out

    def decode(self, events: np.ndarray) -> list[str]:
        return [self.tokens[int(e)] for e in events]


@dataclass(frozen=True, eq=False)
class Sequence:
    """An ordered run of events, stored as ids into some AlphabetIndex."""

    id: str
    events: np.ndarray

    def __post_init__(self):
        events = np.asarray(self.events, dtype=np.int64)
        if events.ndim != 1:
            raise ValueError(f"sequence {self.id!r}: events must be one-dimensional")
        if events.size < 1:
            raise ValueError(f"sequence {self.id!r}: must contain at least one event")
        if events.min() < 0:
            raise ValueError(f"sequence {self.id!r}: event ids must be non-negative")
        object.__setattr__(self, "events", events)

    @property
    def length(self) -> int:
        return int(self.events.size)

    @classmethod
    def from_tokens(cls, seq_id: str, tokens: Iterable[str], alphabet: AlphabetIndex) -> "Sequence":
        return cls(seq_id, alphabet.encode(tokens, sequence_id=seq_id))
