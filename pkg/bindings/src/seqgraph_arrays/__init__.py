"""Array-facing facade over the seqgraph feature engine.

Two calls cover the data-science workflow: fit an alphabet over a corpus of
token lists, then turn any corpus into a dense (n_sequences, |V|^2) float
matrix whose columns follow the row-major (source, target) pair order of the
sorted alphabet. Values match the seqgraph CLI's CSV export cell for cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence as SequenceOf

import numpy as np

from seqgraph import (
    Algorithm,
    AlphabetIndex,
    Directionality,
    Normalization,
    Sequence,
    TransformConfig,
    transform,
    vectorize,
)

__all__ = ["ArrayTransformer", "fit_alphabet", "transform_many", "pair_labels"]

__version__ = "0.1.0"


@dataclass(frozen=True)
class ArrayTransformer:
    """Reusable transformer: a fixed token alphabet plus transform settings."""

    tokens: tuple[str, ...]
    kappa: float = 1.0
    normalization: str = "length-sensitive"
    directionality: str = "directed"
    algorithm: str = "auto"

    def config(self) -> TransformConfig:
        return TransformConfig(
            kappa=self.kappa,
            normalization=Normalization(self.normalization),
            directionality=Directionality(self.directionality),
            algorithm=Algorithm(self.algorithm),
        )

    def alphabet(self) -> AlphabetIndex:
        return AlphabetIndex(self.tokens)

    @property
    def n_features(self) -> int:
        return len(self.tokens) ** 2


def fit_alphabet(
    corpus: SequenceOf[Iterable[str]],
    kappa: float = 1.0,
    normalization: str = "length-sensitive",
    directionality: str = "directed",
    algorithm: str = "auto",
) -> ArrayTransformer:
    """Build a transformer over the sorted union of the corpus tokens."""
    tokens: set[str] = set()
    for seq in corpus:
        tokens.update(seq)
    if not tokens:
        raise ValueError("cannot fit an alphabet on an empty corpus")
    transformer = ArrayTransformer(
        tokens=tuple(sorted(tokens)),
        kappa=kappa,
        normalization=normalization,
        directionality=directionality,
        algorithm=algorithm,
    )
    transformer.config()  # validates the knobs eagerly
    return transformer


def transform_many(transformer: ArrayTransformer, corpus: SequenceOf[Iterable[str]]) -> np.ndarray:
    """Dense feature matrix, one row per sequence in corpus order."""
    alphabet = transformer.alphabet()
    config = transformer.config()
    rows = []
    for i, tokens in enumerate(corpus):
        seq = Sequence.from_tokens(str(i), tokens, alphabet)
        rows.append(vectorize(transform(seq, alphabet, config)))
    if not rows:
        raise ValueError("cannot transform an empty corpus")
    return np.vstack(rows)


def pair_labels(transformer: ArrayTransformer) -> tuple[str, ...]:
    """Column names matching transform_many, `source>target` in row-major order."""
    toks = transformer.tokens
    return tuple(f"{u}>{v}" for u in toks for v in toks)
