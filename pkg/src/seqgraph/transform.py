"""Pairwise association features for symbolic sequences.

For every ordered token pair (u, v) the feature is a normalized sum of
exponentially decayed position gaps over all occurrences of u before v:

    effect(u, v) = sum over (l, m), s_l = u, s_m = v, l < m of exp(-kappa * (m - l))

Length-sensitive features divide by the raw pair count; length-insensitive
features divide by (pair count / sequence length), which rescales every
feature by L**(1/kappa) and makes sequences of different lengths comparable.
The final feature is the kappa-th root of that ratio, so features computed
under different decay rates live on a comparable scale.

Two accumulation strategies produce identical results: a gap-scan that costs
O(L^2) and is faster for short sequences, and a position-scan that costs
O(|V| * (L + |V|)) and wins once L exceeds |V|^2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import partial

import numpy as np

from .alphabet import AlphabetIndex, Sequence
from .errors import StateError


class Normalization(Enum):
    LENGTH_SENSITIVE = "length-sensitive"
    LENGTH_INSENSITIVE = "length-insensitive"


class Directionality(Enum):
    DIRECTED = "directed"
    UNDIRECTED = "undirected"
    UNDIRECTED_APPROX = "undirected-approx"


class Algorithm(Enum):
    AUTO = "auto"
    DENSE = "dense"
    POSITIONAL = "positional"


@dataclass(frozen=True)
class TransformConfig:
    """Knobs for a single transform run.

    kappa is the gap decay rate: larger values concentrate the features on
    short-range structure, smaller values let distant co-occurrences
    contribute. Must be positive.
    """

    kappa: float = 1.0
    normalization: Normalization = Normalization.LENGTH_SENSITIVE
    directionality: Directionality = Directionality.DIRECTED
    algorithm: Algorithm = Algorithm.AUTO

    def __post_init__(self):
        if not (isinstance(self.kappa, (int, float)) and math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be a positive finite number, got {self.kappa!r}")


@dataclass(frozen=True, eq=False)
class AssociationMatrix:
    """Dense |V| x |V| feature matrix plus the accumulators it was built from.

    `values[u, v]` is the final (rooted, normalized) association feature.
    `effect_sums` and `pair_counts` are kept so the undirected variant can be
    recombined exactly; they are None on approximately symmetrized matrices.
    """

    values: np.ndarray
    effect_sums: np.ndarray | None
    pair_counts: np.ndarray | None
    alphabet: AlphabetIndex
    config: TransformConfig
    seq_length: int
    algorithm_used: Algorithm
    directionality: Directionality

    @property
    def effect_ratios(self) -> np.ndarray:
        """Normalized effect sums before the kappa-th root.

        This is the quantity the closed-form moment analysis describes; the
        shipped feature is its kappa-th root.
        """
        if self.effect_sums is None or self.pair_counts is None:
            raise StateError("accumulators were dropped by the approximate symmetrization")
        norms = _norms(self.pair_counts, self.seq_length, self.config.normalization)
        return np.divide(
            self.effect_sums, norms, out=np.zeros_like(self.effect_sums), where=self.pair_counts > 0
        )


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """One feature row per sequence, in corpus order."""

    values: np.ndarray
    ids: tuple[str, ...]
    columns: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("feature table values must be two-dimensional")
        if values.shape[0] != len(self.ids):
            raise ValueError("one id per feature row is required")
        if values.shape[1] != len(self.columns):
            raise ValueError("one column name per feature column is required")
        if len(set(self.ids)) != len(self.ids):
            dupes = sorted({i for i in self.ids if list(self.ids).count(i) > 1})
            raise ValueError(f"duplicate sequence ids in table: {dupes[:5]}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]


def pair_columns(alphabet: AlphabetIndex) -> tuple[str, ...]:
    """Row-major column labels, `u>v` for source u and target v."""
    toks = alphabet.tokens
    return tuple(f"{u}>{v}" for u in toks for v in toks)


def decay_effect(distance: float, kappa: float) -> float:
    """exp(-kappa * distance); strictly decreasing in both arguments."""
    if not (isinstance(distance, (int, float)) and distance > 0):
        raise ValueError(f"distance must be positive, got {distance!r}")
    if not (isinstance(kappa, (int, float)) and kappa > 0):
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    return math.exp(-kappa * distance)


def pair_instances(seq: Sequence, alphabet: AlphabetIndex, u: int, v: int) -> list[tuple[int, int]]:
    """All 1-based position pairs (l, m) with events u at l, v at m and l < m.

    Quadratic scan; meant for inspection and testing, not bulk feature work.
    """
    for name, a in (("u", u), ("v", v)):
        if not (0 <= a < alphabet.size):
            raise ValueError(f"{name}={a!r} is not a valid id for an alphabet of size {alphabet.size}")
    ev = seq.events
    out = []
    for l in range(ev.size - 1):
        if ev[l] != u:
            continue
        for m in range(l + 1, ev.size):
            if ev[m] == v:
                out.append((l + 1, m + 1))
    return out


_GAP_BLOCK = 64


def _accumulate_dense(events: np.ndarray, size: int, kappa: float):
    """Gap scan: every index pair at gap g shares the decay exp(-kappa*g). O(L^2).

    Gaps are processed in blocks through a strided view over a
    sentinel-padded copy of the events, so one histogram call covers a whole
    block: per-gap overhead stays flat and the quadratic element work
    dominates the runtime.
    """
    length = events.size
    padded_size = size + 1  # extra column absorbs the out-of-range sentinel pairs
    n_cells = size * size
    if length < 2:
        return np.zeros((size, size)), np.zeros((size, size))
    padded = np.full(2 * length, size, dtype=np.int64)
    padded[:length] = events
    scaled = events * padded_size
    windows = np.lib.stride_tricks.sliding_window_view(padded, length)
    count_parts: list[np.ndarray] = []
    effect_parts: list[np.ndarray] = []
    for start in range(1, length, _GAP_BLOCK):
        gaps = np.arange(start, min(start + _GAP_BLOCK, length))
        block = scaled[None, :] + windows[start : start + gaps.size]
        block += (np.arange(gaps.size) * size * padded_size)[:, None]
        hists = np.bincount(block.ravel(), minlength=gaps.size * size * padded_size)
        hists = hists.reshape(gaps.size, size, padded_size)[:, :, :size].reshape(gaps.size, n_cells)
        hists = hists.astype(np.float64)
        count_parts.append(hists.sum(axis=0))
        effect_parts.append(np.exp(-kappa * gaps) @ hists)
    counts = np.sum(count_parts, axis=0)
    effects = np.sum(effect_parts, axis=0)
    return counts.reshape(size, size), effects.reshape(size, size)


def _decayed_pair_sum(src: list[int], dst: list[int], kappa: float) -> float:
    # Walk the source positions right to left, dragging a suffix sum of
    # decayed target terms along. Rescaling by exp(-kappa*hop) at every hop
    # shrinks old terms geometrically, so rounding never accumulates.
    total = 0.0
    comp = 0.0
    tail = 0.0
    prev = -1
    j = len(dst) - 1
    exp = math.exp
    for i in reversed(src):
        if prev >= 0:
            tail *= exp(-kappa * (prev - i))
        while j >= 0 and dst[j] > i:
            tail += exp(-kappa * (dst[j] - i))
            j -= 1
        prev = i
        y = tail - comp  # Kahan-compensated accumulation of the per-anchor tails
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _accumulate_positional(events: np.ndarray, size: int, kappa: float):
    """Position scan: per-token position lists, then restricted cross products.

    O(|V| * (L + |V|)) thanks to the suffix-sum trick in _decayed_pair_sum.
    """
    counts = np.zeros((size, size))
    effects = np.zeros((size, size))
    positions = [np.flatnonzero(events == a) for a in range(size)]
    pos_lists = [p.tolist() for p in positions]
    for u in range(size):
        src_arr = positions[u]
        if src_arr.size == 0:
            continue
        for v in range(size):
            dst_arr = positions[v]
            if dst_arr.size == 0:
                continue
            counts[u, v] = float((dst_arr.size - np.searchsorted(dst_arr, src_arr, side="right")).sum())
            effects[u, v] = _decayed_pair_sum(pos_lists[u], pos_lists[v], kappa)
    return counts, effects


def _norms(counts: np.ndarray, seq_length: int, normalization: Normalization) -> np.ndarray:
    if normalization is Normalization.LENGTH_SENSITIVE:
        return counts
    return counts / float(seq_length)


def _finalize(
    counts: np.ndarray,
    effects: np.ndarray,
    seq_length: int,
    config: TransformConfig,
    alphabet: AlphabetIndex,
    algorithm_used: Algorithm,
    directionality: Directionality,
) -> AssociationMatrix:
    norms = _norms(counts, seq_length, config.normalization)
    ratio = np.divide(effects, norms, out=np.zeros_like(effects), where=counts > 0)
    values = np.power(ratio, 1.0 / config.kappa)
    return AssociationMatrix(
        values=values,
        effect_sums=effects,
        pair_counts=counts,
        alphabet=alphabet,
        config=config,
        seq_length=seq_length,
        algorithm_used=algorithm_used,
        directionality=directionality,
    )


def _pick_algorithm(seq_length: int, alphabet_size: int, requested: Algorithm) -> Algorithm:
    if requested is not Algorithm.AUTO:
        return requested
    # gap scan wins below the crossover L = |V|^2; ties go to the position scan
    return Algorithm.DENSE if seq_length < alphabet_size**2 else Algorithm.POSITIONAL


def transform(seq: Sequence, alphabet: AlphabetIndex, config: TransformConfig | None = None) -> AssociationMatrix:
    """Compute the association matrix of one sequence."""
    config = config or TransformConfig()
    if seq.events.max() >= alphabet.size:
        raise ValueError(
            f"sequence {seq.id!r} has event id {int(seq.events.max())} outside the "
            f"alphabet of size {alphabet.size}"
        )
    algorithm = _pick_algorithm(seq.length, alphabet.size, config.algorithm)
    if algorithm is Algorithm.DENSE:
        counts, effects = _accumulate_dense(seq.events, alphabet.size, config.kappa)
    else:
        counts, effects = _accumulate_positional(seq.events, alphabet.size, config.kappa)
    matrix = _finalize(counts, effects, seq.length, config, alphabet, algorithm, Directionality.DIRECTED)
    if config.directionality is Directionality.UNDIRECTED:
        return make_undirected(matrix)
    if config.directionality is Directionality.UNDIRECTED_APPROX:
        return make_undirected(matrix, approximate=True)
    return matrix


def make_undirected(matrix: AssociationMatrix, approximate: bool = False) -> AssociationMatrix:
    """Drop the pair-order condition.

    Exact mode recombines the retained accumulators: summed effects over
    summed counts, then the kappa-th root, which equals computing the
    features with the l < m restriction removed. Approximate mode averages
    the final matrix with its transpose, a good stand-in when token
    occurrence is roughly uniform; it no longer carries accumulators.
    """
    if matrix.directionality is not Directionality.DIRECTED:
        raise StateError("matrix is already undirected")
    if approximate:
        sym = (matrix.values + matrix.values.T) / 2.0
        return AssociationMatrix(
            values=sym,
            effect_sums=None,
            pair_counts=None,
            alphabet=matrix.alphabet,
            config=matrix.config,
            seq_length=matrix.seq_length,
            algorithm_used=matrix.algorithm_used,
            directionality=Directionality.UNDIRECTED_APPROX,
        )
    if matrix.effect_sums is None or matrix.pair_counts is None:
        raise StateError("exact undirected recombination needs the accumulators")
    counts = matrix.pair_counts + matrix.pair_counts.T
    effects = matrix.effect_sums + matrix.effect_sums.T
    return _finalize(
        counts,
        effects,
        matrix.seq_length,
        matrix.config,
        matrix.alphabet,
        matrix.algorithm_used,
        Directionality.UNDIRECTED,
    )


def vectorize(matrix: AssociationMatrix) -> np.ndarray:
    """Row-major flattening; cell (u, v) lands at index u * |V| + v."""
    return matrix.values.reshape(-1).copy()


def _feature_row(seq: Sequence, alphabet: AlphabetIndex, config: TransformConfig) -> np.ndarray:
    return vectorize(transform(seq, alphabet, config))


def transform_corpus(
    sequences: list[Sequence],
    alphabet: AlphabetIndex,
    config: TransformConfig | None = None,
    jobs: int | None = 1,
) -> FeatureTable:
    """Transform every sequence; rows follow corpus order regardless of `jobs`."""
    config = config or TransformConfig()
    if not sequences:
        raise ValueError("corpus is empty")
    worker = partial(_feature_row, alphabet=alphabet, config=config)
    if jobs == 1:
        rows = [worker(s) for s in sequences]
    else:
        workers = jobs or os.cpu_count() or 1
        chunk = max(1, len(sequences) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(worker, sequences, chunksize=chunk))
    return FeatureTable(
        values=np.vstack(rows),
        ids=tuple(s.id for s in sequences),
        columns=pair_columns(alphabet),
    )
