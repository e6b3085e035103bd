"""Labeled synthetic corpora, n-gram baseline features and clustering scores.

Sequences are built by repeatedly appending either a motif of the sequence's
cluster or a single uniform noise token, then trimming to the target length.
With zero noise a sequence is wall-to-wall motifs, so degenerate cases stay
exactly separable.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .alphabet import AlphabetIndex, Sequence


@dataclass(frozen=True)
class ClusterSpec:
    """Shape of a planted-cluster corpus.

    noise_range is the per-sequence noise fraction, drawn uniformly from the
    interval. overlap is the fraction of each cluster's motifs drawn from a
    pool shared by all clusters; at 1.0 the clusters are indistinguishable.
    """

    num_clusters: int
    alphabet: tuple[str, ...] = tuple(string.ascii_uppercase)
    motifs: tuple[tuple[str, ...], ...] | None = None
    motifs_per_cluster: int = 4
    motif_length_range: tuple[int, int] = (3, 8)
    noise_range: tuple[float, float] = (0.35, 0.65)
    length_mean: float = 116.4
    length_std: float = 47.7
    length_means: tuple[float, ...] | None = None  # optional per-cluster override
    overlap: float = 0.0
    seed: int = 0
    alphabet_groups: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if self.num_clusters < 2:
            raise ValueError("at least two clusters are required")
        if not (0.0 <= self.noise_range[0] <= self.noise_range[1] < 1.0):
            raise ValueError("noise_range must satisfy 0 <= lo <= hi < 1")
        if not (0.0 <= self.overlap <= 1.0):
            raise ValueError("overlap must lie in [0, 1]")
        if self.length_mean <= 0:
            raise ValueError("length_mean must be positive")
        if self.length_means is not None and len(self.length_means) != self.num_clusters:
            raise ValueError("length_means must supply one mean per cluster")

    def cluster_length_mean(self, cluster: int) -> float:
        return self.length_means[cluster] if self.length_means is not None else self.length_mean


@dataclass(frozen=True, eq=False)
class LabeledCorpus:
    sequences: tuple[Sequence, ...]
    labels: np.ndarray
    alphabet: AlphabetIndex
    alphabet_labels: np.ndarray | None = None

    def __post_init__(self):
        if len(self.sequences) != len(self.labels):
            raise ValueError("one label per sequence is required")
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))


def _draw_motif(rng: np.random.Generator, tokens, length_range) -> tuple[str, ...]:
    length = int(rng.integers(length_range[0], length_range[1] + 1))
    return tuple(rng.choice(tokens) for _ in range(length))


def _cluster_motifs(rng: np.random.Generator, spec: ClusterSpec) -> list[list[tuple[str, ...]]]:
    if spec.motifs is not None:
        if len(spec.motifs) == 0:
            raise ValueError("explicit motifs must cover every cluster")
        per = max(1, len(spec.motifs) // spec.num_clusters)
        return [list(spec.motifs[c * per : (c + 1) * per]) for c in range(spec.num_clusters)]
    n_shared = int(round(spec.overlap * spec.motifs_per_cluster))
    shared = [_draw_motif(rng, spec.alphabet, spec.motif_length_range) for _ in range(n_shared)]
    out = []
    for _ in range(spec.num_clusters):
        own = [
            _draw_motif(rng, spec.alphabet, spec.motif_length_range)
            for _ in range(spec.motifs_per_cluster - n_shared)
        ]
        out.append(list(shared) + own)
    return out


def _build_sequence(
    rng: np.random.Generator,
    seq_id: str,
    motifs: list[tuple[str, ...]],
    spec: ClusterSpec,
    alphabet: AlphabetIndex,
    length_mean: float,
) -> Sequence:
    max_motif = max(len(m) for m in motifs)
    if max_motif > length_mean:
        raise ValueError("motif longer than the feasible sequence length")
    target = max(max_motif, int(round(rng.normal(length_mean, spec.length_std))))
    noise = float(rng.uniform(*spec.noise_range))
    toks: list[str] = []
    while len(toks) < target:
        if rng.random() < noise:
            toks.append(str(rng.choice(alphabet.tokens)))
        else:
            toks.extend(motifs[int(rng.integers(len(motifs)))])
    return Sequence.from_tokens(seq_id, toks[:target], alphabet)


def gen_clustered_corpus(spec: ClusterSpec, per_cluster: int) -> LabeledCorpus:
    """Planted-motif corpus: per_cluster sequences for each of num_clusters clusters."""
    rng = np.random.default_rng(spec.seed)
    alphabet = AlphabetIndex(tuple(sorted(spec.alphabet)))
    motifs = _cluster_motifs(rng, spec)
    sequences: list[Sequence] = []
    labels: list[int] = []
    for c in range(spec.num_clusters):
        for i in range(per_cluster):
            sequences.append(
                _build_sequence(rng, f"c{c}-{i}", motifs[c], spec, alphabet, spec.cluster_length_mean(c))
            )
            labels.append(c)
    return LabeledCorpus(tuple(sequences), np.asarray(labels), alphabet)


def gen_bicluster_corpus(spec: ClusterSpec, per_cluster: int) -> LabeledCorpus:
    """Sequence clusters with group-pure motifs over a partitioned alphabet.

    Every motif uses tokens from a single alphabet group, so tokens of the
    same group co-occur in tight runs in every sequence regardless of the
    sequence's cluster; the sequence clusters differ only in which motifs
    they use.
    """
    if spec.alphabet_groups is None or len(spec.alphabet_groups) < 2:
        raise ValueError("bicluster corpora need alphabet_groups with at least two groups")
    flat: list[str] = [t for g in spec.alphabet_groups for t in g]
    if len(set(flat)) != len(flat):
        raise ValueError("alphabet groups must be disjoint")
    rng = np.random.default_rng(spec.seed)
    alphabet = AlphabetIndex(tuple(sorted(flat)))
    per_group = max(1, spec.motifs_per_cluster // len(spec.alphabet_groups))
    motifs: list[list[tuple[str, ...]]] = []
    for _ in range(spec.num_clusters):
        mine: list[tuple[str, ...]] = []
        for group in spec.alphabet_groups:
            mine.extend(_draw_motif(rng, tuple(group), spec.motif_length_range) for _ in range(per_group))
        motifs.append(mine)
    sequences: list[Sequence] = []
    labels: list[int] = []
    for c in range(spec.num_clusters):
        for i in range(per_cluster):
            sequences.append(
                _build_sequence(rng, f"c{c}-{i}", motifs[c], spec, alphabet, spec.cluster_length_mean(c))
            )
            labels.append(c)
    group_of = {t: gi for gi, g in enumerate(spec.alphabet_groups) for t in g}
    alphabet_labels = np.asarray([group_of[t] for t in alphabet.tokens], dtype=np.int64)
    return LabeledCorpus(tuple(sequences), np.asarray(labels), alphabet, alphabet_labels)


def ngram_features(seq: Sequence, alphabet: AlphabetIndex, orders) -> np.ndarray:
    """Concatenated n-gram count blocks, lexicographic gram order within each block.

    Orders longer than the sequence contribute an all-zero block. The 1-gram
    block is a plain bag of tokens.
    """
    orders = sorted(set(int(n) for n in orders))
    if not orders:
        raise ValueError("orders must be non-empty")
    if orders[0] < 1:
        raise ValueError("every order must be at least 1")
    size = alphabet.size
    events = seq.events
    blocks = []
    for n in orders:
        width = size**n
        if n > events.size:
            blocks.append(np.zeros(width))
            continue
        codes = np.zeros(events.size - n + 1, dtype=np.int64)
        for i in range(n):
            codes = codes * size + events[i : events.size - n + 1 + i]
        blocks.append(np.bincount(codes, minlength=width).astype(np.float64))
    return np.concatenate(blocks)


def ngram_columns(alphabet: AlphabetIndex, orders) -> tuple[str, ...]:
    orders = sorted(set(int(n) for n in orders))
    cols: list[str] = []

    def extend(prefix: str, depth: int):
        if depth == 0:
            cols.append(prefix)
            return
        for t in alphabet.tokens:
            extend(prefix + t, depth - 1)

    for n in orders:
        extend("", n)
    return tuple(cols)


def clustering_f1(predicted, truth) -> float:
    """Macro F1 after the optimal one-to-one cluster-to-class matching.

    The matching is solved on the table of pairwise F1 scores (not raw
    overlap counts): the optimal total is then unique even when overlap
    counts tie, which keeps the score invariant to any relabeling of the
    predicted clusters.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must have the same length")
    classes = np.unique(truth)
    clusters = np.unique(predicted)
    scores = np.zeros((classes.size, clusters.size))
    for ti, t in enumerate(classes):
        for pi, p in enumerate(clusters):
            overlap = np.sum((truth == t) & (predicted == p))
            if overlap:
                precision = overlap / np.sum(predicted == p)
                recall = overlap / np.sum(truth == t)
                scores[ti, pi] = 2 * precision * recall / (precision + recall)
    rows, cols = linear_sum_assignment(-scores)
    return float(scores[rows, cols].sum() / classes.size)


def same_cluster_recall(predicted, truth) -> float:
    """Fraction of same-class pairs that the clustering kept together."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must have the same length")
    kept = 0
    total = 0
    for t in np.unique(truth):
        members = predicted[truth == t]
        n = members.size
        total += n * (n - 1) // 2
        for p in np.unique(members):
            m = int(np.sum(members == p))
            kept += m * (m - 1) // 2
    return kept / total if total else 1.0
