"""Synthetic evaluation runs behind the `bench` CLI subcommand."""

from __future__ import annotations

import time

import numpy as np

from .mining import SearchConfig, kmeans, random_search, spectral_alphabet_clusters
from .synthetic import (
    ClusterSpec,
    LabeledCorpus,
    clustering_f1,
    gen_bicluster_corpus,
    gen_clustered_corpus,
    ngram_columns,
    ngram_features,
    same_cluster_recall,
)
from .transform import FeatureTable, Normalization, TransformConfig, transform_corpus

BICLUSTER_GROUPS = (tuple("ABCDEFGH"), tuple("IJKLMNOP"))


def _assoc_table(corpus: LabeledCorpus, kappa: float, mode: Normalization) -> FeatureTable:
    cfg = TransformConfig(kappa=kappa, normalization=mode)
    return transform_corpus(list(corpus.sequences), corpus.alphabet, cfg)


def _ngram_table(corpus: LabeledCorpus, orders) -> FeatureTable:
    rows = [ngram_features(s, corpus.alphabet, orders) for s in corpus.sequences]
    return FeatureTable(
        np.vstack(rows), tuple(s.id for s in corpus.sequences), ngram_columns(corpus.alphabet, orders)
    )


def _cluster_f1(table: FeatureTable, truth: np.ndarray, k: int, seed: int) -> float:
    res = kmeans(table, k, seed=seed, restarts=5)
    return clustering_f1(res.assignment, truth)


def overlap_rows(seeds=range(10), overlaps=(0.0, 0.4, 0.8), per_cluster=15, kappa=5.0) -> list[dict]:
    """Overlap sweep on a 5-cluster corpus: association features vs n-grams."""
    rows = []
    for seed in seeds:
        for overlap in overlaps:
            spec = ClusterSpec(
                num_clusters=5,
                noise_range=(0.35, 0.65),
                length_mean=116.4,
                length_std=47.7,
                overlap=overlap,
                seed=seed,
            )
            corpus = gen_clustered_corpus(spec, per_cluster)
            t0 = time.perf_counter()
            f1_assoc = _cluster_f1(_assoc_table(corpus, kappa, Normalization.LENGTH_INSENSITIVE), corpus.labels, 5, seed)
            t_assoc = time.perf_counter() - t0
            t0 = time.perf_counter()
            f1_2g = _cluster_f1(_ngram_table(corpus, (2,)), corpus.labels, 5, seed)
            t_2g = time.perf_counter() - t0
            f1_1g = _cluster_f1(_ngram_table(corpus, (1,)), corpus.labels, 5, seed)
            rows.append(
                {
                    "experiment": "overlap",
                    "seed": seed,
                    "overlap": overlap,
                    "f1_association": round(f1_assoc, 4),
                    "f1_2gram": round(f1_2g, 4),
                    "f1_1gram": round(f1_1g, 4),
                    "runtime_association_s": round(t_assoc, 4),
                    "runtime_2gram_s": round(t_2g, 4),
                }
            )
    return rows


def length_regime_rows(seeds=range(5), per_cluster=12) -> list[dict]:
    """Length-sensitive setting: joint (cluster count, kappa) search."""
    rows = []
    for seed in seeds:
        spec = ClusterSpec(
            num_clusters=5,
            noise_range=(0.45, 0.50),
            length_mean=424.6,
            length_std=60.0,
            length_means=(265.0, 345.0, 425.0, 505.0, 585.0),
            seed=seed,
        )
        corpus = gen_clustered_corpus(spec, per_cluster)
        search = SearchConfig(nc_grid=(3, 4, 5, 6, 7), kappa_grid=(1.0, 5.0, 10.0), seed=seed)
        t0 = time.perf_counter()
        result = random_search(list(corpus.sequences), corpus.alphabet, search, TransformConfig())
        table = _assoc_table(corpus, result.kappa, Normalization.LENGTH_SENSITIVE)
        assign = kmeans(table, result.nc, seed=seed, restarts=5).assignment
        rows.append(
            {
                "experiment": "lengths",
                "seed": seed,
                "nc_true": 5,
                "nc_estimated": result.nc,
                "kappa": result.kappa,
                "db_index": round(result.db_index, 4),
                "same_cluster_recall": round(same_cluster_recall(assign, corpus.labels), 4),
                "runtime_s": round(time.perf_counter() - t0, 4),
            }
        )
    return rows


def bicluster_rows(seeds=range(10), per_cluster=20, kappa=5.0) -> list[dict]:
    """Bicluster setting: cluster sequences and tokens on the same corpus."""
    rows = []
    for seed in seeds:
        spec = ClusterSpec(
            num_clusters=3,
            noise_range=(0.30, 0.50),
            length_mean=103.9,
            length_std=33.6,
            seed=seed,
            alphabet_groups=BICLUSTER_GROUPS,
        )
        corpus = gen_bicluster_corpus(spec, per_cluster)
        t0 = time.perf_counter()
        table = _assoc_table(corpus, kappa, Normalization.LENGTH_INSENSITIVE)
        f1 = clustering_f1(kmeans(table, 3, seed=seed, restarts=5).assignment, corpus.labels)
        agg = table.values.mean(axis=0).reshape(corpus.alphabet.size, corpus.alphabet.size)
        sym = (agg + agg.T) / 2.0
        token_labels = spectral_alphabet_clusters(sym, 2, seed=seed)
        miss = _mismatches_under_best_relabel(token_labels, corpus.alphabet_labels)
        rows.append(
            {
                "experiment": "bicluster",
                "seed": seed,
                "f1_sequences": round(f1, 4),
                "alphabet_misclustered": miss,
                "runtime_s": round(time.perf_counter() - t0, 4),
            }
        )
    return rows


def _mismatches_under_best_relabel(predicted: np.ndarray, truth: np.ndarray) -> int:
    direct = int(np.sum(predicted != truth))
    flipped = int(np.sum((1 - predicted) != truth))
    return min(direct, flipped)


def run_experiment(name: str, seeds) -> list[dict]:
    if name == "overlap":
        return overlap_rows(seeds=seeds)
    if name == "lengths":
        return length_regime_rows(seeds=seeds)
    if name == "bicluster":
        return bicluster_rows(seeds=seeds)
    raise ValueError(f"unknown experiment {name!r}")
