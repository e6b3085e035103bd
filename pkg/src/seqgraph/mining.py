"""Distance, clustering, model selection, projection and search over feature tables.

Everything here runs in Manhattan geometry: cluster centers are coordinate
medians (the L1-optimal choice), and the Davies-Bouldin index uses the same
metric so model selection is consistent with the clustering objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alphabet import AlphabetIndex, Sequence
from .transform import FeatureTable, TransformConfig, transform_corpus


def manhattan(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"vector shapes differ: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


def _pairwise_manhattan(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return np.abs(points[:, None, :] - centers[None, :, :]).sum(axis=2)


@dataclass(frozen=True, eq=False)
class KMeansResult:
    assignment: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]


def _seed_centers(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    # distance-weighted seeding, Manhattan flavour of kmeans++
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    dist = np.abs(points - centers[0]).sum(axis=1)
    for c in range(1, k):
        total = dist.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=dist / total))
        centers[c] = points[idx]
        dist = np.minimum(dist, np.abs(points - centers[c]).sum(axis=1))
    return centers


def _kmeans_single(points: np.ndarray, k: int, seed: int, max_iter: int) -> KMeansResult:
    n = points.shape[0]
    rng = np.random.default_rng(seed)
    centers = _seed_centers(points, k, rng)
    prev = None
    history: list[float] = []
    iterations = max_iter
    for it in range(max_iter):
        dists = _pairwise_manhattan(points, centers)
        assignment = dists.argmin(axis=1)
        # an emptied cluster is re-seeded from the point farthest from its center
        for c in range(k):
            if not (assignment == c).any():
                idx = int(dists[np.arange(n), assignment].argmax())
                centers[c] = points[idx]
                assignment[idx] = c
                dists[idx, c] = 0.0
        inertia = float(dists[np.arange(n), assignment].sum())
        history.append(inertia)
        if prev is not None and np.array_equal(assignment, prev):
            iterations = it + 1
            break
        prev = assignment.copy()
        for c in range(k):
            members = points[assignment == c]
            if members.shape[0]:  # a cluster emptied by cascading repairs keeps its center
                centers[c] = np.median(members, axis=0)
    return KMeansResult(
        assignment=prev if prev is not None else assignment,
        centroids=centers,
        inertia=history[-1],
        iterations=iterations,
        inertia_history=tuple(history),
    )


def kmeans(table: FeatureTable, k: int, seed: int = 0, max_iter: int = 100, restarts: int = 1) -> KMeansResult:
    """Lloyd iteration with Manhattan assignment and median centroid updates.

    Deterministic for a fixed seed; with restarts > 1 the run with the lowest
    final inertia wins (sub-seeds are seed, seed+1, ...).
    """
    points = table.values
    if points.shape[0] == 0:
        raise ValueError("cannot cluster an empty table")
    if not (1 <= k <= points.shape[0]):
        raise ValueError(f"k must be in 1..{points.shape[0]}, got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    best: KMeansResult | None = None
    for r in range(max(1, restarts)):
        res = _kmeans_single(points, k, seed + r, max_iter)
        if best is None or res.inertia < best.inertia:
            best = res
    return best


def davies_bouldin(table: FeatureTable, assignment: np.ndarray) -> float:
    """Cluster validity in Manhattan geometry with median centers; lower is better."""
    points = table.values
    assignment = np.asarray(assignment)
    if assignment.shape[0] != points.shape[0]:
        raise ValueError("one label per row is required")
    labels = np.unique(assignment)
    if labels.size < 2:
        raise ValueError("davies-bouldin needs at least two non-empty clusters")
    centers = np.vstack([np.median(points[assignment == c], axis=0) for c in labels])
    scatter = np.array(
        [np.abs(points[assignment == c] - centers[i]).sum(axis=1).mean() for i, c in enumerate(labels)]
    )
    sep = _pairwise_manhattan(centers, centers)
    k = labels.size
    worst = np.empty(k)
    for i in range(k):
        ratios = [
            (scatter[i] + scatter[j]) / sep[i, j] if sep[i, j] > 0 else np.inf
            for j in range(k)
            if j != i
        ]
        worst[i] = max(ratios)
    return float(worst.mean())


@dataclass(frozen=True)
class SearchConfig:
    nc_grid: tuple[int, ...]
    kappa_grid: tuple[float, ...] = (1.0, 5.0, 10.0)
    max_rounds: int = 10
    seed: int = 0
    kmeans_restarts: int = 1

    def __post_init__(self):
        if not self.nc_grid or not self.kappa_grid:
            raise ValueError("search grids must be non-empty")
        if any(nc < 2 for nc in self.nc_grid):
            raise ValueError("cluster counts below 2 cannot be scored")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass(frozen=True)
class SearchResult:
    nc: int
    kappa: float
    db_index: float
    rounds: int
    best_history: tuple[float, ...]


def random_search(
    sequences: list[Sequence],
    alphabet: AlphabetIndex,
    search: SearchConfig,
    base_config: TransformConfig | None = None,
) -> SearchResult:
    """Alternate best-kappa / best-cluster-count sweeps until the pair stabilizes.

    Transforms are cached per kappa; the Davies-Bouldin index is the score.
    The best triple ever seen is returned, so the reported score never gets
    worse across rounds.
    """
    base = base_config or TransformConfig()
    rng = np.random.default_rng(search.seed)
    tables: dict[float, FeatureTable] = {}
    scores: dict[tuple[int, float], float] = {}

    def table_for(kappa: float) -> FeatureTable:
        if kappa not in tables:
            cfg = TransformConfig(
                kappa=kappa,
                normalization=base.normalization,
                directionality=base.directionality,
                algorithm=base.algorithm,
            )
            tables[kappa] = transform_corpus(sequences, alphabet, cfg)
        return tables[kappa]

    def score(nc: int, kappa: float) -> float:
        key = (nc, kappa)
        if key not in scores:
            tbl = table_for(kappa)
            res = kmeans(tbl, nc, seed=search.seed, restarts=search.kmeans_restarts)
            scores[key] = davies_bouldin(tbl, res.assignment)
        return scores[key]

    nc = int(rng.choice(np.asarray(search.nc_grid)))
    best = (np.inf, nc, search.kappa_grid[0])
    history: list[float] = []
    prev_pair = None
    rounds = 0
    for _ in range(search.max_rounds):
        rounds += 1
        kappa = min(search.kappa_grid, key=lambda g: score(nc, g))
        nc = min(search.nc_grid, key=lambda n: score(n, kappa))
        db = score(nc, kappa)
        if db < best[0]:
            best = (db, nc, kappa)
        history.append(best[0])
        if prev_pair == (nc, kappa):
            break
        prev_pair = (nc, kappa)
    return SearchResult(
        nc=best[1], kappa=best[2], db_index=float(best[0]), rounds=rounds, best_history=tuple(history)
    )


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, d), rows are principal directions
    explained_variance_ratio: tuple[float, ...]


def pca_fit(table: FeatureTable, components: int) -> PcaModel:
    """Mean-center then keep the top right-singular directions.

    Component signs are pinned by making each direction's largest-magnitude
    coordinate positive, so repeated fits agree bit for bit.
    """
    points = table.values
    n, d = points.shape
    if not (1 <= components <= min(n, d)):
        raise ValueError(f"components must be in 1..{min(n, d)}, got {components}")
    mean = points.mean(axis=0)
    centered = points - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:components].copy()
    for row in comps:
        pivot = int(np.abs(row).argmax())
        if row[pivot] < 0:
            row *= -1.0
    power = s**2
    total = power.sum()
    ratios = tuple(float(r) for r in (power[:components] / total if total > 0 else np.zeros(components)))
    return PcaModel(mean=mean, components=comps, explained_variance_ratio=ratios)


def pca_transform(model: PcaModel, table: FeatureTable) -> FeatureTable:
    if table.values.shape[1] != model.mean.shape[0]:
        raise ValueError("table width does not match the fitted model")
    projected = (table.values - model.mean) @ model.components.T
    cols = tuple(f"pc{i + 1}" for i in range(model.components.shape[0]))
    return FeatureTable(values=projected, ids=table.ids, columns=cols)


def _kmeans_array(points: np.ndarray, k: int, seed: int, restarts: int = 1) -> np.ndarray:
    tbl = FeatureTable(points, tuple(str(i) for i in range(points.shape[0])), tuple(f"x{j}" for j in range(points.shape[1])))
    return kmeans(tbl, k, seed=seed, restarts=restarts).assignment


def spectral_alphabet_clusters(weights: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """Group alphabet tokens from a symmetric association matrix.

    Symmetric-normalized Laplacian, bottom-k eigenvectors, row normalization,
    then Manhattan k-means on the embedded rows. Disconnected token groups are
    recovered exactly because their embedded rows collapse to distinct points.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise ValueError("weights must be a square matrix")
    if not np.allclose(weights, weights.T, rtol=0.0, atol=1e-12):
        raise ValueError("weights must be symmetric; symmetrize the matrix first")
    if k < 2:
        raise ValueError("k must be at least 2")
    n = weights.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of tokens {n}")
    degree = weights.sum(axis=1)
    inv_sqrt = np.where(degree > 0, 1.0 / np.sqrt(np.where(degree > 0, degree, 1.0)), 0.0)
    lap = np.eye(n) - inv_sqrt[:, None] * weights * inv_sqrt[None, :]
    _, vecs = np.linalg.eigh(lap)
    emb = vecs[:, :k]
    norms = np.linalg.norm(emb, axis=1)
    emb = np.where(norms[:, None] > 0, emb / np.where(norms[:, None] > 0, norms[:, None], 1.0), 0.0)
    return _kmeans_array(emb, k, seed=seed, restarts=5)


def nn_search(query: np.ndarray, table: FeatureTable, top_k: int) -> list[tuple[str, float]]:
    """Exact top-k rows by Manhattan distance; ties break on id order."""
    query = np.asarray(query, dtype=np.float64)
    if query.shape[0] != table.values.shape[1]:
        raise ValueError("query dimension does not match the table")
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    dists = np.abs(table.values - query).sum(axis=1)
    order = sorted(range(table.n_rows), key=lambda i: (dists[i], table.ids[i]))
    return [(table.ids[i], float(dists[i])) for i in order[:top_k]]


def nn_classify(query: np.ndarray, table: FeatureTable, labels, k: int = 1):
    """Majority label among the k nearest rows.

    Vote ties break toward the candidate with the smaller mean distance,
    then toward the smaller label.
    """
    labels = list(labels)
    if len(labels) != table.n_rows:
        raise ValueError("one label per table row is required")
    if table.n_rows == 0:
        raise ValueError("cannot classify against an empty table")
    if k < 1:
        raise ValueError("k must be at least 1")
    nearest = nn_search(query, table, min(k, table.n_rows))
    by_id = {i: (labels[j], None) for j, i in enumerate(table.ids)}
    votes: dict = {}
    for seq_id, dist in nearest:
        label = by_id[seq_id][0]
        count, total = votes.get(label, (0, 0.0))
        votes[label] = (count + 1, total + dist)
    ranked = sorted(votes.items(), key=lambda kv: (-kv[1][0], kv[1][1] / kv[1][0], str(kv[0])))
    return ranked[0][0]
