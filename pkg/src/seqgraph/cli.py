"""Command-line entry point.

Exit codes: 0 on success, 1 for usage problems, 2 for data problems
(ingestion or validation). Output files are rendered in memory and written
in one shot, so a failing run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .alphabet import AlphabetIndex
from .errors import IngestionError
from .formats import (
    CorpusFormat,
    dot_text,
    features_csv_text,
    labels_csv_text,
    read_alphabet_file,
    read_features_csv,
    read_labels_csv,
    read_sequences,
)
from .mining import (
    SearchConfig,
    davies_bouldin,
    kmeans,
    nn_classify,
    nn_search,
    pca_fit,
    pca_transform,
    random_search,
    spectral_alphabet_clusters,
)
from .moments import (
    MEAN_VALIDATION_POINTS,
    VARIANCE_VALIDATION_POINTS,
    expected_psi,
    monte_carlo_psi,
    variance_psi,
)
from .transform import (
    Algorithm,
    Directionality,
    Normalization,
    TransformConfig,
    transform,
    transform_corpus,
    vectorize,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage problems are exit 1 here
        raise UsageError(message)


def _emit(text: str, dest: str | None) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _corpus_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("input", help="corpus file")
    sub.add_argument("--format", choices=[f.value for f in CorpusFormat], default="char")
    sub.add_argument("--delimiter", default=",", help="token separator for --format token")
    sub.add_argument("--alphabet", default=None, help="file with one alphabet token per line")


def _config_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--kappa", type=float, default=1.0, help="gap decay rate (> 0)")
    sub.add_argument(
        "--mode",
        choices=[m.value for m in Normalization],
        default=Normalization.LENGTH_SENSITIVE.value,
    )
    sub.add_argument(
        "--undirected",
        nargs="?",
        const="exact",
        choices=["exact", "approx"],
        default=None,
        help="drop pair order; 'exact' recombines accumulators, 'approx' averages with the transpose",
    )
    sub.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="auto")


def _build_config(args) -> TransformConfig:
    if args.kappa <= 0:
        raise UsageError("--kappa must be positive")
    directionality = Directionality.DIRECTED
    if getattr(args, "undirected", None) == "exact":
        directionality = Directionality.UNDIRECTED
    elif getattr(args, "undirected", None) == "approx":
        directionality = Directionality.UNDIRECTED_APPROX
    return TransformConfig(
        kappa=args.kappa,
        normalization=Normalization(args.mode),
        directionality=directionality,
        algorithm=Algorithm(getattr(args, "algorithm", "auto")),
    )


def _read_corpus(args, alphabet: AlphabetIndex | None = None):
    explicit = alphabet
    if explicit is None and args.alphabet:
        explicit = read_alphabet_file(args.alphabet)
    return read_sequences(args.input, fmt=args.format, delimiter=args.delimiter, alphabet=explicit)


def _parse_grid(text: str, cast):
    try:
        values = tuple(cast(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"could not parse grid {text!r}")
    if not values:
        raise UsageError(f"grid {text!r} is empty")
    return values


def cmd_transform(args) -> int:
    config = _build_config(args)
    sequences, alphabet = _read_corpus(args)
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    table = transform_corpus(sequences, alphabet, config, jobs=jobs)
    _emit(features_csv_text(table), args.output)
    return 0


def cmd_graph(args) -> int:
    if args.threshold < 0:
        raise UsageError("--threshold must be non-negative")
    config = _build_config(args)
    sequences, alphabet = _read_corpus(args)
    matrix = transform(sequences[0], alphabet, config)
    _emit(dot_text(matrix, args.threshold), args.output)
    return 0


def cmd_cluster(args) -> int:
    if args.from_features and args.auto_search:
        raise UsageError("--auto-search needs a raw corpus, not a features table")
    if args.from_features:
        table = read_features_csv(args.input)
        if args.k is None:
            raise UsageError("--k is required when clustering a features table")
        chosen_k, chosen_kappa = args.k, args.kappa
    else:
        sequences, alphabet = _read_corpus(args)
        if args.auto_search:
            search = SearchConfig(
                nc_grid=_parse_grid(args.nc_grid, int),
                kappa_grid=_parse_grid(args.kappa_grid, float),
                seed=args.seed,
                kmeans_restarts=3,
            )
            result = random_search(sequences, alphabet, search, _build_config(args))
            chosen_k, chosen_kappa = result.nc, result.kappa
        else:
            if args.k is None:
                raise UsageError("either --k or --auto-search is required")
            chosen_k, chosen_kappa = args.k, args.kappa
        cfg = TransformConfig(
            kappa=chosen_kappa,
            normalization=Normalization(args.mode),
        )
        table = transform_corpus(sequences, alphabet, cfg)
    res = kmeans(table, chosen_k, seed=args.seed, restarts=3)
    db = davies_bouldin(table, res.assignment) if chosen_k >= 2 else float("nan")
    _emit(labels_csv_text(table.ids, (int(c) for c in res.assignment), header=("id", "cluster")), args.output)
    print(f"nc={chosen_k} kappa={chosen_kappa:g} db_index={db:.6g} iterations={res.iterations}")
    return 0


def cmd_alphabet_cluster(args) -> int:
    if args.k < 2:
        raise UsageError("--k must be at least 2")
    config = _build_config(args)
    sequences, alphabet = _read_corpus(args)
    table = transform_corpus(sequences, alphabet, config)
    size = alphabet.size
    aggregate = table.values.mean(axis=0).reshape(size, size)
    symmetric = (aggregate + aggregate.T) / 2.0
    labels = spectral_alphabet_clusters(symmetric, args.k, seed=args.seed)
    _emit(labels_csv_text(alphabet.tokens, (int(c) for c in labels), header=("token", "group")), args.output)
    return 0


def cmd_search(args) -> int:
    if args.top < 1:
        raise UsageError("--top must be at least 1")
    config = _build_config(args)
    sequences, alphabet = _read_corpus(args)
    queries, _ = read_sequences(args.query, fmt=args.format, delimiter=args.delimiter, alphabet=alphabet)
    table = transform_corpus(sequences, alphabet, config)
    query_vec = vectorize(transform(queries[0], alphabet, config))
    if args.pca:
        if args.pca < 1:
            raise UsageError("--pca must be at least 1")
        model = pca_fit(table, args.pca)
        table = pca_transform(model, table)
        query_vec = (query_vec - model.mean) @ model.components.T
    ranked = nn_search(query_vec, table, args.top)
    lines = ["id,distance"] + [f"{i},{d:.12g}" for i, d in ranked]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_classify(args) -> int:
    if args.knn < 1:
        raise UsageError("--knn must be at least 1")
    train = read_features_csv(args.train)
    ids, labels = read_labels_csv(args.labels)
    by_id = dict(zip(ids, labels))
    missing = [i for i in train.ids if i not in by_id]
    if missing:
        raise IngestionError(f"labels file is missing ids: {missing[:5]}")
    ordered = [by_id[i] for i in train.ids]
    queries = read_features_csv(args.queries)
    if len(queries.columns) != len(train.columns):
        raise IngestionError("query features and training features have different widths")
    predictions = [nn_classify(row, train, ordered, k=args.knn) for row in queries.values]
    _emit(labels_csv_text(queries.ids, predictions), args.output)
    return 0


def cmd_bench(args) -> int:
    seeds = range(args.seeds)
    rows = bench_mod.run_experiment(args.experiment, seeds)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.output)
    if args.dump_corpus:
        _dump_bench_corpus(args)
    return 0


def _dump_bench_corpus(args) -> None:
    from .synthetic import ClusterSpec, gen_bicluster_corpus, gen_clustered_corpus

    out = Path(args.dump_corpus)
    out.mkdir(parents=True, exist_ok=True)
    if args.experiment == "bicluster":
        spec = ClusterSpec(
            num_clusters=3,
            noise_range=(0.30, 0.50),
            length_mean=103.9,
            length_std=33.6,
            seed=0,
            alphabet_groups=bench_mod.BICLUSTER_GROUPS,
        )
        corpus = gen_bicluster_corpus(spec, 20)
    else:
        corpus = gen_clustered_corpus(ClusterSpec(num_clusters=5, seed=0), 15)
    lines = [",".join(corpus.alphabet.decode(s.events)) for s in corpus.sequences]
    (out / "corpus.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    text = labels_csv_text((s.id for s in corpus.sequences), (int(c) for c in corpus.labels))
    (out / "labels.csv").write_text(text, encoding="utf-8")


def cmd_oracle(args) -> int:
    rows = []
    for point in MEAN_VALIDATION_POINTS:
        reps = args.replicates or point.replicates
        est = monte_carlo_psi(point.params, point.mode, reps, seed=args.seed)
        closed = expected_psi(point.params, point.mode)
        gap = abs(closed - est.mean)
        rows.append(
            _oracle_row(point, reps, "mean", closed, est.mean, est.std_error, gap)
        )
    for point in VARIANCE_VALIDATION_POINTS:
        reps = args.var_replicates or point.replicates
        est = monte_carlo_psi(point.params, point.mode, reps, seed=args.seed)
        closed = variance_psi(point.params, point.mode)
        gap = abs(closed - est.variance)
        rows.append(
            _oracle_row(point, reps, "variance", closed, est.variance, est.std_error, gap)
        )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.output)
    return 0


def _oracle_row(point, reps, quantity, closed, estimate, std_error, gap):
    p = point.params
    return {
        "quantity": quantity,
        "kappa": p.kappa,
        "mu_short": p.mu_short,
        "sigma_short": p.sigma_short,
        "mu_long": p.mu_long,
        "sigma_long": p.sigma_long,
        "pair_density": p.pair_density,
        "length": p.length,
        "mode": point.mode.value,
        "replicates": reps,
        "closed_form": f"{closed:.10g}",
        "monte_carlo": f"{estimate:.10g}",
        "std_error": f"{std_error:.6g}",
        "abs_gap": f"{gap:.6g}",
    }


def build_parser() -> _Parser:
    parser = _Parser(prog="seqgraph", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("transform", help="corpus -> features CSV")
    _corpus_args(p)
    _config_args(p)
    p.add_argument("--jobs", type=int, default=0, help="worker processes; 0 = all cores")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_transform)

    p = subs.add_parser("graph", help="first sequence of a corpus -> DOT graph")
    _corpus_args(p)
    _config_args(p)
    p.add_argument("--threshold", type=float, default=0.0, help="minimum edge weight to keep")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_graph)

    p = subs.add_parser("cluster", help="corpus or features -> cluster assignments CSV")
    _corpus_args(p)
    _config_args(p)
    p.add_argument("--from-features", action="store_true", help="input is a features CSV")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--auto-search", action="store_true", help="search cluster count and kappa jointly")
    p.add_argument("--nc-grid", default="2,3,4,5,6,7,8")
    p.add_argument("--kappa-grid", default="1,5,10")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_cluster)

    p = subs.add_parser("alphabet-cluster", help="corpus -> token group labels")
    _corpus_args(p)
    _config_args(p)
    p.add_argument("--k", type=int, required=True, help="number of token groups")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_alphabet_cluster)

    p = subs.add_parser("search", help="rank corpus sequences by distance to a query")
    _corpus_args(p)
    _config_args(p)
    p.add_argument("--query", required=True, help="file holding the query sequence")
    p.add_argument("--pca", type=int, default=0, help="project to this many components first")
    p.add_argument("--top", type=int, default=5)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_search)

    p = subs.add_parser("classify", help="nearest-neighbour labels for query features")
    p.add_argument("--train", required=True, help="training features CSV")
    p.add_argument("--labels", required=True, help="training labels CSV (id,label)")
    p.add_argument("--queries", required=True, help="query features CSV")
    p.add_argument("--knn", type=int, default=1)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_classify)

    p = subs.add_parser("bench", help="run a synthetic evaluation and emit a results CSV")
    p.add_argument("--experiment", choices=["overlap", "lengths", "bicluster"], required=True)
    p.add_argument("--seeds", type=int, default=3, help="number of seeds (0..n-1)")
    p.add_argument("--dump-corpus", default=None, help="also write corpus.txt and labels.csv here")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_bench)

    p = subs.add_parser("oracle", help="closed-form vs Monte Carlo moment table")
    p.add_argument("--replicates", type=int, default=500, help="override mean-point replicates")
    p.add_argument("--var-replicates", type=int, default=500, help="override variance-point replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IngestionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
