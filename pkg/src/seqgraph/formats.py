"""Corpus ingestion, CSV feature export, labels IO and DOT graph export."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .alphabet import AlphabetIndex, Sequence
from .errors import IngestionError
from .transform import AssociationMatrix, Directionality, FeatureTable

CSV_FLOAT_FORMAT = "{:.12g}"  # 12 significant digits keeps round-trips under 1e-10


class CorpusFormat(Enum):
    CHAR = "char"    # one sequence per line, one character per event
    TOKEN = "token"  # one sequence per line, events split on a delimiter
    FASTA = "fasta"  # '>'-headed records, body lines concatenated


def _as_format(fmt: CorpusFormat | str) -> CorpusFormat:
    return fmt if isinstance(fmt, CorpusFormat) else CorpusFormat(fmt)


def _open_text(source, mode: str = "r"):
    if isinstance(source, (str, Path)):
        return open(source, mode, encoding="utf-8"), True
    return source, False


def _parse_char_lines(text: TextIO):
    for lineno, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line:
            continue
        yield str(lineno), list(line)


def _parse_token_lines(text: TextIO, delimiter: str):
    for lineno, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line:
            continue
        yield str(lineno), [t for t in line.split(delimiter) if t]


def _parse_fasta(text: TextIO):
    header: str | None = None
    body: list[str] = []

    def flush():
        if header is None:
            return None
        if not body:
            raise IngestionError(f"sequence {header!r}: FASTA record has no residues", sequence_id=header)
        return header, body

    for raw in text:
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            rec = flush()
            if rec:
                yield rec
            header = line[1:].strip()
            body = []
        else:
            if header is None:
                raise IngestionError("FASTA body found before any '>' header")
            for ch in line:
                if not ch.isalpha():
                    raise IngestionError(
                        f"sequence {header!r}: non-residue character {ch!r}",
                        sequence_id=header,
                        token=ch,
                    )
                body.append(ch.upper())
    rec = flush()
    if rec:
        yield rec


def read_sequences(
    source,
    fmt: CorpusFormat | str = CorpusFormat.CHAR,
    delimiter: str = ",",
    alphabet: AlphabetIndex | None = None,
) -> tuple[list[Sequence], AlphabetIndex]:
    """Read a corpus and return encoded sequences plus the alphabet used.

    Without an explicit alphabet, the index is the sorted union of observed
    tokens. With one, any token outside it is an ingestion error naming the
    sequence and the token: silently re-indexing would corrupt the length
    accounting of downstream features.
    """
    fmt = _as_format(fmt)
    text, owned = _open_text(source)
    try:
        if fmt is CorpusFormat.CHAR:
            records = list(_parse_char_lines(text))
        elif fmt is CorpusFormat.TOKEN:
            records = list(_parse_token_lines(text, delimiter))
        else:
            records = list(_parse_fasta(text))
    finally:
        if owned:
            text.close()
    records = [(sid, toks) for sid, toks in records if toks]
    if not records:
        raise ValueError("no sequences found in input")
    if alphabet is None:
        alphabet = AlphabetIndex.from_observed(toks for _, toks in records)
    sequences = [Sequence.from_tokens(sid, toks, alphabet) for sid, toks in records]
    return sequences, alphabet


def read_alphabet_file(source) -> AlphabetIndex:
    """One token per line, order preserved."""
    text, owned = _open_text(source)
    try:
        tokens = [line.strip() for line in text if line.strip()]
    finally:
        if owned:
            text.close()
    return AlphabetIndex(tuple(tokens))


def _format_value(v: float) -> str:
    return CSV_FLOAT_FORMAT.format(v)


def features_csv_text(table: FeatureTable) -> str:
    lines = ["id," + ",".join(table.columns)]
    for row_id, row in zip(table.ids, table.values):
        lines.append(row_id + "," + ",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_features_csv(table: FeatureTable, dest) -> None:
    _write_text(features_csv_text(table), dest)


def read_features_csv(source) -> FeatureTable:
    text, owned = _open_text(source)
    try:
        lines = [line.rstrip("\n") for line in text if line.strip()]
    finally:
        if owned:
            text.close()
    if not lines:
        raise ValueError("empty features file")
    header = lines[0].split(",")
    if header[0] != "id":
        raise ValueError("features file must start with an 'id' column")
    columns = tuple(header[1:])
    ids = []
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        ids.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    return FeatureTable(values=np.asarray(rows, dtype=np.float64), ids=tuple(ids), columns=columns)


def labels_csv_text(ids: Iterable[str], labels: Iterable, header: tuple[str, str] = ("id", "label")) -> str:
    lines = [",".join(header)]
    lines.extend(f"{i},{l}" for i, l in zip(ids, labels))
    return "\n".join(lines) + "\n"


def write_labels_csv(ids, labels, dest, header: tuple[str, str] = ("id", "label")) -> None:
    _write_text(labels_csv_text(ids, labels, header), dest)


def read_labels_csv(source) -> tuple[list[str], list[str]]:
    text, owned = _open_text(source)
    try:
        lines = [line.strip() for line in text if line.strip()]
    finally:
        if owned:
            text.close()
    if not lines:
        raise ValueError("empty labels file")
    ids, labels = [], []
    for line in lines[1:]:
        i, _, l = line.partition(",")
        ids.append(i)
        labels.append(l)
    return ids, labels


def dot_text(matrix: AssociationMatrix, threshold: float = 0.0) -> str:
    """Render the association matrix as a DOT graph.

    Edges are emitted for occupied cells with weight >= threshold; nodes
    appear only when they touch a retained edge. Symmetric (undirected)
    matrices emit each unordered pair once with '--' edges.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    undirected = matrix.directionality is not Directionality.DIRECTED
    tokens = matrix.alphabet.tokens
    values = matrix.values
    edges = []
    for u in range(len(tokens)):
        vstart = u if undirected else 0
        for v in range(vstart, len(tokens)):
            w = float(values[u, v])
            if w > 0.0 and w >= threshold:
                edges.append((tokens[u], tokens[v], w))
    wmax = max((w for _, _, w in edges), default=1.0)
    used = sorted({t for u, v, _ in edges for t in (u, v)}, key=tokens.index)
    kind, arrow = ("graph", "--") if undirected else ("digraph", "->")
    lines = [f"{kind} associations {{", "  rankdir=LR;"]
    for tok in used:
        lines.append(f'  "{tok}";')
    for u, v, w in edges:
        pen = 0.5 + 4.0 * w / wmax
        lines.append(f'  "{u}" {arrow} "{v}" [weight={w:.6g}, penwidth={pen:.3g}, label="{w:.4g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(matrix: AssociationMatrix, threshold: float, dest) -> None:
    _write_text(dot_text(matrix, threshold), dest)


def _write_text(text: str, dest) -> None:
    # render first, write once: a failed computation never leaves partial files
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)
