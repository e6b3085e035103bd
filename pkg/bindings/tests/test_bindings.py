import csv
import subprocess
import sys

import numpy as np
import pytest

from seqgraph_arrays import fit_alphabet, pair_labels, transform_many


def fixture_corpus(n=50, seed=20):
    """Multi-character tokens so the CLI round-trip exercises the token format."""
    rng = np.random.default_rng(seed)
    vocab = [f"page{i}" for i in range(8)]
    corpus = []
    for _ in range(n):
        length = int(rng.integers(5, 60))
        corpus.append([vocab[int(k)] for k in rng.integers(0, len(vocab), length)])
    return corpus


class TestFitAlphabet:
    def test_sorted_union(self):
        t = fit_alphabet([["A", "B"], ["B", "C"]])
        assert t.tokens == ("A", "B", "C")

    def test_duplicates_collapse(self):
        t = fit_alphabet([["A", "A", "A"], ["A"]])
        assert t.tokens == ("A",)

    def test_order_stable_across_calls(self):
        corpus = [["d", "b"], ["a", "c"], ["b", "a"]]
        assert fit_alphabet(corpus).tokens == fit_alphabet(list(reversed(corpus))).tokens

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            fit_alphabet([])

    def test_bad_knobs_rejected_eagerly(self):
        with pytest.raises(ValueError):
            fit_alphabet([["A"]], kappa=-1.0)
        with pytest.raises(ValueError):
            fit_alphabet([["A"]], normalization="nope")


class TestTransformMany:
    def test_worked_example_cell(self):
        corpus = [list("CAADBACB")]
        t = fit_alphabet(corpus, kappa=1.0)
        out = transform_many(t, corpus)
        labels = pair_labels(t)
        assert out.shape == (1, 16)
        assert out[0, labels.index("A>B")] == pytest.approx(0.066, abs=5e-4)

    def test_empty_pair_columns_are_zero(self):
        corpus = [["x", "x", "y"]]
        t = fit_alphabet(corpus)
        out = transform_many(t, corpus)
        labels = pair_labels(t)
        assert out[0, labels.index("y>x")] == 0.0
        assert out[0, labels.index("y>y")] == 0.0

    def test_unknown_token_named_in_error(self):
        t = fit_alphabet([["a", "b"]])
        with pytest.raises(ValueError, match="zzz"):
            transform_many(t, [["a", "zzz"]])

    def test_row_order_follows_corpus(self):
        corpus = [["a", "b", "a"], ["b", "b", "a"]]
        t = fit_alphabet(corpus)
        fwd = transform_many(t, corpus)
        rev = transform_many(t, corpus[::-1])
        np.testing.assert_array_equal(fwd, rev[::-1])

    def test_reusable_transformer_is_immutable(self):
        t = fit_alphabet([["a", "b"]], kappa=2.0)
        with pytest.raises(AttributeError):
            t.kappa = 3.0  # type: ignore[misc]


class TestCliParity:
    @pytest.mark.parametrize("kappa,mode", [(1.0, "length-sensitive"), (2.0, "length-insensitive")])
    def test_matches_cli_csv(self, tmp_path, kappa, mode):
        corpus = fixture_corpus()
        corpus_path = tmp_path / "corpus.txt"
        corpus_path.write_text("\n".join(",".join(seq) for seq in corpus) + "\n", encoding="utf-8")
        out_path = tmp_path / "features.csv"
        proc = subprocess.run(
            [
                sys.executable, "-m", "seqgraph", "transform", str(corpus_path),
                "--format", "token", "--kappa", str(kappa), "--mode", mode,
                "-o", str(out_path),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr

        transformer = fit_alphabet(corpus, kappa=kappa, normalization=mode)
        ours = transform_many(transformer, corpus)

        with open(out_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        assert tuple(header[1:]) == pair_labels(transformer)
        cli_values = np.asarray([[float(x) for x in row[1:]] for row in rows])
        assert cli_values.shape == ours.shape == (50, 64)
        assert np.abs(cli_values - ours).max() <= 1e-10
        print(
            f"[acceptance] binding-parity(kappa={kappa}, {mode}): PASS "
            f"(max |diff|={np.abs(cli_values - ours).max():.2e} over {ours.size} cells)"
        )
