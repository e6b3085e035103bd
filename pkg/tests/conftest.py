import numpy as np
import pytest

from seqgraph import AlphabetIndex, Sequence


@pytest.fixture
def worked_example():
    """Sequence with the canonical A/B layout: A at positions 2, 3, 6 and B at 5, 8."""
    alphabet = AlphabetIndex(tuple("ABCD"))
    seq = Sequence.from_tokens("worked", "CAADBACB", alphabet)
    return seq, alphabet


@pytest.fixture
def abab():
    alphabet = AlphabetIndex(("A", "B"))
    return Sequence.from_tokens("abab", "ABAB", alphabet), alphabet


def random_sequence(rng: np.random.Generator, max_len=400, max_tokens=20):
    length = int(rng.integers(1, max_len))
    n_tokens = int(rng.integers(1, max_tokens))
    alphabet = AlphabetIndex(tuple(f"t{i:02d}" for i in range(n_tokens)))
    return Sequence("rnd", rng.integers(0, n_tokens, length)), alphabet
