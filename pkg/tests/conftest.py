import random

import pytest
from hypothesis import strategies as st

from bugexplain.automata import Dfa, Label, ThreeDfa
from bugexplain.fixtures import example_edfe, running_example, example_fe


@pytest.fixture
def example():
    return running_example()


@pytest.fixture
def unr(example):
    return example.scenario("unr")


@pytest.fixture
def fe3():
    return example_fe()


@pytest.fixture
def edfe4():
    return example_edfe()


@st.composite
def dfas(draw, alphabet=("a", "b"), max_states=5):
    n = draw(st.integers(1, max_states))
    rows = [[draw(st.integers(0, n - 1)) for _ in alphabet] for _ in range(n)]
    acc = {q for q in range(n) if draw(st.booleans())}
    return Dfa(alphabet, 0, rows, acc)


@st.composite
def three_dfas(draw, alphabet=("a", "b"), max_states=6):
    n = draw(st.integers(1, max_states))
    rows = [[draw(st.integers(0, n - 1)) for _ in alphabet] for _ in range(n)]
    labels = [draw(st.sampled_from(list(Label))) for _ in range(n)]
    return ThreeDfa(alphabet, 0, rows, labels)


def random_words(alphabet, count, max_len, seed=0):
    rng = random.Random(seed)
    return [tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))
            for _ in range(count)]
