import itertools

import numpy as np
import pytest

from cptk.dfa import Dfa
from cptk.families import regular_family
from cptk.langs import (Complement, DfaAtom, FiniteSet, Inter, LeftMark,
                        LeftQuotient, Predicate, Union)
from cptk.words import Alphabet


@pytest.fixture(scope="session")
def ab():
    return Alphabet.parse("ab")


@pytest.fixture(scope="session")
def abc():
    return Alphabet.parse("abc")


@pytest.fixture(scope="session")
def reg_ab(ab):
    return regular_family(ab)


@pytest.fixture(scope="session")
def reg_abc(abc):
    return regular_family(abc)


def brute_words(alphabet: Alphabet, count: int) -> list[str]:
    """Independent word enumeration: lengths ascending, symbols by product."""
    out = []
    length = 0
    while len(out) < count:
        for tup in itertools.product(alphabet.symbols, repeat=length):
            out.append("".join(tup))
            if len(out) == count:
                break
        length += 1
    return out


def random_dfa(rng: np.random.Generator, n_symbols: int, max_states: int = 4) -> Dfa:
    n = int(rng.integers(1, max_states + 1))
    rows = tuple(tuple(int(rng.integers(0, n)) for _ in range(n_symbols))
                 for _ in range(n))
    accepting = frozenset(s for s in range(n) if rng.random() < 0.5)
    return Dfa(n_symbols, rows, 0, accepting)


def random_regular_expr(rng: np.random.Generator, alphabet: Alphabet, depth: int = 3):
    """Random expression over regular leaves only."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.4:
            count = int(rng.integers(0, 4))
            words = [
                "".join(rng.choice(list(alphabet.symbols), size=int(rng.integers(0, 4))))
                for _ in range(count)
            ]
            return FiniteSet(tuple(words))
        return DfaAtom(random_dfa(rng, alphabet.size))
    roll = rng.random()
    if roll < 0.25:
        return Union(tuple(random_regular_expr(rng, alphabet, depth - 1)
                           for _ in range(int(rng.integers(1, 3)))))
    if roll < 0.5:
        return Inter(tuple(random_regular_expr(rng, alphabet, depth - 1)
                           for _ in range(int(rng.integers(1, 3)))))
    if roll < 0.7:
        return Complement(random_regular_expr(rng, alphabet, depth - 1))
    if roll < 0.85:
        sym = str(rng.choice(list(alphabet.symbols)))
        return LeftMark(sym, random_regular_expr(rng, alphabet, depth - 1))
    word = "".join(rng.choice(list(alphabet.symbols), size=int(rng.integers(1, 3))))
    return LeftQuotient(word, random_regular_expr(rng, alphabet, depth - 1))


def random_mixed_expr(rng: np.random.Generator, alphabet: Alphabet, depth: int = 3):
    """Random expression that may contain opaque predicate leaves."""
    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.3:
            names = ["square-length", "prime-length"]
            if {"a", "b"}.issubset(alphabet.symbols):
                names.append("equal-counts-ab")
            return Predicate(str(rng.choice(names)))
        return random_regular_expr(rng, alphabet, 0)
    roll = rng.random()
    if roll < 0.3:
        return Union(tuple(random_mixed_expr(rng, alphabet, depth - 1)
                           for _ in range(int(rng.integers(1, 3)))))
    if roll < 0.6:
        return Inter(tuple(random_mixed_expr(rng, alphabet, depth - 1)
                           for _ in range(int(rng.integers(1, 3)))))
    if roll < 0.8:
        return Complement(random_mixed_expr(rng, alphabet, depth - 1))
    sym = str(rng.choice(list(alphabet.symbols)))
    return LeftMark(sym, random_mixed_expr(rng, alphabet, depth - 1))
