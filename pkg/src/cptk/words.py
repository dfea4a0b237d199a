"""Length-lexicographic word order: comparison, successor, ranking and unranking.

Words are plain Python strings over a declared :class:`Alphabet`.  The empty
string is the first word.  Ranks are 0-based: ``lex(0) == ""``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LT, EQ, GT = -1, 0, 1


class AlphabetMismatch(ValueError):
    """A word contains symbols outside the declared alphabet."""


@dataclass(frozen=True)
class Alphabet:
    """An ordered finite alphabet.

    Symbol order is declaration order unless an explicit permutation is
    given, and it is the order used everywhere: comparisons, ranking and
    the canonical enumeration of automata.
    """

    symbols: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if any(len(s) != 1 for s in self.symbols):
            raise ValueError("alphabet symbols must be single characters")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @classmethod
    def parse(cls, spec: str, order: str | None = None) -> "Alphabet":
        """Build from a symbol string, optionally reordered by ``order``."""
        syms = tuple(spec)
        if order is not None:
            if sorted(order) != sorted(spec):
                raise ValueError("order must be a permutation of the alphabet")
            syms = tuple(order)
        return cls(syms)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def code(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise AlphabetMismatch(f"symbol {symbol!r} not in alphabet {''.join(self.symbols)!r}") from None

    def codes(self, word: str) -> tuple[int, ...]:
        return tuple(self.code(s) for s in word)

    def word(self, codes) -> str:
        return "".join(self.symbols[c] for c in codes)

    def check(self, word: str) -> str:
        for s in word:
            if s not in self._index:
                raise AlphabetMismatch(f"symbol {s!r} not in alphabet {''.join(self.symbols)!r}")
        return word

    def __str__(self) -> str:
        return "".join(self.symbols)


def compare(alphabet: Alphabet, w: str, v: str) -> int:
    """Length-lexicographic comparison; returns LT, EQ or GT."""
    alphabet.check(w)
    alphabet.check(v)
    if len(w) != len(v):
        return LT if len(w) < len(v) else GT
    for x, y in zip(w, v):
        cx, cy = alphabet.code(x), alphabet.code(y)
        if cx != cy:
            return LT if cx < cy else GT
    return EQ


def succ(alphabet: Alphabet, w: str) -> str:
    """The next word in length-lexicographic order (odometer with carry)."""
    alphabet.check(w)
    b = alphabet.size
    codes = list(alphabet.codes(w))
    for i in range(len(codes) - 1, -1, -1):
        if codes[i] + 1 < b:
            codes[i] += 1
            return alphabet.word(codes)
        codes[i] = 0
    # all positions carried: next word is one longer, all first-symbol
    return alphabet.symbols[0] * (len(w) + 1)


def lex(alphabet: Alphabet, i: int) -> str:
    """The i-th word (0-based) in length-lexicographic order."""
    if i < 0:
        raise ValueError("rank must be nonnegative")
    b = alphabet.size
    if b == 1:
        return alphabet.symbols[0] * i
    # peel off full length blocks of size b**length
    length, block = 0, 1
    while i >= block:
        i -= block
        length += 1
        block *= b
    codes = []
    for _ in range(length):
        block //= b
        codes.append(i // block)
        i %= block
    return alphabet.word(codes)


def ord_(alphabet: Alphabet, w: str) -> int:
    """Rank of a word: inverse of :func:`lex` (closed form, O(len))."""
    alphabet.check(w)
    b = alphabet.size
    if b == 1:
        return len(w)
    # number of shorter words, plus the base-b positional value
    before = (b ** len(w) - 1) // (b - 1)
    value = 0
    for s in w:
        value = value * b + alphabet.code(s)
    return before + value


def words_up_to(alphabet: Alphabet, count: int):
    """Yield the first ``count`` words in order."""
    w = ""
    for _ in range(count):
        yield w
        w = succ(alphabet, w)


@dataclass(frozen=True, eq=False)
class PackedWords:
    """A batch of words packed for vector evaluation.

    ``flat`` holds symbol codes of all words back to back; word ``i``
    occupies ``flat[starts[i]:starts[i] + lengths[i]]``.  Views built by
    the evaluator (suffixes, prefixed copies) share ``flat`` buffers.
    Identity-hashed: evaluation caches key on the batch object itself.
    """

    alphabet: Alphabet
    flat: np.ndarray     # int16 symbol codes
    starts: np.ndarray   # int64, one per word
    lengths: np.ndarray  # int64, one per word

    def __post_init__(self):
        if len(self.starts) != len(self.lengths):
            raise ValueError("starts and lengths must have equal length")

    def __len__(self) -> int:
        return len(self.starts)

    def word(self, i: int) -> str:
        s, n = int(self.starts[i]), int(self.lengths[i])
        return self.alphabet.word(self.flat[s:s + n])

    def suffixes(self, mask: np.ndarray) -> "PackedWords":
        """Drop the first symbol of the selected words (all must be nonempty)."""
        return PackedWords(self.alphabet, self.flat,
                           self.starts[mask] + 1, self.lengths[mask] - 1)

    def prefixed(self, codes: tuple[int, ...]) -> "PackedWords":
        """A new batch whose i-th word is ``codes`` prepended to word i."""
        k = len(codes)
        n = len(self)
        if k == 0:
            return self
        new_lengths = self.lengths + k
        new_starts = np.zeros(n, dtype=np.int64)
        np.cumsum(new_lengths[:-1], out=new_starts[1:])
        total = int(new_starts[-1] + new_lengths[-1]) if n else 0
        flat = np.empty(total, dtype=np.int16)
        word_id = np.repeat(np.arange(n, dtype=np.int64), new_lengths)
        pos = np.arange(total, dtype=np.int64) - new_starts[word_id]
        head = pos < k
        prefix = np.asarray(codes, dtype=np.int16)
        flat[head] = prefix[pos[head]]
        tail = ~head
        flat[tail] = self.flat[self.starts[word_id[tail]] + pos[tail] - k]
        return PackedWords(self.alphabet, flat, new_starts, new_lengths)


def pack_words(alphabet: Alphabet, words) -> PackedWords:
    """Pack an explicit list of words."""
    code_rows = [np.array(alphabet.codes(w), dtype=np.int16) for w in words]
    lengths = np.array([len(r) for r in code_rows], dtype=np.int64)
    starts = np.zeros(len(code_rows), dtype=np.int64)
    if len(code_rows):
        np.cumsum(lengths[:-1], out=starts[1:])
    flat = np.concatenate(code_rows) if code_rows else np.empty(0, dtype=np.int16)
    return PackedWords(alphabet, flat.astype(np.int16), starts, lengths)


def window(alphabet: Alphabet, count: int) -> PackedWords:
    """Pack the first ``count`` words lex(0..count-1), built blockwise."""
    b = alphabet.size
    seg_flats, seg_lengths = [], []
    remaining, length = count, 0
    block = 1
    while remaining > 0:
        take = min(block, remaining)
        if length > 0:
            vals = np.arange(take, dtype=np.int64)
            powers = b ** np.arange(length - 1, -1, -1, dtype=np.int64)
            digits = (vals[:, None] // powers[None, :]) % b
            seg_flats.append(digits.astype(np.int16).ravel())
        seg_lengths.append(np.full(take, length, dtype=np.int64))
        remaining -= take
        length += 1
        block *= b
    lengths = np.concatenate(seg_lengths) if seg_lengths else np.empty(0, dtype=np.int64)
    flat = np.concatenate(seg_flats) if seg_flats else np.empty(0, dtype=np.int16)
    starts = np.zeros(len(lengths), dtype=np.int64)
    if len(lengths):
        np.cumsum(lengths[:-1], out=starts[1:])
    return PackedWords(alphabet, flat, starts, lengths)


def window_for_horizon(alphabet: Alphabet, horizon: int) -> PackedWords:
    """Pack lex(0..horizon) inclusive."""
    return window(alphabet, horizon + 1)
