"""Complete deterministic finite automata and their algebra.

Every automaton is total: one transition per state and symbol.  That keeps
complementation a plain flip of the accepting set and makes product
constructions straightforward.  Canonical forms (minimize, drop unreachable
states, renumber breadth-first) make language equality a tuple comparison.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .words import Alphabet, PackedWords
from . import kernels


@dataclass(frozen=True)
class Dfa:
    """A complete DFA over an alphabet of ``n_symbols`` symbols.

    ``transitions[s][x]`` is the successor of state ``s`` on symbol code
    ``x``.  States are 0..n_states-1.
    """

    n_symbols: int
    transitions: tuple[tuple[int, ...], ...]
    initial: int
    accepting: frozenset[int]
    _trans_array: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        n = len(self.transitions)
        if not (0 <= self.initial < n):
            raise ValueError("initial state out of range")
        for row in self.transitions:
            if len(row) != self.n_symbols:
                raise ValueError("transition row width must equal alphabet size")
            if any(not 0 <= t < n for t in row):
                raise ValueError("transition target out of range")
        if any(not 0 <= s < n for s in self.accepting):
            raise ValueError("accepting state out of range")
        object.__setattr__(self, "_trans_array",
                           np.array(self.transitions, dtype=np.int64).reshape(n, self.n_symbols))

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def accepts_codes(self, codes) -> bool:
        state = self.initial
        for c in codes:
            state = self.transitions[state][c]
        return state in self.accepting

    def accepts(self, alphabet: Alphabet, word: str) -> bool:
        return self.accepts_codes(alphabet.codes(word))

    def accepts_batch(self, packed: PackedWords) -> np.ndarray:
        finals = kernels.dfa_final_states(self._trans_array, self.initial,
                                          packed.flat, packed.starts, packed.lengths)
        acc = np.zeros(self.n_states, dtype=bool)
        for s in self.accepting:
            acc[s] = True
        return acc[finals]

    # ------------------------------------------------------------------
    # algebra

    def complement(self) -> "Dfa":
        return Dfa(self.n_symbols, self.transitions, self.initial,
                   frozenset(range(self.n_states)) - self.accepting)

    def product(self, other: "Dfa", op) -> "Dfa":
        """Reachable product automaton; ``op`` combines acceptance bits."""
        if self.n_symbols != other.n_symbols:
            raise ValueError("alphabet size mismatch")
        b = self.n_symbols
        index = {(self.initial, other.initial): 0}
        order = [(self.initial, other.initial)]
        rows = []
        queue = deque(order)
        while queue:
            p, q = queue.popleft()
            row = []
            for x in range(b):
                nxt = (self.transitions[p][x], other.transitions[q][x])
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                row.append(index[nxt])
            rows.append(tuple(row))
        accepting = frozenset(i for i, (p, q) in enumerate(order)
                              if op(p in self.accepting, q in other.accepting))
        return Dfa(b, tuple(rows), 0, accepting)

    def union(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a or b)

    def intersection(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a and b)

    def left_mark(self, code: int) -> "Dfa":
        """Automaton for {x w | w accepted}, x the symbol with this code."""
        n = self.n_states
        # new initial = n, dead = n + 1; old states keep their numbers
        rows = [tuple(row) for row in self.transitions]
        dead = n + 1
        start_row = tuple(self.initial if x == code else dead for x in range(self.n_symbols))
        dead_row = tuple(dead for _ in range(self.n_symbols))
        rows.append(start_row)
        rows.append(dead_row)
        return Dfa(self.n_symbols, tuple(rows), n, self.accepting)

    def left_quotient(self, codes) -> "Dfa":
        state = self.initial
        for c in codes:
            state = self.transitions[state][c]
        return Dfa(self.n_symbols, self.transitions, state, self.accepting)

    # ------------------------------------------------------------------
    # canonical form

    def reachable(self) -> "Dfa":
        seen = {self.initial: 0}
        order = [self.initial]
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for x in range(self.n_symbols):
                t = self.transitions[s][x]
                if t not in seen:
                    seen[t] = len(order)
                    order.append(t)
                    queue.append(t)
        rows = tuple(tuple(seen[self.transitions[s][x]] for x in range(self.n_symbols))
                     for s in order)
        accepting = frozenset(seen[s] for s in self.accepting if s in seen)
        return Dfa(self.n_symbols, rows, 0, accepting)

    def minimize(self) -> "Dfa":
        """Moore partition refinement, then breadth-first renumbering.

        Equal languages always give the identical object, so language
        equality is ``a.minimize() == b.minimize()``.
        """
        m = self.reachable()
        n = m.n_states
        block = [1 if s in m.accepting else 0 for s in range(n)]
        while True:
            sig = {}
            new_block = [0] * n
            for s in range(n):
                key = (block[s],) + tuple(block[m.transitions[s][x]] for x in range(m.n_symbols))
                if key not in sig:
                    sig[key] = len(sig)
                new_block[s] = sig[key]
            if new_block == block:
                break
            block = new_block
        n_blocks = max(block) + 1
        rep_trans = [None] * n_blocks
        for s in range(n):
            if rep_trans[block[s]] is None:
                rep_trans[block[s]] = tuple(block[m.transitions[s][x]] for x in range(m.n_symbols))
        # breadth-first renumbering from the initial block
        renum = {block[m.initial]: 0}
        order = [block[m.initial]]
        queue = deque(order)
        while queue:
            bks = queue.popleft()
            for x in range(m.n_symbols):
                t = rep_trans[bks][x]
                if t not in renum:
                    renum[t] = len(order)
                    order.append(t)
                    queue.append(t)
        rows = tuple(tuple(renum[rep_trans[bk][x]] for x in range(m.n_symbols)) for bk in order)
        accepting = frozenset(renum[block[s]] for s in m.accepting)
        return Dfa(m.n_symbols, rows, 0, accepting)

    def canonical_key(self) -> tuple:
        m = self.minimize()
        return (m.n_symbols, m.transitions, tuple(sorted(m.accepting)))

    def same_language(self, other: "Dfa") -> bool:
        return self.canonical_key() == other.canonical_key()

    # ------------------------------------------------------------------
    # decision procedures

    def _useful_states(self) -> set[int]:
        """States reachable from the initial and co-reachable to acceptance."""
        reach = {self.initial}
        queue = deque(reach)
        while queue:
            s = queue.popleft()
            for x in range(self.n_symbols):
                t = self.transitions[s][x]
                if t not in reach:
                    reach.add(t)
                    queue.append(t)
        back: dict[int, set[int]] = {s: set() for s in range(self.n_states)}
        for s in range(self.n_states):
            for x in range(self.n_symbols):
                back[self.transitions[s][x]].add(s)
        co = set(self.accepting)
        queue = deque(co)
        while queue:
            s = queue.popleft()
            for p in back[s]:
                if p not in co:
                    co.add(p)
                    queue.append(p)
        return reach & co

    def is_empty(self) -> bool:
        return not self._useful_states()

    def count_accepted(self) -> int | None:
        """Number of accepted words, or None when the language is infinite."""
        useful = self._useful_states()
        if not useful:
            return 0
        # cycle detection restricted to useful states
        color = {s: 0 for s in useful}

        def has_cycle(s):
            color[s] = 1
            for x in range(self.n_symbols):
                t = self.transitions[s][x]
                if t in useful:
                    if color[t] == 1:
                        return True
                    if color[t] == 0 and has_cycle(t):
                        return True
            color[s] = 2
            return False

        if self.initial in useful and has_cycle(self.initial):
            return None
        for s in useful:
            if color[s] == 0 and has_cycle(s):
                return None
        # acyclic useful subgraph: count accepting paths from the initial
        memo: dict[int, int] = {}

        def paths(s):
            if s in memo:
                return memo[s]
            total = 1 if s in self.accepting else 0
            for x in range(self.n_symbols):
                t = self.transitions[s][x]
                if t in useful:
                    total += paths(t)
            memo[s] = total
            return total

        return paths(self.initial) if self.initial in useful else 0

    def pumping_witness(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] | None:
        """A decomposition (u, v, w) of symbol codes with u v^i w accepted
        for every i >= 0, or None when the language is finite."""
        useful = self._useful_states()
        if not useful:
            return None
        # find a useful state on a cycle within the useful subgraph
        path_to: dict[int, tuple[int, ...]] = {self.initial: ()}
        order = [self.initial]
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for x in range(self.n_symbols):
                t = self.transitions[s][x]
                if t in useful and t not in path_to:
                    path_to[t] = path_to[s] + (x,)
                    queue.append(t)
        for s in sorted(path_to, key=lambda q: len(path_to[q])):
            # BFS within useful states for a loop s -> s
            seen = {s: ()}
            queue = deque([s])
            loop = None
            while queue and loop is None:
                p = queue.popleft()
                for x in range(self.n_symbols):
                    t = self.transitions[p][x]
                    if t not in useful:
                        continue
                    if t == s:
                        loop = seen[p] + (x,)
                        break
                    if t not in seen:
                        seen[t] = seen[p] + (x,)
                        queue.append(t)
            if loop is None:
                continue
            # path from s to an accepting state
            seen2 = {s: ()}
            queue = deque([s])
            while queue:
                p = queue.popleft()
                if p in self.accepting:
                    return path_to[s], loop, seen2[p]
                for x in range(self.n_symbols):
                    t = self.transitions[p][x]
                    if t in useful and t not in seen2:
                        seen2[t] = seen2[p] + (x,)
                        queue.append(t)
        return None

    def least_accepted(self) -> tuple[int, ...] | None:
        """Code sequence of the length-lex least accepted word, if any."""
        if self.initial in self.accepting:
            return ()
        seen = {self.initial}
        frontier = [(self.initial, ())]
        while frontier:
            nxt = []
            for state, codes in frontier:
                for x in range(self.n_symbols):
                    t = self.transitions[state][x]
                    if t in self.accepting:
                        return codes + (x,)
                    if t not in seen:
                        seen.add(t)
                        nxt.append((t, codes + (x,)))
            frontier = nxt
        return None

    # ------------------------------------------------------------------
    # serialization

    def to_json(self) -> dict:
        return {
            "states": self.n_states,
            "initial": self.initial,
            "transitions": [list(row) for row in self.transitions],
            "accepting": sorted(self.accepting),
        }

    @classmethod
    def from_json(cls, data: dict, n_symbols: int) -> "Dfa":
        rows = tuple(tuple(int(t) for t in row) for row in data["transitions"])
        if len(rows) != int(data["states"]):
            raise ValueError("state count does not match transition table")
        return cls(n_symbols, rows, int(data["initial"]),
                   frozenset(int(s) for s in data["accepting"]))


@lru_cache(maxsize=None)
def empty_dfa(n_symbols: int) -> Dfa:
    return Dfa(n_symbols, ((0,) * n_symbols,), 0, frozenset())


@lru_cache(maxsize=None)
def full_dfa(n_symbols: int) -> Dfa:
    return Dfa(n_symbols, ((0,) * n_symbols,), 0, frozenset({0}))


def dfa_for_finite(n_symbols: int, code_words: tuple[tuple[int, ...], ...]) -> Dfa:
    """Trie-shaped DFA accepting exactly the listed code sequences."""
    children: list[dict[int, int]] = [{}]
    accept: set[int] = set()
    for codes in code_words:
        node = 0
        for c in codes:
            if c not in children[node]:
                children.append({})
                children[node][c] = len(children) - 1
            node = children[node][c]
        accept.add(node)
    dead = len(children)
    rows = [tuple(kids.get(x, dead) for x in range(n_symbols)) for kids in children]
    rows.append(tuple(dead for _ in range(n_symbols)))
    return Dfa(n_symbols, tuple(rows), 0, frozenset(accept))


def dfa_word_starts_with(n_symbols: int, code: int) -> Dfa:
    """Automaton for the words whose first symbol has the given code."""
    # states: 0 initial, 1 accept-sink, 2 dead
    rows = (
        tuple(1 if x == code else 2 for x in range(n_symbols)),
        tuple(1 for _ in range(n_symbols)),
        tuple(2 for _ in range(n_symbols)),
    )
    return Dfa(n_symbols, rows, 0, frozenset({1}))


def dfa_length_equals(n_symbols: int, length: int) -> Dfa:
    """Automaton for {w : |w| = length}."""
    # states 0..length count, length+1 is overflow
    rows = []
    for s in range(length + 1):
        nxt = s + 1 if s < length else length + 1
        rows.append(tuple(nxt for _ in range(n_symbols)))
    rows.append(tuple(length + 1 for _ in range(n_symbols)))
    return Dfa(n_symbols, tuple(rows), 0, frozenset({length}))
