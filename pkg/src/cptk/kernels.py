"""Batch kernels behind the vector evaluator.

Two interchangeable backends compute the same arrays:

* ``numba`` (default): tight @njit loops over the packed symbol buffer.
* ``numpy``: position-stepping vector code, no compilation.

Selection: the ``CPTK_BACKEND`` environment variable (``numba`` or
``numpy``) read at import, or :func:`set_backend` at runtime.  Results are
bit-identical between backends; ``benchmarks/bench_backends.py`` compares
their speed.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn
        return deco(args[0]) if args and callable(args[0]) else deco


@njit(cache=True, nogil=True)
def _dfa_final_states_numba(trans, initial, flat, starts, lengths, out):  # pragma: no cover - jitted
    b = trans.shape[1]
    for i in range(starts.shape[0]):
        state = initial
        s = starts[i]
        for p in range(lengths[i]):
            state = trans[state, flat[s + p]]
        out[i] = state


def _dfa_final_states_numpy(trans, initial, flat, starts, lengths, out):
    n = len(starts)
    out[:] = initial
    if n == 0:
        return
    maxlen = int(lengths.max()) if n else 0
    active = lengths > 0
    for p in range(maxlen):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        syms = flat[starts[idx] + p].astype(np.int64)
        out[idx] = trans[out[idx], syms]
        active[idx] = lengths[idx] > p + 1


_BACKENDS = {"numpy": _dfa_final_states_numpy}
if HAVE_NUMBA:
    _BACKENDS["numba"] = _dfa_final_states_numba

_current = os.environ.get("CPTK_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
if _current not in _BACKENDS:
    _current = "numpy"


def backend_name() -> str:
    return _current


def set_backend(name: str) -> None:
    global _current
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")
    _current = name


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def dfa_final_states(trans: np.ndarray, initial: int, flat: np.ndarray,
                     starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Final DFA state per packed word."""
    out = np.empty(len(starts), dtype=np.int64)
    trans = np.ascontiguousarray(trans, dtype=np.int64)
    flat = np.ascontiguousarray(flat, dtype=np.int16)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    _BACKENDS[_current](trans, initial, flat, starts, lengths, out)
    return out


def symbol_counts(flat: np.ndarray, starts: np.ndarray, lengths: np.ndarray,
                  code: int) -> np.ndarray:
    """Occurrences of one symbol code per packed word (safe on empty words)."""
    marks = (flat == code).astype(np.int64)
    csum = np.concatenate(([0], np.cumsum(marks)))
    return csum[starts + lengths] - csum[starts]
