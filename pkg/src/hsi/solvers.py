"""Exhaustive ground-truth oracles for desk-scale instances.

Counting is exact: every k-subset is tested, in colex order, by OR-ing the
precomputed closed-neighborhood bitmasks of its members and comparing against
the all-vertices mask.  Subsets are scanned in fixed-size blocks through
numpy; blocks are processed in colex order so witness selection (lowest colex
rank first) and early exit are deterministic.  A `count_cap` turns the scan
into a capped search (existence, uniqueness-vs-2) that still reports how many
subsets were examined; without it the count path never prunes.

The budget guard is expressed in subsets, not seconds, so refusals are
reproducible.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .hypergraph import Hypergraph, as_vertex_set

DEFAULT_BUDGET = 10**9
_CHUNK_ROWS = 1 << 17
_MATERIALIZE_CAP = 5_000_000  # colex tables above this stream instead of caching


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} subsets, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one exhaustive scan."""

    k: int
    count: int
    witnesses: tuple[tuple[int, ...], ...]
    unique: bool
    subsets_examined: int
    elapsed: float
    capped: bool = False
    missed_vertices: Optional[tuple[int, ...]] = None


@lru_cache(maxsize=8)
def _colex_table(n: int, k: int) -> np.ndarray:
    total = math.comb(n, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int16, count=total * k,
    )
    lex = flat.reshape(total, k)
    return lex[np.lexsort(lex.T)]  # primary key = last column: colex order


def _iter_colex_chunks(n: int, k: int, chunk_rows: int):
    total = math.comb(n, k)
    if total <= _MATERIALIZE_CAP:
        table = _colex_table(n, k)
        for start in range(0, total, chunk_rows):
            yield table[start:start + chunk_rows]
        return
    # streaming colex successor; only exercised on very large scans
    cur = list(range(k))
    remaining = total
    while remaining > 0:
        rows = min(chunk_rows, remaining)
        buf = np.empty((rows, k), dtype=np.int16)
        for r in range(rows):
            buf[r] = cur
            for j in range(k):
                nxt = cur[j] + 1
                if (j + 1 == k and nxt < n) or (j + 1 < k and nxt < cur[j + 1]):
                    cur[j] = nxt
                    cur[:j] = range(j)
                    break
        remaining -= rows
        yield buf


def _packed_masks(g: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    words = max(1, (g.n + 63) // 64)
    packed = np.zeros((g.n, words), dtype=np.uint64)
    for v, mask in enumerate(g.neighborhood_masks):
        for w in range(words):
            packed[v, w] = (mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    full = np.zeros(words, dtype=np.uint64)
    fm = g.full_mask
    for w in range(words):
        full[w] = (fm >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return packed, full


def _missed_vertex(union_row: np.ndarray, full: np.ndarray) -> int:
    for w, (u, f) in enumerate(zip(union_row, full)):
        gap = int(u) ^ int(f)
        if gap:
            return 64 * w + gap.bit_length() - 1
    raise AssertionError("no missed vertex in a quasi row")


def _scan(g: Hypergraph, k: int, witness_cap: int, budget: int,
          count_cap: Optional[int], quasi: bool) -> SolveReport:
    if not 1 <= k <= g.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={g.n}")
    total = math.comb(g.n, k)
    if total > budget:
        raise BudgetExceeded(required=total, budget=budget)
    if count_cap is not None and count_cap < 1:
        raise ValueError(f"count_cap must be >= 1, got {count_cap}")

    t0 = time.perf_counter()
    packed, full = _packed_masks(g)
    single_word = packed.shape[1] == 1
    if single_word:
        flat, full_word = packed[:, 0], full[0]
    count = 0
    examined = 0
    capped = False
    witnesses: list[tuple[int, ...]] = []
    missed: list[int] = []

    for rows in _iter_colex_chunks(g.n, k, _CHUNK_ROWS):
        if single_word:
            union_w = flat[rows[:, 0]]
            for j in range(1, k):
                union_w = union_w | flat[rows[:, j]]
            if quasi:
                hits = np.bitwise_count(union_w ^ full_word) == 1
            else:
                hits = union_w == full_word
            union = union_w[:, np.newaxis]
        else:
            union = np.bitwise_or.reduce(packed[rows], axis=1)
            if quasi:
                gap = union ^ full[np.newaxis, :]
                hits = np.bitwise_count(gap).sum(axis=1) == 1
            else:
                hits = (union == full[np.newaxis, :]).all(axis=1)
        idx = np.flatnonzero(hits)
        chunk_hits = int(idx.size)

        if count_cap is not None and count + chunk_hits >= count_cap:
            stop_at = int(idx[count_cap - count - 1])
            idx = idx[:count_cap - count]
            count = count_cap
            examined += stop_at + 1
            capped = True
        else:
            count += chunk_hits
            examined += len(rows)

        for j in idx:
            if len(witnesses) < witness_cap:
                witnesses.append(tuple(int(v) for v in rows[j]))
                if quasi:
                    missed.append(_missed_vertex(union[j], full))
        if capped:
            break

    return SolveReport(
        k=k,
        count=count,
        witnesses=tuple(witnesses),
        unique=(count == 1 and not capped),
        subsets_examined=examined,
        elapsed=time.perf_counter() - t0,
        capped=capped,
        missed_vertices=tuple(missed) if quasi else None,
    )


def enumerate_dominating_sets(g: Hypergraph, k: int, witness_cap: int = 8,
                              budget: int = DEFAULT_BUDGET,
                              count_cap: Optional[int] = None) -> SolveReport:
    """Exact count of dominating k-sets (capped search when count_cap given)."""
    return _scan(g, k, witness_cap, budget, count_cap, quasi=False)


def enumerate_quasi_dominating_sets(g: Hypergraph, k: int, witness_cap: int = 8,
                                    budget: int = DEFAULT_BUDGET,
                                    count_cap: Optional[int] = None) -> SolveReport:
    """Exact count of k-sets that dominate all but exactly one vertex."""
    return _scan(g, k, witness_cap, budget, count_cap, quasi=True)


def has_dominating_set(g: Hypergraph, k: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Existence fast path: stops at the first witness."""
    return _scan(g, k, witness_cap=1, budget=budget, count_cap=1, quasi=False).count > 0


def is_vertex_cover(g: Hypergraph, s: Iterable[int]) -> bool:
    """True iff every hyperedge has at least one vertex in s."""
    vs = as_vertex_set(s, g.n)
    s_mask = 0
    for v in vs:
        s_mask |= 1 << v
    return all(em & s_mask for em in g.edge_masks)
