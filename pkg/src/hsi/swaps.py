"""Degree-preserving two-edge swaps that flip solvability.

The forward direction starts from an instance whose set S dominates via a
pivot vertex v (dominated by exactly one member u of S through exactly one
hyperedge e1) and a partner hyperedge e2 = (u', v', w...) carrying exactly one
member u' of S.  Replacing e1 = (u, v, z...) and e2 with (u, u', z...) and
(v, v', w...) leaves every vertex degree and the edge count unchanged, never
touches an edge meeting the protected region, and leaves v undominated by S.
The backward direction performs the inverse rewiring on an instance where v
is undominated, making S dominating again.

Candidate roles are searched in lexicographic order (optionally shuffled by a
seeded generator), so a fixed seed reproduces the same SwapRecord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .hypergraph import (
    Edge,
    Hypergraph,
    as_vertex_set,
    domination_status,
    is_dominating_set,
)
from .model import ModelParams, count_M, sample_hypergraph
from .rng import STREAM_ATTEMPTS, SplitMix64, indexed_seed
from .solvers import DEFAULT_BUDGET, SolveReport, enumerate_dominating_sets


class SwapNotFound(RuntimeError):
    """No admissible pivot/partner assignment exists."""


class RetriesExhausted(RuntimeError):
    def __init__(self, attempts: int, non_unique: int, swap_failures: int):
        super().__init__(
            f"no pair built in {attempts} attempts "
            f"({non_unique} without a unique solution, {swap_failures} swap failures)")
        self.attempts = attempts
        self.non_unique = non_unique
        self.swap_failures = swap_failures


@dataclass(frozen=True)
class ProtectedRegion:
    """Vertices whose incident edges a swap must leave untouched."""

    vertices: tuple[int, ...] = ()
    exponent_c: Optional[float] = None

    @classmethod
    def sized(cls, n: int, c: float) -> "ProtectedRegion":
        """Auto-sized region: the round(n^c) lowest vertex ids."""
        if not 0.0 < c < 1.0:
            raise ValueError(f"need 0 < c < 1, got {c}")
        h = round(n**c)
        return cls(vertices=tuple(range(h)), exponent_c=c)


@dataclass(frozen=True)
class SwapRoles:
    u: int
    v: int
    u_prime: int
    v_prime: int
    z: tuple[int, ...]
    w: tuple[int, ...]


@dataclass(frozen=True)
class SwapRecord:
    removed: tuple[Edge, Edge]
    added: tuple[Edge, Edge]
    roles: SwapRoles
    direction: str  # "forward" | "backward"
    protected: ProtectedRegion


@dataclass(frozen=True)
class PivotDiagnostics:
    prob_av: float
    prob_bv: float
    prob_any_pivot: float
    m_prime: int


@dataclass(frozen=True)
class PairResult:
    g_yes: Hypergraph
    g_no: Hypergraph
    record: SwapRecord
    report_yes: SolveReport
    report_no: SolveReport
    attempts: int
    non_unique: int
    swap_failures: int

    @property
    def flip_succeeded(self) -> bool:
        return self.report_no.count == 0


def pivot_diagnostics(n: int, d: int, k: int, p: float, c: float) -> PivotDiagnostics:
    """Analytic pivot-availability quantities at protected-region exponent c."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"need 0 <= p <= 1, got {p}")
    if not 1 <= k <= n - 1 or d < 2:
        raise ValueError(f"invalid (n={n}, d={d}, k={k})")
    if not 0.0 < c < 1.0:
        raise ValueError(f"need 0 < c < 1, got {c}")
    M = count_M(n, k, d)
    h = round(n**c)
    q = (1.0 - p) ** (M - 1) if M >= 1 else 1.0
    singles = k * (math.comb(n - 1 - k, d - 2) if n - 1 - k >= d - 2 else 0)
    prob_av = singles * p * q
    prob_bv = -math.expm1(M * math.log1p(-p)) if p < 1.0 else 1.0
    if prob_bv <= 0.0:
        prob_any = 0.0
    elif prob_av >= prob_bv:
        prob_any = 1.0 if n - h - k > 0 else 0.0
    else:
        exponent = max(0, n - h - k)
        prob_any = -math.expm1(exponent * math.log1p(-prob_av / prob_bv))
    m_prime = (math.comb(n - 1 - h, d - 1) if n - 1 - h >= d - 1 else 0) - \
              (math.comb(n - k - 1 - h, d - 1) if n - k - 1 - h >= d - 1 else 0)
    return PivotDiagnostics(prob_av=prob_av, prob_bv=prob_bv,
                            prob_any_pivot=prob_any, m_prime=m_prime)


def _pivot_candidates(g: Hypergraph, s_set: set[int], blocked: set[int]):
    """(v, u, e1) with v outside S and the region, dominated only by u via e1."""
    out = []
    incidence = g.incidence
    for v in range(g.n):
        if v in s_set or v in blocked:
            continue
        touching = [e for e in incidence[v] if any(x in s_set for x in e)]
        if len(touching) != 1:
            continue
        e1 = touching[0]
        in_s = [x for x in e1 if x in s_set]
        if len(in_s) == 1:
            out.append((v, in_s[0], e1))
    return out


def find_pivot(g: Hypergraph, s, region: ProtectedRegion = ProtectedRegion(),
               rng: Optional[SplitMix64] = None) -> tuple[int, int, Edge]:
    """Locate a pivot vertex; lowest v wins unless rng picks uniformly."""
    vs = as_vertex_set(s, g.n)
    if not is_dominating_set(g, vs):
        raise ValueError("the candidate set does not dominate the instance")
    blocked = set(region.vertices)
    candidates = _pivot_candidates(g, set(vs), blocked)
    if not candidates:
        raise SwapNotFound("no pivot vertex: every candidate is multiply dominated")
    if rng is None:
        return candidates[0]
    return candidates[rng.randbelow(len(candidates))]


def _single_s_edges(g: Hypergraph, s_set: set[int], blocked: set[int]):
    """Edges carrying exactly one member of S and avoiding the region."""
    for e in g.edges:
        if any(x in blocked for x in e):
            continue
        in_s = [x for x in e if x in s_set]
        if len(in_s) == 1:
            yield e, in_s[0]


def forward_swap(g: Hypergraph, s, region: ProtectedRegion = ProtectedRegion(),
                 rng: Optional[SplitMix64] = None,
                 roles: Optional[SwapRoles] = None) -> tuple[Hypergraph, SwapRecord]:
    """Rewire (u,v,z...),(u',v',w...) -> (u,u',z...),(v,v',w...).

    Afterwards the pivot v shares no edge with S, so S stops dominating.
    """
    vs = as_vertex_set(s, g.n)
    s_set = set(vs)
    if not is_dominating_set(g, vs):
        raise ValueError("forward swap needs a dominating set")
    blocked = set(region.vertices)

    if roles is not None:
        e1 = tuple(sorted((roles.u, roles.v, *roles.z)))
        e2 = tuple(sorted((roles.u_prime, roles.v_prime, *roles.w)))
        if (roles.v, roles.u, e1) not in _pivot_candidates(g, s_set, blocked):
            raise SwapNotFound(f"vertex {roles.v} is not a pivot via {e1}")
        g2, record = _apply(g, e1, e2, roles, "forward", region, blocked, s_set)
        return _check_forward_post(g2, record, s_set)

    pivots = _pivot_candidates(g, s_set, blocked)
    pivots = [(v, u, e1) for (v, u, e1) in pivots
              if u not in blocked and not any(x in blocked for x in e1)]
    if not pivots:
        raise SwapNotFound("no pivot vertex outside the protected region")
    partners_all = sorted(
        (v2, u2, e2)
        for e2, u2 in _single_s_edges(g, s_set, blocked)
        for v2 in e2 if v2 != u2
    )
    if rng is not None:
        rng.shuffle(pivots)
        rng.shuffle(partners_all)

    for v, u, e1 in pivots:
        z = tuple(x for x in e1 if x != u and x != v)
        for v2, u2, e2 in partners_all:
            if e2 == e1 or u2 == u or v2 == v or v in e2:
                continue
            w = tuple(x for x in e2 if x != u2 and x != v2)
            roles_try = SwapRoles(u=u, v=v, u_prime=u2, v_prime=v2, z=z, w=w)
            try:
                g2, record = _apply(g, e1, e2, roles_try, "forward", region, blocked, s_set)
            except SwapNotFound:
                continue
            return _check_forward_post(g2, record, s_set)
    raise SwapNotFound("no admissible partner pair for any pivot")


def _check_forward_post(g2: Hypergraph, record: SwapRecord, s_set: set[int]):
    s_mask = 0
    for x in s_set:
        s_mask |= 1 << x
    if g2.neighborhood_masks[record.roles.v] & s_mask:
        raise AssertionError("forward swap left the pivot vertex dominated")
    return g2, record


def backward_swap(g: Hypergraph, s, v: int, region: ProtectedRegion = ProtectedRegion(),
                  rng: Optional[SplitMix64] = None,
                  roles: Optional[SwapRoles] = None) -> tuple[Hypergraph, SwapRecord]:
    """Inverse rewiring (u,u',z...),(v,v',w...) -> (v,u,z...),(v',u',w...).

    Requires v undominated by S; afterwards S dominates the instance.
    """
    vs = as_vertex_set(s, g.n)
    s_set = set(vs)
    g._check_vertex(v)
    if v in s_set:
        raise ValueError(f"vertex {v} is inside the candidate set")
    status = domination_status(g, vs)
    if status.dominated[v]:
        raise ValueError(f"vertex {v} is already dominated")
    blocked = set(region.vertices)
    if v in blocked:
        raise SwapNotFound(f"undominated vertex {v} lies in the protected region")

    if roles is not None:
        e1 = tuple(sorted((roles.u, roles.u_prime, *roles.z)))
        e2 = tuple(sorted((roles.v, roles.v_prime, *roles.w)))
        g2, record = _apply(g, e1, e2, roles, "backward", region, blocked, s_set)
        return _check_backward_post(g2, record, vs)

    inner: list[tuple[int, int, Edge]] = []
    for e in g.edges:
        if any(x in blocked for x in e):
            continue
        in_s = sorted(x for x in e if x in s_set and x not in blocked)
        for u in in_s:
            for u2 in in_s:
                if u2 != u:
                    inner.append((u, u2, e))
    inner.sort()
    outer = sorted(
        (v2, e2)
        for e2 in g.incidence[v]
        if not any(x in blocked for x in e2)
        for v2 in e2 if v2 != v
    )
    if rng is not None:
        rng.shuffle(inner)
        rng.shuffle(outer)
    if not inner:
        raise SwapNotFound("no edge joins two members of S outside the region")
    if not outer:
        raise SwapNotFound(f"vertex {v} has no usable edge to a partner vertex")

    for u, u2, e1 in inner:
        z = tuple(x for x in e1 if x != u and x != u2)
        for v2, e2 in outer:
            if e2 == e1:
                continue
            w = tuple(x for x in e2 if x != v and x != v2)
            roles_try = SwapRoles(u=u, v=v, u_prime=u2, v_prime=v2, z=z, w=w)
            try:
                g2, record = _apply(g, e1, e2, roles_try, "backward", region, blocked, s_set)
            except SwapNotFound:
                continue
            return _check_backward_post(g2, record, vs)
    raise SwapNotFound("no admissible role assignment for the backward swap")


def _check_backward_post(g2: Hypergraph, record: SwapRecord, vs):
    if not is_dominating_set(g2, vs):
        raise AssertionError("backward swap did not restore domination")
    return g2, record


def _apply(g: Hypergraph, e1: Edge, e2: Edge, roles: SwapRoles, direction: str,
           region: ProtectedRegion, blocked: set[int], s_set: set[int]) -> tuple[Hypergraph, SwapRecord]:
    if e1 not in g.edge_set or e2 not in g.edge_set:
        raise SwapNotFound(f"edges {e1}, {e2} are not both present")
    if e1 == e2:
        raise SwapNotFound("the two swapped edges must differ")
    for e in (e1, e2):
        if any(x in blocked for x in e):
            raise SwapNotFound(f"edge {e} touches the protected region")
    for x in (roles.u, roles.v, roles.u_prime, roles.v_prime):
        if x in blocked:
            raise SwapNotFound(f"role vertex {x} lies in the protected region")

    if direction == "forward":
        added1 = tuple(sorted((roles.u, roles.u_prime, *roles.z)))
        added2 = tuple(sorted((roles.v, roles.v_prime, *roles.w)))
        if any(x in s_set for x in (roles.v, roles.v_prime)) or any(x in s_set for x in roles.w):
            raise SwapNotFound("the pivot-side replacement edge would still touch S")
    else:
        added1 = tuple(sorted((roles.v, roles.u, *roles.z)))
        added2 = tuple(sorted((roles.v_prime, roles.u_prime, *roles.w)))
        if roles.u not in s_set or roles.u_prime not in s_set:
            raise SwapNotFound("backward swap needs both inner roles inside S")

    for e in (added1, added2):
        if len(set(e)) != g.d:
            raise SwapNotFound(f"replacement edge {e} collapses to fewer than d vertices")
        if e in g.edge_set:
            raise SwapNotFound(f"replacement edge {e} already exists")
    if added1 == added2:
        raise SwapNotFound("replacement edges coincide")

    g2 = g.replace_edges(removed=(e1, e2), added=(added1, added2))
    record = SwapRecord(removed=(e1, e2), added=(added1, added2),
                        roles=roles, direction=direction, protected=region)
    return g2, record


def build_selfref_pair(params: ModelParams, region: ProtectedRegion = ProtectedRegion(),
                       retry_budget: int = 200, rng: Optional[SplitMix64] = None,
                       witness_cap: int = 4, budget: int = DEFAULT_BUDGET) -> PairResult:
    """Sample until an instance has a unique dominating k-set, then flip it.

    Returns the original instance, the swapped instance, the record, and both
    solve reports.  The swapped instance provably loses S as a dominating set;
    whether it has *no* dominating k-set at all is verified by enumeration and
    reported, not assumed.
    """
    non_unique = 0
    swap_failures = 0
    for attempt in range(retry_budget):
        seed = indexed_seed(params.seed, STREAM_ATTEMPTS, attempt)
        g = sample_hypergraph(params.with_seed(seed))
        report_yes = enumerate_dominating_sets(
            g, params.k, witness_cap=witness_cap, budget=budget, count_cap=2)
        if not report_yes.unique:
            non_unique += 1
            continue
        s = report_yes.witnesses[0]
        try:
            g_no, record = forward_swap(g, s, region=region, rng=rng)
        except SwapNotFound:
            swap_failures += 1
            continue
        report_no = enumerate_dominating_sets(
            g_no, params.k, witness_cap=witness_cap, budget=budget, count_cap=2)
        return PairResult(
            g_yes=g, g_no=g_no, record=record,
            report_yes=report_yes, report_no=report_no,
            attempts=attempt + 1, non_unique=non_unique, swap_failures=swap_failures,
        )
    raise RetriesExhausted(attempts=retry_budget, non_unique=non_unique,
                           swap_failures=swap_failures)
