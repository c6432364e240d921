"""Kelly-width via elimination orders, and D-decomposition validation.

The support of a vertex v under an order is the set of later vertices that
receive an edge from the region reachable from v through earlier vertices
only; Kelly-width is one plus the minimum over orders of the maximum support.
Exact computation runs a DP over vertex subsets (the support of the next
eliminated vertex depends only on the prefix set), with an all-permutations
oracle kept as a correctness backstop for tiny graphs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional

from . import kernels
from .errors import BudgetExceeded, InputError, ParseError
from .graph import DiGraph, decode, encode, iter_bits, mask_of, set_of

DEFAULT_DP_LIMIT = 18


@dataclass
class EliminationOrder:
    """A linear order on V(G), first-eliminated first."""

    order: list[int]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise InputError("elimination order must be a permutation of 0..n-1")

    def position(self, v: int) -> int:
        return self.order.index(v)

    def to_json(self):
        return list(self.order)


def support_mask(g: DiGraph, order: list[int], idx: int) -> int:
    """Support of order[idx]: later vertices hit by edges out of the region
    reachable from it through {order[0..idx]} only."""
    v = order[idx]
    prefix = mask_of(order[: idx + 1])
    later = g.full_mask() & ~prefix
    kern = kernels.active
    region = kern.reach(g.succ, g.n, 1 << v, later)
    out = 0
    for u in iter_bits(region):
        out |= g.succ[u]
    return out & later


def support(g: DiGraph, order: "EliminationOrder | list[int]", v: int) -> frozenset[int]:
    ordr = order.order if isinstance(order, EliminationOrder) else list(order)
    g._check_vertex(v)
    return set_of(support_mask(g, ordr, ordr.index(v)))


def order_width(g: DiGraph, order: "EliminationOrder | list[int]") -> int:
    ordr = order.order if isinstance(order, EliminationOrder) else list(order)
    if sorted(ordr) != list(range(g.n)):
        raise InputError("elimination order must be a permutation of V(G)")
    return max((support_mask(g, ordr, i).bit_count() for i in range(g.n)), default=0)


def _support_of_next(g: DiGraph, kern, placed_mask: int, v: int) -> int:
    later = g.full_mask() & ~placed_mask & ~(1 << v)
    region = kern.reach(g.succ, g.n, 1 << v, later)
    out = 0
    for u in iter_bits(region):
        out |= g.succ[u]
    return out & later


def kelly_width(g: DiGraph, dp_limit: int = DEFAULT_DP_LIMIT) -> tuple[int, EliminationOrder]:
    """Exact Kelly-width with a witnessing order (subset DP, 2^n states)."""
    n = g.n
    if n == 0:
        return 1, EliminationOrder([])
    if n > dp_limit:
        raise BudgetExceeded(f"kelly_width subset DP limited to {dp_limit} vertices")
    kern = kernels.active
    full = g.full_mask()
    best = {0: 0}
    choice = {}
    masks_by_count = [[] for _ in range(n + 1)]
    for m in range(1 << n):
        masks_by_count[m.bit_count()].append(m)
    for c in range(1, n + 1):
        for m in masks_by_count[c]:
            val = None
            pick = None
            rest = m
            while rest:
                low = rest & -rest
                rest ^= low
                v = low.bit_length() - 1
                prev = best[m ^ low]
                cost = _support_of_next(g, kern, m ^ low, v).bit_count()
                cand = max(prev, cost)
                if val is None or cand < val:
                    val, pick = cand, v
            best[m] = val
            choice[m] = pick
    order = []
    m = full
    while m:
        v = choice[m]
        order.append(v)
        m ^= 1 << v
    order.reverse()
    return best[full] + 1, EliminationOrder(order)


def kelly_width_bruteforce(g: DiGraph, limit: int = 8) -> int:
    """All-permutations oracle, usable up to ~8 vertices."""
    if g.n > limit:
        raise BudgetExceeded(f"permutation oracle limited to {limit} vertices")
    if g.n == 0:
        return 1
    best = None
    for perm in itertools.permutations(range(g.n)):
        w = order_width(g, list(perm))
        if best is None or w < best:
            best = w
    return best + 1


# -- D-decompositions -----------------------------------------------------------


@dataclass
class DDecomposition:
    """Undirected tree with bags; both orientations of each tree edge must be
    present in the tree graph."""

    tree: DiGraph
    bags: list[frozenset[int]]

    def __post_init__(self):
        if len(self.bags) != self.tree.n:
            raise InputError("bag count does not match tree node count")
        self.bags = [frozenset(b) for b in self.bags]

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0)

    def to_json(self) -> bytes:
        obj = {
            "tree": json.loads(encode(self.tree).decode()),
            "bags": [sorted(b) for b in self.bags],
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()

    @staticmethod
    def from_json(data: bytes) -> "DDecomposition":
        obj = json.loads(data.decode("utf-8"))
        if "tree" not in obj or "bags" not in obj:
            raise ParseError("d-decomposition json needs 'tree' and 'bags'")
        return DDecomposition(decode(json.dumps(obj["tree"]).encode()),
                              [frozenset(b) for b in obj["bags"]])


@dataclass
class DViolation:
    condition: str
    witness: tuple
    message: str

    def __bool__(self):
        return False


@dataclass
class DOk:
    def __bool__(self):
        return True


def validate_d_decomposition(g: DiGraph, dec: DDecomposition):
    """Occurrence-connectivity per vertex plus the per-edge component side
    condition: every strong component of G minus an adjacent-bag intersection
    lies entirely in one side's bag union."""
    tree = dec.tree
    kern = kernels.active
    for b in dec.bags:
        for v in b:
            g._check_vertex(v)
    for u in range(tree.n):
        for v in iter_bits(tree.succ[u]):
            if not tree.has_edge(v, u):
                return DViolation("tree", (u, v), "tree edges must be undirected")
    und_edges = sorted({(min(u, v), max(u, v)) for u, v in tree.edges()})
    if tree.n and len(und_edges) != tree.n - 1:
        return DViolation("tree", (len(und_edges),), "edge count differs from nodes-1")
    if tree.n and not tree.is_weakly_connected():
        return DViolation("tree", (), "tree is not connected")

    bag_masks = [mask_of(b) for b in dec.bags]
    for v in range(g.n):
        occ = [t for t in range(tree.n) if bag_masks[t] >> v & 1]
        if not occ:
            return DViolation("occurrence", (v,), f"vertex {v} occurs in no bag")
        occ_mask = mask_of(occ)
        seen = occ_mask & -occ_mask
        frontier = seen
        while frontier:
            nxt = 0
            for t in iter_bits(frontier):
                nxt |= tree.succ[t] & occ_mask
            frontier = nxt & ~seen
            seen |= frontier
        if seen != occ_mask:
            return DViolation("occurrence", (v,), f"occurrence set of vertex {v} is disconnected")

    for s, t in und_edges:
        cut = bag_masks[s] & bag_masks[t]
        side_s = _side_union(tree, bag_masks, s, t)
        side_t = _side_union(tree, bag_masks, t, s)
        for comp in kern.sccs(g.succ, g.n, cut):
            if not (comp & ~side_s) or not (comp & ~side_t):
                continue
            return DViolation(
                "side", (s, t, sorted(iter_bits(comp))),
                f"component straddles tree edge ({s},{t})",
            )
    return DOk()


def _side_union(tree: DiGraph, bag_masks: list[int], keep: int, drop: int) -> int:
    """Union of bags on keep's side of the tree edge {keep, drop}."""
    seen = 1 << keep
    frontier = seen
    blocked = 1 << drop
    while frontier:
        nxt = 0
        for t in iter_bits(frontier):
            nxt |= tree.succ[t]
        frontier = nxt & ~seen & ~blocked
        seen |= frontier
    out = 0
    for t in iter_bits(seen):
        out |= bag_masks[t]
    return out
