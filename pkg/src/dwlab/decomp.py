"""DAG decompositions: axiom validation, width/size, and the conversions
between decompositions and monotone winning cop strategies.

Axioms, for a DAG D with bags B_d: (D1) bags cover V(G); (D2) for a <= b <= c
in DAG order, B_a n B_c <= B_b; (D3) every root's cone B_{>=r} is closed
under reachability; (D4) for each DAG edge (a,b), B_{>=b} \\ B_a is closed
under reachability in G - (B_a n B_b).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .errors import InputError, ParseError
from .game import EXHAUSTIVE, StrategyTable, simulate
from .graph import DiGraph, decode, encode, iter_bits, mask_of, set_of


@dataclass
class DagDecomposition:
    """A DAG whose nodes carry vertex bags of the decomposed graph."""

    dag: DiGraph
    bags: list[frozenset[int]]

    def __post_init__(self):
        if len(self.bags) != self.dag.n:
            raise InputError(
                f"bag count {len(self.bags)} does not match dag node count {self.dag.n}"
            )
        self.bags = [frozenset(b) for b in self.bags]

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0)

    def size(self) -> int:
        return self.dag.n

    def to_json(self) -> bytes:
        obj = {
            "dag": json.loads(encode(self.dag).decode()),
            "bags": [sorted(b) for b in self.bags],
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()

    @staticmethod
    def from_json(data: bytes) -> "DagDecomposition":
        try:
            obj = json.loads(data.decode("utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"bad decomposition json: {e.msg}", offset=e.pos) from e
        if "dag" not in obj or "bags" not in obj:
            raise ParseError("decomposition json needs 'dag' and 'bags'")
        dag = decode(json.dumps(obj["dag"]).encode())
        return DagDecomposition(dag, [frozenset(b) for b in obj["bags"]])


@dataclass
class Violation:
    axiom: str           # acyclic | D1 | D2 | D3 | D4
    witness: tuple
    message: str

    def __bool__(self):
        return False


@dataclass
class Ok:
    def __bool__(self):
        return True


def _desc_masks(dag: DiGraph) -> list[int]:
    """Descendants-including-self of every dag node, as node bitmasks."""
    kern = kernels.active
    return [kern.reach(dag.succ, dag.n, 1 << d, 0) for d in range(dag.n)]


def validate(g: DiGraph, dec: DagDecomposition, d2_all_triples: bool = False):
    """Check acyclicity and (D1)-(D4); the witness names the offender.

    D2 is checked per vertex as convexity of its occurrence set under DAG
    reachability (equivalent to the triple condition and cheaper);
    d2_all_triples forces the direct triple check instead.
    """
    kern = kernels.active
    dag = dec.dag
    for b in dec.bags:
        for v in b:
            g._check_vertex(v)

    for comp in kern.sccs(dag.succ, dag.n, 0):
        if comp.bit_count() > 1:
            return Violation("acyclic", (sorted(iter_bits(comp)),), "dag contains a cycle")

    bag_masks = [mask_of(b) for b in dec.bags]
    covered = 0
    for m in bag_masks:
        covered |= m
    if covered != g.full_mask():
        missing = next(iter_bits(g.full_mask() & ~covered))
        return Violation("D1", (missing,), f"vertex {missing} is in no bag")

    desc = _desc_masks(dag)

    if d2_all_triples:
        for a in range(dag.n):
            for b in iter_bits(desc[a]):
                for c in iter_bits(desc[b]):
                    bad = bag_masks[a] & bag_masks[c] & ~bag_masks[b]
                    if bad:
                        v = next(iter_bits(bad))
                        return Violation("D2", (a, b, c, v), f"vertex {v} missing from middle bag {b}")
    else:
        # convexity of each vertex's occurrence set under DAG reachability
        for v in range(g.n):
            occ = [d for d in range(dag.n) if bag_masks[d] >> v & 1]
            for a in occ:
                for c in occ:
                    if c == a or not (desc[a] >> c & 1):
                        continue
                    for b in iter_bits(desc[a]):
                        if (desc[b] >> c & 1) and not (bag_masks[b] >> v & 1):
                            return Violation("D2", (a, b, c, v), f"vertex {v} missing from middle bag {b}")
    cone = [0] * dag.n
    for d in range(dag.n):
        m = 0
        for e in iter_bits(desc[d]):
            m |= bag_masks[e]
        cone[d] = m

    pred = dag.pred_masks()
    for root in range(dag.n):
        if pred[root]:
            continue
        closure = kern.reach(g.succ, g.n, cone[root], 0)
        if closure & ~cone[root]:
            v = next(iter_bits(closure & ~cone[root]))
            return Violation("D3", (root, v), f"root {root} cone not reach-closed at vertex {v}")

    for a in range(dag.n):
        for b in iter_bits(dag.succ[a]):
            tail = cone[b] & ~bag_masks[a]
            closure = kern.reach(g.succ, g.n, tail, bag_masks[a] & bag_masks[b])
            if closure & ~tail:
                v = next(iter_bits(closure & ~tail))
                return Violation(
                    "D4", (a, b, v), f"edge ({a},{b}): vertex {v} escapes B_>={b} minus B_{a}"
                )
    return Ok()


def width(dec: DagDecomposition) -> int:
    return dec.width()


def size(dec: DagDecomposition) -> int:
    return dec.size()


# -- decomposition -> strategy -------------------------------------------------


def strategy_from_decomposition(g: DiGraph, dec: DagDecomposition) -> StrategyTable:
    """Cops walk the bags: start on a root cone containing the robber's
    component, then follow the DAG edge whose cone traps it.  The cops only
    ever occupy bag sets, so the consistent positions number at most
    size * |V|.  Verified winning before being returned."""
    check = validate(g, dec)
    if not check:
        raise InputError(f"invalid decomposition: {check.axiom} {check.message}")
    kern = kernels.active
    dag = dec.dag
    bag_masks = [mask_of(b) for b in dec.bags]
    desc = _desc_masks(dag)
    cone = []
    for d in range(dag.n):
        m = 0
        for e in iter_bits(desc[d]):
            m |= bag_masks[e]
        cone.append(m)
    pred = dag.pred_masks()
    roots = [d for d in range(dag.n) if not pred[d]]

    table: dict = {}
    queue = deque()   # (announced node, previous cops, robber before reply)
    visited = set()
    for r0 in kern.sccs(g.succ, g.n, 0):
        root = next((d for d in roots if not (r0 & ~cone[d])), None)
        if root is None:
            raise InputError("no root cone contains an initial robber component")
        table.setdefault((0, r0), bag_masks[root])
        state = (root, 0, r0)
        if state not in visited:
            visited.add(state)
            queue.append(state)
    while queue:
        d, c_prev, r_prev = queue.popleft()
        cm = bag_masks[d]
        _, replies = kern.robber_replies(g.succ, g.n, c_prev, cm, r_prev)
        for q in replies:
            nxt = next(
                (b for b in iter_bits(dag.succ[d]) if not (q & ~(cone[b] & ~cm))), None
            )
            if nxt is None:
                raise InputError(
                    f"decomposition walk stuck at node {d} with robber {sorted(iter_bits(q))}"
                )
            table.setdefault((cm, q), bag_masks[nxt])
            state = (nxt, cm, q)
            if state not in visited:
                visited.add(state)
                queue.append(state)

    strat = StrategyTable("cops", table, g.n)
    outcome = simulate(g, strat, EXHAUSTIVE, dec.width())
    if not outcome.certified:
        raise InputError("bag-walk strategy failed verification against the exhaustive robber")
    return strat


# -- strategy -> decomposition ---------------------------------------------------


def decomposition_from_strategy(g: DiGraph, strat, k: int) -> DagDecomposition:
    """Decomposition from a monotone winning cop strategy.

    Nodes are the robber positions (C, C', R) consistent with the strategy
    (the initial placeholder is the unique root, bag empty); the bag of a
    node is its announced cop set; edges follow robber replies.  The
    validator, run before returning, is the actual contract.
    """
    outcome = simulate(g, strat, EXHAUSTIVE, k)
    if not outcome.certified:
        raise InputError("decomposition_from_strategy requires a winning monotone cop strategy")
    kern = kernels.active

    node_index: dict = {}
    node_bags: list[int] = []
    edges: list[tuple[int, int]] = []

    def intern(key, bag):
        idx = node_index.get(key)
        if idx is None:
            idx = len(node_bags)
            node_index[key] = idx
            node_bags.append(bag)
        return idx

    root = intern((0, 0, 0), 0)
    queue = deque()
    for r0 in kern.sccs(g.succ, g.n, 0):
        cn = strat.cop_move(g, 0, r0)
        child = (0, cn, r0)
        idx = intern(child, cn)
        edges.append((root, idx))
        queue.append(child)
    seen = set(node_index)
    while queue:
        c, cn, r = queue.popleft()
        idx = node_index[(c, cn, r)]
        _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
        for q in replies:
            cn2 = strat.cop_move(g, cn, q)
            child = (cn, cn2, q)
            cidx = intern(child, cn2)
            edges.append((idx, cidx))
            if child not in seen:
                seen.add(child)
                queue.append(child)

    dag = DiGraph.from_edges(len(node_bags), sorted(set(edges)))
    dec = DagDecomposition(dag, [set_of(b) for b in node_bags])
    check = validate(g, dec)
    if not check:
        raise InputError(
            f"constructed decomposition violates {check.axiom} ({check.message}); "
            "the strategy places cops outside the robber territory"
        )
    return dec
