"""Shared test corpora and independent oracles.

The oracles here deliberately use different algorithms than the package
(adjacency-matrix closure for reachability, naive value iteration for the
game) so expected values are computed on an independent route.
"""

import itertools
import random

from dwlab.graph import DiGraph, iter_bits, mask_of


def random_digraph(rng: random.Random, n: int, p: float) -> DiGraph:
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return DiGraph.from_edges(n, edges)


def random_graph_corpus(seed: int, count: int, max_n: int, p_choices=(0.2, 0.35, 0.5, 0.7)):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        out.append(random_digraph(rng, n, rng.choice(p_choices)))
    return out


def all_digraphs(n: int):
    """Every labeled simple digraph on n vertices."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (bits >> i) & 1]
        yield DiGraph.from_edges(n, edges)


def weakly_connected_digraphs(max_n: int):
    """Every weakly connected labeled digraph with 1..max_n vertices."""
    for n in range(1, max_n + 1):
        for g in all_digraphs(n):
            if g.is_weakly_connected():
                yield g


# -- independent oracles ---------------------------------------------------------


def closure_reach(g: DiGraph, sources, removed) -> frozenset:
    """Reachability by repeated adjacency-matrix squaring (no BFS)."""
    removed = set(removed)
    keep = [v for v in range(g.n) if v not in removed]
    mat = {(u, v): False for u in keep for v in keep}
    for u in keep:
        mat[(u, u)] = True
        for v in iter_bits(g.succ[u]):
            if v not in removed:
                mat[(u, v)] = True
    changed = True
    while changed:
        changed = False
        for u in keep:
            for v in keep:
                if not mat[(u, v)]:
                    if any(mat[(u, w)] and mat[(w, v)] for w in keep):
                        mat[(u, v)] = True
                        changed = True
    out = set()
    for s in sources:
        if s in removed:
            continue
        out.update(v for v in keep if mat[(s, v)])
    return frozenset(out)


def closure_components(g: DiGraph, removed) -> list[frozenset]:
    removed = set(removed)
    keep = [v for v in range(g.n) if v not in removed]
    comps = []
    assigned = set()
    for v in keep:
        if v in assigned:
            continue
        rv = closure_reach(g, [v], removed)
        comp = frozenset(u for u in rv if v in closure_reach(g, [u], removed))
        comps.append(comp)
        assigned.update(comp)
    comps.sort(key=min)
    return comps


def oracle_game_winner(g: DiGraph, k: int) -> str:
    """Exact winner by naive value iteration over the entire position space.

    Unpruned moves, monotone legality, robber-first start.  Exponential; for
    tiny graphs only.
    """
    n = g.n
    full = (1 << n) - 1

    def reach_m(frm, rem):
        return mask_of(closure_reach(g, list(iter_bits(frm)), list(iter_bits(rem))))

    def comps_m(rem):
        return [mask_of(c) for c in closure_components(g, list(iter_bits(rem)))]

    cop_sets = [m for m in range(1 << n) if bin(m).count("1") <= k]
    positions = []
    for c in cop_sets:
        for r in comps_m(c):
            positions.append((c, r))

    moves = {}
    for c, r in positions:
        legal = []
        for c2 in cop_sets:
            transit = reach_m(r, c & c2)
            if transit & (c & ~c2):
                continue  # a vacated vertex becomes available: not monotone
            replies = [q for q in comps_m(c2) if q & transit and not (q & ~transit)]
            legal.append((c2, replies))
        moves[(c, r)] = legal

    win = set()
    changed = True
    while changed:
        changed = False
        for pos in positions:
            if pos in win:
                continue
            c, r = pos
            for c2, replies in moves[pos]:
                if all((c2, q) in win for q in replies):
                    win.add(pos)
                    changed = True
                    break
    inits = [(0, q) for q in comps_m(0)]
    return "cops" if all(p in win for p in inits) else "robber"
