"""Generators for the layered lower-bound graph family and its scripted
strategies, plus the small fixture graphs used for cross-measure comparisons.

A gadget graph is organized in levels.  Level l contributes cliques N(l) =
M(l) u D(l), branch cliques C_0(l)..C_{t-1}(l), an escape clique A(l) and an
independent set B(l) = {b_0(l), ...}; every level points down into the whole
remaining subgadget, which points back up only into A and B.  The scripted
cop strategy blockades one level after another (N, then one b, then D->A),
which is what forces the branch history to stay visible in the cop sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kernels
from .errors import GenerationError, InputError
from .game import ScriptedStrategy
from .graph import DiGraph, Role, iter_bits, mask_of


# -- size profiles -----------------------------------------------------------


@dataclass(frozen=True)
class SizeProfile:
    """Level-indexed size function: const(c), floor(log l) or floor(l/log l).

    Logarithms are base 2 (the source leaves the base open; documented here).
    """

    kind: str
    value: int = 0

    def __call__(self, level: int) -> int:
        if self.kind == "const":
            return self.value
        if self.kind == "floor_log":
            return int(math.floor(math.log2(level)))
        if self.kind == "div_log":
            return int(math.floor(level / math.log2(level)))
        raise InputError(f"unknown profile kind {self.kind!r}")

    @staticmethod
    def parse(text: str) -> "SizeProfile":
        if text.startswith("const:"):
            return SizeProfile("const", int(text.split(":", 1)[1]))
        if text in ("floor_log", "div_log"):
            return SizeProfile(text)
        raise InputError(f"bad size profile {text!r} (const:<c> | floor_log | div_log)")

    def __str__(self):
        return f"const:{self.value}" if self.kind == "const" else self.kind


CONST2 = SizeProfile("const", 2)


# -- gadget structure ---------------------------------------------------------


@dataclass
class LevelInfo:
    """Masks of one level's parts, plus quantifier metadata for reductions."""

    index: int
    m_mask: int
    d_mask: int
    a_mask: int
    b_list: list[int]
    c_list: list[int]
    cvert_list: list[int] = field(default_factory=list)
    quant: Optional[str] = None      # None | "forall" | "exists"
    var: Optional[int] = None        # 1-based variable index (reductions)
    inner_mask: int = 0              # all vertices strictly below this level

    @property
    def n_mask(self) -> int:
        return self.m_mask | self.d_mask

    @property
    def b_mask(self) -> int:
        return mask_or(self.b_list)

    @property
    def c_all(self) -> int:
        return mask_or(self.c_list)

    @property
    def cvert_mask(self) -> int:
        return mask_or(self.cvert_list)

    def part_mask(self) -> int:
        return self.n_mask | self.a_mask | self.b_mask | self.c_all | self.cvert_mask


def mask_or(masks) -> int:
    out = 0
    for m in masks:
        out |= m
    return out


@dataclass
class GadgetGraph:
    """A generated gadget: the digraph plus level metadata, outermost first."""

    graph: DiGraph
    levels: list[LevelInfo]
    base_mask: int
    base_index: int
    kind: str                        # "gnst" | "reduction"
    hub_mask: int = 0                # reduction: clause-gadget hub
    clause_masks: list[int] = field(default_factory=list)
    literal_b_edges: dict[int, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.graph.n

    def level_numbers(self) -> list[int]:
        return [lvl.index for lvl in self.levels]

    def a_all(self) -> int:
        return mask_or(lvl.a_mask for lvl in self.levels)

    def b_all(self) -> int:
        return mask_or(lvl.b_mask for lvl in self.levels)

    def summary(self) -> list[dict]:
        rows = []
        for lvl in self.levels:
            rows.append({
                "level": lvl.index,
                "M": lvl.m_mask.bit_count(),
                "D": lvl.d_mask.bit_count(),
                "C_i": lvl.c_list[0].bit_count() if lvl.c_list else 0,
                "num_C": len(lvl.c_list),
                "B": len(lvl.b_list),
                "A": lvl.a_mask.bit_count(),
                "quantifier": lvl.quant,
                "variable": lvl.var,
            })
        rows.append({"level": self.base_index, "base": self.base_mask.bit_count()})
        return rows


class _Builder:
    """Incremental vertex/edge accumulator for gadget construction."""

    def __init__(self):
        self.names: list[str] = []
        self.edges: set[tuple[int, int]] = set()
        self.roles: dict[int, Role] = {}

    def add_vertex(self, name: str, role: Role) -> int:
        v = len(self.names)
        self.names.append(name)
        self.roles[v] = role
        return v

    def add_set(self, count: int, namer, role_fn) -> int:
        m = 0
        for j in range(count):
            m |= 1 << self.add_vertex(namer(j), role_fn(j))
        return m

    def arc(self, u: int, v: int):
        if u != v:
            self.edges.add((u, v))

    def arcs(self, src_mask: int, dst_mask: int, both: bool = False):
        for u in iter_bits(src_mask):
            for v in iter_bits(dst_mask):
                if u == v:
                    continue
                self.edges.add((u, v))
                if both:
                    self.edges.add((v, u))

    def clique(self, mask: int):
        self.arcs(mask, mask, both=True)

    def graph(self) -> DiGraph:
        return DiGraph.from_edges(self.names, sorted(self.edges), self.roles)


def _wire_level(b: _Builder, lvl: LevelInfo, sub_mask: int, sub_to_b: bool):
    """All edges of one level per the layered construction.

    sub_to_b: whether every deeper vertex points at this level's B set (true
    for the plain family; reductions route B edges through clause literals).
    """
    n_mask = lvl.n_mask
    b.clique(n_mask)
    for ci in lvl.c_list:
        b.clique(ci)
    b.clique(lvl.a_mask)
    for i, ci in enumerate(lvl.c_list):
        if lvl.cvert_list:
            cv = lvl.cvert_list[i]
            b.arcs(n_mask, cv)
            b.arcs(cv, ci)
        else:
            b.arcs(n_mask, ci)
        b.arcs(ci, lvl.d_mask)
        b.arcs(ci, lvl.b_list[i])
    bmask = lvl.b_mask
    b.arcs(bmask, lvl.a_mask)
    b.arcs(lvl.a_mask, bmask)
    b.arcs(lvl.a_mask, lvl.m_mask)
    if sub_mask:
        b.arcs(n_mask, sub_mask)
        b.arcs(lvl.a_mask, sub_mask)
        b.arcs(sub_mask, lvl.a_mask)
        if sub_to_b:
            b.arcs(sub_mask, bmask)


def gen_gnst(n: int, s: SizeProfile = CONST2, t: SizeProfile = CONST2) -> GadgetGraph:
    """The layered family G_n(s,t).  n <= 4 degenerates to a single vertex.

    Level list: l_0 = n, l_{i+1} = l_i - s(l_i) - 1 while l_i >= 5.  At each
    generated level the profile must satisfy 2 <= s(l) < l/log2(l) and
    2 <= t(l); violations raise naming the level.
    """
    if n < 1:
        raise GenerationError("n must be positive")
    level_idxs = []
    cur = n
    while cur >= 5:
        sv, tv = s(cur), t(cur)
        if not (2 <= sv and sv < cur / math.log2(cur)):
            raise GenerationError(f"profile s violates 2 <= s < l/log l at level {cur}")
        if tv < 2:
            raise GenerationError(f"profile t violates 2 <= t at level {cur}")
        level_idxs.append(cur)
        cur = cur - sv - 1
    base_index = cur

    b = _Builder()
    base_v = b.add_vertex("base", Role(level=base_index, part="base"))
    sub_mask = 1 << base_v
    levels: list[LevelInfo] = []
    for l in reversed(level_idxs):
        sv, tv = s(l), t(l)
        msz = l - sv
        m_mask = b.add_set(msz, lambda j: f"m{j}({l})", lambda j: Role(l, "M", index=j))
        d_mask = b.add_set(sv, lambda j: f"d{j}({l})", lambda j: Role(l, "D", index=j))
        c_list = [
            b.add_set(msz, lambda j, i=i: f"C{i}.{j}({l})", lambda j, i=i: Role(l, f"C{i}", index=j))
            for i in range(tv)
        ]
        a_mask = b.add_set(sv, lambda j: f"a{j}({l})", lambda j: Role(l, "A", index=j))
        b_list = [
            mask_of([b.add_vertex(f"b{i}({l})", Role(l, "B", index=i))]) for i in range(tv)
        ]
        lvl = LevelInfo(l, m_mask, d_mask, a_mask, b_list, c_list, inner_mask=sub_mask)
        _wire_level(b, lvl, sub_mask, sub_to_b=True)
        sub_mask |= lvl.part_mask()
        levels.append(lvl)
    levels.reverse()
    return GadgetGraph(b.graph(), levels, 1 << base_v, base_index, "gnst")


def expected_gnst_size(n: int, s: SizeProfile = CONST2, t: SizeProfile = CONST2) -> int:
    """Vertex count by the size recurrence |G_n| = n + t(n)(n-s(n)) + s(n) + t(n) + |G_{n-s(n)-1}|."""
    if n <= 4:
        return 1
    return n + t(n) * (n - s(n)) + s(n) + t(n) + expected_gnst_size(n - s(n) - 1, s, t)


# -- scripted cop strategies ---------------------------------------------------


def _assignment_from_cops(gg: GadgetGraph, cops: int, only_parked: bool = True) -> dict[int, int]:
    """Read variable values off the blockade: a cop on b_i records value 1-i."""
    beta = {}
    for lvl in gg.levels:
        if lvl.var is None:
            continue
        if only_parked and lvl.a_mask & ~cops:
            continue
        val = 0
        for i, bi in enumerate(lvl.b_list):
            if bi & cops:
                val = 1 - i
                break
        beta[lvl.var] = val
    return beta


def _make_cop_fn(gg: GadgetGraph, k: int, variant: str, exists_choice=None):
    g = gg.graph
    succ, n = g.succ, g.n
    a_all = gg.a_all()
    b_all = gg.b_all()
    protect_always = a_all | b_all | gg.base_mask | gg.hub_mask | mask_or(gg.clause_masks)

    def trapped_capture(kern, c, r, terr):
        need = (c | terr).bit_count() - k
        if need <= 0:
            return c | terr
        fm = kern.free_mask(succ, n, c, r) & c
        if fm.bit_count() < need:
            return None  # cannot afford the capture yet; let the level logic run
        lifted = 0
        m = fm
        while need > 0:
            low = m & -m
            lifted |= low
            m ^= low
            need -= 1
        cand = (c ^ lifted) | terr
        transit = kern.reach(succ, n, r, c & cand)
        if not (transit & (c & ~cand)):
            return cand
        return c ^ (fm & -fm)  # shed one free cop and retry next round

    def fn(g_, c, r):
        kern = kernels.active
        terr = kern.reach(succ, n, r, c)
        if (c | terr).bit_count() <= k:
            return c | terr  # the whole remaining territory fits: capture now
        if terr == r:
            move = trapped_capture(kern, c, r, terr)
            if move is not None:
                return move

        # a level stays active while its escape clique is unfilled or the
        # robber still sits in its non-B parts
        active = None
        for lvl in gg.levels:
            if (lvl.a_mask & ~c) or (r & (lvl.part_mask() & ~lvl.b_mask)):
                active = lvl
                break

        protect = protect_always
        if active is not None:
            # branch-clique cops of the active level are deliberately not
            # protected: once the robber leaves a flushed clique they are
            # stale and must be reclaimable
            protect |= active.n_mask | active.cvert_mask
        fm = kern.free_mask(succ, n, c, r)
        keep = c & ~(fm & c & ~protect)

        if active is None:
            return _endgame_move(gg, kern, keep, c, r, k)
        return _level_move(gg, active, kern, keep, c, r, k, variant, exists_choice)

    return fn


def _fit_move(kern, succ, n, c, r, keep, add, k):
    """keep | add, lifting lowest free cops if the board would overflow."""
    cand = keep | add
    over = cand.bit_count() - k
    if over <= 0:
        return cand
    m = kern.free_mask(succ, n, c, r) & keep & ~add
    lifts = 0
    while over > 0 and m:
        low = m & -m
        lifts |= low
        over -= 1
        m ^= low
    if over > 0:
        return None
    cand = (keep & ~lifts) | add
    transit = kern.reach(succ, n, r, c & cand)
    if transit & (c & ~cand):
        return None
    return cand


def _level_move(gg, lvl, kern, keep, c, r, k, variant, exists_choice):
    g = gg.graph
    succ, n = g.succ, g.n

    def fit(add):
        return _fit_move(kern, succ, n, c, r, keep, add, k)

    i_star = None
    if lvl.quant == "exists":
        beta = _assignment_from_cops(gg, c)
        val = exists_choice(lvl.var, beta) if exists_choice else 0
        i_star = 1 - val
        block = lvl.cvert_list[1 - i_star]
        # the steering vertex is blocked while the level opens, and only
        # until its cop has been relocated onto the recording b-vertex
        if (block & ~c) and (lvl.b_list[i_star] & ~c) and (lvl.n_mask & ~c):
            return fit(block)
        # a robber who condensed into the barred branch is flushed before
        # anything else; its cops go stale once he leaves
        barred = lvl.c_list[1 - i_star]
        if r and not (r & ~barred) and (barred & ~c):
            return fit(barred)
    # a robber squatting on an entry vertex whose branch clique is already
    # covered is simply picked up there
    if lvl.cvert_list and r and not (r & ~lvl.cvert_mask):
        idx = 0 if (r & lvl.cvert_list[0]) else 1
        if not (lvl.c_list[idx] & ~c):
            return fit(r)
    if lvl.n_mask & ~c:
        return fit(lvl.n_mask)
    if lvl.quant == "exists":
        b_star = lvl.b_list[i_star]
        block = lvl.cvert_list[1 - i_star]
        if (b_star & ~c) and (block & c):
            return (keep ^ block) | b_star
    for i, ci in enumerate(lvl.c_list):
        zone = ci | (lvl.cvert_list[i] if lvl.cvert_list else 0)
        if r & zone and not (r & ~zone):
            if lvl.quant == "exists" and i != i_star and (ci & ~c):
                return fit(ci)  # robber slipped into the barred branch: flush him
            if variant == "poly":
                if lvl.a_mask & ~c:
                    return fit(lvl.a_mask)
                return (keep & ~lvl.m_mask) | ci
            bi = lvl.b_list[i]
            if lvl.quant != "exists" and bi & ~c:
                return fit(bi)
            return (keep & ~lvl.m_mask) | ci
    # robber is at or below the escape block: relocate D (plus as many M cops
    # as an oversized escape clique demands) onto A
    if variant == "poly":
        return keep | lvl.a_mask
    lift = lvl.d_mask
    extra = lvl.a_mask.bit_count() - lvl.d_mask.bit_count()
    mm = lvl.m_mask & keep
    while extra > 0 and mm:
        low = mm & -mm
        lift |= low
        mm ^= low
        extra -= 1
    return (keep & ~lift) | lvl.a_mask


def _endgame_move(gg, kern, keep, c, r, k):
    g = gg.graph
    succ, n = g.succ, g.n
    if gg.kind == "gnst":
        if gg.base_mask & ~c:
            return keep | gg.base_mask
        return None
    if gg.hub_mask & ~c:
        return keep | gg.hub_mask
    fm = kern.free_mask(succ, n, c, r)
    if not fm:
        # every on-board cop is pinned: the clause the robber sits on is
        # falsified.  Spend any off-board spare, then pass and lose to the
        # repetition rule rather than pretend a move exists.
        if c.bit_count() < k:
            return c | (r & -r)
        return c
    target = 0
    for v in iter_bits(r):
        if gg.literal_b_edges.get(v, 0) & c:
            target = 1 << v
            break
    if not target:
        target = r & -r
    if (c | target).bit_count() <= k:
        return c | target
    return (c ^ (fm & -fm)) | target


def canonical_cop_strategy(gg: GadgetGraph, k: Optional[int] = None) -> ScriptedStrategy:
    """The level-blockading strategy: occupy N(l); answer a branch choice
    C_i with a cop on b_i(l) (sweeping C_i if the robber lingers); relocate
    D(l) to A(l); recurse below with the freed cops."""
    if k is None:
        k = (gg.levels[0].index + 1) if gg.levels else 1
    return ScriptedStrategy("cops", _make_cop_fn(gg, k, "canonical"), name=f"canonical-cops(k={k})")


def poly_cop_strategy(gg: GadgetGraph, k: Optional[int] = None) -> ScriptedStrategy:
    """Variant buying small strategies: occupy A(l) outright instead of
    answering with b_i(l), spending s(l) extra cops but never branching."""
    if k is None:
        k = (gg.levels[0].index + (gg.levels[0].index - gg.levels[0].m_mask.bit_count()) + 1
             if gg.levels else 1)
        # n + s(n) cops; s(n) = |D(n)|
        k = gg.levels[0].index + gg.levels[0].d_mask.bit_count() if gg.levels else 1
    return ScriptedStrategy("cops", _make_cop_fn(gg, k, "poly"), name=f"poly-cops(k={k})")


# -- scripted robber strategies --------------------------------------------------


def _make_robber_fn(gg: GadgetGraph, mode: str, choices=None, forall_choice=None,
                    clause_choice=None):
    g = gg.graph
    succ, n = g.succ, g.n
    choices = dict(choices or {})

    def pick_branch(lvl, cn):
        if mode == "forall" and lvl.var is not None and lvl.quant == "forall":
            beta = _assignment_from_cops(gg, cn)
            return 1 - forall_choice(lvl.var, beta)
        if lvl.index in choices:
            return choices[lvl.index]
        for i, bi in enumerate(lvl.b_list):
            if bi & ~cn:
                return i
        return 0

    def fn(g_, c, cn, r, replies):
        if not replies:
            return None
        if len(replies) == 1:
            return replies[0]
        kern = kernels.active
        active = None
        for lvl in gg.levels:
            if (lvl.a_mask & ~cn) or (r and r & (lvl.part_mask() & ~lvl.b_mask)):
                active = lvl
                break
        if active is None:
            # endgame: a clause clique (falsified if the scripts say so), else
            # anything still alive, deepest first
            if gg.kind == "reduction" and clause_choice is not None:
                beta = _assignment_from_cops(gg, cn, only_parked=False)
                want = clause_choice(beta)
                if want is not None:
                    km = gg.clause_masks[want]
                    for q in replies:
                        if not (q & ~km):
                            return q
            best = max(replies, key=lambda q: (q & ~cn).bit_count())
            return best
        lvl = active
        # committed to a branch clique: stay until the matching b (or a sweep)
        # is announced, then run through it to the escape block
        for i, ci in enumerate(lvl.c_list):
            if r and r & ci and not (r & ~ci):
                if (lvl.b_list[i] & cn) or (ci & cn):
                    deep = (lvl.a_mask | lvl.inner_mask) & ~cn
                    for q in sorted(replies, key=lambda q: -(q & deep).bit_count()):
                        if q & deep:
                            return q
                stay = [q for q in replies if not (q & ~ci)]
                if stay:
                    return stay[0]
        free_n = lvl.n_mask & ~cn
        if free_n:
            best = max(replies, key=lambda q: (q & free_n).bit_count())
            if best & free_n:
                return best
        # N is lost: enter the chosen branch clique if its door is open
        i = pick_branch(lvl, cn)
        order = [i] + [j for j in range(len(lvl.c_list)) if j != i]
        for j in order:
            cj = lvl.c_list[j]
            if lvl.quant == "exists" and lvl.cvert_list[j] & cn:
                continue
            for q in replies:
                if q & cj and not (q & ~cj):
                    return q
        deep = (lvl.a_mask | lvl.b_mask | lvl.inner_mask) & ~cn
        best = max(replies, key=lambda q: (q & deep).bit_count())
        return best

    return fn


def canonical_robber_strategy(gg: GadgetGraph) -> ScriptedStrategy:
    """Lower-bound witness: sit in N(l) while any of it is free, then commit
    to a branch clique whose b-vertex is unguarded and stay put."""
    return ScriptedStrategy("robber", _make_robber_fn(gg, "canonical"), name="canonical-robber")


def forcing_robber_strategy(gg: GadgetGraph, choices: Optional[dict[int, int]] = None) -> ScriptedStrategy:
    """Branch-recording robber: as the canonical one, but the clique picked at
    level l is choices[l], and the robber runs through b_i(l) down a level the
    moment the cops answer.  Against the blockading strategy this realizes one
    deep cop configuration per choice vector."""
    return ScriptedStrategy(
        "robber", _make_robber_fn(gg, "forcing", choices=choices), name="forcing-robber"
    )


# -- comparison fixtures -----------------------------------------------------------


def gen_upclosure_tree(h: int) -> DiGraph:
    """Full binary tree of h levels with undirected tree edges plus directed
    edges from every vertex to each of its proper ancestors."""
    if h < 1:
        raise GenerationError("height must be at least 1")
    n = 2 ** h - 1
    b = _Builder()
    for v in range(n):
        b.add_vertex(f"t{v}", Role(level=_depth_of(v), part="tree"))
    for v in range(1, n):
        parent = (v - 1) // 2
        b.arc(v, parent)
        b.arc(parent, v)
        anc = (parent - 1) // 2 if parent else None
        while parent:
            parent = (parent - 1) // 2
            b.arc(v, parent)
        _ = anc
    return b.graph()


def _depth_of(v: int) -> int:
    return (v + 1).bit_length()


def gen_sibling_tree(n: int) -> DiGraph:
    """Ordered-sibling tree family: each root has n bidirected child edges and
    every child root sends cross edges to all leaves of earlier siblings."""
    if n < 1:
        raise GenerationError("n must be at least 1")
    b = _Builder()

    def build(i: int, prefix: str):
        """Returns (root_vertex, leaves) of a copy of the stage-i graph."""
        root = b.add_vertex(f"{prefix}r{i}", Role(level=i, part="tree"))
        if i == 1:
            return root, [root]
        leaves = []
        prev_leaves: list[int] = []
        for j in range(1, n + 1):
            child, child_leaves = build(i - 1, f"{prefix}{j}.")
            b.arc(root, child)
            b.arc(child, root)
            for leaf in prev_leaves:
                b.arc(child, leaf)
            prev_leaves = prev_leaves + child_leaves
            leaves.extend(child_leaves)
        return root, leaves

    build(n, "")
    return b.graph()


# -- instrumentation ------------------------------------------------------------


def deep_configurations(gg: GadgetGraph, cop_strategy, k: int) -> set[int]:
    """Distinct cop sets realized while the robber inhabits the base region,
    over every branch-choice vector of the forcing robber.

    The size of this set is the desk-scale footprint of the branching the
    forcing robber extracts from the blockading strategy.
    """
    from itertools import product

    from .game import simulate

    configs: set[int] = set()
    t_options = [range(len(lvl.c_list)) for lvl in gg.levels]
    region = gg.base_mask | gg.hub_mask | mask_or(gg.clause_masks)
    for combo in product(*t_options):
        choices = {lvl.index: i for lvl, i in zip(gg.levels, combo)}
        robber = forcing_robber_strategy(gg, choices)
        res = simulate(gg.graph, cop_strategy, robber, k)
        rec = res.record
        if rec is None:
            continue
        steps = rec.steps
        for idx, step in enumerate(steps):
            cops = getattr(step, "cops", None)
            robber_set = getattr(step, "robber", None)
            if cops is None or robber_set is None or not robber_set:
                continue
            rmask = mask_of(robber_set)
            if rmask & ~region:
                continue
            configs.add(mask_of(cops))
            nxt = steps[idx + 1] if idx + 1 < len(steps) else None
            if nxt is not None and hasattr(nxt, "cops_new"):
                configs.add(mask_of(nxt.cops_new))
    return configs
