"""Directed-graph core: immutable digraphs, reachability, SCCs, serialization.

Vertices are dense integers 0..n-1; optional string names and role tags ride
along as sidecar metadata.  Vertex sets are plain Python ints used as bitsets
so the game solver can churn through millions of set operations cheaply.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import InputError, ParseError


def mask_of(vertices: Iterable[int]) -> int:
    """Pack an iterable of vertex ids into a bitmask."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def set_of(mask: int) -> frozenset[int]:
    """Unpack a bitmask into a frozenset of vertex ids."""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in ascending order."""
    v = 0
    while mask:
        if mask & 1:
            yield v
        mask >>= 1
        v += 1


def popcount(mask: int) -> int:
    return mask.bit_count()


def lex_key(mask: int) -> tuple[int, ...]:
    """Sort key realizing lexicographic order on ascending vertex-id lists."""
    return tuple(iter_bits(mask))


@dataclass(frozen=True)
class Role:
    """Structural tag of a gadget vertex: level plus part name.

    ``index`` disambiguates indexed parts (b_i within B, C_i cliques keep the
    index in the part name instead).  Clause-gadget vertices carry the clause
    and literal indices.
    """

    level: int
    part: str
    index: Optional[int] = None
    clause: Optional[int] = None
    literal: Optional[int] = None

    def to_json(self) -> dict:
        d = {"level": self.level, "part": self.part}
        if self.index is not None:
            d["index"] = self.index
        if self.clause is not None:
            d["clause"] = self.clause
        if self.literal is not None:
            d["literal"] = self.literal
        return d

    @staticmethod
    def from_json(d: dict) -> "Role":
        return Role(
            level=d["level"],
            part=d["part"],
            index=d.get("index"),
            clause=d.get("clause"),
            literal=d.get("literal"),
        )


class DiGraph:
    """Finite simple digraph.  Immutable after construction.

    Undirected edges of the source constructions are materialized as two
    antiparallel arcs at generation time; self-loops are rejected.
    """

    __slots__ = ("n", "names", "succ", "roles", "_pred")

    def __init__(self, names: list[str], succ: list[int], roles: Optional[dict[int, Role]] = None):
        self.n = len(names)
        self.names = tuple(names)
        self.succ = tuple(succ)
        self.roles = dict(roles) if roles else {}
        self._pred = None
        full = (1 << self.n) - 1
        for v, m in enumerate(self.succ):
            if m >> self.n:
                raise InputError(f"edge target out of range at vertex {v}")
            if m & (1 << v):
                raise InputError(f"self-loop at vertex {v}")
        for v in self.roles:
            if not (0 <= v < self.n):
                raise InputError(f"role attached to unknown vertex {v}")
        _ = full

    @staticmethod
    def from_edges(
        vertices: "int | list[str]",
        edges: Iterable[tuple[int, int]],
        roles: Optional[dict[int, Role]] = None,
    ) -> "DiGraph":
        if isinstance(vertices, int):
            names = [f"v{i}" for i in range(vertices)]
        else:
            names = list(vertices)
        n = len(names)
        succ = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) references unknown vertex")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            succ[u] |= 1 << v
        return DiGraph(names, succ, roles)

    # -- basic accessors -------------------------------------------------

    def vertices(self) -> range:
        return range(self.n)

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def successors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return set_of(self.succ[v])

    def pred_masks(self) -> tuple[int, ...]:
        if self._pred is None:
            pred = [0] * self.n
            for u in range(self.n):
                for v in iter_bits(self.succ[u]):
                    pred[v] |= 1 << u
            self._pred = tuple(pred)
        return self._pred

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n):
            for v in iter_bits(self.succ[u]):
                out.append((u, v))
        return out

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return bool(self.succ[u] & (1 << v))

    def num_edges(self) -> int:
        return sum(popcount(m) for m in self.succ)

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InputError(f"unknown vertex id {v}")

    def _check_mask(self, mask: int, what: str) -> None:
        if mask < 0 or mask >> self.n:
            raise InputError(f"{what} is not a subset of V(G)")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiGraph)
            and self.names == other.names
            and self.succ == other.succ
            and self.roles == other.roles
        )

    def __hash__(self):
        return hash((self.names, self.succ))

    def __repr__(self):
        return f"DiGraph(n={self.n}, m={self.num_edges()})"

    def is_weakly_connected(self) -> bool:
        if self.n == 0:
            return True
        sym = [self.succ[v] for v in range(self.n)]
        pred = self.pred_masks()
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= sym[v] | pred[v]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == self.full_mask()


# -- reachability and components ------------------------------------------


def reach_mask(g: DiGraph, from_mask: int, removed_mask: int) -> int:
    """Vertices reachable in g - removed from the sources minus removed."""
    src = from_mask & ~removed_mask
    seen = src
    frontier = src
    succ = g.succ
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= succ[v]
        frontier = nxt & ~removed_mask & ~seen
        seen |= frontier
    return seen


def reach(g: DiGraph, frm: Iterable[int], removed: Iterable[int] = ()) -> frozenset[int]:
    """Reachable set of ``frm`` in ``g - removed``, sources included.

    Sources inside ``removed`` are ignored.
    """
    fm = mask_of(frm)
    rm = mask_of(removed)
    g._check_mask(fm, "from")
    g._check_mask(rm, "removed")
    return set_of(reach_mask(g, fm, rm))


def scc_masks(g: DiGraph, removed_mask: int) -> list[int]:
    """Strongly connected components of g - removed as bitmasks.

    Canonical deterministic order: ascending smallest member id.
    Iterative Tarjan over the bitmask adjacency.
    """
    n = g.n
    succ = g.succ
    alive = g.full_mask() & ~removed_mask
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[int] = []
    counter = 0

    for root in range(n):
        if not (alive >> root) & 1 or index[root] != -1:
            continue
        work = [(root, iter_bits(succ[root] & alive))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter_bits(succ[w] & alive)))
                    advanced = True
                    break
                elif on_stack[w]:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp |= 1 << w
                    if w == v:
                        break
                comps.append(comp)
    comps.sort(key=lambda m: (m & -m).bit_length())
    return comps


def components(g: DiGraph, removed: Iterable[int] = ()) -> list[frozenset[int]]:
    """SCCs of g - removed, ordered by smallest contained vertex id."""
    rm = mask_of(removed)
    g._check_mask(rm, "removed")
    return [set_of(m) for m in scc_masks(g, rm)]


# -- serialization ----------------------------------------------------------

FORMATS = ("json", "dot", "edgelist")


def encode(g: DiGraph, format: str = "json") -> bytes:
    """Serialize a graph.  Roles survive only the json format; dot carries
    them as colors/labels and edgelist as comments, both export-only."""
    if format == "json":
        return _encode_json(g)
    if format == "dot":
        return _encode_dot(g)
    if format == "edgelist":
        return _encode_edgelist(g)
    raise InputError(f"unknown format {format!r}")


def _graph_to_obj(g: DiGraph) -> dict:
    verts = []
    for v in range(g.n):
        item: dict = {"id": v, "name": g.names[v]}
        if v in g.roles:
            item["role"] = g.roles[v].to_json()
        verts.append(item)
    return {"vertices": verts, "edges": [[u, v] for (u, v) in g.edges()]}


def _encode_json(g: DiGraph) -> bytes:
    return json.dumps(_graph_to_obj(g), sort_keys=True, separators=(",", ":")).encode()


_PART_COLORS = {
    "M": "lightblue", "D": "steelblue", "A": "orange", "B": "gold",
    "F-hub": "red", "F-clause": "salmon", "base": "gray",
}


def _encode_dot(g: DiGraph) -> bytes:
    lines = ["digraph G {"]
    for v in range(g.n):
        attrs = [f'label="{g.names[v]}"']
        role = g.roles.get(v)
        if role is not None:
            color = _PART_COLORS.get(role.part, "palegreen")
            attrs.append(f'style=filled,fillcolor="{color}"')
            attrs.append(f'tooltip="level {role.level} part {role.part}"')
        lines.append(f"  {v} [{','.join(attrs)}];")
    done = set()
    for u, v in g.edges():
        if (v, u) in done:
            continue
        if g.has_edge(v, u):
            lines.append(f"  {u} -> {v} [dir=both];")
        else:
            lines.append(f"  {u} -> {v};")
        done.add((u, v))
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()


def _encode_edgelist(g: DiGraph) -> bytes:
    lines = [f"# {g.n} vertices"]
    for v in range(g.n):
        role = g.roles.get(v)
        if role is not None:
            lines.append(f"# vertex {v} {g.names[v]} level={role.level} part={role.part}")
    for u, v in g.edges():
        lines.append(f"{u} {v}")
    return ("\n".join(lines) + "\n").encode()


def decode(data: bytes, format: str = "json") -> DiGraph:
    """Parse a graph; only json is a full round-trip format."""
    if format != "json":
        raise InputError(f"decode supports json only, not {format!r}")
    try:
        obj = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"bad graph json: {e.msg}", offset=e.pos, line=e.lineno, column=e.colno) from e
    except UnicodeDecodeError as e:
        raise ParseError(f"bad graph payload: {e.reason}", offset=e.start) from e
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise ParseError("graph json must be an object with 'vertices' and 'edges'")
    verts = obj["vertices"]
    ids = [item.get("id") for item in verts]
    if ids != list(range(len(verts))):
        raise ParseError("vertex ids must be dense integers 0..n-1 in order")
    names = [item.get("name", f"v{item['id']}") for item in verts]
    roles = {}
    for item in verts:
        if "role" in item and item["role"] is not None:
            try:
                roles[item["id"]] = Role.from_json(item["role"])
            except KeyError as e:
                raise ParseError(f"vertex {item['id']} role missing field {e}") from e
    try:
        return DiGraph.from_edges(names, [tuple(e) for e in obj["edges"]], roles)
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad edge list: {e}") from e
