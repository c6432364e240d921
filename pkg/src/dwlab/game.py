"""The monotone DAG-width cops-and-robber game.

Positions, legal moves, the exact solver (attractor over the forward-explored
position graph), strategy simulation against exhaustive adversaries, position
counting, and a terminal interactive mode.

Conventions.  The game starts at the robber position (∅,∅,∅); the robber
first picks a strongly connected component of the whole graph (his reachable
region there is defined as all of V), then cops and robber alternate.  Cops
win exactly the finite monotone plays ending with a capture; infinite plays
and stuck cop positions go to the robber.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kernels
from .errors import BudgetExceeded, IncompleteStrategyError, InputError
from .graph import DiGraph, iter_bits, mask_of, set_of

DEFAULT_BUDGET = 50_000_000


# -- positions ---------------------------------------------------------------


@dataclass(frozen=True)
class CopPosition:
    """Game state (C, R): cops placed, robber on a component of G - C.

    (∅, ∅) is the distinguished pre-game placeholder.
    """

    cops: frozenset[int]
    robber: frozenset[int]

    def is_initial(self) -> bool:
        return not self.cops and not self.robber


@dataclass(frozen=True)
class RobberPosition:
    """Game state (C, C', R): cops have announced C', robber must react."""

    cops_old: frozenset[int]
    cops_new: frozenset[int]
    robber: frozenset[int]

    def is_initial(self) -> bool:
        return not self.cops_old and not self.cops_new and not self.robber


def _validate_cop_position(g: DiGraph, pos: CopPosition) -> tuple[int, int]:
    c = mask_of(pos.cops)
    r = mask_of(pos.robber)
    g._check_mask(c, "cops")
    g._check_mask(r, "robber")
    if r == 0 and c == 0:
        return c, r
    kern = kernels.active
    if r == 0 or r not in kern.sccs(g.succ, g.n, c):
        raise InputError("robber set is not a component of G - cops")
    return c, r


# -- strategies --------------------------------------------------------------


class Exhaustive:
    """Sentinel adversary: branch over every legal move of this side."""

    def __repr__(self):
        return "Exhaustive()"


EXHAUSTIVE = Exhaustive()


class StrategyTable:
    """Finite positional strategy, mapping positions to chosen successors.

    Cop tables map (C, R) -> C'; robber tables map (C, C', R) -> (C', R').
    Partial: defined on the positions reachable while the owner follows it.
    """

    def __init__(self, owner: str, moves: dict, n: int):
        if owner not in ("cops", "robber"):
            raise InputError(f"bad strategy owner {owner!r}")
        self.owner = owner
        self.moves = moves
        self.n = n

    def __len__(self):
        return len(self.moves)

    def cop_move(self, g: DiGraph, cops: int, robber: int) -> int:
        try:
            return self.moves[(cops, robber)]
        except KeyError:
            raise IncompleteStrategyError(
                f"cop strategy undefined at (C={sorted(iter_bits(cops))}, "
                f"R={sorted(iter_bits(robber))})",
                position=(cops, robber),
            ) from None

    def robber_move(self, g: DiGraph, cops: int, cops_new: int, robber: int, replies: list[int]) -> int:
        try:
            nxt = self.moves[(cops, cops_new, robber)]
        except KeyError:
            raise IncompleteStrategyError(
                f"robber strategy undefined at (C={sorted(iter_bits(cops))}, "
                f"C'={sorted(iter_bits(cops_new))}, R={sorted(iter_bits(robber))})",
                position=(cops, cops_new, robber),
            ) from None
        return nxt[1]

    def to_json(self) -> list:
        out = []
        if self.owner == "cops":
            for (c, r), m in sorted(self.moves.items()):
                out.append({
                    "position": {"cops": sorted(iter_bits(c)), "robber": sorted(iter_bits(r))},
                    "move": sorted(iter_bits(m)),
                })
        else:
            for (c, cn, r), (_, r2) in sorted(self.moves.items()):
                out.append({
                    "position": {
                        "cops": sorted(iter_bits(c)),
                        "cops_new": sorted(iter_bits(cn)),
                        "robber": sorted(iter_bits(r)),
                    },
                    "move": sorted(iter_bits(r2)),
                })
        return out

    @staticmethod
    def from_json(owner: str, data: list, n: int) -> "StrategyTable":
        moves = {}
        for item in data:
            pos = item["position"]
            if owner == "cops":
                key = (mask_of(pos["cops"]), mask_of(pos["robber"]))
                moves[key] = mask_of(item["move"])
            else:
                cn = mask_of(pos["cops_new"])
                key = (mask_of(pos["cops"]), cn, mask_of(pos["robber"]))
                moves[key] = (cn, mask_of(item["move"]))
        return StrategyTable(owner, moves, n)


class ScriptedStrategy:
    """Memoryless strategy computed by a function instead of a table."""

    def __init__(self, owner: str, fn: Callable, name: str = "script"):
        self.owner = owner
        self.fn = fn
        self.name = name

    def cop_move(self, g: DiGraph, cops: int, robber: int) -> int:
        move = self.fn(g, cops, robber)
        if move is None:
            raise IncompleteStrategyError(
                f"{self.name}: no scripted cop move at (C={sorted(iter_bits(cops))}, "
                f"R={sorted(iter_bits(robber))})",
                position=(cops, robber),
            )
        return move

    def robber_move(self, g: DiGraph, cops: int, cops_new: int, robber: int, replies: list[int]) -> int:
        choice = self.fn(g, cops, cops_new, robber, replies)
        if choice is None:
            raise IncompleteStrategyError(
                f"{self.name}: no scripted robber reply",
                position=(cops, cops_new, robber),
            )
        return choice

    def __repr__(self):
        return f"ScriptedStrategy({self.name!r})"


# -- play records -------------------------------------------------------------


COPS_WIN = "CopsWin"
ROBBER_WINS = "RobberWins"
R_INFINITE = "infinite-play-cycle"
R_ILLEGAL = "illegal-monotonicity"
R_STUCK = "cops-stuck"


@dataclass
class PlayRecord:
    """One play: the alternating position sequence plus the outcome."""

    steps: list = field(default_factory=list)
    outcome: Optional[str] = None
    reason: Optional[str] = None

    def to_json(self) -> dict:
        steps = []
        for s in self.steps:
            if isinstance(s, CopPosition):
                steps.append({"cops": sorted(s.cops), "robber": sorted(s.robber)})
            else:
                steps.append({
                    "cops": sorted(s.cops_old),
                    "cops_new": sorted(s.cops_new),
                    "robber": sorted(s.robber),
                })
        return {"steps": steps, "outcome": self.outcome, "reason": self.reason}

    def transcript(self, g: DiGraph) -> str:
        def names(vs):
            return "{" + ",".join(g.names[v] for v in sorted(vs)) + "}"

        lines = []
        rnd = 0
        for s in self.steps:
            if isinstance(s, RobberPosition):
                if s.is_initial():
                    lines.append("start: robber to choose a component")
                else:
                    lines.append(f"round {rnd}: cops announce {names(s.cops_new)}")
            else:
                rnd += 1
                lines.append(
                    f"round {rnd}: position cops={names(s.cops)} robber={names(s.robber)}"
                )
        tail = self.outcome or "unfinished"
        if self.reason:
            tail += f" ({self.reason})"
        lines.append(f"outcome: {tail}")
        return "\n".join(lines)

    def rounds(self) -> int:
        """Number of completed cop moves."""
        return sum(1 for s in self.steps if isinstance(s, RobberPosition) and not s.is_initial())


# -- rules ---------------------------------------------------------------------


def is_monotone_cop_move(g: DiGraph, pos: CopPosition, cops_new) -> bool:
    """True iff announcing cops_new from pos keeps the play monotone.

    Primary formulation: no vertex the cops vacate is reachable from the
    robber component once only the retained cops block.  The equivalent
    territory formulation (reach under C∩C' stays inside reach under C) is
    evaluated alongside and the two are asserted to agree.
    """
    c, r = _validate_cop_position(g, pos)
    cn = mask_of(cops_new) if not isinstance(cops_new, int) else cops_new
    g._check_mask(cn, "cops_new")
    kern = kernels.active
    if pos.is_initial():
        return True
    transit = kern.reach(g.succ, g.n, r, c & cn)
    vacated_ok = not (transit & (c & ~cn))
    territory_ok = not (transit & ~kern.reach(g.succ, g.n, r, c))
    assert vacated_ok == territory_ok, "monotonicity formulations disagree"
    return vacated_ok


def legal_robber_moves(g: DiGraph, pos: RobberPosition) -> list[CopPosition]:
    """All components the robber may pick in reply to the announcement.

    For the initial placeholder (∅,∅,∅) the reachable region is all of V.
    An empty list means the robber is captured.
    """
    kern = kernels.active
    c = mask_of(pos.cops_old)
    cn = mask_of(pos.cops_new)
    r = mask_of(pos.robber)
    g._check_mask(c, "cops_old")
    g._check_mask(cn, "cops_new")
    g._check_mask(r, "robber")
    if r == 0 and not pos.is_initial():
        raise InputError("robber set is empty but position is not the initial placeholder")
    _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
    return [CopPosition(set_of(cn), set_of(q)) for q in replies]


def free_cops(g: DiGraph, pos: CopPosition) -> frozenset[int]:
    """Cops that may be lifted without handing territory back to the robber."""
    c, r = _validate_cop_position(g, pos)
    return set_of(kernels.active.free_mask(g.succ, g.n, c, r))


# -- solving -------------------------------------------------------------------


@dataclass
class SolveResult:
    winner: str                      # "cops" | "robber"
    k: int
    strategy: Optional[StrategyTable]
    n_positions: int
    n_moves: int

    def cops_win(self) -> bool:
        return self.winner == "cops"


def solve(
    g: DiGraph,
    k: int,
    mode: str = "monotone",
    pruned: bool = True,
    budget: int = DEFAULT_BUDGET,
    extract_strategy: bool = True,
    backend=None,
) -> SolveResult:
    """Exact winner of the k-cop game from the initial position.

    mode="monotone" makes monotonicity a move-legality filter; mode="raw"
    admits every cop announcement and awards the play to the robber the
    moment a violation occurs.  Both give the same winner; raw exists as a
    cross-check.  Exceeding the position budget raises, never misreports.
    """
    if g.n == 0:
        raise InputError("game needs a nonempty graph")
    if k < 0:
        raise InputError("cop count must be nonnegative")
    if mode not in ("monotone", "raw"):
        raise InputError(f"unknown mode {mode!r}")
    kern = backend or kernels.active
    res = kern.solve(g.succ, g.n, k, mode=mode, pruned=pruned, budget=budget,
                     extract=extract_strategy)
    strategy = None
    if extract_strategy:
        if res["winner"] == "cops":
            strategy = StrategyTable("cops", res["table"], g.n)
        else:
            moves = {key: val for key, val in res["table"].items()}
            strategy = StrategyTable("robber", moves, g.n)
    return SolveResult(res["winner"], k, strategy, res["n_positions"], res["n_moves"])


def dag_width(g: DiGraph, k_max: int, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Least k <= k_max winning for the cops in monotone mode, else None."""
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    for k in range(1, k_max + 1):
        if solve(g, k, extract_strategy=False, budget=budget).cops_win():
            return k
    return None


# -- simulation ----------------------------------------------------------------


@dataclass
class SimulationResult:
    """Outcome of pitting two strategies (or one against Exhaustive)."""

    winner: str                      # side that the verdict favors
    certified: bool                  # True: the fixed side beat every adversary branch
    record: Optional[PlayRecord]     # single play or counterexample
    positions_seen: int = 0

    def cop_strategy_wins(self) -> bool:
        return self.winner == "cops" and (self.certified or self.record is not None)


def _initial_replies(g: DiGraph, kern) -> list[int]:
    return kern.sccs(g.succ, g.n, 0)


def simulate(
    g: DiGraph,
    cop,
    robber,
    k: int,
    budget: int = DEFAULT_BUDGET,
    pruned: bool = True,
) -> SimulationResult:
    """Play cop vs robber.  Either side may be EXHAUSTIVE (not both).

    With an exhaustive robber this is a full AND-search over robber replies:
    the result is either a certificate that the cop strategy wins monotonely
    or a losing PlayRecord.  Symmetrically for an exhaustive cop side.
    Illegal (non-monotone or over-budget) cop moves lose on the spot.
    """
    if isinstance(cop, Exhaustive) and isinstance(robber, Exhaustive):
        raise InputError("at most one side may be exhaustive; use solve() for both")
    if isinstance(cop, Exhaustive):
        return _simulate_exhaustive_cops(g, robber, k, budget, pruned)
    if isinstance(robber, Exhaustive):
        return _simulate_exhaustive_robber(g, cop, k, budget)
    return _simulate_single(g, cop, robber, k)


def _cop_announcement(g, cop, c, r, k, record_steps):
    """Fetch and vet one cop announcement; return (cn, failure_record)."""
    kern = kernels.active
    cn = cop.cop_move(g, c, r)
    g._check_mask(cn, "announced cop set")
    if cn.bit_count() > k:
        rec = PlayRecord(list(record_steps), ROBBER_WINS, R_ILLEGAL)
        rec.steps.append(RobberPosition(set_of(c), set_of(cn), set_of(r)))
        return cn, rec
    transit = kern.reach(g.succ, g.n, r, c & cn) if r else g.full_mask()
    if r and (transit & (c & ~cn)):
        rec = PlayRecord(list(record_steps), ROBBER_WINS, R_ILLEGAL)
        rec.steps.append(RobberPosition(set_of(c), set_of(cn), set_of(r)))
        return cn, rec
    return cn, None


def _simulate_exhaustive_robber(g, cop, k, budget):
    kern = kernels.active
    memo: dict[tuple[int, int], bool] = {}
    seen = 0

    def visit(c, r, path, stack):
        """Return None if the cops capture every robber continuation, else a
        losing PlayRecord (the first counterexample found)."""
        nonlocal seen
        key = (c, r)
        if memo.get(key):
            return None
        path.append(CopPosition(set_of(c), set_of(r)))
        try:
            if key in stack:
                return PlayRecord(list(path), ROBBER_WINS, R_INFINITE)
            seen += 1
            if seen > budget:
                raise BudgetExceeded(f"simulation budget {budget} exceeded")
            stack.add(key)
            try:
                cn, failure = _cop_announcement(g, cop, c, r, k, path)
                if failure is not None:
                    return failure
                path.append(RobberPosition(set_of(c), set_of(cn), set_of(r)))
                try:
                    _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
                    for q in replies:
                        failure = visit(cn, q, path, stack)
                        if failure is not None:
                            return failure
                finally:
                    path.pop()
                memo[key] = True
                return None
            finally:
                stack.discard(key)
        finally:
            path.pop()

    path = [RobberPosition(frozenset(), frozenset(), frozenset())]
    stack: set = set()
    for q in _initial_replies(g, kern):
        failure = visit(0, q, path, stack)
        if failure is not None:
            return SimulationResult("robber", False, failure, seen)
    return SimulationResult("cops", True, None, seen)


def _simulate_exhaustive_cops(g, robber, k, budget, pruned):
    kern = kernels.active
    memo: dict[tuple[int, int], bool] = {}
    seen = 0

    def visit(c, r, path, stack):
        """True if the robber survives every cop continuation from (c, r)."""
        nonlocal seen
        key = (c, r)
        if key in memo:
            return memo[key], None
        if key in stack:
            return True, None
        seen += 1
        if seen > budget:
            raise BudgetExceeded(f"simulation budget {budget} exceeded")
        stack.add(key)
        path.append(CopPosition(set_of(c), set_of(r)))
        result = True
        failure = None
        for cn in kern.cop_candidates(g.succ, g.n, c, r, k, pruned):
            transit = kern.reach(g.succ, g.n, r, c & cn)
            if transit & (c & ~cn):
                continue
            _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
            path.append(RobberPosition(set_of(c), set_of(cn), set_of(r)))
            if not replies:
                result = False
                failure = PlayRecord(list(path), COPS_WIN, None)
                path.pop()
                break
            q = robber.robber_move(g, c, cn, r, replies)
            if q not in replies:
                raise InputError("robber script returned an illegal reply")
            result, failure = visit(cn, q, path, stack)
            path.pop()
            if not result:
                break
        path.pop()
        stack.discard(key)
        memo[key] = result
        return result, failure

    path = [RobberPosition(frozenset(), frozenset(), frozenset())]
    stack: set = set()
    replies0 = _initial_replies(g, kern)
    q0 = robber.robber_move(g, 0, 0, 0, replies0)
    if q0 not in replies0:
        raise InputError("robber script returned an illegal initial component")
    ok, failure = visit(0, q0, path, stack)
    if ok:
        return SimulationResult("robber", True, None, seen)
    return SimulationResult("cops", False, failure, seen)


def _simulate_single(g, cop, robber, k):
    kern = kernels.active
    rec = PlayRecord([RobberPosition(frozenset(), frozenset(), frozenset())])
    replies0 = _initial_replies(g, kern)
    r = robber.robber_move(g, 0, 0, 0, replies0)
    if r not in replies0:
        raise InputError("robber script returned an illegal initial component")
    c = 0
    visited = set()
    while True:
        rec.steps.append(CopPosition(set_of(c), set_of(r)))
        key = (c, r)
        if key in visited:
            rec.outcome, rec.reason = ROBBER_WINS, R_INFINITE
            return SimulationResult("robber", False, rec, len(visited))
        visited.add(key)
        cn, failure = _cop_announcement(g, cop, c, r, k, rec.steps)
        if failure is not None:
            return SimulationResult("robber", False, failure, len(visited))
        rec.steps.append(RobberPosition(set_of(c), set_of(cn), set_of(r)))
        _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
        if not replies:
            rec.outcome = COPS_WIN
            return SimulationResult("cops", False, rec, len(visited))
        r2 = robber.robber_move(g, c, cn, r, replies)
        if r2 not in replies:
            raise InputError("robber script returned an illegal reply")
        c, r = cn, r2


def count_consistent_positions(g: DiGraph, cop, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Distinct cop positions (C, R) reachable when the cops follow the
    strategy and the robber plays arbitrarily.  Requires a winning strategy."""
    check = simulate(g, cop, EXHAUSTIVE, k, budget=budget)
    if not check.certified:
        raise InputError("count_consistent_positions requires a winning cop strategy")
    kern = kernels.active
    seen: set[tuple[int, int]] = set()
    queue = deque((0, q) for q in _initial_replies(g, kern))
    while queue:
        c, r = queue.popleft()
        if (c, r) in seen:
            continue
        seen.add((c, r))
        cn = cop.cop_move(g, c, r)
        _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
        for q in replies:
            if (cn, q) not in seen:
                queue.append((cn, q))
    return len(seen)


def strategy_from_scripted(g: DiGraph, script, k: int, budget: int = DEFAULT_BUDGET) -> StrategyTable:
    """Materialize a scripted cop strategy into a table over its reachable set."""
    kern = kernels.active
    moves = {}
    seen = set()
    queue = deque((0, q) for q in _initial_replies(g, kern))
    while queue:
        c, r = queue.popleft()
        if (c, r) in seen:
            continue
        seen.add((c, r))
        if len(seen) > budget:
            raise BudgetExceeded(f"budget {budget} exceeded while tabulating script")
        cn = script.cop_move(g, c, r)
        moves[(c, r)] = cn
        _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
        for q in replies:
            if (cn, q) not in seen:
                queue.append((cn, q))
    return StrategyTable("cops", moves, g.n)


# -- shrinking-restricted game (membership bound) -------------------------------


def shrinking_solve(g: DiGraph, k: int, budget: int = DEFAULT_BUDGET):
    """Solve the variant where cop moves must strictly shrink the robber's
    territory at least every second round.  Returns (winner, longest_play).

    longest_play is the maximum number of cop moves over plays consistent
    with the extracted winning cop strategy (None on a robber win).
    """
    kern = kernels.active
    succ, n = g.succ, g.n
    UNKNOWN, COPS, ROBBER = 0, 1, 2

    pos_index: dict = {}
    pos_list = []
    pos_label = []
    pos_step = []
    pos_moves = []
    pos_alive = []
    move_parent = []
    move_new = []
    move_children = []
    move_pending = []
    move_dead = []
    rev = []
    explore = deque()
    decided = deque()
    step = [0]

    def intern(c, r, flag):
        key = (c, r, flag)
        pid = pos_index.get(key)
        if pid is None:
            pid = len(pos_list)
            pos_index[key] = pid
            pos_list.append(key)
            pos_label.append(UNKNOWN)
            pos_step.append(-1)
            pos_moves.append(())
            pos_alive.append(0)
            rev.append([])
            explore.append(pid)
            if len(pos_list) + len(move_parent) > budget:
                raise BudgetExceeded("shrinking solve budget exceeded")
        return pid

    def set_label(pid, lab):
        if pos_label[pid] == UNKNOWN:
            pos_label[pid] = lab
            step[0] += 1
            pos_step[pid] = step[0]
            decided.append(pid)

    def propagate():
        while decided:
            pid = decided.popleft()
            lab = pos_label[pid]
            for mid in rev[pid]:
                if move_dead[mid]:
                    continue
                if lab == COPS:
                    move_pending[mid] -= 1
                    if move_pending[mid] == 0:
                        set_label(move_parent[mid], COPS)
                else:
                    move_dead[mid] = True
                    pp = move_parent[mid]
                    pos_alive[pp] -= 1
                    if pos_alive[pp] == 0:
                        set_label(pp, ROBBER)

    init_children = [intern(0, q, True) for q in kern.sccs(succ, n, 0)]

    while explore:
        pid = explore.popleft()
        c, r, flag = pos_list[pid]
        terr_size = kern.reach(succ, n, r, c).bit_count()
        mids = []
        for cand in kern.cop_candidates(succ, n, c, r, k, True):
            transit = kern.reach(succ, n, r, c & cand)
            if transit & (c & ~cand):
                continue
            shrank = (transit & ~cand).bit_count() < terr_size
            if not flag and not shrank:
                continue  # two non-shrinking cop moves in a row are barred
            mid = len(move_parent)
            move_parent.append(pid)
            move_new.append(cand)
            move_dead.append(False)
            kids = []
            if transit & ~cand:
                for q in kern.sccs(succ, n, cand):
                    if q & transit:
                        kid = intern(cand, q, shrank)
                        kids.append(kid)
                        rev[kid].append(mid)
            move_children.append(kids)
            move_pending.append(sum(1 for kid in kids if pos_label[kid] != COPS))
            if any(pos_label[kid] == ROBBER for kid in kids):
                move_dead[mid] = True
            mids.append(mid)
        pos_moves[pid] = mids
        pos_alive[pid] = sum(1 for mid in mids if not move_dead[mid])
        if pos_alive[pid] == 0:
            set_label(pid, ROBBER)
        else:
            for mid in mids:
                if not move_dead[mid] and move_pending[mid] == 0:
                    set_label(pid, COPS)
                    break
        propagate()

    if not all(pos_label[pid] == COPS for pid in init_children):
        return "robber", None

    # extract a progress-safe strategy and measure its longest play
    choice = {}
    depth: dict[int, int] = {}

    def longest(pid):
        if pid in depth:
            return depth[pid]
        t_p = pos_step[pid]
        best = None
        for mid in pos_moves[pid]:
            if move_dead[mid] or move_pending[mid] != 0:
                continue
            if any(pos_step[kid] >= t_p for kid in move_children[mid]):
                continue
            if best is None or move_new[mid] < move_new[best]:
                best = mid
        choice[pid] = move_new[best]
        kids = move_children[best]
        d = 1 + (max(longest(kid) for kid in kids) if kids else 0)
        depth[pid] = d
        return d

    longest_play = max(longest(pid) for pid in init_children)
    return "cops", longest_play


# -- interactive play ------------------------------------------------------------


def interactive_play(
    g: DiGraph,
    k: int,
    human_side: str,
    machine=None,
    stdin=None,
    stdout=None,
    budget: int = DEFAULT_BUDGET,
) -> PlayRecord:
    """Terminal read-eval loop: the human plays one side, a machine strategy
    the other.  Illegal and non-monotone moves are refused with an
    explanation.  EOF aborts, emitting the partial record."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    kern = kernels.active
    if human_side not in ("cops", "robber"):
        raise InputError("human_side must be 'cops' or 'robber'")
    if machine is None:
        result = solve(g, k, budget=budget)
        machine_side = "robber" if human_side == "cops" else "cops"
        if result.strategy is not None and result.strategy.owner == machine_side:
            machine = result.strategy
        else:
            # the machine side is losing against perfect play: fall back to
            # any legal behavior (first candidate / first reply)
            machine = _FirstLegal(machine_side, k)

    def say(msg):
        print(msg, file=stdout)

    def name_set(mask):
        return "{" + ",".join(g.names[v] for v in iter_bits(mask)) + "}"

    def read_set(prompt):
        say(prompt)
        line = stdin.readline()
        if line == "":
            raise EOFError
        line = line.strip()
        if not line:
            return 0
        ids = []
        by_name = {nm: i for i, nm in enumerate(g.names)}
        for tok in line.replace(",", " ").split():
            if tok in by_name:
                ids.append(by_name[tok])
            else:
                try:
                    v = int(tok)
                except ValueError:
                    raise ValueError(f"unknown vertex {tok!r}")
                if not 0 <= v < g.n:
                    raise ValueError(f"vertex id {v} out of range")
                ids.append(v)
        return mask_of(ids)

    rec = PlayRecord([RobberPosition(frozenset(), frozenset(), frozenset())])
    try:
        replies0 = _initial_replies(g, kern)
        if human_side == "robber":
            say("components: " + " | ".join(name_set(q) for q in replies0))
            while True:
                try:
                    want = read_set("choose your starting component (vertices):")
                except ValueError as e:
                    say(f"illegal: {e}")
                    continue
                matches = [q for q in replies0 if want and (want & ~q) == 0]
                if want and len(matches) == 1:
                    r = matches[0]
                    break
                say("illegal: pick vertices inside exactly one component")
        else:
            r = machine.robber_move(g, 0, 0, 0, replies0)
            say(f"robber starts in {name_set(r)}")
        c = 0
        while True:
            rec.steps.append(CopPosition(set_of(c), set_of(r)))
            if human_side == "cops":
                while True:
                    try:
                        cn = read_set(f"cops at {name_set(c)}, robber in {name_set(r)}; announce new cop set:")
                    except ValueError as e:
                        say(f"illegal: {e}")
                        continue
                    if cn.bit_count() > k:
                        say(f"illegal: more than {k} cops")
                        continue
                    transit = kern.reach(g.succ, g.n, r, c & cn)
                    bad = transit & (c & ~cn)
                    if bad:
                        say(
                            "refused: lifting "
                            + name_set(bad)
                            + " is not monotone (the robber could reoccupy those vertices)"
                        )
                        continue
                    break
            else:
                cn = machine.cop_move(g, c, r)
                say(f"cops announce {name_set(cn)}")
            rec.steps.append(RobberPosition(set_of(c), set_of(cn), set_of(r)))
            _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
            if not replies:
                rec.outcome = COPS_WIN
                say("robber captured; cops win")
                return rec
            if human_side == "robber":
                say("components: " + " | ".join(name_set(q) for q in replies))
                while True:
                    try:
                        want = read_set("choose your component:")
                    except ValueError as e:
                        say(f"illegal: {e}")
                        continue
                    matches = [q for q in replies if want and (want & ~q) == 0]
                    if want and len(matches) == 1:
                        r2 = matches[0]
                        break
                    say("illegal: pick vertices of exactly one legal component")
            else:
                try:
                    r2 = machine.robber_move(g, c, cn, r, replies)
                except IncompleteStrategyError:
                    r2 = replies[0]
                say(f"robber moves to {name_set(r2)}")
            if (cn, r2) in {(mask_of(s.cops), mask_of(s.robber)) for s in rec.steps if isinstance(s, CopPosition)}:
                rec.outcome, rec.reason = ROBBER_WINS, R_INFINITE
                say("position repeats; the play is infinite, robber wins")
                rec.steps.append(CopPosition(set_of(cn), set_of(r2)))
                return rec
            c, r = cn, r2
    except (EOFError, KeyboardInterrupt):
        say("\nplay aborted")
        return rec


class _FirstLegal:
    """Fallback machine: first legal move in canonical order."""

    def __init__(self, owner, k):
        self.owner = owner
        self.k = k

    def cop_move(self, g, c, r):
        kern = kernels.active
        for cand in kern.cop_candidates(g.succ, g.n, c, r, self.k, True):
            transit = kern.reach(g.succ, g.n, r, c & cand)
            if not (transit & (c & ~cand)):
                return cand
        return c

    def robber_move(self, g, c, cn, r, replies):
        return replies[0]
