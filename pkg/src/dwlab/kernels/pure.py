"""Pure-Python game kernels: bitmask reachability, SCCs, move generation and
the exact attractor solver for the monotone cops-and-robber game.

This is the fallback backend; `dwlab.kernels._core` is the compiled twin with
the same functions and bit-identical outputs.  Keep the two in lockstep.
"""

from __future__ import annotations

from collections import deque

from ..errors import BudgetExceeded

BACKEND_NAME = "pure"

UNKNOWN, COPS, ROBBER = 0, 1, 2


def reach(succ, n, from_mask, removed_mask):
    """All vertices reachable from from_mask \\ removed in G - removed."""
    src = from_mask & ~removed_mask
    seen = src
    frontier = src
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= succ[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & ~removed_mask & ~seen
        seen |= frontier
    return seen


def sccs(succ, n, removed_mask):
    """Strongly connected components of G - removed, ordered by lowest vertex."""
    alive = ((1 << n) - 1) & ~removed_mask
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if not (alive >> root) & 1 or index[root] != -1:
            continue
        work = [(root, succ[root] & alive)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, todo = work[-1]
            advanced = False
            while todo:
                lowbit = todo & -todo
                todo ^= lowbit
                work[-1] = (v, todo)
                w = lowbit.bit_length() - 1
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, succ[w] & alive))
                    advanced = True
                    break
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
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


def free_mask(succ, n, cops, robber):
    """On-board cops whose removal keeps their vertex unreachable from R."""
    out = 0
    c = cops
    while c:
        low = c & -c
        c ^= low
        if not reach(succ, n, robber, cops ^ low) & low:
            out |= low
    return out


def is_monotone(succ, n, cops, robber, new_cops):
    """No vertex vacated by the move becomes robber-reachable during it."""
    vacated = cops & ~new_cops
    if not vacated:
        return True
    return not reach(succ, n, robber, cops & new_cops) & vacated


def lex_less(a, b):
    """Lexicographic order on vertex sets listed ascending (prefix-first)."""
    d = a ^ b
    if d == 0:
        return False
    p = d & -d
    rest = -(p << 1)  # bits strictly above p
    if a & p:
        return bool(b & rest)
    return not (a & rest)


def _subsets_up_to(mask, maxsize):
    """All submasks of mask with popcount <= maxsize (unspecified order)."""
    bits = []
    m = mask
    while m:
        low = m & -m
        bits.append(low)
        m ^= low
    out = [0]
    for low in bits:
        extend = [s | low for s in out if (s | low).bit_count() <= maxsize]
        out.extend(extend)
    return out


def cop_candidates(succ, n, cops, robber, k, pruned):
    """Candidate next cop sets C' != C, ascending mask order.

    Pruned: removals only of free cops, additions only inside the robber's
    current territory.  Unpruned: every C' with |C'| <= k.
    """
    out = []
    if pruned:
        terr = reach(succ, n, robber, cops)
        avail = terr & ~cops
        fm = free_mask(succ, n, cops, robber)
        for fs in _subsets_up_to(fm, k):
            base = cops & ~fs
            slots = k - base.bit_count()
            if slots < 0:
                continue
            for add in _subsets_up_to(avail, slots):
                cand = base | add
                if cand != cops:
                    out.append(cand)
        out = sorted(set(out))
    else:
        full = (1 << n) - 1
        for cand in _subsets_up_to(full, k):
            if cand != cops:
                out.append(cand)
        out.sort()
    return out


def robber_replies(succ, n, cops_old, cops_new, robber):
    """(transit, replies): components of G - C' inside the robber's region.

    The empty robber mask marks the initial placeholder whose region is V.
    """
    if robber == 0:
        transit = (1 << n) - 1
    else:
        transit = reach(succ, n, robber, cops_old & cops_new)
    live = transit & ~cops_new
    if not live:
        return transit, []
    return transit, [q for q in sccs(succ, n, cops_new) if q & transit]


def solve(succ, n, k, mode="monotone", pruned=True, budget=50_000_000, extract=True):
    """Exact winner of the k-cop game, explored forward from the start.

    Returns {winner, table, init_reply, n_positions, n_moves}.  For a cop win
    the table maps (C, R) -> C' over the positions reachable under the
    extracted strategy; for a robber win it maps (C, C', R) -> (C', R') over
    the cop moves reachable while the robber follows his strategy, plus the
    initial choice under the placeholder key.

    Raw mode keeps every cop announcement as a candidate and hands the play
    to the robber the moment a move violates monotonicity; since a violating
    move can never serve the cops, it is recorded as permanently dead rather
    than expanded.
    """
    raw = mode == "raw"
    use_pruned = pruned and not raw

    pos_index = {}
    pos_list = []      # pid -> (C, R)
    pos_label = []
    pos_step = []      # step at which the label was decided
    pos_moves = []     # pid -> [mid...]
    pos_alive = []     # count of not-dead moves
    move_parent = []
    move_newcops = []
    move_pending = []  # children not yet labeled cops-win
    move_dead = []
    move_children = []  # mid -> [pid...]
    rev = []            # pid -> [mid...] moves having this position as child
    step_counter = [0]
    explore = deque()
    decided = deque()

    def intern(c, r):
        key = (c, r)
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
                raise BudgetExceeded(f"position budget {budget} exceeded")
        return pid

    def set_label(pid, lab):
        if pos_label[pid] != UNKNOWN:
            return
        pos_label[pid] = lab
        step_counter[0] += 1
        pos_step[pid] = step_counter[0]
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

    init_children = [intern(0, q) for q in sccs(succ, n, 0)]

    while explore:
        pid = explore.popleft()
        c, r = pos_list[pid]
        mids = []
        for cand in cop_candidates(succ, n, c, r, k, use_pruned):
            transit = reach(succ, n, r, c & cand)
            if transit & (c & ~cand):
                # non-monotone: illegal in monotone mode, instantly losing in
                # raw mode; either way useless to the cops.
                continue
            mid = len(move_parent)
            move_parent.append(pid)
            move_newcops.append(cand)
            move_dead.append(False)
            kids = []
            if transit & ~cand:
                for q in sccs(succ, n, cand):
                    if q & transit:
                        kid = intern(cand, q)
                        kids.append(kid)
                        rev[kid].append(mid)
            move_children.append(kids)
            move_pending.append(sum(1 for kid in kids if pos_label[kid] != COPS))
            if any(pos_label[kid] == ROBBER for kid in kids):
                move_dead[mid] = True
            mids.append(mid)
            if len(pos_list) + len(move_parent) > budget:
                raise BudgetExceeded(f"position budget {budget} exceeded")
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

    # Positions never labeled have only cyclic continuations: robber wins them.
    winner = COPS if all(pos_label[pid] == COPS for pid in init_children) else ROBBER

    result = {
        "winner": "cops" if winner == COPS else "robber",
        "table": None,
        "init_reply": None,
        "n_positions": len(pos_list),
        "n_moves": len(move_parent),
    }
    if not extract:
        return result

    table = {}
    if winner == COPS:
        queue = deque(init_children)
        seen = set(init_children)
        while queue:
            pid = queue.popleft()
            c, r = pos_list[pid]
            t_p = pos_step[pid]
            best_mid = best_size = best_cand = None
            for mid in pos_moves[pid]:
                if move_dead[mid] or move_pending[mid] != 0:
                    continue
                kids = move_children[mid]
                if any(pos_step[kid] >= t_p for kid in kids):
                    continue  # not progress-safe: could recreate a cycle
                cand = move_newcops[mid]
                transit = reach(succ, n, r, c & cand)
                size = (transit & ~cand).bit_count()
                if (
                    best_mid is None
                    or size < best_size
                    or (size == best_size and lex_less(cand, best_cand))
                ):
                    best_mid, best_size, best_cand = mid, size, cand
            table[(c, r)] = best_cand
            for kid in move_children[best_mid]:
                if kid not in seen:
                    seen.add(kid)
                    queue.append(kid)
    else:
        start = next(pid for pid in init_children if pos_label[pid] != COPS)
        result["init_reply"] = pos_list[start][1]
        table[(0, 0, 0)] = (0, pos_list[start][1])
        queue = deque([start])
        seen = {start}
        while queue:
            pid = queue.popleft()
            c, r = pos_list[pid]
            for mid in pos_moves[pid]:
                kids = move_children[mid]
                chosen = None
                for kid in kids:
                    if pos_label[kid] == ROBBER:
                        chosen = kid
                        break
                if chosen is None:
                    for kid in kids:
                        if pos_label[kid] == UNKNOWN:
                            chosen = kid
                            break
                cand = move_newcops[mid]
                cc, rr = pos_list[chosen]
                table[(c, cand, r)] = (cc, rr)
                if chosen not in seen:
                    seen.add(chosen)
                    queue.append(chosen)
    result["table"] = table
    return result
