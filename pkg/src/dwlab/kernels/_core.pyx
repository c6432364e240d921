# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled game kernels: bit-identical, faster twin of dwlab.kernels.pure.

Restricted to graphs with at most 64 vertices (one machine word per vertex
set), which covers everything this laboratory generates.  Any semantic
change here must be mirrored in pure.py; the test suite compares the two
backends output-for-output.
"""

from libc.stdint cimport int64_t, uint64_t
from libcpp.vector cimport vector

from dwlab.errors import BudgetExceeded

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

BACKEND_NAME = "compiled"

cdef char UNKNOWN = 0
cdef char COPS = 1
cdef char ROBBER = 2


cdef inline int popcnt(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef inline int ctz(uint64_t x) nogil:
    return __builtin_ctzll(x)


cdef inline uint64_t creach(uint64_t* succ, int n, uint64_t from_mask, uint64_t removed) nogil:
    cdef uint64_t src = from_mask & ~removed
    cdef uint64_t seen = src
    cdef uint64_t frontier = src
    cdef uint64_t nxt, low
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & (~frontier + 1)
            nxt |= succ[ctz(low)]
            frontier ^= low
        frontier = nxt & ~removed & ~seen
        seen |= frontier
    return seen


cdef int csccs(uint64_t* succ, int n, uint64_t removed, vector[uint64_t]& out) nogil:
    """Tarjan over the alive vertices; components sorted by lowest vertex."""
    cdef uint64_t alive = (~(<uint64_t>0) >> (64 - n)) & ~removed
    cdef int index[64]
    cdef int low[64]
    cdef bint on_stack[64]
    cdef int stack[64]
    cdef int sp = 0
    cdef int work_v[64]
    cdef uint64_t work_todo[64]
    cdef int wp
    cdef int counter = 0
    cdef int root, v, w
    cdef uint64_t todo, lowbit, comp
    cdef bint advanced
    cdef size_t i, j
    cdef uint64_t tmp
    out.clear()
    for v in range(n):
        index[v] = -1
    for root in range(n):
        if not ((alive >> root) & 1) or index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        work_v[0] = root
        work_todo[0] = succ[root] & alive
        wp = 1
        while wp > 0:
            v = work_v[wp - 1]
            todo = work_todo[wp - 1]
            advanced = False
            while todo:
                lowbit = todo & (~todo + 1)
                todo ^= lowbit
                work_todo[wp - 1] = todo
                w = ctz(lowbit)
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = True
                    work_v[wp] = w
                    work_todo[wp] = succ[w] & alive
                    wp += 1
                    advanced = True
                    break
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            wp -= 1
            if wp > 0:
                if low[v] < low[work_v[wp - 1]]:
                    low[work_v[wp - 1]] = low[v]
            if low[v] == index[v]:
                comp = 0
                while True:
                    sp -= 1
                    w = stack[sp]
                    on_stack[w] = False
                    comp |= (<uint64_t>1) << w
                    if w == v:
                        break
                out.push_back(comp)
    # insertion sort by lowest set bit (component count is small)
    for i in range(1, out.size()):
        tmp = out[i]
        j = i
        while j > 0 and ctz(out[j - 1]) > ctz(tmp):
            out[j] = out[j - 1]
            j -= 1
        out[j] = tmp
    return 0


cdef inline uint64_t cfree_mask(uint64_t* succ, int n, uint64_t cops, uint64_t robber) nogil:
    cdef uint64_t out = 0
    cdef uint64_t c = cops
    cdef uint64_t low
    while c:
        low = c & (~c + 1)
        c ^= low
        if not (creach(succ, n, robber, cops ^ low) & low):
            out |= low
    return out


cdef inline bint clex_less(uint64_t a, uint64_t b) nogil:
    cdef uint64_t d = a ^ b
    cdef uint64_t p, rest
    if d == 0:
        return False
    p = d & (~d + 1)
    rest = ~((p << 1) - 1)  # bits strictly above p
    if a & p:
        return (b & rest) != 0
    return (a & rest) == 0


cdef int _fill_succ(object succ_obj, int n, uint64_t* succ) except -1:
    if n > 64:
        raise ValueError("compiled kernels support at most 64 vertices")
    cdef int v
    for v in range(n):
        succ[v] = <uint64_t>succ_obj[v]
    return 0


def reach(succ_obj, int n, from_mask, removed_mask):
    cdef uint64_t succ[64]
    _fill_succ(succ_obj, n, succ)
    return creach(succ, n, <uint64_t>from_mask, <uint64_t>removed_mask)


def sccs(succ_obj, int n, removed_mask):
    cdef uint64_t succ[64]
    cdef vector[uint64_t] out
    _fill_succ(succ_obj, n, succ)
    csccs(succ, n, <uint64_t>removed_mask, out)
    return [out[i] for i in range(out.size())]


def free_mask(succ_obj, int n, cops, robber):
    cdef uint64_t succ[64]
    _fill_succ(succ_obj, n, succ)
    return cfree_mask(succ, n, <uint64_t>cops, <uint64_t>robber)


def is_monotone(succ_obj, int n, cops, robber, new_cops):
    cdef uint64_t succ[64]
    cdef uint64_t c = <uint64_t>cops, r = <uint64_t>robber, cn = <uint64_t>new_cops
    cdef uint64_t vacated = c & ~cn
    _fill_succ(succ_obj, n, succ)
    if not vacated:
        return True
    return not (creach(succ, n, r, c & cn) & vacated)


def lex_less(a, b):
    return clex_less(<uint64_t>a, <uint64_t>b)


cdef int _subsets_up_to(uint64_t mask, int maxsize, vector[uint64_t]& out) nogil:
    """All submasks with popcount <= maxsize (order: progressive extension)."""
    cdef uint64_t bits[64]
    cdef int nb = 0
    cdef uint64_t m = mask, low
    cdef size_t i, end
    out.clear()
    out.push_back(0)
    while m:
        low = m & (~m + 1)
        bits[nb] = low
        nb += 1
        m ^= low
    cdef int bi
    for bi in range(nb):
        end = out.size()
        for i in range(end):
            if popcnt(out[i] | bits[bi]) <= maxsize:
                out.push_back(out[i] | bits[bi])
    return 0


cdef int _cop_candidates(uint64_t* succ, int n, uint64_t cops, uint64_t robber,
                         int k, bint pruned, vector[uint64_t]& out) nogil:
    cdef vector[uint64_t] removals
    cdef vector[uint64_t] adds
    cdef uint64_t terr, avail, fm, base, cand, full
    cdef int slots
    cdef size_t i, j
    cdef uint64_t tmp
    out.clear()
    if pruned:
        terr = creach(succ, n, robber, cops)
        avail = terr & ~cops
        fm = cfree_mask(succ, n, cops, robber)
        _subsets_up_to(fm, k, removals)
        for i in range(removals.size()):
            base = cops & ~removals[i]
            slots = k - popcnt(base)
            if slots < 0:
                continue
            _subsets_up_to(avail, slots, adds)
            for j in range(adds.size()):
                cand = base | adds[j]
                if cand != cops:
                    out.push_back(cand)
    else:
        full = (~(<uint64_t>0)) >> (64 - n)
        _subsets_up_to(full, k, adds)
        for j in range(adds.size()):
            if adds[j] != cops:
                out.push_back(adds[j])
    # sort ascending (candidates are distinct by construction)
    for i in range(1, out.size()):
        tmp = out[i]
        j = i
        while j > 0 and out[j - 1] > tmp:
            out[j] = out[j - 1]
            j -= 1
        out[j] = tmp
    return 0


def cop_candidates(succ_obj, int n, cops, robber, int k, bint pruned):
    cdef uint64_t succ[64]
    cdef vector[uint64_t] out
    _fill_succ(succ_obj, n, succ)
    _cop_candidates(succ, n, <uint64_t>cops, <uint64_t>robber, k, pruned, out)
    return [out[i] for i in range(out.size())]


def robber_replies(succ_obj, int n, cops_old, cops_new, robber):
    cdef uint64_t succ[64]
    cdef uint64_t c = <uint64_t>cops_old, cn = <uint64_t>cops_new, r = <uint64_t>robber
    cdef uint64_t transit
    cdef vector[uint64_t] comps
    _fill_succ(succ_obj, n, succ)
    if r == 0:
        transit = (~(<uint64_t>0)) >> (64 - n)
    else:
        transit = creach(succ, n, r, c & cn)
    if not (transit & ~cn):
        return transit, []
    csccs(succ, n, cn, comps)
    return transit, [comps[i] for i in range(comps.size()) if comps[i] & transit]


# -- the solver -----------------------------------------------------------------


cdef struct HashTable:
    vector[int64_t]* slots
    uint64_t mask


cdef inline uint64_t _mix(uint64_t x) nogil:
    x += <uint64_t>0x9E3779B97F4A7C15
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


def solve(succ_obj, int n, int k, mode="monotone", bint pruned=True,
          int64_t budget=50_000_000, bint extract=True):
    """Mirror of pure.solve; see that docstring.  Returns the same dict."""
    cdef uint64_t succ[64]
    _fill_succ(succ_obj, n, succ)
    cdef bint raw = (mode == "raw")
    cdef bint use_pruned = pruned and not raw

    # positions
    cdef vector[uint64_t] pos_c
    cdef vector[uint64_t] pos_r
    cdef vector[char] pos_label
    cdef vector[int64_t] pos_step
    cdef vector[int64_t] pos_mstart
    cdef vector[int64_t] pos_mcnt
    cdef vector[int64_t] pos_alive
    # moves
    cdef vector[int64_t] move_parent
    cdef vector[uint64_t] move_newcops
    cdef vector[int64_t] move_pending
    cdef vector[char] move_dead
    cdef vector[int64_t] move_cstart
    cdef vector[int64_t] move_ccnt
    cdef vector[int64_t] child_pool
    cdef vector[vector[int64_t]] rev
    cdef vector[int64_t] decided
    cdef int64_t decided_head = 0
    cdef int64_t step_counter = 0

    # open-addressing intern table
    cdef uint64_t cap = 1 << 16
    cdef vector[int64_t] table
    table.resize(cap, -1)

    cdef int64_t n_pos = 0

    cdef uint64_t h
    cdef int64_t slot, pid

    cdef vector[uint64_t] cands
    cdef vector[uint64_t] comps
    cdef uint64_t c, r, cand, transit, q
    cdef int64_t explore_head = 0
    cdef int64_t mid, kid, pp, i64
    cdef size_t ci, qi
    cdef int64_t pending
    cdef bint anydead
    cdef int64_t total_budget_units = 0

    # ---- helpers written as inline code blocks ----
    cdef uint64_t probe_c, probe_r

    cdef int64_t j64
    cdef uint64_t old_cap, new_cap
    cdef vector[int64_t] new_table

    # intern(c, r): find or insert, returns pid; appends to pos arrays
    # (implemented inline twice below via macros-in-spirit)

    def _raise_budget():
        raise BudgetExceeded(f"position budget {budget} exceeded")

    # initial components
    csccs(succ, n, 0, comps)
    cdef vector[int64_t] init_children
    for ci in range(comps.size()):
        q = comps[ci]
        # inline intern --------------------------------------------------
        h = (_mix(0) * 3) ^ _mix(q)
        slot = <int64_t>(h & (cap - 1))
        while True:
            pid = table[slot]
            if pid == -1:
                pid = n_pos
                table[slot] = pid
                pos_c.push_back(0)
                pos_r.push_back(q)
                pos_label.push_back(UNKNOWN)
                pos_step.push_back(-1)
                pos_mstart.push_back(0)
                pos_mcnt.push_back(0)
                pos_alive.push_back(0)
                rev.resize(rev.size() + 1)
                n_pos += 1
                break
            if pos_c[pid] == 0 and pos_r[pid] == q:
                break
            slot = <int64_t>((slot + 1) & (cap - 1))
        # -----------------------------------------------------------------
        init_children.push_back(pid)

    while explore_head < n_pos:
        pid = explore_head
        explore_head += 1
        c = pos_c[pid]
        r = pos_r[pid]
        _cop_candidates(succ, n, c, r, k, use_pruned, cands)
        pos_mstart[pid] = <int64_t>move_parent.size()
        for ci in range(cands.size()):
            cand = cands[ci]
            transit = creach(succ, n, r, c & cand)
            if transit & (c & ~cand):
                continue  # non-monotone: illegal / instantly losing
            mid = <int64_t>move_parent.size()
            move_parent.push_back(pid)
            move_newcops.push_back(cand)
            move_dead.push_back(0)
            move_cstart.push_back(<int64_t>child_pool.size())
            pending = 0
            anydead = False
            if transit & ~cand:
                csccs(succ, n, cand, comps)
                for qi in range(comps.size()):
                    q = comps[qi]
                    if not (q & transit):
                        continue
                    # inline intern of (cand, q) --------------------------
                    if (n_pos * 2) >= <int64_t>cap:
                        # grow + rehash
                        old_cap = cap
                        new_cap = cap << 1
                        new_table.clear()
                        new_table.resize(new_cap, -1)
                        for j64 in range(n_pos):
                            h = (_mix(pos_c[j64]) * 3) ^ _mix(pos_r[j64])
                            slot = <int64_t>(h & (new_cap - 1))
                            while new_table[slot] != -1:
                                slot = <int64_t>((slot + 1) & (new_cap - 1))
                            new_table[slot] = j64
                        table.swap(new_table)
                        cap = new_cap
                    h = (_mix(cand) * 3) ^ _mix(q)
                    slot = <int64_t>(h & (cap - 1))
                    while True:
                        kid = table[slot]
                        if kid == -1:
                            kid = n_pos
                            table[slot] = kid
                            pos_c.push_back(cand)
                            pos_r.push_back(q)
                            pos_label.push_back(UNKNOWN)
                            pos_step.push_back(-1)
                            pos_mstart.push_back(0)
                            pos_mcnt.push_back(0)
                            pos_alive.push_back(0)
                            rev.resize(rev.size() + 1)
                            n_pos += 1
                            break
                        if pos_c[kid] == cand and pos_r[kid] == q:
                            break
                        slot = <int64_t>((slot + 1) & (cap - 1))
                    # ------------------------------------------------------
                    child_pool.push_back(kid)
                    rev[kid].push_back(mid)
                    if pos_label[kid] != COPS:
                        pending += 1
                    if pos_label[kid] == ROBBER:
                        anydead = True
            move_ccnt.push_back(<int64_t>child_pool.size() - move_cstart[mid])
            move_pending.push_back(pending)
            if anydead:
                move_dead[mid] = 1
            if n_pos + <int64_t>move_parent.size() > budget:
                _raise_budget()
        pos_mcnt[pid] = <int64_t>move_parent.size() - pos_mstart[pid]
        if n_pos + <int64_t>move_parent.size() > budget:
            _raise_budget()
        # initial labeling of this position
        i64 = 0
        for mid in range(pos_mstart[pid], pos_mstart[pid] + pos_mcnt[pid]):
            if not move_dead[mid]:
                i64 += 1
        pos_alive[pid] = i64
        if i64 == 0:
            if pos_label[pid] == UNKNOWN:
                pos_label[pid] = ROBBER
                step_counter += 1
                pos_step[pid] = step_counter
                decided.push_back(pid)
        else:
            for mid in range(pos_mstart[pid], pos_mstart[pid] + pos_mcnt[pid]):
                if not move_dead[mid] and move_pending[mid] == 0:
                    if pos_label[pid] == UNKNOWN:
                        pos_label[pid] = COPS
                        step_counter += 1
                        pos_step[pid] = step_counter
                        decided.push_back(pid)
                    break
        # propagate
        while decided_head < <int64_t>decided.size():
            kid = decided[decided_head]
            decided_head += 1
            for ci in range(rev[kid].size()):
                mid = rev[kid][ci]
                if move_dead[mid]:
                    continue
                if pos_label[kid] == COPS:
                    move_pending[mid] -= 1
                    if move_pending[mid] == 0:
                        pp = move_parent[mid]
                        if pos_label[pp] == UNKNOWN:
                            pos_label[pp] = COPS
                            step_counter += 1
                            pos_step[pp] = step_counter
                            decided.push_back(pp)
                else:
                    move_dead[mid] = 1
                    pp = move_parent[mid]
                    pos_alive[pp] -= 1
                    if pos_alive[pp] == 0 and pos_label[pp] == UNKNOWN:
                        pos_label[pp] = ROBBER
                        step_counter += 1
                        pos_step[pp] = step_counter
                        decided.push_back(pp)

    cdef bint cops_win = True
    for ci in range(init_children.size()):
        if pos_label[init_children[ci]] != COPS:
            cops_win = False
            break

    result = {
        "winner": "cops" if cops_win else "robber",
        "table": None,
        "init_reply": None,
        "n_positions": int(n_pos),
        "n_moves": int(move_parent.size()),
    }
    if not extract:
        return result

    table_out = {}
    cdef vector[char] seen
    cdef vector[int64_t] queue
    cdef int64_t qhead = 0
    cdef int64_t t_p, best_mid, start_pid
    cdef uint64_t best_cand
    cdef int best_size, size
    cdef bint ok, better
    cdef int64_t cj

    seen.resize(n_pos, 0)
    if cops_win:
        for ci in range(init_children.size()):
            if not seen[init_children[ci]]:
                seen[init_children[ci]] = 1
                queue.push_back(init_children[ci])
        while qhead < <int64_t>queue.size():
            pid = queue[qhead]
            qhead += 1
            c = pos_c[pid]
            r = pos_r[pid]
            t_p = pos_step[pid]
            best_mid = -1
            best_size = 0
            best_cand = 0
            for mid in range(pos_mstart[pid], pos_mstart[pid] + pos_mcnt[pid]):
                if move_dead[mid] or move_pending[mid] != 0:
                    continue
                ok = True
                for cj in range(move_cstart[mid], move_cstart[mid] + move_ccnt[mid]):
                    if pos_step[child_pool[cj]] >= t_p:
                        ok = False
                        break
                if not ok:
                    continue
                cand = move_newcops[mid]
                transit = creach(succ, n, r, c & cand)
                size = popcnt(transit & ~cand)
                better = False
                if best_mid == -1:
                    better = True
                elif size < best_size:
                    better = True
                elif size == best_size and clex_less(cand, best_cand):
                    better = True
                if better:
                    best_mid = mid
                    best_size = size
                    best_cand = cand
            table_out[(int(c), int(r))] = int(best_cand)
            for cj in range(move_cstart[best_mid], move_cstart[best_mid] + move_ccnt[best_mid]):
                kid = child_pool[cj]
                if not seen[kid]:
                    seen[kid] = 1
                    queue.push_back(kid)
    else:
        start_pid = -1
        for ci in range(init_children.size()):
            if pos_label[init_children[ci]] != COPS:
                start_pid = init_children[ci]
                break
        result["init_reply"] = int(pos_r[start_pid])
        table_out[(0, 0, 0)] = (0, int(pos_r[start_pid]))
        seen[start_pid] = 1
        queue.push_back(start_pid)
        while qhead < <int64_t>queue.size():
            pid = queue[qhead]
            qhead += 1
            c = pos_c[pid]
            r = pos_r[pid]
            for mid in range(pos_mstart[pid], pos_mstart[pid] + pos_mcnt[pid]):
                kid = -1
                for cj in range(move_cstart[mid], move_cstart[mid] + move_ccnt[mid]):
                    if pos_label[child_pool[cj]] == ROBBER:
                        kid = child_pool[cj]
                        break
                if kid == -1:
                    for cj in range(move_cstart[mid], move_cstart[mid] + move_ccnt[mid]):
                        if pos_label[child_pool[cj]] == UNKNOWN:
                            kid = child_pool[cj]
                            break
                cand = move_newcops[mid]
                table_out[(int(c), int(cand), int(r))] = (int(pos_c[kid]), int(pos_r[kid]))
                if not seen[kid]:
                    seen[kid] = 1
                    queue.push_back(kid)
    result["table"] = table_out
    return result
