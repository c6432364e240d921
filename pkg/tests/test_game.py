import itertools
import random

import pytest

from corpora import oracle_game_winner, random_graph_corpus, weakly_connected_digraphs
from dwlab import kernels
from dwlab.errors import IncompleteStrategyError, InputError
from dwlab.gadgets import gen_gnst
from dwlab.game import (
    COPS_WIN,
    EXHAUSTIVE,
    R_INFINITE,
    CopPosition,
    RobberPosition,
    ScriptedStrategy,
    StrategyTable,
    count_consistent_positions,
    dag_width,
    free_cops,
    interactive_play,
    is_monotone_cop_move,
    legal_robber_moves,
    shrinking_solve,
    simulate,
    solve,
)
from dwlab.graph import DiGraph, mask_of, set_of


def bidirected_clique(n):
    return DiGraph.from_edges(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def two_cycle():
    return DiGraph.from_edges(["a", "b"], [(0, 1), (1, 0)])


# -- rules --------------------------------------------------------------------


def test_monotone_noop_move():
    g = two_cycle()
    pos = CopPosition(frozenset({0}), frozenset({1}))
    assert is_monotone_cop_move(g, pos, {0})


def test_monotone_single_cop_removal_on_path():
    g = DiGraph.from_edges("ab", [(0, 1)])
    pos = CopPosition(frozenset({1}), frozenset({0}))
    assert not is_monotone_cop_move(g, pos, set())


def test_monotone_free_cop_step_on_gadget():
    # replay one blockading step: with N(5) and b_0(5) held and the robber in
    # the escape block, the D(5) cops may relocate onto A(5)
    gg = gen_gnst(5)
    g = gg.graph
    lvl = gg.levels[0]
    cops = lvl.n_mask | lvl.b_list[0]
    kern = kernels.active
    w_block = next(
        q for q in kern.sccs(g.succ, g.n, cops) if q & lvl.a_mask
    )
    pos = CopPosition(set_of(cops), set_of(w_block))
    target = (cops & ~lvl.d_mask) | lvl.a_mask | lvl.b_list[0]
    assert is_monotone_cop_move(g, pos, set_of(target))
    assert set_of(lvl.d_mask) <= free_cops(g, pos)


def test_legal_robber_moves_capture_and_initial():
    g = DiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    init = RobberPosition(frozenset(), frozenset(), frozenset())
    moves = legal_robber_moves(g, init)
    assert [m.robber for m in moves] == [frozenset({0, 1, 2})]
    trapped = RobberPosition(frozenset(), frozenset({0, 1, 2}), frozenset({0, 1, 2}))
    assert legal_robber_moves(g, trapped) == []


def test_legal_robber_moves_on_gadget_after_blockade():
    gg = gen_gnst(5)
    g = gg.graph
    lvl = gg.levels[0]
    init = RobberPosition(frozenset(), set_of(lvl.n_mask), frozenset())
    options = {m.robber for m in legal_robber_moves(g, init)}
    c0, c1 = set_of(lvl.c_list[0]), set_of(lvl.c_list[1])
    assert c0 in options and c1 in options
    block = next(o for o in options if o not in (c0, c1))
    assert set_of(lvl.a_mask) <= block and set_of(gg.base_mask) <= block


# -- solving -------------------------------------------------------------------


def test_solve_single_vertex():
    g = DiGraph.from_edges(1, [])
    assert solve(g, 1).winner == "cops"


def test_solve_bidirected_triangle():
    g = bidirected_clique(3)
    assert oracle_game_winner(g, 2) == "robber"
    assert oracle_game_winner(g, 3) == "cops"
    assert solve(g, 2).winner == "robber"
    assert solve(g, 3).winner == "cops"


def test_dag_width_examples():
    p4 = DiGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert oracle_game_winner(p4, 1) == "cops"
    assert dag_width(p4, 3) == 1
    assert dag_width(two_cycle(), 3) == 2
    assert dag_width(bidirected_clique(4), 3) is None


def test_solver_matches_value_iteration_oracle():
    for g in random_graph_corpus(31337, 40, 4):
        for k in range(1, min(g.n, 3) + 1):
            assert solve(g, k, extract_strategy=False).winner == oracle_game_winner(g, k)


def test_winner_monotone_in_k_and_determinate():
    for g in random_graph_corpus(55, 60, 5):
        prev = None
        for k in range(1, g.n + 1):
            w = solve(g, k, extract_strategy=False).winner
            assert w in ("cops", "robber")
            if prev == "cops":
                assert w == "cops"
            prev = w


def test_monotone_vs_raw_small_graphs():
    count = 0
    for g in itertools.islice(weakly_connected_digraphs(3), 0, None):
        for k in range(1, 4):
            a = solve(g, k, mode="monotone", extract_strategy=False).winner
            b = solve(g, k, mode="raw", extract_strategy=False).winner
            assert a == b
            count += 1
    assert count > 100


def test_pruned_vs_unpruned_random():
    for g in random_graph_corpus(808, 60, 5):
        for k in range(1, min(g.n, 4) + 1):
            a = solve(g, k, pruned=True, extract_strategy=False).winner
            b = solve(g, k, pruned=False, extract_strategy=False).winner
            assert a == b


def test_returned_cop_strategies_win_and_are_monotone():
    for g in random_graph_corpus(606, 50, 5):
        for k in range(1, min(g.n, 4) + 1):
            res = solve(g, k)
            if not res.cops_win():
                continue
            out = simulate(g, res.strategy, EXHAUSTIVE, k)
            assert out.certified, (g.edges(), k)


def test_returned_robber_strategies_survive():
    for g in random_graph_corpus(607, 40, 5):
        for k in range(1, min(g.n, 3) + 1):
            res = solve(g, k)
            if res.cops_win():
                continue
            out = simulate(g, EXHAUSTIVE, res.strategy, k)
            assert out.certified, (g.edges(), k)


def test_territory_never_regrows_along_strategy_plays():
    kern = kernels.active
    for g in random_graph_corpus(909, 30, 5):
        res = solve(g, g.n)
        assert res.cops_win()
        # walk all plays, checking the reachable-region chain shrinks
        seen = set()
        stack = [(0, q) for q in kern.sccs(g.succ, g.n, 0)]
        while stack:
            c, r = stack.pop()
            if (c, r) in seen:
                continue
            seen.add((c, r))
            terr = kern.reach(g.succ, g.n, r, c)
            cn = res.strategy.cop_move(g, c, r)
            _, replies = kern.robber_replies(g.succ, g.n, c, cn, r)
            for q in replies:
                terr2 = kern.reach(g.succ, g.n, q, cn)
                assert not (terr2 & ~terr)
                stack.append((cn, q))


# -- simulation ----------------------------------------------------------------


def test_simulate_capture_in_one_round():
    g = DiGraph.from_edges(1, [])
    cop = StrategyTable("cops", {(0, 1): 1}, 1)
    robber = ScriptedStrategy("robber", lambda g_, c, cn, r, replies: replies[0])
    out = simulate(g, cop, robber, 1)
    assert out.winner == "cops" and out.record.outcome == COPS_WIN
    assert out.record.rounds() == 1


def test_simulate_incomplete_strategy_errors():
    g = two_cycle()
    cop = StrategyTable("cops", {}, 2)
    with pytest.raises(IncompleteStrategyError):
        simulate(g, cop, EXHAUSTIVE, 2)


def test_simulate_flags_nonmonotone_cop_table():
    g = DiGraph.from_edges("ab", [(0, 1)])
    # cops land on b then vacate it while a robber on a can still walk in
    cop = ScriptedStrategy("cops", lambda g_, c, r: {mask_of([]): 1 << 1, 1 << 1: 1 << 0}[c])
    robber = ScriptedStrategy("robber", lambda g_, c, cn, r, replies: replies[0])
    out = simulate(g, cop, robber, 1)
    assert out.winner == "robber" and out.record.reason == "illegal-monotonicity"


def test_simulate_detects_cycles():
    g = two_cycle()
    cop = ScriptedStrategy("cops", lambda g_, c, r: c)  # the cops just pass
    robber = ScriptedStrategy("robber", lambda g_, c, cn, r, replies: replies[0])
    out = simulate(g, cop, robber, 2)
    assert out.winner == "robber" and out.record.reason == R_INFINITE


def test_exhaustive_both_sides_rejected():
    with pytest.raises(InputError):
        simulate(two_cycle(), EXHAUSTIVE, EXHAUSTIVE, 1)


# -- position counting -----------------------------------------------------------


def test_count_single_vertex():
    g = DiGraph.from_edges(1, [])
    cop = StrategyTable("cops", {(0, 1): 1}, 1)
    assert count_consistent_positions(g, cop, 1) <= 2


def test_count_requires_winning_strategy():
    g = bidirected_clique(3)
    cop = ScriptedStrategy("cops", lambda g_, c, r: c | (r & -r))
    with pytest.raises(InputError):
        count_consistent_positions(g, cop, 2)


# -- membership bound (shrinking restriction) -------------------------------------


def test_shrinking_restriction_bound_small():
    for g in random_graph_corpus(404, 40, 5):
        base = solve(g, g.n, extract_strategy=False)
        winner, longest = shrinking_solve(g, g.n)
        assert winner == base.winner == "cops"
        assert longest <= 2 * g.n


def test_shrinking_winner_matches_unrestricted():
    for g in random_graph_corpus(405, 40, 5):
        for k in range(1, min(g.n, 3) + 1):
            a = solve(g, k, extract_strategy=False).winner
            b, _ = shrinking_solve(g, k)
            assert a == b


# -- interactive play --------------------------------------------------------------


def test_interactive_play_human_robber_single_vertex():
    import io

    g = DiGraph.from_edges(["v"], [])
    rec = interactive_play(g, 1, "robber", stdin=io.StringIO("v\n"), stdout=io.StringIO())
    assert rec.outcome == COPS_WIN and rec.rounds() == 1


def test_interactive_play_refuses_illegal_then_accepts():
    import io

    g = two_cycle()
    out = io.StringIO()
    rec = interactive_play(g, 2, "robber", stdin=io.StringIO("zzz\na b\na b\n"), stdout=out)
    assert rec.outcome == COPS_WIN
    assert "illegal" in out.getvalue()


def test_interactive_play_eof_aborts_with_partial_record():
    import io

    g = two_cycle()
    rec = interactive_play(g, 2, "robber", stdin=io.StringIO(""), stdout=io.StringIO())
    assert rec.outcome is None
    assert len(rec.steps) >= 1


def test_interactive_play_human_cops_nonmonotone_refused():
    import io

    g = DiGraph.from_edges("ab", [(0, 1)])
    out = io.StringIO()
    # machine robber starts on some vertex; human tries b then empty then legal
    rec = interactive_play(g, 1, "cops", stdin=io.StringIO("b\na\nb\nb\n"), stdout=out)
    assert rec.outcome in (COPS_WIN, None, "RobberWins")


# -- serialization -----------------------------------------------------------------


def test_strategy_table_json_roundtrip():
    g = bidirected_clique(3)
    res = solve(g, 3)
    data = res.strategy.to_json()
    back = StrategyTable.from_json("cops", data, g.n)
    assert back.moves == res.strategy.moves
    rob = solve(g, 2)
    data = rob.strategy.to_json()
    back = StrategyTable.from_json("robber", data, g.n)
    assert back.moves == rob.strategy.moves


def test_play_record_json_and_transcript():
    g = two_cycle()
    res = solve(g, 2)
    out = simulate(g, res.strategy, ScriptedStrategy("robber", lambda g_, c, cn, r, rs: rs[0]), 2)
    obj = out.record.to_json()
    assert obj["outcome"] == COPS_WIN
    text = out.record.transcript(g)
    assert "outcome: CopsWin" in text
