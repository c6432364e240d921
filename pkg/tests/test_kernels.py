"""Backend lockstep: the compiled kernels must match the pure ones exactly."""

import itertools
import random

import pytest

from corpora import random_graph_corpus
from dwlab import kernels
from dwlab.errors import BudgetExceeded
from dwlab.graph import lex_key


def test_lex_less_matches_tuple_order(backend):
    for a in range(64):
        for b in range(64):
            assert backend.lex_less(a, b) == (lex_key(a) < lex_key(b)), (a, b)


def test_primitives_agree_across_backends(both_backends):
    if len(both_backends) < 2:
        pytest.skip("compiled backend unavailable")
    a, b = both_backends
    rng = random.Random(99)
    for g in random_graph_corpus(99, 150, 7):
        succ, n = g.succ, g.n
        for _ in range(4):
            fm = rng.getrandbits(n)
            rm = rng.getrandbits(n)
            assert a.reach(succ, n, fm, rm) == b.reach(succ, n, fm, rm)
            assert a.sccs(succ, n, rm) == b.sccs(succ, n, rm)
            cops = rm & ~fm
            robber_src = fm & ~rm
            for q in a.sccs(succ, n, cops):
                if not (q & robber_src):
                    continue
                assert a.free_mask(succ, n, cops, q) == b.free_mask(succ, n, cops, q)
                assert a.is_monotone(succ, n, cops, q, fm) == b.is_monotone(succ, n, cops, q, fm)


def test_candidates_and_replies_agree(both_backends):
    if len(both_backends) < 2:
        pytest.skip("compiled backend unavailable")
    rng = random.Random(7)
    for g in random_graph_corpus(7, 80, 6):
        succ, n = g.succ, g.n
        base = both_backends[0]
        for k in range(1, min(n, 4) + 1):
            for q in base.sccs(succ, n, 0):
                outs = [
                    (kk.cop_candidates(succ, n, 0, q, k, True),
                     kk.cop_candidates(succ, n, 0, q, k, False),
                     kk.robber_replies(succ, n, 0, rng.getrandbits(n) & ~q, q))
                    for kk in both_backends
                ]
                assert outs[0] == outs[1]


def test_solve_agrees_across_backends(both_backends):
    if len(both_backends) < 2:
        pytest.skip("compiled backend unavailable")
    for g in random_graph_corpus(1234, 120, 5):
        for k in range(1, min(g.n, 4) + 1):
            for mode in ("monotone", "raw"):
                results = [
                    kk.solve(g.succ, g.n, k, mode=mode) for kk in both_backends
                ]
                a, b = results
                assert (a["winner"], a["n_positions"], a["n_moves"]) == (
                    b["winner"], b["n_positions"], b["n_moves"])
                assert a["table"] == b["table"]
                assert a["init_reply"] == b["init_reply"]


def test_budget_error(backend):
    from dwlab.gadgets import gen_gnst

    g = gen_gnst(5).graph
    with pytest.raises(BudgetExceeded):
        backend.solve(g.succ, g.n, 5, budget=100)


def test_compiled_rejects_oversized_graphs():
    if kernels.compiled is None:
        pytest.skip("compiled backend unavailable")
    succ = tuple([0] * 65)
    with pytest.raises(ValueError):
        kernels.compiled.reach(succ, 65, 1, 0)
