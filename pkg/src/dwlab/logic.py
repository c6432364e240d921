"""Propositional/QBF layer and the reduction from quantified formulas to the
cop-number threshold of layered gadget graphs.

The reduction graph has one gadget level per variable, outermost quantifier
outermost.  Universal levels are wired like the plain layered family;
existential levels subdivide the entry into each branch clique through a
steering vertex, which lets the cops dictate the branch.  The base is the
clause gadget: a hub plus one clique per clause whose vertices carry the
literal edges back into each level's B pair; a cop parked on a b-vertex is
liftable in the endgame exactly when the robber's clause contains the
corresponding true literal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from . import kernels
from .errors import BudgetExceeded, InputError, ParseError, RestrictionViolation
from .gadgets import GadgetGraph, LevelInfo, _Builder, _make_cop_fn, _make_robber_fn, mask_or
from .game import EXHAUSTIVE, ScriptedStrategy, simulate, solve
from .graph import DiGraph, Role, iter_bits, mask_of

EVAL_VAR_LIMIT = 22


# -- formulas ---------------------------------------------------------------------


@dataclass(frozen=True)
class CnfFormula:
    """CNF with clauses as tuples of nonzero signed literals (DIMACS style).

    Within a clause the variables must be pairwise distinct; this outlaws
    tautological clauses.  An empty clause is falsum and only admitted so the
    quantifier-free false base case is expressible; gadget construction
    rejects it.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for ci, clause in enumerate(self.clauses):
            seen = set()
            for lit in clause:
                if lit == 0:
                    raise InputError(f"clause {ci}: zero literal")
                var = abs(lit)
                if var > self.num_vars:
                    raise InputError(f"clause {ci}: variable {var} out of range")
                if var in seen:
                    raise RestrictionViolation(
                        f"restriction violated: variable {var} appears twice in clause {ci}"
                    )
                seen.add(var)

    @staticmethod
    def of(num_vars: int, clauses) -> "CnfFormula":
        return CnfFormula(num_vars, tuple(tuple(cl) for cl in clauses))

    def evaluate(self, assignment: dict[int, int]) -> bool:
        for clause in self.clauses:
            if not any(
                (assignment.get(abs(lit), 0) == 1) == (lit > 0) for lit in clause
            ):
                return False
        return True


@dataclass(frozen=True)
class QbfFormula:
    """Prenex QBF: quantifier prefix over X_1..X_r plus a CNF matrix."""

    prefix: tuple[tuple[str, int], ...]   # ("forall"|"exists", var)
    matrix: CnfFormula

    def __post_init__(self):
        r = len(self.prefix)
        seen_vars = [var for _, var in self.prefix]
        if sorted(seen_vars) != list(range(1, r + 1)):
            raise InputError("prefix must mention X_1..X_r exactly once each")
        for q, _ in self.prefix:
            if q not in ("forall", "exists"):
                raise InputError(f"bad quantifier {q!r}")
        if self.matrix.num_vars != r:
            raise InputError("matrix variable count must equal prefix length")

    @property
    def r(self) -> int:
        return len(self.prefix)

    @staticmethod
    def of(prefix, matrix: CnfFormula) -> "QbfFormula":
        return QbfFormula(tuple((q, v) for q, v in prefix), matrix)


# -- parsing ------------------------------------------------------------------------


def _dimacs_lines(data: bytes):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("input is not utf-8", offset=e.start) from e
    for lineno, line in enumerate(text.splitlines(), start=1):
        yield lineno, line.strip()


def parse_dimacs(data: bytes) -> CnfFormula:
    """Parse DIMACS CNF.  Duplicate variables within a clause are rejected."""
    num_vars = num_clauses = None
    clauses = []
    current: list[int] = []
    for lineno, line in _dimacs_lines(data):
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line: {line!r}", line=lineno)
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise ParseError("clause before problem line", line=lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", line=lineno) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        raise ParseError("last clause not terminated by 0")
    if num_vars is None:
        raise ParseError("missing problem line")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ParseError(f"declared {num_clauses} clauses, found {len(clauses)}")
    try:
        return CnfFormula.of(num_vars, clauses)
    except RestrictionViolation:
        raise
    except InputError as e:
        raise ParseError(str(e)) from e


def parse_qdimacs(data: bytes) -> QbfFormula:
    """Parse prenex QDIMACS.  Every variable must be quantified."""
    num_vars = num_clauses = None
    prefix: list[tuple[str, int]] = []
    clauses = []
    current: list[int] = []
    in_matrix = False
    for lineno, line in _dimacs_lines(data):
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line: {line!r}", line=lineno)
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if line[0] in "ae":
            if in_matrix:
                raise ParseError("quantifier line after matrix began (not prenex)", line=lineno)
            parts = line.split()
            if parts[-1] != "0":
                raise ParseError("quantifier line must end with 0", line=lineno)
            q = "forall" if parts[0] == "a" else "exists"
            for tok in parts[1:-1]:
                prefix.append((q, int(tok)))
            continue
        if num_vars is None:
            raise ParseError("clause before problem line", line=lineno)
        in_matrix = True
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        raise ParseError("last clause not terminated by 0")
    if num_vars is None:
        raise ParseError("missing problem line")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ParseError(f"declared {num_clauses} clauses, found {len(clauses)}")
    if sorted(v for _, v in prefix) != list(range(1, num_vars + 1)):
        raise ParseError("prefix must quantify X_1..X_r exactly once each")
    order = {v: i for i, (_, v) in enumerate(prefix)}
    prefix.sort(key=lambda qv: order[qv[1]])
    try:
        return QbfFormula.of(prefix, CnfFormula.of(num_vars, clauses))
    except RestrictionViolation:
        raise
    except InputError as e:
        raise ParseError(str(e)) from e


# -- semantics -----------------------------------------------------------------------


def is_tautology(cnf: CnfFormula) -> bool:
    """Truth-table tautology check; the empty clause list counts as valid."""
    if cnf.num_vars > EVAL_VAR_LIMIT:
        raise BudgetExceeded(f"tautology check limited to {EVAL_VAR_LIMIT} variables")
    for bits in range(1 << cnf.num_vars):
        beta = {i + 1: (bits >> i) & 1 for i in range(cnf.num_vars)}
        if not cnf.evaluate(beta):
            return False
    return True


@dataclass
class QbfValue:
    """Game value of a prenex QBF plus positional strategies for both players.

    Value choices are keyed by the tuple of already-assigned values; the
    universal player's clause pick and the existential player's literal pick
    cover the matrix phase.
    """

    truth: bool
    prefix: tuple[tuple[str, int], ...]
    matrix: CnfFormula
    exists_values: dict[tuple[int, ...], int] = field(default_factory=dict)
    forall_values: dict[tuple[int, ...], int] = field(default_factory=dict)

    def exists_value(self, var: int, beta: dict[int, int]) -> int:
        key = tuple(beta.get(v, 0) for v in range(1, var))
        return self.exists_values.get(key, 0)

    def forall_value(self, var: int, beta: dict[int, int]) -> int:
        key = tuple(beta.get(v, 0) for v in range(1, var))
        return self.forall_values.get(key, 0)

    def falsified_clause(self, beta: dict[int, int]) -> Optional[int]:
        for ci, clause in enumerate(self.matrix.clauses):
            if not any((beta.get(abs(l), 0) == 1) == (l > 0) for l in clause):
                return ci
        return None

    def satisfying_literal(self, clause_index: int, beta: dict[int, int]) -> Optional[int]:
        for li, lit in enumerate(self.matrix.clauses[clause_index]):
            if (beta.get(abs(lit), 0) == 1) == (lit > 0):
                return li
        return None


def qbf_eval(qbf: QbfFormula) -> QbfValue:
    """Evaluate by the two-player value recursion, recording both players'
    positional choices (the winner's ones constitute a winning strategy)."""
    if qbf.r > EVAL_VAR_LIMIT:
        raise BudgetExceeded(f"qbf evaluation limited to {EVAL_VAR_LIMIT} variables")
    value = QbfValue(False, qbf.prefix, qbf.matrix)
    by_var = {var: q for q, var in qbf.prefix}

    def rec(i: int, beta: tuple[int, ...]) -> bool:
        if i > qbf.r:
            return qbf.matrix.evaluate({j + 1: beta[j] for j in range(qbf.r)})
        q = by_var[i]
        v0 = rec(i + 1, beta + (0,))
        v1 = rec(i + 1, beta + (1,))
        if q == "exists":
            value.exists_values[beta] = 0 if v0 else (1 if v1 else 0)
            return v0 or v1
        value.forall_values[beta] = 0 if not v0 else (1 if not v1 else 0)
        return v0 and v1

    value.truth = rec(1, ())
    return value


# -- gadget construction --------------------------------------------------------------


# Innermost-level size, calibrated against full solves of the r=1 corpus.
# When the play reaches the clause gadget the cops hold |M(inner)| - 1 spare
# cops beyond the hub cop, and the endgame supply is spares plus the parked
# b-cops freed by true literals, against a demand of one cop per clique
# vertex.  The books balance to "cops win iff some literal is true" exactly
# when every clause clique has |M(inner)| vertices and every clique vertex
# carries the clause's full literal-edge pattern, so cliques are padded to
# that size with pattern-matching dummy vertices.  |M(inner)| must also be
# at least 2, or a single spare cop could seal a branch clique.
MIN_INNER_M = 2


def _inner_m(cnf: CnfFormula) -> int:
    return max(MIN_INNER_M, max((len(cl) for cl in cnf.clauses), default=0))


def build_clause_gadget(cnf: CnfFormula) -> DiGraph:
    """Standalone clause gadget: hub bidirected to every clause-clique vertex.

    An empty clause list degenerates to the single hub vertex.
    """
    b = _Builder()
    hub = b.add_vertex("hub", Role(level=0, part="F-hub"))
    for ci, clause in enumerate(cnf.clauses):
        if not clause:
            raise RestrictionViolation("restriction violated: empty clause in gadget")
        kmask = b.add_set(
            len(clause),
            lambda li, ci=ci: f"k{ci}.{li}",
            lambda li, ci=ci: Role(level=0, part="F-clause", clause=ci, literal=li),
        )
        b.clique(kmask)
        b.arcs(1 << hub, kmask, both=True)
    return b.graph()


def _level_m_size(inner_m: int, depth_from_inner: int) -> int:
    return inner_m + 3 * (depth_from_inner - 1)


def build_s_phi(qbf: QbfFormula) -> GadgetGraph:
    """The reduction graph: one level per variable (outermost first), clause
    gadget at the base.  Universal levels are plain; existential levels route
    clique entry through steering vertices.

    Every vertex of a clause clique carries the clause's full literal
    pattern: an edge to b_1 of level l when X_{v(l)} occurs positively in the
    clause, to b_0 when negatively, and to both when the variable is absent.
    Cliques are padded with pattern-matching dummy vertices up to the
    innermost M size; that uniform size is what makes the endgame supply of
    liftable cops balance its demand exactly (see _inner_m).
    """
    r = qbf.r
    if r == 0:
        truth = qbf.matrix.evaluate({})
        b = _Builder()
        if truth:
            b.add_vertex("v", Role(level=0, part="base"))
        else:
            u = b.add_vertex("u", Role(level=0, part="base"))
            w = b.add_vertex("w", Role(level=0, part="base"))
            b.arc(u, w)
            b.arc(w, u)
        g = b.graph()
        return GadgetGraph(g, [], g.full_mask(), 0, "reduction")

    for ci, clause in enumerate(qbf.matrix.clauses):
        if not clause:
            raise RestrictionViolation(f"restriction violated: clause {ci} is empty")

    inner_m = _inner_m(qbf.matrix)
    b = _Builder()
    hub = b.add_vertex("hub", Role(level=0, part="F-hub"))
    hub_mask = 1 << hub
    clause_masks = []
    clause_vertices: list[list[int]] = []
    for ci, clause in enumerate(qbf.matrix.clauses):
        verts = [
            b.add_vertex(f"k{ci}.{li}", Role(level=0, part="F-clause", clause=ci, literal=li))
            for li in range(len(clause))
        ]
        verts += [
            b.add_vertex(f"k{ci}.pad{x}", Role(level=0, part="F-clause", clause=ci))
            for x in range(inner_m - len(clause))
        ]
        kmask = mask_of(verts)
        b.clique(kmask)
        b.arcs(hub_mask, kmask, both=True)
        clause_masks.append(kmask)
        clause_vertices.append(verts)
    f_mask = hub_mask | mask_or(clause_masks)

    sub_mask = f_mask
    levels: list[LevelInfo] = []
    literal_b_edges: dict[int, int] = {}
    for j in range(r, 0, -1):                      # innermost level first: X_r
        quant = qbf.prefix[j - 1][0]
        msz = _level_m_size(inner_m, r - j + 1)
        m_mask = b.add_set(msz, lambda x: f"m{x}(X{j})", lambda x: Role(j, "M", index=x))
        d_mask = b.add_set(2, lambda x: f"d{x}(X{j})", lambda x: Role(j, "D", index=x))
        c_list = [
            b.add_set(msz, lambda x, i=i: f"C{i}.{x}(X{j})", lambda x, i=i: Role(j, f"C{i}", index=x))
            for i in range(2)
        ]
        a_mask = b.add_set(2, lambda x: f"a{x}(X{j})", lambda x: Role(j, "A", index=x))
        b_list = [mask_of([b.add_vertex(f"b{i}(X{j})", Role(j, "B", index=i))]) for i in range(2)]
        cvert_list = []
        if quant == "exists":
            cvert_list = [
                mask_of([b.add_vertex(f"c{i}(X{j})", Role(j, f"c{i}"))]) for i in range(2)
            ]
        lvl = LevelInfo(j, m_mask, d_mask, a_mask, b_list, c_list, cvert_list,
                        quant=quant, var=j, inner_mask=sub_mask)
        _wire_reduction_level(b, lvl, sub_mask, f_mask)
        # the hub keeps the unspecialized base-vertex edges into B: only the
        # clause cliques get the literal-dependent pattern
        b.arcs(hub_mask, b_list[0] | b_list[1])
        # clause edges into this level's B pair: the whole clique follows the
        # clause's polarity on this level's variable
        for ci, clause in enumerate(qbf.matrix.clauses):
            polarity = next((lit > 0 for lit in clause if abs(lit) == j), None)
            if polarity is None:
                target = b_list[0] | b_list[1]
            else:
                target = b_list[1] if polarity else b_list[0]
            for v in clause_vertices[ci]:
                b.arcs(1 << v, target)
                literal_b_edges[v] = literal_b_edges.get(v, 0) | target
        sub_mask |= lvl.part_mask()
        levels.append(lvl)
    levels.reverse()
    gg = GadgetGraph(b.graph(), levels, f_mask, 0, "reduction",
                     hub_mask=hub_mask, clause_masks=clause_masks,
                     literal_b_edges=literal_b_edges)
    return gg


def _wire_reduction_level(b: _Builder, lvl: LevelInfo, sub_mask: int, f_mask: int):
    """Level wiring for the reduction: as the plain family, except that only
    non-clause-gadget inner vertices feed this level's B pair, and only on
    universal levels; clause vertices get their B edges from the literal map."""
    from .gadgets import _wire_level

    _wire_level(b, lvl, sub_mask, sub_to_b=False)
    if lvl.quant == "forall":
        inner_non_f = sub_mask & ~f_mask
        if inner_non_f:
            b.arcs(inner_non_f, lvl.b_mask)


def build_h_phi(cnf: CnfFormula) -> GadgetGraph:
    """Tautology-reduction graph: the all-universal special case (a CNF is a
    tautology iff its universal closure is true)."""
    prefix = tuple(("forall", i) for i in range(1, cnf.num_vars + 1))
    return build_s_phi(QbfFormula(prefix, cnf))


def predicted_cops(qbf: QbfFormula) -> int:
    """Cop count at which the constructive strategy operates:
    |N(outermost)| + 1, derived from the level size recurrence."""
    if qbf.r == 0:
        return 1
    return (_level_m_size(_inner_m(qbf.matrix), qbf.r) + 2) + 1


# -- scripted strategies from MC-game strategies ------------------------------------


def cop_strategy_from_exists(qbf: QbfFormula, gg: Optional[GadgetGraph] = None,
                             value: Optional[QbfValue] = None) -> ScriptedStrategy:
    """Cop script simulating the model-checking game: blockade levels in
    prefix order, steer existential levels to the winning value, read the
    robber's universal choices off his clique, and run the clause-gadget
    endgame off the freed b-cop.  Requires the formula to be true."""
    value = value or qbf_eval(qbf)
    if not value.truth:
        raise InputError("cop script requires a true formula (existential player wins)")
    gg = gg or build_s_phi(qbf)
    k = predicted_cops(qbf)
    fn = _make_cop_fn(gg, k, "canonical",
                      exists_choice=lambda var, beta: value.exists_value(var, beta))
    return ScriptedStrategy("cops", fn, name=f"mc-cops(k={k})")


def robber_strategy_from_forall(qbf: QbfFormula, gg: Optional[GadgetGraph] = None,
                                value: Optional[QbfValue] = None) -> ScriptedStrategy:
    """Robber script for false formulas: choose universal cliques by the
    winning universal strategy, read the cops' existential steering, and sit
    on a falsified clause clique at the end."""
    value = value or qbf_eval(qbf)
    if value.truth:
        raise InputError("robber script requires a false formula (universal player wins)")
    gg = gg or build_s_phi(qbf)
    fn = _make_robber_fn(gg, "forall",
                         forall_choice=lambda var, beta: value.forall_value(var, beta),
                         clause_choice=lambda beta: value.falsified_clause(beta))
    return ScriptedStrategy("robber", fn, name="mc-robber")


# -- end-to-end verification -----------------------------------------------------------


@dataclass
class ReductionReport:
    truth: bool
    k_star: int
    cops_win: Optional[bool]          # at k_star
    robber_wins_below: Optional[bool]  # at k_star - 1
    agrees: Optional[bool]
    mode: str                          # "solve" | "scripted"
    verified: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "truth": self.truth,
            "k_star": self.k_star,
            "cops_win": self.cops_win,
            "robber_wins_below": self.robber_wins_below,
            "agrees": self.agrees,
            "mode": self.mode,
            "verified": self.verified,
            "detail": self.detail,
        }

    def text(self) -> str:
        flag = {True: "AGREE", False: "DISAGREE", None: "UNVERIFIED"}[self.agrees]
        return (
            f"truth={self.truth} k*={self.k_star} cops_win@k*={self.cops_win} "
            f"robber_wins@k*-1={self.robber_wins_below} [{self.mode}] -> {flag}"
        )


def verify_reduction(
    qbf: QbfFormula,
    budget: int = 5_000_000,
    graph: Optional[GadgetGraph] = None,
    force_mode: Optional[str] = None,
) -> ReductionReport:
    """Check that the game threshold of the reduction graph matches the
    formula's truth: cops win at k* iff true, robber wins at k*-1 always.

    Small instances (r <= 1 or a supplied graph of that scale) are solved
    exactly; larger ones are verified by pitting the two scripted strategies
    against each other.  A blown budget yields a partial report flagged
    unverified instead of an answer."""
    value = qbf_eval(qbf)
    gg = graph or build_s_phi(qbf)
    k_star = predicted_cops(qbf)
    mode = force_mode or ("solve" if qbf.r <= 1 else "scripted")
    report = ReductionReport(value.truth, k_star, None, None, None, mode, True)
    try:
        if mode == "solve":
            res_hi = solve(gg.graph, k_star, budget=budget, extract_strategy=False)
            report.cops_win = res_hi.cops_win()
            if k_star == 1:
                report.robber_wins_below = True
                report.detail["below"] = "zero cops never capture"
            else:
                res_lo = solve(gg.graph, k_star - 1, budget=budget, extract_strategy=False)
                report.robber_wins_below = not res_lo.cops_win()
            report.agrees = (report.cops_win == value.truth) and report.robber_wins_below
        else:
            if value.truth:
                cop = cop_strategy_from_exists(qbf, gg, value)
                forall_best = ScriptedStrategy(
                    "robber",
                    _make_robber_fn(gg, "forall",
                                    forall_choice=lambda var, beta: value.forall_value(var, beta),
                                    clause_choice=lambda beta: value.falsified_clause(beta)),
                    name="mc-robber(losing)",
                )
                duel = simulate(gg.graph, cop, forall_best, k_star, budget=budget)
                report.cops_win = duel.winner == "cops"
                report.detail["duel"] = "cop-script vs forall-script"
            else:
                cop_best = ScriptedStrategy(
                    "cops",
                    _make_cop_fn(gg, k_star, "canonical",
                                 exists_choice=lambda var, beta: value.exists_value(var, beta)),
                    name="mc-cops(losing)",
                )
                robber = robber_strategy_from_forall(qbf, gg, value)
                duel = simulate(gg.graph, cop_best, robber, k_star, budget=budget)
                report.cops_win = duel.winner == "cops"
                report.detail["duel"] = "cop-script vs forall-script"
            report.robber_wins_below = None
            report.agrees = report.cops_win == value.truth
        return report
    except BudgetExceeded as e:
        report.verified = False
        report.agrees = None
        report.detail["budget"] = str(e)
        return report
