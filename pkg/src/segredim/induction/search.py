"""Memoized proof search over the reduction rules.

Priority order per statement: falsity catalog, trivial truths, the small
three-factor base table, drop rules, splits, monotone moves, and finally a
direct oracle leaf when the ambient dimension is within the column budget.
False only ever comes from the catalog (directly, or passed through an
equivalence); an inconclusive oracle is never treated as False.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..config import DEFAULT_BUDGET_COLS, DEFAULT_BUDGET_NODES, RunConfig
from ..ffrank import FieldConfig, OracleBudgetError, OracleResult, terracini_oracle
from ..formats import (
    Statement,
    ambient_dim,
    is_subabundant,
    is_superabundant,
    parameter_count,
    parse_statement,
)
from . import certificate as cert
from . import rules
from .certificate import CertNode, Certificate


@dataclass(frozen=True)
class SearchBudget:
    nodes: int = DEFAULT_BUDGET_NODES
    oracle_cols: int = DEFAULT_BUDGET_COLS


@dataclass(frozen=True)
class Verdict:
    """Outcome of a proof attempt.

    status True/False comes with a certificate; None means undetermined,
    with the best oracle evidence seen (if any) and search statistics.
    """

    status: Optional[bool]
    certificate: Optional[Certificate]
    evidence: Optional[OracleResult]
    stats: dict = field(default_factory=dict)


class _Exhausted(Exception):
    pass


def _outward(lo: int, hi: int, center: int) -> Iterator[int]:
    # center first, then alternating +1/-1, clipped to [lo, hi]
    if lo > hi:
        return
    c = min(max(center, lo), hi)
    yield c
    step = 1
    while True:
        emitted = False
        if c + step <= hi:
            yield c + step
            emitted = True
        if c - step >= lo:
            yield c - step
            emitted = True
        if not emitted:
            return
        step += 1


class ProofEngine:
    """Proof search with a memo table shared across calls.

    Verdicts are memoized by canonical statement, so permuted inputs reuse
    earlier work.  Failed (undetermined) subgoals are only remembered for
    the duration of one prove() call, letting later calls retry with a
    fresh budget.
    """

    def __init__(self, field_config: Optional[FieldConfig] = None,
                 budget: Optional[SearchBudget] = None):
        if field_config is not None and not isinstance(field_config, FieldConfig):
            # Accept a RunConfig (or anything else carrying a field_config()).
            field_config = field_config.field_config()
        self.field_config = field_config or FieldConfig()
        self.budget = budget or SearchBudget()
        self._memo: dict = {}
        self._dead: set = set()
        self._nodes_used = 0
        self._memo_hits = 0
        self._evidence: Optional[OracleResult] = None
        self._root_key: Optional[str] = None
        self._active_budget = self.budget

    # -- public entry point ------------------------------------------------

    def prove(self, statement, budget: Optional[SearchBudget] = None) -> Verdict:
        if isinstance(statement, str):
            statement = parse_statement(statement)
        st = statement.canonical()
        active = budget or self.budget
        self._dead = set()
        self._nodes_used = 0
        self._memo_hits = 0
        self._evidence = None
        self._root_key = st.key()
        self._active_budget = active
        started = time.perf_counter()
        exhausted = False
        try:
            res = self._search(st)
        except _Exhausted:
            res = None
            exhausted = True
        stats = {
            "nodes": self._nodes_used,
            "memo_hits": self._memo_hits,
            "exhausted": exhausted,
            "elapsed_s": round(time.perf_counter() - started, 4),
        }
        if res is None:
            return Verdict(None, None, self._evidence, stats)
        verdict, node = res
        return Verdict(verdict, Certificate(st, verdict, node), self._evidence, stats)

    # -- search core -------------------------------------------------------

    def _search(self, st: Statement):
        key = st.key()
        hit = self._memo.get(key)
        if hit is not None:
            self._memo_hits += 1
            return hit
        if key in self._dead:
            return None
        self._nodes_used += 1
        if self._nodes_used > self._active_budget.nodes:
            raise _Exhausted
        res = self._resolve(st)
        if res is not None:
            self._memo[key] = res
        else:
            self._dead.add(key)
        return res

    def _resolve(self, st: Statement):
        reason = rules.known_false(st)
        if reason is not None:
            return False, CertNode(reason.kind, st,
                                   side_conditions=dict(reason.data),
                                   table_id=reason.table_id)

        why = rules.trivial_truth(st)
        if why is not None:
            return True, CertNode(cert.TRIVIAL, st, reason=why)

        if st.format.k == 3 and max(st.format.dims) <= 2:
            node = self._base_table(st)
            if node is not None:
                return True, node

        slot = rules.find_zero_factor_slot(st, with_conditions=False)
        if slot is not None and st.format.k >= 2:
            child = rules.drop_zero_factor(st, slot).canonical()
            res = self._search(child)
            if res is None:
                return None
            verdict, sub = res
            node = CertNode(cert.DROP_ZERO_FACTOR, st,
                            side_conditions={"slot": slot}, children=(sub,))
            return verdict, node

        slot = rules.find_zero_factor_slot(st, with_conditions=True)
        if slot is not None:
            child = rules.drop_conditions(st, slot,
                                          require_subabundant=False).canonical()
            res = self._search(child)
            if res is not None:
                verdict, sub = res
                conds = {"slot": slot, "dropped": st.a[slot]}
                if verdict:
                    # generic points extend any spanning set until the
                    # ambient is filled, so child truth lifts untouched
                    return True, CertNode(cert.DROP_CONDITIONS, st,
                                          side_conditions=conds, children=(sub,))
                if is_subabundant(st):
                    return False, CertNode(cert.DROP_CONDITIONS, st,
                                           side_conditions=conds, children=(sub,))
            # superabundant with an inconclusive or false child: other
            # rules may still apply

        node = self._try_splits(st)
        if node is not None:
            return True, node

        node = self._try_monotone(st)
        if node is not None:
            return True, node

        return self._try_oracle(st)

    # -- leaves ------------------------------------------------------------

    def _base_table(self, st: Statement) -> Optional[CertNode]:
        # catalog falses were screened before this point; tiny ambient,
        # so an oracle run settles the entry
        try:
            result = terracini_oracle(st, self.field_config)
        except OracleBudgetError:
            return None
        if not result.certified:
            self._note_evidence(st, result)
            return None
        dims = ",".join(str(n) for n in sorted(st.format.dims))
        return CertNode(cert.TABLE_TRUE, st, table_id=f"base:{dims}",
                        witness=result.witness)

    def _try_oracle(self, st: Statement):
        if ambient_dim(st.format) > self._active_budget.oracle_cols:
            return None
        try:
            result = terracini_oracle(st, self.field_config)
        except OracleBudgetError:
            return None
        if result.certified:
            return True, CertNode(cert.ORACLE, st, witness=result.witness)
        self._note_evidence(st, result)
        return None

    def _note_evidence(self, st: Statement, result: OracleResult) -> None:
        if st.key() == self._root_key or self._evidence is None:
            self._evidence = result

    # -- splits ------------------------------------------------------------

    def _try_splits(self, st: Statement) -> Optional[CertNode]:
        L = parameter_count(st)
        P = ambient_dim(st.format)
        kind = (cert.EQUI_SPLIT if L == P
                else cert.SUB_SPLIT if L < P
                else cert.SUPER_SPLIT)
        tried = set()
        for choice in self._split_choices(st):
            c1, c2 = rules.split_children(st, choice)
            c1, c2 = c1.canonical(), c2.canonical()
            pair = (c1.key(), c2.key())
            if pair in tried:
                continue
            tried.add(pair)
            r1 = self._search(c1)
            if r1 is None or r1[0] is False:
                continue
            r2 = self._search(c2)
            if r2 is None or r2[0] is False:
                continue
            return CertNode(kind, st, side_conditions=choice.describe(),
                            children=(r1[1], r2[1]))
        return None

    def _split_choices(self, st: Statement) -> Iterator[rules.SplitChoice]:
        dims, a, s = st.format.dims, st.a, st.s
        k = st.format.k
        L = parameter_count(st)
        P = ambient_dim(st.format)
        N = sum(dims)
        sub_mode = L <= P
        seen = set()
        for i in range(k):
            n_i = dims[i]
            if n_i < 1:
                continue
            sig = (n_i, a[i])
            if sig in seen:
                continue        # identical slots give identical splits
            seen.add(sig)
            Q = P // (n_i + 1)
            others = [j for j in range(k) if j != i and a[j] > 0]
            weights = [dims[j] + 1 for j in others]
            counts = [a[j] for j in others]
            cap = sum(c * w for c, w in zip(counts, weights))
            # near-even halves first, mirroring the worked reductions
            for n1 in range(n_i // 2, n_i):
                n2 = n_i - 1 - n1
                P1, P2 = (n1 + 1) * Q, (n2 + 1) * Q
                if sub_mode:
                    lo, hi = max(0, L - P2), P1
                else:
                    lo, hi = P1, L - P2
                if lo > hi:
                    continue
                ratio = (n1 + 1) / (n_i + 1)
                w_t = 1 + (N - n_i) + n1    # tangent row weight in child 1
                for s1 in _outward(0, s, round(s * ratio)):
                    fixed = s1 * w_t + (a[i] + s - s1) * (n1 + 1)
                    c_lo, c_hi = lo - fixed, hi - fixed
                    if c_hi < 0 or c_lo > cap:
                        continue
                    for xs in self._fiber_splits(counts, weights, c_lo, c_hi, ratio):
                        a1 = [0] * k
                        a2 = [0] * k
                        for j, x in zip(others, xs):
                            a1[j] = x
                            a2[j] = a[j] - x
                        yield rules.SplitChoice(i, (n1, n2), (s1, s - s1),
                                                (tuple(a1), tuple(a2)))

    @staticmethod
    def _fiber_splits(counts, weights, c_lo, c_hi, ratio) -> Iterator[tuple]:
        """Assignments x_j in [0, counts[j]] with c_lo <= sum x_j w_j <= c_hi,
        enumerated outward from the proportional target per slot."""
        suffix = [0] * (len(counts) + 1)
        for t in range(len(counts) - 1, -1, -1):
            suffix[t] = suffix[t + 1] + counts[t] * weights[t]

        def rec(t: int, acc: int) -> Iterator[tuple]:
            if acc > c_hi:
                return
            if t == len(counts):
                if acc >= c_lo:
                    yield ()
                return
            if acc + suffix[t] < c_lo:
                return
            for x in _outward(0, counts[t], round(counts[t] * ratio)):
                for rest in rec(t + 1, acc + x * weights[t]):
                    yield (x,) + rest

        yield from rec(0, 0)

    # -- monotone moves ----------------------------------------------------

    def _try_monotone(self, st: Statement) -> Optional[CertNode]:
        k = st.format.k
        if is_superabundant(st):
            # walk point counts down while staying superabundant
            shrunk = []
            if st.s >= 1:
                shrunk.append(Statement.of(st.format, st.s - 1, st.a))
            seen = set()
            for j in range(k):
                if st.a[j] == 0:
                    continue
                sig = (st.format.dims[j], st.a[j])
                if sig in seen:
                    continue
                seen.add(sig)
                a_new = st.a[:j] + (st.a[j] - 1,) + st.a[j + 1:]
                shrunk.append(Statement.of(st.format, st.s, a_new))
            for child in shrunk:
                if not is_superabundant(child):
                    continue
                res = self._search(child.canonical())
                if res is not None and res[0]:
                    conds = {"from_s": child.s, "from_a": list(child.a)}
                    return CertNode(cert.MONOTONE_SA, st,
                                    side_conditions=conds, children=(res[1],))
        if is_subabundant(st):
            # prove a smaller format and lift
            seen = set()
            for j in range(k):
                n_j = st.format.dims[j]
                if n_j < 1:
                    continue
                sig = (n_j, st.a[j])
                if sig in seen:
                    continue
                seen.add(sig)
                dims = st.format.dims[:j] + (n_j - 1,) + st.format.dims[j + 1:]
                child = Statement.of(dims, st.s, st.a)
                if not is_subabundant(child):
                    continue
                res = self._search(child.canonical())
                if res is not None and res[0]:
                    conds = {"from_format": list(child.format.dims)}
                    return CertNode(cert.MONOTONE_FORMAT, st,
                                    side_conditions=conds, children=(res[1],))
        return None


def prove(statement, run_config: Optional[RunConfig] = None,
          engine: Optional[ProofEngine] = None) -> Verdict:
    """One-shot proof attempt; see ProofEngine for the reusable version."""
    if engine is not None:
        return engine.prove(statement)
    cfg = run_config or RunConfig()
    eng = ProofEngine(cfg.field_config(),
                      SearchBudget(cfg.budget_nodes, cfg.budget_cols))
    return eng.prove(statement)
