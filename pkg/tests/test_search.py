"""Proof search: verdicts, certificates, budgets, and memo behavior."""

import pytest

from segredim import RunConfig
from segredim.formats import Statement, parse_statement
from segredim.induction import ProofEngine, SearchBudget, prove, verify

# Statements that must come back True with small certificates: no oracle
# or base-table leaf wider than 64 columns.
SMALL_CERT_TRUE = [
    "T(3,3,3;6)",
    "T(3,3,3;7)",
    "T(5,5,5;13)",
    "T(5,5,5;14)",
    "T(4,4,7;12)",
    "T(4,4,7;13)",
]


class TestTrueProofs:
    @pytest.mark.parametrize("text", SMALL_CERT_TRUE)
    def test_small_certificate_true(self, text):
        v = prove(text)
        assert v.status is True
        assert verify(v.certificate) is True
        assert v.certificate.max_oracle_cols() <= 64

    def test_trivial_statements(self):
        for text in ["T(3,3,3;0)", "T(7;40)", "T(2,5;1)", "T(1,4;0;0,2)"]:
            v = prove(text)
            assert v.status is True, text
            assert v.certificate.root.kind == "trivial"

    def test_drop_zero_factor_route(self):
        v = prove("T(0,3,3;4)")
        assert v.status is True
        assert "drop_zero_factor" in v.certificate.leaf_counts() or any(
            n.kind == "drop_zero_factor" for n in v.certificate.walk()
        )

    def test_super_split_route(self):
        v = prove("T(0,2,3,3;5;4,0,0,0)")
        assert v.status is True
        assert verify(v.certificate)


class TestFalseProofs:
    @pytest.mark.parametrize(
        "text,table_id",
        [
            ("T(2,3,3;5)", "family:2,3,3"),
            ("T(1,1,2,2;5)", "family:1,1,n,n"),
            ("T(2,2,2;4)", "small:2,2,2"),
            ("T(1,1,3;3)", None),
        ],
    )
    def test_catalog_falsity(self, text, table_id):
        v = prove(text)
        assert v.status is False
        assert verify(v.certificate) is True
        if table_id is not None:
            assert v.certificate.root.table_id == table_id

    def test_unbalanced_false(self):
        # dims (1,1,9): all-but-largest product 4, bound B = 2, so
        # s in (2, 4) is deficient; s = 3 sits inside.
        v = prove("T(1,1,9;3)")
        assert v.status is False
        assert v.certificate.root.kind == "unbalanced_false"

    def test_false_through_drop_conditions(self):
        # Point factor with conditions on a subabundant statement: falsity
        # of the reduced form lifts back through the equivalence.  The same
        # shape with enough extra conditions turns superabundant and True,
        # so both directions get exercised.
        w = prove("T(0,2,3,3;5;2,0,0,0)")
        assert w.status is False
        assert verify(w.certificate) is True
        v = prove("T(0,2,3,3;5;4,0,0,0)")
        assert v.status is True


class TestUndetermined:
    def test_honest_undetermined(self):
        # Superabundant with an oracle deficit but outside every falsity
        # source: the tool must refuse to guess.
        v = prove("T(1,2,3;3;0,0,1)")
        assert v.status is None
        assert v.certificate is None
        assert v.evidence is not None

    def test_budget_exhaustion(self):
        engine = ProofEngine(RunConfig())
        v = engine.prove("T(3,3,3;6)", budget=SearchBudget(nodes=2, oracle_cols=4096))
        assert v.status is None
        assert v.stats["exhausted"]


class TestEngineState:
    def test_memo_reuse(self):
        engine = ProofEngine(RunConfig())
        v1 = engine.prove("T(3,3,3;6)")
        n1 = v1.stats["nodes"]
        v2 = engine.prove("T(3,3,3;6)")
        assert v2.status is True
        assert v2.stats["nodes"] == 0
        assert v2.stats["memo_hits"] >= 1
        assert n1 > 0

    def test_permuted_statement_shares_memo(self):
        engine = ProofEngine(RunConfig())
        engine.prove("T(4,4,7;12)")
        v = engine.prove("T(7,4,4;12)")
        assert v.status is True
        assert v.stats["nodes"] == 0

    def test_string_and_object_inputs_agree(self):
        st = Statement.of((3, 3, 3), 6)
        assert prove(st).status is prove("T(3,3,3;6)").status

    def test_certificate_statement_matches_input_canonical(self):
        v = prove("T(4,7,4;12)")
        assert v.certificate.statement == parse_statement("T(4,7,4;12)").canonical()
