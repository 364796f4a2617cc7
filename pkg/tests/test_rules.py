"""Reduction rule bookkeeping: splits, drops, monotone moves, trivial
truths, and the falsity catalog."""

import pytest
from hypothesis import given, settings, strategies as st

from segredim.formats import (
    Statement,
    ambient_dim,
    is_subabundant,
    is_superabundant,
    parameter_count,
    parse_statement,
)
from segredim.induction import rules
from segredim.induction.rules import (
    RuleError,
    SplitChoice,
    append_zero_factor,
    drop_conditions,
    drop_zero_factor,
    known_false,
    monotone_format,
    monotone_sa,
    split_children,
    trivial_truth,
)


def T(text):
    return parse_statement(text)


class TestSplit:
    def test_dimension_bookkeeping_identities(self):
        parent = T("T(3,3,3;6)")
        choice = SplitChoice(0, (1, 1), (3, 3), ((0, 0, 0), (0, 0, 0)))
        c1, c2 = split_children(parent, choice)
        assert str(c1.canonical()) == str(c2.canonical())
        assert c1.format.dims == (1, 3, 3)
        # the split slot's fiber count picks up the other child's tangents
        assert c1.a == (3, 0, 0) and c1.s == 3
        assert parameter_count(c1) + parameter_count(c2) == parameter_count(parent)
        assert (ambient_dim(c1.format) + ambient_dim(c2.format)
                == ambient_dim(parent.format))

    def test_known_reduction_of_seven_tangents(self):
        parent = T("T(3,3,3;7)")
        choice = SplitChoice(0, (1, 1), (4, 3), ((0, 0, 0), (0, 0, 0)))
        c1, c2 = split_children(parent, choice)
        assert {str(c1), str(c2)} == {"T(1,3,3;4;3,0,0)", "T(1,3,3;3;4,0,0)"}

    def test_fiber_conditions_split_on_other_slots_only(self):
        parent = Statement.of((3, 2, 2), 2, (1, 2, 0))
        choice = SplitChoice(0, (1, 1), (1, 1), ((0, 1, 0), (0, 1, 0)))
        c1, c2 = split_children(parent, choice)
        # slot 0 keeps parent's a_0 plus the twin's tangent count
        assert c1.a[0] == 1 + 1 and c2.a[0] == 1 + 1
        assert c1.a[1:] == (1, 0) and c2.a[1:] == (1, 0)

    def test_bad_arithmetic_rejected(self):
        parent = T("T(3,3,3;6)")
        bad = [
            SplitChoice(0, (1, 2), (3, 3), ((0, 0, 0), (0, 0, 0))),  # 1+2+1 != 3
            SplitChoice(0, (1, 1), (4, 3), ((0, 0, 0), (0, 0, 0))),  # 7 != 6
            SplitChoice(0, (1, 1), (3, 3), ((1, 0, 0), (0, 0, 0))),  # a_0 split
            SplitChoice(3, (1, 1), (3, 3), ((0, 0, 0), (0, 0, 0))),  # no slot 3
        ]
        for choice in bad:
            with pytest.raises(RuleError):
                split_children(parent, choice)

    def test_split_fiber_conditions_conserved(self):
        parent = Statement.of((4, 3, 2), 3, (0, 2, 1))
        choice = SplitChoice(0, (2, 1), (2, 1), ((0, 1, 1), (0, 1, 0)))
        c1, c2 = split_children(parent, choice)
        for j in (1, 2):
            assert c1.a[j] + c2.a[j] == parent.a[j]
        assert c1.format.dims == (2, 3, 2) and c2.format.dims == (1, 3, 2)


class TestDrops:
    def test_drop_zero_factor_removes_slot(self):
        st_ = T("T(0,2,3;4;0,1,0)")
        out = drop_zero_factor(st_, 0)
        assert out.format.dims == (2, 3) and out.a == (1, 0)

    def test_drop_zero_factor_needs_empty_slot(self):
        with pytest.raises(RuleError):
            drop_zero_factor(T("T(0,2,3;4;1,0,0)"), 0)
        with pytest.raises(RuleError):
            drop_zero_factor(T("T(2,3;1;0,0)"), 0)

    def test_drop_last_factor_forbidden(self):
        with pytest.raises(RuleError):
            drop_zero_factor(T("T(0;2;0)"), 0)

    def test_drop_conditions_zeroes_the_slot(self):
        st_ = T("T(0,2,3,3;5;4,0,0,0)")
        # superabundant: equivalence direction refused by default
        with pytest.raises(RuleError):
            drop_conditions(st_, 0)
        out = drop_conditions(st_, 0, require_subabundant=False)
        assert out.a == (0, 0, 0, 0) and out.format == st_.format

    def test_drop_conditions_subabundant_allowed(self):
        st_ = T("T(0,3,3;1;2,0,0)")  # 7+2 = 9 <= 16
        assert is_subabundant(st_)
        out = drop_conditions(st_, 0)
        assert out.a == (0, 0, 0)

    def test_drop_conditions_identity_when_nothing_to_drop(self):
        st_ = T("T(0,2,3;4;0,1,0)")
        assert drop_conditions(st_, 0) == st_
        st_ = T("T(2,3;1;0,0)")
        assert drop_conditions(st_) == st_

    def test_append_zero_factor(self):
        st_ = T("T(2,3;2;1,0)")
        out = append_zero_factor(st_, 3)
        assert out.format.dims == (2, 3, 0)
        assert out.a == (1, 0, 3) and out.s == 2
        with pytest.raises(RuleError):
            append_zero_factor(st_, -1)


class TestMonotone:
    def test_format_lift_from_subabundant(self):
        small = T("T(2,3,3;6)")  # 54 <= 48? no: 6*9=54 > 48 -> super
        assert is_superabundant(small)
        small = T("T(2,3,3;4)")  # 36 <= 48 sub
        grown = monotone_format(small, (3, 3, 3))
        assert grown.format.dims == (3, 3, 3) and grown.s == 4

    def test_format_descend_from_superabundant(self):
        big = T("T(3,3,3;7)")  # 70 >= 64 super
        shrunk = monotone_format(big, (3, 3, 2))
        assert shrunk.format.dims == (3, 3, 2)

    def test_format_move_direction_checked(self):
        with pytest.raises(RuleError):
            monotone_format(T("T(2,3,3;4)"), (1, 3, 3))  # sub must not shrink
        with pytest.raises(RuleError):
            monotone_format(T("T(3,3,3;7)"), (4, 3, 3))  # super must not grow
        with pytest.raises(RuleError):
            monotone_format(T("T(2,3,3;4)"), (3, 3))  # factor count change

    def test_sa_moves(self):
        # a subabundant truth implies every componentwise-smaller statement
        sub = T("T(3,3,3;5)")
        down = monotone_sa(sub, 4, (0, 0, 0))
        assert down.s == 4 and is_subabundant(down)
        with pytest.raises(RuleError):
            monotone_sa(sub, 6, (0, 0, 0))  # growing needs a super source
        # a superabundant truth implies every componentwise-larger statement
        sup = T("T(3,3,3;8)")
        up = monotone_sa(sup, 9, (0, 1, 0))
        assert up.s == 9 and is_superabundant(up)
        with pytest.raises(RuleError):
            monotone_sa(sup, 7, (0, 0, 0))  # shrinking needs a sub source


class TestTrivial:
    def test_reasons(self):
        assert trivial_truth(T("T(2,3;0;0,0)")) == "empty"
        assert trivial_truth(T("T(5;2;1)")) == "one_factor"
        assert trivial_truth(T("T(2,3,4;1;0,0,0)")) == "one_tangent"
        assert trivial_truth(T("T(2,3,4;0;0,5,0)")) == "one_fiber_factor"
        assert trivial_truth(T("T(2,3,4;2;0,0,0)")) is None
        assert trivial_truth(T("T(2,3,4;0;1,5,0)")) is None
        assert trivial_truth(T("T(2,3,4;1;0,1,0)")) is None


class TestFalsityCatalog:
    def test_small_format_table_sizes(self):
        # complete per-format lists: 2, 5, 13, 10 entries
        sizes = {k: len(v) for k, v in rules.SMALL_FORMAT_FALSE.items()}
        assert sizes == {(1, 1, 1): 2, (1, 1, 2): 5, (1, 2, 2): 13,
                         (2, 2, 2): 10}

    def test_listed_cases_fire(self):
        cases = [
            "T(1,1,1;0;0,1,3)", "T(1,1,1;1;0,0,2)",
            "T(1,1,2;0;1,5,0)", "T(1,1,2;1;0,3,0)",
            "T(1,2,2;2;0,0,2)", "T(1,2,2;1;5,0,0)", "T(1,2,2;0;7,0,1)",
            "T(2,2,2;4;0,0,0)", "T(2,2,2;3;0,1,1)", "T(2,2,2;0;0,1,7)",
            "T(2,2,2;1;0,1,5)",
        ]
        for text in cases:
            reason = known_false(T(text))
            assert reason is not None and reason.kind == "table_false", text

    def test_catalog_is_permutation_invariant(self):
        assert known_false(T("T(2,1,1;0;3,1,0)")) is not None  # (1,1,2;0;0,1,3)
        assert known_false(T("T(2,1,2;0;4,0,1)")) is not None  # (1,2,2;0;0,1,4)

    def test_family_entries(self):
        r = known_false(T("T(2,3,3;5)"))
        assert r.table_id == "family:2,3,3"
        assert r.data["actual_affine_dim"] == 44
        for n in (1, 2, 3, 5):
            stmt = Statement.of((1, 1, n, n), 2 * n + 1)
            r = known_false(stmt)
            assert r is not None and r.table_id == "family:1,1,n,n", n
            assert r.data["actual_affine_dim"] == ambient_dim(stmt.format) - 2

    def test_unbalanced_range(self):
        r = known_false(T("T(1,2,5;4)"))
        assert r.kind == "unbalanced_false"
        assert r.data["actual_affine_dim"] == 4 * (6 + 6 - 4)
        assert known_false(T("T(1,2,5;3)")) is None  # below the range
        assert known_false(T("T(1,2,5;6)")) is None  # typical rank: fills
        assert known_false(T("T(1,1,8;3)")) is not None
        # fiber conditions disable the plain-secant range rule
        assert known_false(T("T(1,2,5;4;1,0,0)")) is None or \
            known_false(T("T(1,2,5;4;1,0,0)")).kind != "unbalanced_false"

    def test_fibration_rule(self):
        r = known_false(T("T(1,1,3;1;0,0,2)"))
        assert r is not None and r.kind == "fibration_false"
        # the same shape with enough room is not caught
        assert known_false(T("T(1,1,3;1;0,0,1)")) is None

    def test_fibration_restricted_to_subabundant(self):
        # same inequality fires, but the statement is superabundant and
        # in fact true (the oracle certifies rank 8 elsewhere)
        st_ = T("T(1,1,1;1;0,0,3)")
        assert is_superabundant(st_)
        assert known_false(st_) is None

    def test_unlisted_small_cases_are_clean(self):
        for text in ["T(2,2,2;3;0,0,1)", "T(1,1,1;1;0,0,1)", "T(1,2,2;1;4,0,0)",
                     "T(2,2,2;5;0,0,0)", "T(1,1,2;2;0,0,0)"]:
            assert known_false(T(text)) is None, text


@st.composite
def random_split(draw):
    k = draw(st.integers(2, 4))
    dims = [draw(st.integers(1, 5)) for _ in range(k)]
    slot = draw(st.integers(0, k - 1))
    if dims[slot] < 1:
        dims[slot] = 1
    n = dims[slot]
    n1 = draw(st.integers(0, n - 1))
    s = draw(st.integers(0, 6))
    s1 = draw(st.integers(0, s))
    a = [draw(st.integers(0, 3)) for _ in range(k)]
    a1 = [draw(st.integers(0, a[j])) if j != slot else 0 for j in range(k)]
    a_parts = (
        tuple(a1[j] if j != slot else 0 for j in range(k)),
        tuple(a[j] - a1[j] if j != slot else 0 for j in range(k)),
    )
    parent = Statement.of(tuple(dims), s, tuple(a))
    choice = SplitChoice(slot, (n1, n - 1 - n1), (s1, s - s1), a_parts)
    return parent, choice


class TestSplitProperties:
    @given(random_split())
    @settings(max_examples=200, deadline=None)
    def test_parameter_and_ambient_additivity(self, case):
        parent, choice = case
        c1, c2 = split_children(parent, choice)
        assert parameter_count(c1) + parameter_count(c2) == parameter_count(parent)
        assert (ambient_dim(c1.format) + ambient_dim(c2.format)
                == ambient_dim(parent.format))

    @given(random_split())
    @settings(max_examples=200, deadline=None)
    def test_equiabundant_parents_with_equi_children_stay_exact(self, case):
        parent, choice = case
        c1, c2 = split_children(parent, choice)
        if parameter_count(parent) == ambient_dim(parent.format):
            if parameter_count(c1) == ambient_dim(c1.format):
                # additivity forces the twin onto the same boundary
                assert parameter_count(c2) == ambient_dim(c2.format)
