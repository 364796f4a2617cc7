"""Reduction rules for tangent-span statements.

Each rule maps a statement to one or two child statements together with
arithmetic side conditions.  The rules here are pure bookkeeping: they
validate side conditions and construct children, but never search.  The
falsity catalog (the known-defective configurations) also lives here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..formats import (
    Format,
    Statement,
    ambient_dim,
    is_subabundant,
    is_superabundant,
    parameter_count,
    target_dim,
    unbalanced_defective_range,
    unbalanced_span_dim,
    is_unbalanced,
)
from . import certificate as cert


class RuleError(ValueError):
    """A rule's side conditions are not satisfied."""


# ---------------------------------------------------------------------------
# splits

@dataclass(frozen=True)
class SplitChoice:
    """A way of splitting one factor and distributing points between halves.

    The chosen slot's dimension n splits as n_parts[0] + n_parts[1] + 1.
    Tangent points split as s_parts.  Fiber counts at every other slot
    split as a_parts[0][j] + a_parts[1][j]; the entries of a_parts at the
    chosen slot must be zero (that slot's count is carried whole into both
    children, augmented by the opposite half's tangent count).
    """

    slot: int
    n_parts: tuple
    s_parts: tuple
    a_parts: tuple

    def describe(self) -> dict:
        return {
            "slot": self.slot,
            "n_parts": list(self.n_parts),
            "s_parts": list(self.s_parts),
            "a_parts": [list(self.a_parts[0]), list(self.a_parts[1])],
        }


def split_children(st: Statement, choice: SplitChoice):
    """Construct the two children of a split; validates bookkeeping only."""
    k = st.format.k
    i = choice.slot
    if not 0 <= i < k:
        raise RuleError(f"slot {i} out of range for {st}")
    n_i = st.format.dims[i]
    n1, n2 = choice.n_parts
    if n1 < 0 or n2 < 0 or n1 + n2 + 1 != n_i:
        raise RuleError(f"dimension parts {n1}+{n2}+1 != {n_i}")
    s1, s2 = choice.s_parts
    if s1 < 0 or s2 < 0 or s1 + s2 != st.s:
        raise RuleError(f"tangent parts {s1}+{s2} != {st.s}")
    a1, a2 = choice.a_parts
    if len(a1) != k or len(a2) != k:
        raise RuleError("fiber part vectors must have full length")
    if a1[i] != 0 or a2[i] != 0:
        raise RuleError("fiber parts at the split slot must be zero")
    for j in range(k):
        if j == i:
            continue
        if a1[j] < 0 or a2[j] < 0 or a1[j] + a2[j] != st.a[j]:
            raise RuleError(f"fiber parts at slot {j} do not sum to {st.a[j]}")

    dims1 = st.format.dims[:i] + (n1,) + st.format.dims[i + 1:]
    dims2 = st.format.dims[:i] + (n2,) + st.format.dims[i + 1:]
    fa1 = a1[:i] + (st.a[i] + s2,) + a1[i + 1:]
    fa2 = a2[:i] + (st.a[i] + s1,) + a2[i + 1:]
    return Statement.of(dims1, s1, fa1), Statement.of(dims2, s2, fa2)


def split_mode(st: Statement, choice: SplitChoice):
    """Classify a split as sub/super/equi and return (mode, child1, child2).

    Parameter counts always satisfy L(c1) + L(c2) = L(st) and the two
    child ambients sum to the parent ambient, so requiring both children
    on one side of abundance forces the parent to the same side.
    """
    c1, c2 = split_children(st, choice)
    sub = is_subabundant(c1) and is_subabundant(c2)
    sup = is_superabundant(c1) and is_superabundant(c2)
    if sub and sup:
        return cert.EQUI_SPLIT, c1, c2
    if sub:
        return cert.SUB_SPLIT, c1, c2
    if sup:
        return cert.SUPER_SPLIT, c1, c2
    raise RuleError(f"children of {st} straddle abundance: {c1}, {c2}")


def sub_split(st: Statement, choice: SplitChoice):
    """Split with both children subabundant; the parent is then subabundant
    and true whenever both children are true."""
    c1, c2 = split_children(st, choice)
    if not (is_subabundant(c1) and is_subabundant(c2)):
        raise RuleError("children are not both subabundant")
    # parent subabundance follows from the additivity identities
    assert is_subabundant(st)
    return c1, c2


def super_split(st: Statement, choice: SplitChoice):
    """Split with both children superabundant; parent true when both are."""
    c1, c2 = split_children(st, choice)
    if not (is_superabundant(c1) and is_superabundant(c2)):
        raise RuleError("children are not both superabundant")
    assert is_superabundant(st)
    return c1, c2


# ---------------------------------------------------------------------------
# drops and padding

def find_zero_factor_slot(st: Statement, with_conditions: bool) -> Optional[int]:
    for j, (n, a) in enumerate(zip(st.format.dims, st.a)):
        if n == 0 and ((a > 0) if with_conditions else (a == 0)):
            return j
    return None


def drop_conditions(st: Statement, slot: Optional[int] = None,
                    require_subabundant: bool = True) -> Statement:
    """Zero out the fiber count at a zero-dimensional slot.

    With subabundance this is a truth equivalence: the dropped items are
    generic points and, below the ambient dimension, generic points impose
    independent conditions.  Without subabundance only the forward
    direction survives (child true implies parent true, since generic
    points keep adding dimensions until the ambient space is filled), and
    the caller must opt in via require_subabundant=False.

    A slot that already carries no conditions has nothing to drop, so the
    statement comes back unchanged.
    """
    if slot is None:
        slot = find_zero_factor_slot(st, with_conditions=True)
        if slot is None:
            return st
    if st.format.dims[slot] != 0:
        raise RuleError(f"slot {slot} of {st} is not a point factor")
    if st.a[slot] == 0:
        return st
    if require_subabundant and not is_subabundant(st):
        raise RuleError(f"{st} is superabundant; dropping conditions is one-way")
    return Statement.of(st.format, st.s, st.a[:slot] + (0,) + st.a[slot + 1:])


def drop_zero_factor(st: Statement, slot: Optional[int] = None) -> Statement:
    """Remove a slot with dimension 0 and no conditions.  Tensoring with a
    one-dimensional space changes nothing: full equivalence."""
    if slot is None:
        slot = find_zero_factor_slot(st, with_conditions=False)
        if slot is None:
            raise RuleError(f"{st} has no droppable zero factor")
    if st.format.dims[slot] != 0 or st.a[slot] != 0:
        raise RuleError(f"slot {slot} of {st} is not an empty zero factor")
    if st.format.k < 2:
        raise RuleError("cannot drop the only factor")
    dims = st.format.dims[:slot] + st.format.dims[slot + 1:]
    a = st.a[:slot] + st.a[slot + 1:]
    return Statement.of(dims, st.s, a)


def append_zero_factor(st: Statement, extra: int) -> Statement:
    """Append a point factor carrying `extra` conditions.

    Truth of st implies truth of the result for any extra >= 0: the new
    items are generic points, which extend any spanning configuration.
    This direction only.
    """
    if extra < 0:
        raise RuleError("extra conditions must be non-negative")
    return Statement.of(st.format.dims + (0,), st.s, st.a + (extra,))


# ---------------------------------------------------------------------------
# monotone rules

def monotone_format(st: Statement, target) -> Statement:
    """Transport a true statement to another format, slotwise.

    Subabundant truth lifts to componentwise-larger formats; superabundant
    truth descends to componentwise-smaller ones (same s and a).  Growing
    a slot of a subabundant statement keeps it subabundant, and shrinking
    a superabundant one keeps it superabundant, so no extra abundance
    checks are needed on the result.
    """
    target = Format.of(target)
    if target.k != st.format.k:
        raise RuleError("format change must preserve the number of factors "
                        "(pad with zero factors first)")
    diffs = [t - n for t, n in zip(target.dims, st.format.dims)]
    if all(d >= 0 for d in diffs) and is_subabundant(st):
        pass
    elif all(d <= 0 for d in diffs) and is_superabundant(st):
        pass
    else:
        raise RuleError(f"format move {st.format} -> {target} disagrees "
                        f"with the abundance of {st}")
    return Statement.of(target, st.s, st.a)


def monotone_sa(st: Statement, s_new: int, a_new) -> Statement:
    """Transport a true statement to new point counts on the same format.

    Subabundant truth propagates downward in (s, a), superabundant truth
    upward; equiabundant statements may move either way (one direction at
    a time).
    """
    a_new = tuple(int(x) for x in a_new)
    if len(a_new) != st.format.k:
        raise RuleError("condition vector length mismatch")
    if s_new < 0 or any(x < 0 for x in a_new):
        raise RuleError("point counts must be non-negative")
    down = s_new <= st.s and all(x <= y for x, y in zip(a_new, st.a))
    up = s_new >= st.s and all(x >= y for x, y in zip(a_new, st.a))
    if down and is_subabundant(st):
        pass
    elif up and is_superabundant(st):
        pass
    else:
        raise RuleError(f"point-count move of {st} disagrees with abundance")
    return Statement.of(st.format, s_new, a_new)


# ---------------------------------------------------------------------------
# trivially true statements

TRIVIAL_EMPTY = "empty"
TRIVIAL_ONE_FACTOR = "one_factor"
TRIVIAL_ONE_TANGENT = "one_tangent"
TRIVIAL_ONE_FIBER_FACTOR = "one_fiber_factor"


def trivial_truth(st: Statement) -> Optional[str]:
    """Reason string when st is true for elementary reasons, else None.

    empty: no points at all, the empty span has dimension 0.
    one_factor: a single factor is a projective space; tangent spaces and
      fiber spans are coordinate subspaces of the whole space.
    one_tangent: one tangent space always has the full expected dimension.
    one_fiber_factor: generic fiber spans of a single factor behave like
      generic points of a matrix space; their span is always expected.
    """
    if st.s == 0 and not any(st.a):
        return TRIVIAL_EMPTY
    if st.format.k == 1:
        return TRIVIAL_ONE_FACTOR
    if st.s == 1 and not any(st.a):
        return TRIVIAL_ONE_TANGENT
    if st.s == 0 and sum(1 for x in st.a if x > 0) == 1:
        return TRIVIAL_ONE_FIBER_FACTOR
    return None


# ---------------------------------------------------------------------------
# falsity catalog

@dataclass(frozen=True)
class FalsityReason:
    kind: str
    table_id: Optional[str] = None
    data: dict = field(default_factory=dict)


# Complete lists of false (s; a) tuples for the four smallest cube-ish
# formats, entries aligned with the ascending dims shown; closed under the
# stated factor permutations via canonical membership keys.
SMALL_FORMAT_FALSE = {
    (1, 1, 1): (
        (0, (0, 1, 3)), (1, (0, 0, 2)),
    ),
    (1, 1, 2): (
        (0, (0, 1, 3)), (0, (0, 4, 1)), (0, (1, 5, 0)),
        (1, (0, 3, 0)), (1, (0, 0, 2)),
    ),
    (1, 2, 2): (
        # minimal
        (0, (0, 1, 4)), (0, (7, 0, 1)), (0, (1, 0, 5)),
        (1, (0, 0, 3)), (1, (5, 0, 0)), (2, (0, 0, 2)),
        # consequences of the minimal entries
        (1, (6, 0, 0)), (0, (0, 1, 5)), (0, (0, 2, 4)), (0, (1, 1, 4)),
        (1, (0, 0, 4)), (1, (0, 1, 3)), (1, (1, 0, 3)),
    ),
    (2, 2, 2): (
        # minimal
        (0, (0, 1, 7)), (1, (0, 0, 5)), (2, (0, 0, 4)),
        (3, (0, 1, 1)), (4, (0, 0, 0)),
        # consequences
        (0, (1, 1, 7)), (0, (0, 2, 7)), (0, (0, 1, 8)),
        (1, (0, 0, 6)), (1, (0, 1, 5)),
    ),
}

SMALL_FORMAT_DIMS = frozenset(SMALL_FORMAT_FALSE)


def _small_false_keys() -> dict:
    keys = {}
    for dims, entries in SMALL_FORMAT_FALSE.items():
        table_id = "small:" + ",".join(str(n) for n in dims)
        for s, a in entries:
            keys[Statement.of(dims, s, a).key()] = table_id
    return keys


_SMALL_FALSE_KEYS = _small_false_keys()


def _family_false(c: Statement) -> Optional[FalsityReason]:
    if any(c.a):
        return None
    dims = c.format.dims  # descending
    if dims == (3, 3, 2) and c.s == 5:
        return FalsityReason(cert.TABLE_FALSE, "family:2,3,3",
                             {"actual_affine_dim": 44})
    if len(dims) == 4 and dims[2] == dims[3] == 1 and dims[0] == dims[1]:
        n = dims[0]
        if c.s == 2 * n + 1:
            return FalsityReason(cert.TABLE_FALSE, "family:1,1,n,n",
                                 {"n": n, "actual_affine_dim": ambient_dim(c.format) - 2})
    return None


def _unbalanced_false(c: Statement) -> Optional[FalsityReason]:
    if any(c.a) or c.format.k < 2 or min(c.format.dims) < 1:
        return None
    if not is_unbalanced(c.format):
        return None
    lo, hi = unbalanced_defective_range(c.format)
    if not lo < c.s < hi:
        return None
    return FalsityReason(cert.UNBALANCED_FALSE, None, {
        "d": c.s,
        "actual_affine_dim": unbalanced_span_dim(c.format, c.s),
        "expected": target_dim(c),
    })


def _fibration_false(c: Statement) -> Optional[FalsityReason]:
    # The configuration sits inside a product fibration whose base is too
    # small; its members are forced to meet, so the span falls short of
    # the parameter count.  That only falsifies statements at or below
    # the ambient dimension.
    if c.format.k != 3 or not is_subabundant(c):
        return None
    n, a, s = c.format.dims, c.a, c.s
    for i in range(3):
        for j in range(3):
            if j == i:
                continue
            l = 3 - i - j
            if a[i] != 0:
                continue
            if not ((s == 1 and a[j] == 0) or (s == 0 and a[j] == 1)):
                continue
            lhs = a[l] + s * n[i] + n[j]
            rhs = (n[i] + 1) * (n[j] + 1)
            if lhs >= rhs:
                return FalsityReason(cert.FIBRATION_FALSE, None, {
                    "roles": [i, j, l], "lhs": lhs, "rhs": rhs,
                })
    return None


def known_false(st: Statement) -> Optional[FalsityReason]:
    """Match st against every falsity source; these are the only ways the
    engine ever concludes False."""
    c = st.canonical()
    table_id = _SMALL_FALSE_KEYS.get(c.key())
    if table_id is not None:
        return FalsityReason(cert.TABLE_FALSE, table_id)
    for check in (_family_false, _unbalanced_false, _fibration_false):
        reason = check(c)
        if reason is not None:
            return reason
    return None
