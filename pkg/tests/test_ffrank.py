"""Modular rank computation against an independent reference, plus the
frozen dimension values the rest of the suite leans on."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segredim.ffrank import (
    DEFAULT_PRIME,
    FALLBACK_PRIME,
    FieldConfig,
    OracleBudgetError,
    RankWitness,
    build_terracini_matrix,
    derive_seed,
    is_prime,
    rank_mod_p,
    recompute_rank,
    row_count,
    sample_points,
    terracini_oracle,
)
from segredim.formats import Statement, ambient_dim, target_dim


def reference_rank(mat: np.ndarray, p: int) -> int:
    """Row reduction with exact Python ints; slow but obviously correct."""
    rows = [[int(x) % p for x in row] for row in mat]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    col = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rank, n_rows):
            if rows[r][col] % p != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for r in range(n_rows):
            if r != rank and rows[r][col] % p != 0:
                f = rows[r][col]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


class TestRankModP:
    @given(
        st.integers(1, 12), st.integers(1, 12),
        st.integers(0, 2**32 - 1),
        st.sampled_from([5, 97, 1_000_003]),
    )
    @settings(max_examples=120, deadline=None)
    def test_matches_reference_on_random_matrices(self, n, m, seed, p):
        rng = np.random.default_rng(seed)
        mat = rng.integers(0, p, size=(n, m), dtype=np.int64)
        assert rank_mod_p(mat, p) == reference_rank(mat, p)

    def test_rank_deficient_constructions(self):
        p = 1_000_003
        rng = np.random.default_rng(7)
        a = rng.integers(0, p, size=(4, 9), dtype=np.int64)
        stacked = np.vstack([a, (2 * a) % p, np.zeros((3, 9), dtype=np.int64)])
        assert rank_mod_p(stacked, p) == reference_rank(stacked, p) == 4

    def test_identity_and_zero(self):
        assert rank_mod_p(np.eye(5, dtype=np.int64), 97) == 5
        assert rank_mod_p(np.zeros((3, 4), dtype=np.int64), 97) == 0

    def test_large_prime_entries_near_modulus(self):
        # stresses the delayed-reduction batching
        p = FALLBACK_PRIME
        rng = np.random.default_rng(11)
        mat = rng.integers(p - 5, p, size=(20, 20), dtype=np.int64)
        assert rank_mod_p(mat, p) == reference_rank(mat, p)

    def test_primes_are_prime(self):
        assert is_prime(DEFAULT_PRIME)
        assert is_prime(FALLBACK_PRIME)
        assert not is_prime(1_000_000)


class TestTerraciniMatrix:
    def test_shape_matches_row_count_and_ambient(self):
        s = Statement.of((2, 3, 3), 5)
        pts = sample_points(s, DEFAULT_PRIME, 1234)
        mat = build_terracini_matrix(s, pts)
        assert mat.shape == (row_count(s), ambient_dim(s.format))
        # one block of n_j+1 rows per factor per tangent point
        assert mat.shape == (5 * (3 + 4 + 4), 48)

    def test_fiber_rows_counted(self):
        s = Statement.of((1, 1, 1), 1, (0, 0, 3))
        pts = sample_points(s, DEFAULT_PRIME, 99)
        mat = build_terracini_matrix(s, pts)
        assert mat.shape == (row_count(s), 8)
        assert row_count(s) == (2 + 2 + 2) + 3 * 2

    def test_deterministic_given_seed(self):
        s = Statement.of((2, 2, 2), 4)
        a = build_terracini_matrix(s, sample_points(s, DEFAULT_PRIME, 5))
        b = build_terracini_matrix(s, sample_points(s, DEFAULT_PRIME, 5))
        c = build_terracini_matrix(s, sample_points(s, DEFAULT_PRIME, 6))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestOracle:
    def test_certifies_known_full_rank_dimensions(self):
        from segredim.formats import parse_statement
        for text, affine in [
            ("T(3,3,3;6)", 60), ("T(3,3,3;7)", 64),
            ("T(5,5,5;13)", 208), ("T(5,5,5;14)", 216),
            ("T(4,4,7;12)", 192), ("T(4,4,7;13)", 200),
        ]:
            res = terracini_oracle(parse_statement(text))
            assert res.certified, text
            assert res.witness.rank == res.witness.target == affine, text

    def test_reports_deficit_without_certifying(self):
        res = terracini_oracle(Statement.of((2, 3, 3), 5))
        assert not res.certified
        assert res.witness.rank == 44 and res.witness.target == 45
        res = terracini_oracle(Statement.of((2, 2, 2), 4))
        assert not res.certified
        assert res.witness.rank == 26 and res.witness.target == 27

    def test_deficit_retries_both_primes(self):
        res = terracini_oracle(Statement.of((1, 1, 1, 1), 3))
        assert not res.certified
        assert res.witness.rank == 14  # ambient 16, expected 15
        primes = {w.prime for w in res.attempts}
        assert primes == {DEFAULT_PRIME, FALLBACK_PRIME}
        assert len(res.attempts) == 4  # retries on the main prime + fallback
        assert all(w.rank < w.target for w in res.attempts)

    def test_fiber_statement_true_where_plain_intuition_fails(self):
        # the three-fiber configuration on the cube format spans everything
        res = terracini_oracle(Statement.of((1, 1, 1), 1, (0, 0, 3)))
        assert res.certified and res.witness.rank == 8

    def test_determinism_and_permutation_share_points(self):
        a = terracini_oracle(Statement.of((2, 3, 3), 4))
        b = terracini_oracle(Statement.of((3, 2, 3), 4))
        assert a.certified and b.certified
        assert a.witness.seed == b.witness.seed
        assert a.witness.rank == b.witness.rank

    def test_budget_error_and_force(self):
        big = Statement.of((9, 9, 9), 50)  # 50*28=1400 rows x 1000 cols
        cfg = FieldConfig(max_cells=10_000)
        with pytest.raises(OracleBudgetError):
            terracini_oracle(big, cfg)
        small = Statement.of((2, 2, 2), 4)
        cfg = FieldConfig(max_cells=10, force=True)
        assert terracini_oracle(small, cfg).witness.rank == 26

    def test_recompute_matches_witness(self):
        res = terracini_oracle(Statement.of((2, 2, 3), 4))
        w = res.witness
        redo = recompute_rank(w.statement, w.prime, w.seed)
        assert redo.rank == w.rank

    def test_seed_derivation_spreads(self):
        seeds = {derive_seed("T(2,2,2;4;0,0,0)", DEFAULT_PRIME, 0, i)
                 for i in range(4)}
        assert len(seeds) == 4

    def test_witness_json_round_trip(self):
        res = terracini_oracle(Statement.of((2, 2, 2), 4))
        w = res.witness
        again = RankWitness.from_json(w.to_json())
        assert again == w
