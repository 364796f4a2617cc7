"""Exact rank certification over a large prime field.

Builds the tangent-plus-fiber span matrix of a statement at random points with
coordinates in F_p and row-reduces it exactly. A full-rank outcome certifies
the statement (a nonzero minor mod p is a nonzero integer minor, so the generic
characteristic-zero rank is at least the observed one); a rank deficit is
evidence only and is never treated as a disproof.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .formats import Statement, ambient_dim, target_dim

DEFAULT_PRIME = 1_000_003
FALLBACK_PRIME = 2_147_483_629
DEFAULT_MAX_CELLS = 200_000

INCONCLUSIVE_NOTE = (
    "rank deficit at random points over F_p is evidence of defectivity, not a proof; "
    "only a full-rank outcome certifies"
)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class OracleBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class FieldConfig:
    prime: int = DEFAULT_PRIME
    seed: int = 0
    retries: int = 3
    fallback_prime: int = FALLBACK_PRIME
    max_cells: int = DEFAULT_MAX_CELLS
    force: bool = False

    def __post_init__(self) -> None:
        for p in (self.prime, self.fallback_prime):
            if p <= 1 << 16:
                raise ValueError(f"prime {p} too small, need > 2^16")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.retries < 1:
            raise ValueError("need at least one attempt")


@dataclass(frozen=True, eq=False)
class PointSet:
    """Random points backing one rank attempt. Each point is a tuple of k
    coordinate vectors in the statement's own factor order."""

    prime: int
    seed: int
    tangent: tuple[tuple[np.ndarray, ...], ...]
    fibers: tuple[tuple[tuple[np.ndarray, ...], ...], ...]


@dataclass(frozen=True)
class RankWitness:
    statement: Statement
    prime: int
    seed: int
    rows: int
    cols: int
    rank: int
    target: int

    def to_json(self) -> dict:
        return {
            "statement": str(self.statement.canonical()),
            "prime": self.prime,
            "seed": self.seed,
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "target": self.target,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RankWitness":
        from .formats import parse_statement

        return cls(
            statement=parse_statement(data["statement"]),
            prime=int(data["prime"]),
            seed=int(data["seed"]),
            rows=int(data["rows"]),
            cols=int(data["cols"]),
            rank=int(data["rank"]),
            target=int(data["target"]),
        )


@dataclass(frozen=True)
class OracleResult:
    certified: bool
    witness: RankWitness  # the certifying attempt, or the best one seen
    attempts: tuple[RankWitness, ...]

    @property
    def note(self) -> str | None:
        return None if self.certified else INCONCLUSIVE_NOTE


def derive_seed(statement_key: str, prime: int, seed: int, attempt: int) -> int:
    h = hashlib.blake2b(
        f"{statement_key}|{prime}|{seed}|{attempt}".encode(), digest_size=8
    )
    return int.from_bytes(h.digest(), "big")


def _draw_vector(rng: np.random.Generator, length: int, p: int) -> np.ndarray:
    while True:
        v = rng.integers(0, p, size=length, dtype=np.int64)
        if v.any():
            return v


def sample_points(st: Statement, prime: int, seed: int) -> PointSet:
    """Deterministic given (canonical form of st, prime, seed); statements that
    agree up to factor permutation get the same points, permuted to match."""
    order = st.canonical_order()  # canonical slot j -> original factor order[j]
    canon = st.canonical()
    rng = np.random.default_rng(np.random.PCG64(derive_seed(str(canon), prime, seed, 0)))
    k = st.format.k

    def draw_point() -> tuple[np.ndarray, ...]:
        vecs: list[np.ndarray | None] = [None] * k
        for j, i in enumerate(order):
            vecs[i] = _draw_vector(rng, canon.format.dims[j] + 1, prime)
        return tuple(vecs)  # type: ignore[arg-type]

    tangent = tuple(draw_point() for _ in range(st.s))
    fibers: list[tuple[tuple[np.ndarray, ...], ...]] = [()] * k
    for j, i in enumerate(order):
        fibers[i] = tuple(draw_point() for _ in range(canon.a[j]))
    return PointSet(prime=prime, seed=seed, tangent=tangent, fibers=tuple(fibers))


def _chain_outer(vectors: Iterable[np.ndarray], p: int) -> np.ndarray:
    out = np.ones(1, dtype=np.int64)
    for v in vectors:
        out = (out[:, None] * v[None, :]) % p
        out = out.reshape(-1)
    return out


def _slot_block(vectors: tuple[np.ndarray, ...], slot: int, p: int) -> np.ndarray:
    # rows b = tensor with the slot vector replaced by the b-th basis vector
    left = _chain_outer(vectors[:slot], p)
    right = _chain_outer(vectors[slot + 1 :], p)
    m = len(vectors[slot])
    lr = (left[:, None] * right[None, :]) % p
    out = np.zeros((m, left.size, m, right.size), dtype=np.int64)
    idx = np.arange(m)
    out[idx, :, idx, :] = lr
    return out.reshape(m, left.size * m * right.size)


def row_count(st: Statement) -> int:
    d = st.format.dims
    return st.s * sum(n + 1 for n in d) + sum(x * (n + 1) for x, n in zip(st.a, d))


def build_terracini_matrix(st: Statement, pts: PointSet) -> np.ndarray:
    """Rows: per tangent point, one block per factor slot (the point itself
    appears in each block's row span); then the fiber blocks per factor.
    Columns: multi-indices in row-major order, first factor slowest."""
    p = pts.prime
    k = st.format.k
    blocks: list[np.ndarray] = []
    for point in pts.tangent:
        for j in range(k):
            blocks.append(_slot_block(point, j, p))
    for i in range(k):
        for point in pts.fibers[i]:
            blocks.append(_slot_block(point, i, p))
    cols = ambient_dim(st.format)
    if not blocks:
        return np.zeros((0, cols), dtype=np.int64)
    return np.vstack(blocks)


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Exact rank over F_p by fraction-free style elimination with delayed
    reduction: only the pivot row and multipliers are reduced each step, the
    trailing block is reduced just often enough to stay inside int64."""
    a = np.array(matrix, dtype=np.int64, copy=True) % p
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return 0
    # entries grow by at most (p-1)^2 per unreduced step
    batch = max(1, ((1 << 62) - p) // ((p - 1) ** 2))
    rank = 0
    dirty = 0
    for c in range(cols):
        if rank == rows:
            break
        col = a[rank:, c] % p
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        a[rank, c:] %= p
        inv = pow(int(a[rank, c]), p - 2, p)
        a[rank, c:] = a[rank, c:] * inv % p
        below = a[rank + 1 :, c] % p
        if below.size:
            a[rank + 1 :, c:] -= below[:, None] * a[rank, c:][None, :]
            dirty += 1
            if dirty >= batch:
                a[rank + 1 :, c:] %= p
                dirty = 0
        rank += 1
    return rank


def terracini_oracle(st: Statement, cfg: FieldConfig | None = None) -> OracleResult:
    """CertifiedTrue when some attempt reaches rank == target_dim; otherwise
    Inconclusive with the best witness. Retries reseed points only; after all
    retries fall short, one extra attempt runs with the fallback prime."""
    cfg = cfg or FieldConfig()
    rows, cols = row_count(st), ambient_dim(st.format)
    if rows * cols > cfg.max_cells and not cfg.force:
        raise OracleBudgetError(
            f"matrix {rows}x{cols} exceeds {cfg.max_cells} cells; pass force to override"
        )
    goal = target_dim(st)
    plan = [(cfg.prime, attempt) for attempt in range(cfg.retries)]
    plan.append((cfg.fallback_prime, 0))
    attempts: list[RankWitness] = []
    best: RankWitness | None = None
    key = str(st.canonical())
    for prime, attempt in plan:
        seed = derive_seed(key, prime, cfg.seed, attempt)
        pts = sample_points(st, prime, seed)
        mat = build_terracini_matrix(st, pts)
        rank = rank_mod_p(mat, prime)
        w = RankWitness(st.canonical(), prime, seed, rows, cols, rank, goal)
        attempts.append(w)
        if best is None or w.rank > best.rank:
            best = w
        if rank == goal:
            return OracleResult(True, w, tuple(attempts))
    assert best is not None
    return OracleResult(False, best, tuple(attempts))


def recompute_rank(st: Statement, prime: int, seed: int) -> RankWitness:
    """Re-run a single recorded attempt from (prime, seed); used by verifiers."""
    pts = sample_points(st, prime, seed)
    mat = build_terracini_matrix(st, pts)
    rank = rank_mod_p(mat, prime)
    return RankWitness(
        st.canonical(), prime, seed, mat.shape[0], mat.shape[1], rank, target_dim(st)
    )
