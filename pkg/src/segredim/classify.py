"""Per-format reports built on the catalog, the prover, and the oracle.

Secant rows are resolved cheapest-first: closed-form catalog facts, then a
small-budget proof search, then a direct modular rank computation.  A rank
deficit observed by the oracle is reported as Evidence-Defective, never as
proven Defective; only catalog families and falsity certificates promote a
row to Defective, and only catalog families carry exact defective
dimensions.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional

from .config import RunConfig
from .ffrank import OracleBudgetError, terracini_oracle
from .formats import (
    Format,
    FormatLike,
    Statement,
    ambient_dim,
    expected_fill_count,
    expected_secant_dim,
    is_balanced,
    is_unbalanced,
    unbalanced_defective_range,
    unbalanced_span_dim,
    unbalanced_typical_rank,
)
from .induction import ProofEngine, SearchBudget
from .induction.rules import known_false

NONDEFECTIVE = "NonDefective"
DEFECTIVE = "Defective"
EVIDENCE_DEFECTIVE = "Evidence-Defective"
UNKNOWN = "Unknown"

# node budget for the per-row proof attempt; rows the search cannot settle
# this cheaply fall through to the oracle
INDUCTION_NODE_BUDGET = 2_000

# extra secants to sweep past the expected fill count before giving up
_CAP_MARGIN = 6

_SMALL_COMPLETE = frozenset({(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)})


class CatalogConsistencyError(RuntimeError):
    """A computed value contradicts a catalog cross-check entry."""


@dataclass(frozen=True)
class ProfileRow:
    """One secant index of a format.

    expected/lower/upper are affine cone dimensions.  lower is certified
    (catalog rule, proof certificate, or modular rank, which only ever
    underestimates); upper is a proven upper bound.  defect is set when the
    dimension is known exactly.
    """

    s: int
    expected: int
    lower: Optional[int]
    upper: Optional[int]
    status: str
    defect: Optional[int] = None
    source: str = ""
    cert_ref: Optional[str] = None
    note: Optional[str] = None

    def record(self, fmt: Format) -> dict:
        return {
            "format": str(fmt),
            "s": self.s,
            "expected": self.expected,
            "lower": self.lower,
            "upper": self.upper,
            "status": self.status,
            "cert_ref": self.cert_ref,
        }


@dataclass(frozen=True)
class SecantProfile:
    format: Format
    rows: tuple[ProfileRow, ...]
    typical_rank: Optional[int]
    typical_rank_status: str  # "certified" | "unknown"
    notes: tuple[str, ...] = ()

    @property
    def ambient(self) -> int:
        return ambient_dim(self.format)

    def row(self, s: int) -> ProfileRow:
        for r in self.rows:
            if r.s == s:
                return r
        raise KeyError(f"no row for s={s}")

    def records(self) -> list[dict]:
        return [r.record(self.format) for r in self.rows]


@dataclass(frozen=True)
class PowerBounds:
    """Secant windows for the k-th power of one projective factor.

    For s up to nondefective_max the secant variety has the expected
    dimension; from fill_min on it fills the ambient space.  The *_direct
    flags mark (n, k) pairs whose window endpoints were confirmed by direct
    rank computation instead of the inductive argument; the windows
    themselves hold for every pair.
    """

    n: int
    k: int
    s_k: int
    delta_k: int
    nondefective_max: int
    fill_min: int
    nondef_direct: bool
    fill_direct: bool


_NONDEF_DIRECT = frozenset({(4, 4), (7, 4)})
_FILL_DIRECT = frozenset({
    (1, 5), (1, 6), (1, 7), (2, 4), (3, 4), (3, 5), (4, 4), (7, 4),
})


def tensor_power_bounds(n: int, k: int) -> PowerBounds:
    if k < 3:
        raise ValueError(f"power bounds need k >= 3, got {k}")
    if n < 1:
        raise ValueError(f"power bounds need n >= 1, got {n}")
    s_k = (n + 1) ** k // (n * k + 1)
    delta = s_k % (n + 1)
    return PowerBounds(
        n=n,
        k=k,
        s_k=s_k,
        delta_k=delta,
        nondefective_max=s_k - delta,
        fill_min=s_k - delta + n + 1,
        nondef_direct=(n, k) in _NONDEF_DIRECT,
        fill_direct=(n, k) in _FILL_DIRECT,
    )


# --- catalog rows ---------------------------------------------------------


def _positive_dims(fmt: Format) -> tuple[int, ...]:
    # point factors never change secant dimensions
    return tuple(sorted(n for n in fmt.dims if n > 0))


def _nd(s: int, affine: int, rule: str, note: Optional[str] = None) -> ProfileRow:
    return ProfileRow(s, affine, affine, affine, NONDEFECTIVE, 0,
                      "catalog:" + rule, None, note)


def _exact(s: int, affine: int, actual: int, rule: str) -> ProfileRow:
    return ProfileRow(s, affine, actual, actual, DEFECTIVE, affine - actual,
                      "catalog:" + rule)


def _catalog_row(fmt: Format, s: int) -> Optional[ProfileRow]:
    """Closed-form resolution of one secant row, or None if the catalog is
    silent.  Defective rows without exact catalog dimensions come back with
    lower=None; the caller measures them."""
    affine, _ = expected_secant_dim(fmt, s)
    P = ambient_dim(fmt)
    pos = _positive_dims(fmt)
    k = len(pos)
    if k <= 1:
        # a point, or a single projective space: every secant fills
        return _nd(s, affine, "single-factor")
    if s == 1:
        # the first secant is the cone over the variety itself
        return _nd(s, affine, "first-secant")
    if pos in _SMALL_COMPLETE:
        plain = Statement.of(pos, s, (0,) * k)
        if known_false(plain) is None:
            return _nd(s, affine, "small-format")
        return ProfileRow(s, affine, None, affine - 1, DEFECTIVE, None,
                          "catalog:small-format")
    if k >= 3 and s <= 2:
        return _nd(s, affine, "two-secants")
    if k == 4 and pos[0] == 1 and pos[1] == 1 and pos[2] == pos[3]:
        n = pos[2]
        if s <= 2 * n:
            return _nd(s, affine, "paired-square")
        if s == 2 * n + 1:
            return _exact(s, affine, P - 2, "paired-square")
        return _nd(s, affine, "paired-square-fill")
    if pos == (2, 3, 3):
        if s <= 4:
            return _nd(s, affine, "hull-233")
        if s == 5:
            return _exact(s, affine, 44, "hull-233")
        return _nd(s, affine, "hull-233-fill")
    if is_unbalanced(pos):
        lo, hi = unbalanced_defective_range(pos)
        if s <= lo:
            return _nd(s, affine, "unbalanced-low")
        if s < hi:
            return _exact(s, affine, unbalanced_span_dim(pos, s), "unbalanced-range")
        # hi equals the typical rank, so everything from here on fills
        return _nd(s, affine, "unbalanced-fill")
    if is_balanced(pos) and s <= pos[-1]:
        return _nd(s, affine, "balanced-low")
    if k >= 3 and len(set(pos)) == 1:
        pb = tensor_power_bounds(pos[0], k)
        if s <= pb.nondefective_max:
            note = "window endpoint checked directly" if pb.nondef_direct else None
            return _nd(s, affine, "power-window", note)
        if s >= pb.fill_min:
            note = "window endpoint checked directly" if pb.fill_direct else None
            return _nd(s, affine, "power-window-fill", note)
    return None


def _cert_ref(certificate) -> str:
    return hashlib.sha256(certificate.dumps().encode()).hexdigest()[:12]


def _measure(fmt: Format, s: int, row: ProfileRow, cfg: RunConfig) -> ProfileRow:
    """Fill in the oracle-measured dimension of a proven-defective row."""
    st = Statement.of(fmt, s, (0,) * fmt.k)
    try:
        res = terracini_oracle(st, cfg.field_config())
    except OracleBudgetError:
        return row
    best = max(w.rank for w in res.attempts)
    defect = row.expected - best if best == row.upper else None
    return ProfileRow(row.s, row.expected, best, row.upper, DEFECTIVE, defect,
                      row.source, row.cert_ref, row.note)


def resolve_secant(fmt: FormatLike, s: int, cfg: Optional[RunConfig] = None,
                   engine: Optional[ProofEngine] = None,
                   cache=None) -> ProfileRow:
    """Resolve one secant row: catalog, then proof search, then oracle."""
    f = Format.of(fmt)
    cfg = cfg or RunConfig()
    affine, _ = expected_secant_dim(f, s)

    row = _catalog_row(f, s)
    if row is not None:
        if row.status == DEFECTIVE and row.lower is None:
            return _measure(f, s, row, cfg)
        return row

    st = Statement.of(f, s, (0,) * f.k).canonical()
    digest = cfg.digest()
    verdict = None
    ref = None
    if cache is not None:
        hit = cache.get(st, digest)
        if hit is not None:
            verdict, ref = hit.verdict, hit.cert_sha256[:12]

    if verdict is None:
        if engine is None:
            engine = ProofEngine(cfg.field_config(),
                                 SearchBudget(cfg.budget_nodes, cfg.budget_cols))
        v = engine.prove(st, budget=SearchBudget(
            min(cfg.budget_nodes, INDUCTION_NODE_BUDGET), cfg.budget_cols))
        if v.status is not None:
            verdict = v.status
            ref = _cert_ref(v.certificate)[:12]
            if cache is not None:
                cache.put(st, v.status, v.certificate, digest)

    if verdict is True:
        return ProfileRow(s, affine, affine, affine, NONDEFECTIVE, 0,
                          "induction", ref)
    if verdict is False:
        row = ProfileRow(s, affine, None, affine - 1, DEFECTIVE, None,
                         "induction", ref)
        return _measure(f, s, row, cfg)

    try:
        res = terracini_oracle(st, cfg.field_config())
    except OracleBudgetError as exc:
        return ProfileRow(s, affine, None, affine, UNKNOWN, None, "oracle",
                          None, str(exc))
    if res.certified:
        return ProfileRow(s, affine, affine, affine, NONDEFECTIVE, 0, "oracle")
    best = max(w.rank for w in res.attempts)
    return ProfileRow(s, affine, best, affine, EVIDENCE_DEFECTIVE, None,
                      "oracle", None, res.note)


# --- profiles -------------------------------------------------------------


def _family_notes(fmt: Format) -> tuple[str, ...]:
    pos = _positive_dims(fmt)
    notes = []
    if (len(pos) == 3 and pos[0] == 2 and pos[1] == pos[2] >= 4
            and pos[1] % 2 == 0):
        notes.append(
            "format (2,n,n) with n even is a known defective family; "
            "defective dimensions here are oracle evidence only")
    return tuple(notes)


def secant_profile(fmt: FormatLike, cfg: Optional[RunConfig] = None,
                   max_s: Optional[int] = None,
                   engine: Optional[ProofEngine] = None,
                   cache=None) -> SecantProfile:
    """Sweep s = 1, 2, ... resolving each row, stopping at certified fill.

    The typical rank is the least s whose row certifies the full ambient
    dimension.  If the sweep hits its cap without a certified fill the rank
    is reported unknown.
    """
    f = Format.of(fmt)
    cfg = cfg or RunConfig()
    if engine is None:
        engine = ProofEngine(cfg.field_config(),
                             SearchBudget(cfg.budget_nodes, cfg.budget_cols))
    P = ambient_dim(f)
    cap = max_s if max_s is not None else expected_fill_count(f) + _CAP_MARGIN
    rows: list[ProfileRow] = []
    rank: Optional[int] = None
    for s in range(1, cap + 1):
        row = resolve_secant(f, s, cfg, engine, cache)
        rows.append(row)
        if row.status == NONDEFECTIVE and row.lower == P:
            rank = s
            break
    return SecantProfile(
        format=f,
        rows=tuple(rows),
        typical_rank=rank,
        typical_rank_status="certified" if rank is not None else "unknown",
        notes=_family_notes(f),
    )


def render_profile(profile: SecantProfile) -> str:
    f = profile.format
    out = [f"format ({f})  ambient affine {profile.ambient}"]
    out.append(f"  {'s':>3} {'expected':>9} {'lower':>6} {'upper':>6}  status")
    for r in profile.rows:
        status = r.status
        if r.status == DEFECTIVE and r.defect is not None:
            status = f"Defective({r.defect})"
        lo = "?" if r.lower is None else r.lower
        hi = "?" if r.upper is None else r.upper
        line = f"  {r.s:>3} {r.expected:>9} {lo:>6} {hi:>6}  {status} [{r.source}]"
        if r.note:
            line += f"  ({r.note})"
        out.append(line)
    if profile.typical_rank is not None:
        out.append(f"typical rank: {profile.typical_rank} (certified)")
    else:
        out.append("typical rank: unknown within sweep cap")
    for note in profile.notes:
        out.append(f"note: {note}")
    return "\n".join(out)


# --- typical rank ---------------------------------------------------------


@dataclass(frozen=True)
class TypicalRank:
    value: Optional[int]
    status: str  # "catalog" | "certified" | "unknown"
    source: str = ""


_RANK_CROSS_CHECKS = {
    (2, 2, 2): 5,
    (2, 2, 2, 2, 2): 23,
    (3, 3, 3, 3): 20,
}


def typical_rank(fmt: FormatLike, cfg: Optional[RunConfig] = None,
                 engine: Optional[ProofEngine] = None,
                 cache=None) -> TypicalRank:
    """Least s whose secant variety fills the ambient space."""
    f = Format.of(fmt)
    pos = _positive_dims(f)
    k = len(pos)
    result: Optional[TypicalRank] = None
    if k <= 1:
        result = TypicalRank(1, "catalog", "single-factor")
    elif pos == (2, 3, 3):
        result = TypicalRank(6, "catalog", "hull-233")
    elif k == 4 and pos[0] == 1 and pos[1] == 1 and pos[2] == pos[3]:
        result = TypicalRank(2 * pos[2] + 2, "catalog", "paired-square")
    elif is_unbalanced(pos):
        result = TypicalRank(unbalanced_typical_rank(pos), "catalog",
                             "unbalanced")
    else:
        profile = secant_profile(f, cfg, engine=engine, cache=cache)
        if profile.typical_rank is not None:
            result = TypicalRank(profile.typical_rank, "certified", "profile")
        else:
            result = TypicalRank(None, "unknown", "profile")
    want = _RANK_CROSS_CHECKS.get(pos)
    if want is not None and result.value is not None and result.value != want:
        raise CatalogConsistencyError(
            f"typical rank of ({f}) computed as {result.value}, "
            f"catalog says {want}")
    return result


# --- perfection -----------------------------------------------------------

PERFECT = "Perfect"
NOT_PERFECT = "NotPerfect"
NOT_NUMERICALLY_PERFECT = "NotNumericallyPerfect"


@dataclass(frozen=True)
class PerfectCheck:
    status: str
    fill_count: Optional[int] = None
    statement: Optional[Statement] = None
    source: str = ""
    cert_ref: Optional[str] = None
    note: Optional[str] = None


def _odd_power_family(pos: tuple[int, ...]) -> bool:
    # one factor of dimension k, plus k+1 factors of an odd dimension n
    from collections import Counter
    counts = Counter(pos)
    if len(counts) == 1:
        n = pos[0]
        return n % 2 == 1 and len(pos) == n + 1
    if len(counts) != 2:
        return False
    (d1, c1), (d2, c2) = sorted(counts.items(), key=lambda kv: kv[1])
    if c1 != 1:
        return False
    n, k = d2, d1
    return c2 == k + 1 and n % 2 == 1


def perfect_check(fmt: FormatLike, cfg: Optional[RunConfig] = None,
                  engine: Optional[ProofEngine] = None,
                  cache=None) -> PerfectCheck:
    """Does some secant variety hit the ambient dimension exactly?

    Requires the numerical identity (1 + sum n) | prod(n + 1), then a proof
    that the equiabundant statement is true.  Two closed families short cut
    the proof; otherwise it goes catalog, search, oracle, like any row.
    """
    f = Format.of(fmt)
    cfg = cfg or RunConfig()
    pos = _positive_dims(f)
    P = ambient_dim(f)
    w = 1 + sum(pos)
    if P % w != 0:
        return PerfectCheck(NOT_NUMERICALLY_PERFECT,
                            note=f"{P} is not a multiple of {w}")
    s_star = P // w
    k = len(pos)
    if k <= 1:
        return PerfectCheck(PERFECT, s_star, source="catalog:single-factor")
    st = Statement.of(pos, s_star, (0,) * k).canonical()
    if k >= 3 and len(set(pos)) == 1:
        pb = tensor_power_bounds(pos[0], k)
        if pb.delta_k == 0:
            return PerfectCheck(PERFECT, s_star, st, "catalog:power-window")
    if k >= 3 and _odd_power_family(pos):
        return PerfectCheck(PERFECT, s_star, st, "catalog:odd-power-family")

    if engine is None:
        engine = ProofEngine(cfg.field_config(),
                             SearchBudget(cfg.budget_nodes, cfg.budget_cols))
    v = engine.prove(st)
    if v.status is True:
        return PerfectCheck(PERFECT, s_star, st, "induction",
                            _cert_ref(v.certificate))
    if v.status is False:
        return PerfectCheck(NOT_PERFECT, s_star, st, "induction",
                            _cert_ref(v.certificate))
    try:
        res = terracini_oracle(st, cfg.field_config())
    except OracleBudgetError as exc:
        return PerfectCheck(UNKNOWN, s_star, st, "oracle", note=str(exc))
    if res.certified:
        return PerfectCheck(PERFECT, s_star, st, "oracle")
    return PerfectCheck(
        UNKNOWN, s_star, st, "oracle",
        note=f"rank deficit observed ({res.witness.rank} < {res.witness.target}); "
             "not a proof of imperfection")


# --- defective scan -------------------------------------------------------


@dataclass(frozen=True)
class ScanHit:
    format: Format
    s: int
    expected: int
    lower: Optional[int]
    upper: Optional[int]
    status: str

    def record(self) -> dict:
        return {
            "format": str(self.format),
            "s": self.s,
            "expected": self.expected,
            "lower": self.lower,
            "upper": self.upper,
            "status": self.status,
            "cert_ref": None,
        }


@dataclass(frozen=True)
class ScanReport:
    k_max: int
    n_max: int
    r_max: int
    hits: tuple[ScanHit, ...]

    def by_secant(self) -> dict[int, list[tuple[int, ...]]]:
        out: dict[int, list[tuple[int, ...]]] = {}
        for h in self.hits:
            out.setdefault(h.s, []).append(tuple(sorted(h.format.dims)))
        for v in out.values():
            v.sort()
        return out

    def records(self) -> list[dict]:
        return [h.record() for h in self.hits]


def defective_scan(k_max: int, n_max: int, r_max: int,
                   cfg: Optional[RunConfig] = None,
                   engine: Optional[ProofEngine] = None,
                   cache=None,
                   k_min: int = 3) -> ScanReport:
    """Resolve every secant up to r_max on the grid of formats with k_min
    <= k <= k_max factors and dimensions in 1..n_max; report every row that
    is not certified nondefective.  One engine memoizes across the grid."""
    cfg = cfg or RunConfig()
    if engine is None:
        engine = ProofEngine(cfg.field_config(),
                             SearchBudget(cfg.budget_nodes, cfg.budget_cols))
    hits: list[ScanHit] = []
    for k in range(k_min, k_max + 1):
        for dims in combinations_with_replacement(range(1, n_max + 1), k):
            f = Format.of(dims)
            P = ambient_dim(f)
            for s in range(1, r_max + 1):
                row = resolve_secant(f, s, cfg, engine, cache)
                if row.status != NONDEFECTIVE:
                    hits.append(ScanHit(f, s, row.expected, row.lower,
                                        row.upper, row.status))
                elif row.lower == P:
                    break  # fills from here on
    return ScanReport(k_max, n_max, r_max, tuple(hits))


def render_scan(report: ScanReport) -> str:
    out = [f"defective scan: k<={report.k_max} n<={report.n_max} "
           f"s<={report.r_max}  ({len(report.hits)} hits)"]
    for h in report.hits:
        status = h.status
        lo = "?" if h.lower is None else h.lower
        out.append(f"  ({h.format}) s={h.s}: expected {h.expected}, "
                   f"certified {lo}, {status}")
    return "\n".join(out)
