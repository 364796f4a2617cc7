"""Dimensions of secant varieties of Segre varieties: exact finite-field rank
certification, a splitting-calculus proof search with machine-checkable
certificates, and defectivity classification tools."""

from .formats import (
    Abundance,
    Format,
    ParseError,
    Statement,
    abundance,
    ambient_dim,
    expected_fill_count,
    expected_secant_dim,
    is_balanced,
    is_numerically_perfect,
    is_subabundant,
    is_superabundant,
    is_unbalanced,
    parameter_count,
    parse_format,
    parse_statement,
    target_dim,
    unbalanced_span_dim,
    unbalanced_typical_rank,
)
from .ffrank import (
    FieldConfig,
    OracleResult,
    PointSet,
    RankWitness,
    build_terracini_matrix,
    rank_mod_p,
    sample_points,
    terracini_oracle,
)
from .config import RunConfig
from .induction import (
    Certificate,
    CertNode,
    ProofEngine,
    SearchBudget,
    Verdict,
    VerificationError,
    known_false,
    prove,
    trivial_truth,
    verify,
)
from .classify import (
    PowerBounds,
    ScanReport,
    SecantProfile,
    defective_scan,
    perfect_check,
    resolve_secant,
    secant_profile,
    tensor_power_bounds,
    typical_rank,
)
from .cache import CacheRecord, VerdictCache

__version__ = "0.1.0"

__all__ = [
    "Abundance",
    "Format",
    "ParseError",
    "Statement",
    "abundance",
    "ambient_dim",
    "expected_fill_count",
    "expected_secant_dim",
    "is_balanced",
    "is_numerically_perfect",
    "is_subabundant",
    "is_superabundant",
    "is_unbalanced",
    "parameter_count",
    "parse_format",
    "parse_statement",
    "target_dim",
    "unbalanced_span_dim",
    "unbalanced_typical_rank",
    "FieldConfig",
    "OracleResult",
    "PointSet",
    "RankWitness",
    "build_terracini_matrix",
    "rank_mod_p",
    "sample_points",
    "terracini_oracle",
    "RunConfig",
    "Certificate",
    "CertNode",
    "ProofEngine",
    "SearchBudget",
    "Verdict",
    "VerificationError",
    "known_false",
    "prove",
    "trivial_truth",
    "verify",
    "PowerBounds",
    "ScanReport",
    "SecantProfile",
    "defective_scan",
    "perfect_check",
    "resolve_secant",
    "secant_profile",
    "tensor_power_bounds",
    "typical_rank",
    "CacheRecord",
    "VerdictCache",
    "__version__",
]
