"""Word lengths over an extended free-group generating set, with the
induced weighted convolution algebra: certified lower bounds, witness
factorizations, exhaustive search at desk scale, and exact e-exponent
norm and pairing arithmetic."""

from .algebra import (
    ExpScalar,
    ExpSum,
    NormRoot,
    WeightProvider,
    WeightedVector,
    chain_product,
    convolve,
    min_tail_index,
    normalized_point_mass,
    omega_norm,
    pair_omega,
    sandwich_decay_bound,
    sandwich_norm_bound,
    spectral_probe,
    vector_from_literal,
    vector_to_literal,
    xweight,
)
from .errors import (
    BudgetExhausted,
    ConjugatorTooLong,
    ConstraintViolation,
    IndexTooSmall,
    InvalidCertificate,
    PreconditionViolated,
    UnknownLength,
    WordSyntaxError,
)
from .genset import (
    BigGen,
    Gen,
    GenSetParams,
    LetterGen,
    enumerate_generators,
    expand_generator,
    max_usable_index,
    normalize_conjugator,
)
from .lengths import (
    Certificate,
    Direction,
    Factorization,
    LengthResult,
    SearchBudget,
    best_certificate_bound,
    block_witness,
    chain_witness,
    chain_word,
    eval_certificate,
    family_length,
    rewrite_drop_conjugator,
    verify_factorization,
    xlength,
)
from .words import IDENTITY, AbelianVector, Letter, Word, hom_value

__all__ = [
    "AbelianVector",
    "BigGen",
    "BudgetExhausted",
    "Certificate",
    "ConjugatorTooLong",
    "ConstraintViolation",
    "Direction",
    "ExpScalar",
    "ExpSum",
    "Factorization",
    "Gen",
    "GenSetParams",
    "IDENTITY",
    "IndexTooSmall",
    "InvalidCertificate",
    "LengthResult",
    "Letter",
    "LetterGen",
    "NormRoot",
    "PreconditionViolated",
    "SearchBudget",
    "UnknownLength",
    "WeightProvider",
    "WeightedVector",
    "Word",
    "WordSyntaxError",
    "best_certificate_bound",
    "block_witness",
    "chain_product",
    "chain_witness",
    "chain_word",
    "convolve",
    "enumerate_generators",
    "eval_certificate",
    "expand_generator",
    "family_length",
    "hom_value",
    "max_usable_index",
    "min_tail_index",
    "normalize_conjugator",
    "normalized_point_mass",
    "omega_norm",
    "pair_omega",
    "rewrite_drop_conjugator",
    "sandwich_decay_bound",
    "sandwich_norm_bound",
    "spectral_probe",
    "vector_from_literal",
    "vector_to_literal",
    "verify_factorization",
    "xlength",
    "xweight",
]

__version__ = "0.1.0"
