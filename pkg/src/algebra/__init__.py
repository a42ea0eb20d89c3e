from src.algebra.field import PrimeField, field_arith, is_prime
from src.algebra.groebner import (
    GroebnerBasis,
    Staircase,
    buchberger,
    extend_basis,
    ideal_quotient,
    is_groebner_basis,
    krull_dim_leading,
    normal_form,
    staircase,
    staircase_count,
)
from src.algebra.polynomial import (
    DEGREVLEX,
    LEX,
    Monomial,
    MonomialOrder,
    Polynomial,
    PolynomialRing,
    substitute,
)

__all__ = [
    "DEGREVLEX",
    "LEX",
    "GroebnerBasis",
    "Monomial",
    "MonomialOrder",
    "Polynomial",
    "PolynomialRing",
    "PrimeField",
    "Staircase",
    "buchberger",
    "extend_basis",
    "field_arith",
    "ideal_quotient",
    "is_groebner_basis",
    "is_prime",
    "krull_dim_leading",
    "normal_form",
    "staircase",
    "staircase_count",
    "substitute",
]
