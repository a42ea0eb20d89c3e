"""Local rings F_p[[x_1..x_s]]/I and colengths of their ideals at the origin.

Power series are never materialized. Every quotient we measure has finite
length at the origin, so its length equals the dimension of the polynomial
quotient once a high enough truncation is adjoined; the truncation loop in
``local_colength`` detects that point exactly.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Tuple

from src.algebra.field import PrimeField
from src.algebra.groebner import (
    INFINITE,
    GroebnerBasis,
    buchberger,
    extend_basis,
    is_homogeneous_ideal,
    krull_dim_leading,
    staircase_count,
)
from src.algebra.polynomial import Polynomial, PolynomialRing, monomials_of_degree
from src.config import DEFAULT_LIMITS, EngineLimits
from src.exceptions import NotFiniteColength, ResourceExceeded, ValidationFailed

logger = logging.getLogger(__name__)


class Primality(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@lru_cache(maxsize=1024)
def ideal_basis(
    ring: PolynomialRing,
    generators: Tuple[Polynomial, ...],
    limits: EngineLimits = DEFAULT_LIMITS,
) -> GroebnerBasis:
    """Memoized reduced Gröbner basis of an ideal given by a generator tuple."""
    return buchberger(generators, ring=ring, limits=limits)


def _format_ideal(generators: Iterable[Polynomial]) -> str:
    return "(" + ", ".join(str(g) for g in generators) + ")"


@dataclass(frozen=True)
class LocalRingPresentation:
    """The local ring F_p[[variables]]/(defining_ideal) at the origin."""

    name: str
    ring: PolynomialRing
    defining_ideal: Tuple[Polynomial, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "defining_ideal", tuple(self.defining_ideal))
        for g in self.defining_ideal:
            if g.ring != self.ring:
                raise ValidationFailed(f"Defining generator {g} is not in {self.ring}", ring=self.name)
            if g.constant_term():
                raise ValidationFailed(
                    f"Defining generator {g} has a nonzero constant term; the ring would not be local",
                    ring=self.name,
                )

    @property
    def field(self) -> PrimeField:
        return self.ring.field

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.ring.variables

    def basis(self, limits: EngineLimits = DEFAULT_LIMITS) -> GroebnerBasis:
        return ideal_basis(self.ring, self.defining_ideal, limits)

    def reduce(self, f: Polynomial, limits: EngineLimits = DEFAULT_LIMITS) -> Polynomial:
        return self.basis(limits).normal_form(f)

    def dimension(self, limits: EngineLimits = DEFAULT_LIMITS) -> int:
        return krull_dim_leading(self.basis(limits))

    def ideal(self, generators: Iterable[Polynomial]) -> "LocalIdeal":
        return LocalIdeal(self, tuple(generators))

    def maximal_ideal(self) -> "LocalIdeal":
        return LocalIdeal(self, self.ring.gens())

    def quotient(self, extra: Iterable[Polynomial], name: str = "") -> "LocalRingPresentation":
        extra = tuple(g for g in extra if g)
        label = name or f"{self.name}/{_format_ideal(extra)}"
        return LocalRingPresentation(label, self.ring, self.defining_ideal + extra)

    def __str__(self) -> str:
        series = f"{self.field}[[{', '.join(self.variables)}]]"
        if not self.defining_ideal:
            return series
        return f"{series}/{_format_ideal(self.defining_ideal)}"


@dataclass(frozen=True)
class LocalIdeal:
    ring: LocalRingPresentation
    generators: Tuple[Polynomial, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.ring != self.ring.ring:
                raise ValidationFailed(f"Generator {g} is not in {self.ring.ring}", ring=self.ring.name)
            if g.constant_term():
                raise ValidationFailed(
                    f"Generator {g} is a unit at the origin; local ideals must lie in the maximal ideal",
                    ring=self.ring.name,
                )

    def combined(self) -> Tuple[Polynomial, ...]:
        """Generators of I + J in the polynomial ring."""
        return tuple(g for g in self.ring.defining_ideal + self.generators if g)

    def basis(self, limits: EngineLimits = DEFAULT_LIMITS) -> GroebnerBasis:
        return ideal_basis(self.ring.ring, self.combined(), limits)

    def contains(self, f: Polynomial, limits: EngineLimits = DEFAULT_LIMITS) -> bool:
        """Global membership in I + J; sufficient for local membership."""
        return self.basis(limits).contains(f)

    def __str__(self) -> str:
        return _format_ideal(self.generators)


def maximal_power(ring: LocalRingPresentation, N: int) -> LocalIdeal:
    """m^N: every monomial of total degree N."""
    if N < 1:
        raise ValueError(f"maximal_power needs N >= 1, got {N}")
    poly_ring = ring.ring
    return LocalIdeal(ring, tuple(poly_ring.monomial(m) for m in monomials_of_degree(poly_ring.nvars, N)))


def _truncation(ring: PolynomialRing, N: int, mode: str) -> List[Polynomial]:
    if mode == "power":
        return [ring.monomial(m) for m in monomials_of_degree(ring.nvars, N)]
    return [g**N for g in ring.gens()]


def truncated_colength(J: LocalIdeal, N: int, limits: EngineLimits = DEFAULT_LIMITS) -> int:
    """D_N: dimension of the polynomial quotient by I + J + T_N."""
    ring = J.ring.ring
    G = extend_basis(J.basis(limits), _truncation(ring, N, limits.truncation), limits=limits)
    count = staircase_count(G)
    if count == INFINITE:
        raise ResourceExceeded(f"truncated quotient at N={N} is not zero-dimensional")
    logger.info(
        "Truncated colength",
        extra={"ring": J.ring.name, "ideal": str(J), "truncation": N, "colength": count},
    )
    return int(count)


def truncation_schedule(start: int, budget: int) -> Iterator[int]:
    """Truncation levels start, 2*start, 4*start, ... while N + 1 stays within start + budget."""
    N = max(start, 1)
    while N + 1 <= start + budget:
        yield N
        N *= 2


def local_colength(J: LocalIdeal, limits: EngineLimits = DEFAULT_LIMITS) -> int:
    """Length of F_p[[x]]/(I + J).

    D_N is the dimension of the polynomial quotient by I + J + T_N, where T_N
    is (x_1^N, ..., x_s^N) or m^N depending on ``limits.truncation``. Any N
    with D_N == D_{N+1} gives T_N ⊆ I + J locally by Nakayama, so D_N is the
    exact local length. N starts one above the largest basis degree and
    doubles between checks; ``limits.max_truncation`` bounds how far N may
    climb above its start.
    """
    base = J.basis(limits)
    context = {"ring": J.ring.name, "ideal": str(J)}
    if base.is_unit():
        logger.info("Ideal is the unit ideal at the origin", extra={**context, "colength": 0})
        return 0
    ring = J.ring.ring
    if ring.nvars == 0:
        return 1

    start = 1 + max((g.total_degree() for g in base.generators), default=0)
    cap = limits.max_truncation
    current: Optional[int] = None
    last_level = start
    for N in truncation_schedule(start, cap):
        current = truncated_colength(J, N, limits)
        if truncated_colength(J, N + 1, limits) == current:
            logger.info(
                "Local colength certified",
                extra={**context, "truncation": N, "colength": current},
            )
            return current
        last_level = N
    raise NotFiniteColength(
        f"colength strictly growing past truncation {last_level} (budget {cap} above the start {start}, "
        f"last value {current}); the quotient is not of finite length at the origin or the budget is too low",
        truncation=last_level,
        colength=current,
    )


def is_m_primary(J: LocalIdeal, limits: EngineLimits = DEFAULT_LIMITS) -> Primality:
    """Whether I + J has finite colength at the origin.

    A zero-dimensional global quotient certifies yes. For homogeneous ideals
    a positive global dimension is a component through the origin, so no.
    Otherwise the truncation loop decides, and hitting its cap is reported as
    inconclusive rather than no.
    """
    base = J.basis(limits)
    if base.is_unit():
        return Primality.YES
    if krull_dim_leading(base) == 0:
        return Primality.YES
    if is_homogeneous_ideal(J.combined()):
        return Primality.NO
    try:
        local_colength(J, limits)
    except (NotFiniteColength, ResourceExceeded) as exc:
        logger.info("Primary test inconclusive: %s", exc, extra={"ring": J.ring.name, "ideal": str(J)})
        return Primality.INCONCLUSIVE
    return Primality.YES


def maximal_power_exponent(J: LocalIdeal, limits: EngineLimits = DEFAULT_LIMITS) -> int:
    """Least k with m^k ⊆ I + J, using global membership."""
    base = J.basis(limits)
    ring = J.ring.ring
    for k in range(1, limits.max_truncation + 1):
        if all(base.contains(ring.monomial(m)) for m in monomials_of_degree(ring.nvars, k)):
            return k
    raise NotFiniteColength(f"no power of the maximal ideal up to {limits.max_truncation} lies in {J}")


def dimension_chain(
    ring: LocalRingPresentation,
    elements: Iterable[Polynomial],
    limits: EngineLimits = DEFAULT_LIMITS,
) -> List[int]:
    """Dimensions of R, R/(e_1), R/(e_1, e_2), ... from their leading ideals."""
    current = ring
    dims = [current.dimension(limits)]
    for element in elements:
        current = current.quotient((element,))
        dims.append(current.dimension(limits))
    return dims
