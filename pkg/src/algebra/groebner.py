"""Reduced Gröbner bases over prime fields and the invariants read off them."""

import heapq
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from operator import add
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from src.algebra.polynomial import (
    LEX,
    Monomial,
    MonomialOrder,
    Polynomial,
    PolynomialRing,
    monomial_divides,
    monomial_lcm,
    monomial_quotient,
    monomials_coprime,
)
from src.config import DEFAULT_LIMITS, EngineLimits
from src.exceptions import ResourceExceeded, UndefinedDimension

logger = logging.getLogger(__name__)

Count = Union[int, float]
INFINITE: float = math.inf


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Gröbner basis: monic generators sorted by ascending leading monomial."""

    ring: PolynomialRing
    generators: Tuple[Polynomial, ...]
    reduced: bool = True

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    @property
    def leading_monomials(self) -> Tuple[Monomial, ...]:
        return tuple(g.leading_monomial for g in self.generators)

    def is_unit(self) -> bool:
        return any(sum(m) == 0 for m in self.leading_monomials)

    def is_zero_ideal(self) -> bool:
        return not self.generators

    def normal_form(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self)

    def contains(self, f: Polynomial) -> bool:
        return normal_form(f, self).is_zero()

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self) -> Iterator[Polynomial]:
        return iter(self.generators)


@dataclass(frozen=True)
class Staircase:
    """Standard monomials of a basis; ``standard_monomials`` is None when not materialized."""

    cardinality: Count
    standard_monomials: Optional[Tuple[Monomial, ...]] = None

    @property
    def is_finite(self) -> bool:
        return self.cardinality != INFINITE


# ----------------------------------------------------------------------
# division
# ----------------------------------------------------------------------
def _heap_key(ring: PolynomialRing, m: Monomial) -> Tuple[int, ...]:
    return tuple(-k for k in ring.order.key(m))


def _reduce(f: Polynomial, divisors: Sequence[Polynomial]) -> Polynomial:
    """Full multivariate division of ``f`` by monic ``divisors``; returns the remainder."""
    if not f.terms or not divisors:
        return f
    ring = f.ring
    p = ring.p
    leads = [(g.leading_monomial, g.terms[1:]) for g in divisors]
    work: Dict[Monomial, int] = dict(f.terms)
    heap = [(_heap_key(ring, m), m) for m in work]
    heapq.heapify(heap)
    remainder: Dict[Monomial, int] = {}
    while heap:
        _, mono = heapq.heappop(heap)
        coeff = work.pop(mono, 0)
        if not coeff:
            continue
        for lead, tail in leads:
            if monomial_divides(lead, mono):
                break
        else:
            remainder[mono] = coeff
            continue
        shift = monomial_quotient(mono, lead)
        for tail_mono, tail_coeff in tail:
            target = tuple(map(add, tail_mono, shift))
            old = work.get(target)
            value = ((old or 0) - coeff * tail_coeff) % p
            if value:
                work[target] = value
                if old is None:
                    heapq.heappush(heap, (_heap_key(ring, target), target))
            elif old is not None:
                del work[target]
    return Polynomial.from_dict(ring, remainder)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Remainder of ``f`` modulo ``G``: zero exactly when ``f`` lies in the ideal."""
    if f.ring != G.ring:
        f = f.to_ring(G.ring)
    return _reduce(f, G.generators)


def exact_quotient(f: Polynomial, g: Polynomial) -> Polynomial:
    """``f / g`` when ``g`` divides ``f``; ValueError otherwise."""
    if g.is_zero():
        raise ValueError("Division by the zero polynomial")
    ring = f.ring
    lead, lead_coeff = g.leading_monomial, g.leading_coeff
    inverse = ring.field.inv(lead_coeff)
    quotient: List[Tuple[Monomial, int]] = []
    rest = f
    while rest:
        mono, coeff = rest.terms[0]
        if not monomial_divides(lead, mono):
            raise ValueError(f"{g} does not divide {f}")
        shift = monomial_quotient(mono, lead)
        c = coeff * inverse % ring.p
        quotient.append((shift, c))
        rest = rest - g.mul_term(shift, c)
    return Polynomial(ring, quotient)


# ----------------------------------------------------------------------
# Buchberger
# ----------------------------------------------------------------------
def _s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    lcm = monomial_lcm(f.leading_monomial, g.leading_monomial)
    return f.mul_term(monomial_quotient(lcm, f.leading_monomial)) - g.mul_term(
        monomial_quotient(lcm, g.leading_monomial)
    )


def _pair(i: int, j: int) -> Tuple[int, int]:
    return (i, j) if i < j else (j, i)


class _Completion:
    """Mutable state of one Buchberger run; never escapes this module."""

    def __init__(self, ring: PolynomialRing, limits: EngineLimits) -> None:
        self.ring = ring
        self.limits = limits
        self.basis: List[Polynomial] = []
        self.pending: Set[Tuple[int, int]] = set()
        self.queue: List[Tuple[Tuple[int, ...], int, int]] = []
        self.unit = False

    def admit(self, poly: Polynomial, *, known: bool = False) -> None:
        """Add a nonzero element; ``known`` skips pairs among previously completed elements."""
        poly = poly.monic()
        if poly.is_constant():
            self.unit = True
            return
        if len(self.basis) >= self.limits.max_basis_size:
            raise ResourceExceeded(
                f"Gröbner basis exceeded {self.limits.max_basis_size} elements",
                basis_size=len(self.basis),
            )
        degree = sum(poly.leading_monomial)
        if degree > self.limits.max_degree:
            raise ResourceExceeded(f"leading degree {degree} exceeds cap {self.limits.max_degree}")
        index = len(self.basis)
        self.basis.append(poly)
        if known:
            return
        for other in range(index):
            lcm = monomial_lcm(self.basis[other].leading_monomial, poly.leading_monomial)
            self.pending.add((other, index))
            heapq.heappush(self.queue, (self.ring.order.key(lcm), other, index))

    def _chain_criterion(self, i: int, j: int, lcm: Monomial) -> bool:
        for k, g in enumerate(self.basis):
            if k in (i, j):
                continue
            if _pair(i, k) in self.pending or _pair(j, k) in self.pending:
                continue
            if monomial_divides(g.leading_monomial, lcm):
                return True
        return False

    def run(self) -> None:
        while self.queue and not self.unit:
            _, i, j = heapq.heappop(self.queue)
            if (i, j) not in self.pending:
                continue
            self.pending.discard((i, j))
            f, g = self.basis[i], self.basis[j]
            if monomials_coprime(f.leading_monomial, g.leading_monomial):
                continue
            lcm = monomial_lcm(f.leading_monomial, g.leading_monomial)
            if self._chain_criterion(i, j, lcm):
                continue
            remainder = _reduce(_s_polynomial(f, g), self.basis)
            if remainder:
                self.admit(remainder)
        logger.debug(
            "Buchberger completion finished",
            extra={"basis_size": len(self.basis), "ring": str(self.ring)},
        )

    def result(self) -> GroebnerBasis:
        if self.unit:
            return GroebnerBasis(self.ring, (self.ring.one(),))
        return GroebnerBasis(self.ring, _interreduce(self.basis))


def _interreduce(polys: Sequence[Polynomial]) -> Tuple[Polynomial, ...]:
    if not polys:
        return ()
    ring = polys[0].ring
    key = ring.order.key
    ordered = sorted(polys, key=lambda g: key(g.leading_monomial))
    minimal: List[Polynomial] = []
    for g in ordered:
        if not any(monomial_divides(h.leading_monomial, g.leading_monomial) for h in minimal):
            minimal.append(g)
    reduced = []
    for index, g in enumerate(minimal):
        others = minimal[:index] + minimal[index + 1 :]
        reduced.append(_reduce(g, others).monic())
    return tuple(sorted(reduced, key=lambda g: key(g.leading_monomial)))


def _prepare(
    generators: Iterable[Polynomial],
    order: Optional[MonomialOrder],
    ring: Optional[PolynomialRing],
) -> Tuple[PolynomialRing, List[Polynomial]]:
    polys = list(generators)
    if ring is None:
        if not polys:
            raise ValueError("buchberger needs a ring when no generators are given")
        ring = polys[0].ring
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
    return ring, [g.to_ring(ring) for g in polys if g]


def buchberger(
    generators: Iterable[Polynomial],
    order: Optional[MonomialOrder] = None,
    *,
    ring: Optional[PolynomialRing] = None,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> GroebnerBasis:
    """Reduced Gröbner basis of the ideal generated by ``generators``.

    Pairs are selected smallest-lcm first. Pairs with coprime leading
    monomials and pairs caught by the chain criterion are skipped. Zero
    generators are discarded; an all-zero input gives the zero ideal.
    """
    ring, polys = _prepare(generators, order, ring)
    state = _Completion(ring, limits)
    for g in polys:
        remainder = _reduce(g, state.basis)
        if remainder:
            state.admit(remainder)
        if state.unit:
            break
    state.run()
    return state.result()


def extend_basis(
    G: GroebnerBasis,
    new: Iterable[Polynomial],
    *,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> GroebnerBasis:
    """Gröbner basis of ``G + (new)``, forming only pairs that involve new elements."""
    state = _Completion(G.ring, limits)
    for g in G.generators:
        state.admit(g, known=True)
    for g in new:
        remainder = _reduce(g.to_ring(G.ring), state.basis)
        if remainder:
            state.admit(remainder)
        if state.unit:
            break
    state.run()
    return state.result()


def is_groebner_basis(G: GroebnerBasis) -> bool:
    """Buchberger fixpoint: every S-polynomial reduces to zero."""
    gens = G.generators
    for f, g in combinations(gens, 2):
        if _reduce(_s_polynomial(f, g), gens):
            return False
    return True


def is_homogeneous_ideal(generators: Iterable[Polynomial]) -> bool:
    return all(g.is_homogeneous() for g in generators)


# ----------------------------------------------------------------------
# staircase
# ----------------------------------------------------------------------
def _minimalize(monos: Iterable[Monomial]) -> FrozenSet[Monomial]:
    ordered = sorted(set(monos), key=sum)
    kept: List[Monomial] = []
    for m in ordered:
        if not any(monomial_divides(k, m) for k in kept):
            kept.append(m)
    return frozenset(kept)


def _finite_staircase(leads: FrozenSet[Monomial]) -> bool:
    if not leads:
        return False
    nvars = len(next(iter(leads)))
    for i in range(nvars):
        if not any(m[i] > 0 and sum(m) == m[i] for m in leads):
            return False
    return True


def _count_standard(leads: FrozenSet[Monomial], memo: Dict[FrozenSet[Monomial], int]) -> int:
    """Number of monomials outside a zero-dimensional monomial ideal.

    Slices along the first variable; between consecutive first-variable
    exponents of the generators the projected ideal is constant, so each
    slab contributes (width) * (count of the projection).
    """
    if any(sum(m) == 0 for m in leads):
        return 0
    cached = memo.get(leads)
    if cached is not None:
        return cached
    nvars = len(next(iter(leads)))
    if nvars == 1:
        result = min(m[0] for m in leads)
    else:
        bound = min(m[0] for m in leads if not any(m[1:]))
        cuts = sorted({0} | {m[0] for m in leads if m[0] < bound})
        result = 0
        for index, start in enumerate(cuts):
            end = cuts[index + 1] if index + 1 < len(cuts) else bound
            projected = _minimalize(m[1:] for m in leads if m[0] <= start)
            result += (end - start) * _count_standard(projected, memo)
    memo[leads] = result
    return result


def _enumerate_standard(leads: FrozenSet[Monomial]) -> Iterator[Monomial]:
    if any(sum(m) == 0 for m in leads):
        return
    nvars = len(next(iter(leads)))
    if nvars == 1:
        for e in range(min(m[0] for m in leads)):
            yield (e,)
        return
    bound = min(m[0] for m in leads if not any(m[1:]))
    for e in range(bound):
        projected = _minimalize(m[1:] for m in leads if m[0] <= e)
        for rest in _enumerate_standard(projected):
            yield (e,) + rest


def staircase_count(G: GroebnerBasis) -> Count:
    """Dimension of the quotient as a vector space; ``INFINITE`` when not zero-dimensional."""
    if G.is_unit():
        return 0
    if G.ring.nvars == 0:
        return 1
    leads = _minimalize(G.leading_monomials)
    if not _finite_staircase(leads):
        return INFINITE
    return _count_standard(leads, {})


def staircase(G: GroebnerBasis, limits: EngineLimits = DEFAULT_LIMITS) -> Staircase:
    count = staircase_count(G)
    if count == INFINITE or count > limits.materialize_limit:
        return Staircase(count)
    if count == 0:
        return Staircase(0, ())
    if G.ring.nvars == 0:
        return Staircase(1, ((),))
    monos = tuple(_enumerate_standard(_minimalize(G.leading_monomials)))
    return Staircase(count, monos)


# ----------------------------------------------------------------------
# dimension and quotients
# ----------------------------------------------------------------------
def krull_dim_leading(G: GroebnerBasis) -> int:
    """Largest set of variables no leading monomial is supported on."""
    if G.is_unit():
        raise UndefinedDimension("The unit ideal has no Krull dimension")
    nvars = G.ring.nvars
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in _minimalize(G.leading_monomials)]
    for size in range(nvars, -1, -1):
        for subset in combinations(range(nvars), size):
            chosen = frozenset(subset)
            if not any(support <= chosen for support in supports):
                return size
    return 0


def _fresh_name(ring: PolynomialRing) -> str:
    name = "_t"
    while name in ring.variables:
        name += "_"
    return name


def ideal_quotient(
    G: GroebnerBasis,
    g: Polynomial,
    *,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> GroebnerBasis:
    """Reduced basis of (I : g), computed as (I ∩ (g)) / g by eliminating a fresh variable."""
    if g.is_zero():
        raise ValueError("Ideal quotient by the zero polynomial")
    ring = G.ring
    g = g.to_ring(ring)
    if g.is_constant():
        return G
    t_name = _fresh_name(ring)
    big = PolynomialRing(ring.field, (t_name,) + ring.variables, LEX)
    t = big.variable(t_name)
    gens = [t * h.to_ring(big) for h in G.generators]
    gens.append((1 - t) * g.to_ring(big))
    eliminated = buchberger(gens, limits=limits)
    intersection = [
        Polynomial(ring, [(m[1:], c) for m, c in h.terms])
        for h in eliminated.generators
        if h.leading_monomial[0] == 0
    ]
    quotients = [exact_quotient(h, g) for h in intersection]
    return buchberger(quotients, ring=ring, limits=limits)
