"""Multivariate polynomials over prime fields in a canonical sorted-term form.

Monomials are dense exponent tuples, one entry per ring variable. A
``Polynomial`` stores its nonzero terms strictly descending in the ring's
monomial order, so two equal polynomials always have identical ``terms``.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement
from operator import add
from typing import Callable, Dict, Iterable, Iterator, List, Literal, Mapping, Optional, Tuple, Union

from src.algebra.field import PrimeField
from src.exceptions import ResourceExceeded

Monomial = Tuple[int, ...]
Term = Tuple[Monomial, int]
Reducer = Callable[["Polynomial"], "Polynomial"]

MAX_EXPONENT = 2**32 - 1


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    product = tuple(map(add, a, b))
    if product and max(product) > MAX_EXPONENT:
        raise ResourceExceeded(f"exponent overflow multiplying {a} by {b}")
    return product


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    """True when ``a`` divides ``b``."""
    return all(x <= y for x, y in zip(a, b))


def monomial_quotient(b: Monomial, a: Monomial) -> Monomial:
    """``b / a``; the caller guarantees divisibility."""
    return tuple(y - x for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(max, a, b))


def monomials_coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def monomials_of_degree(nvars: int, degree: int) -> Iterator[Monomial]:
    """All exponent tuples of the given total degree (stars and bars)."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for index in combo:
            exps[index] += 1
        yield tuple(exps)


@dataclass(frozen=True)
class MonomialOrder:
    """A global multiplicative monomial order; precedence follows declaration order."""

    kind: Literal["degrevlex", "lex"] = "degrevlex"

    def __post_init__(self) -> None:
        if self.kind not in ("degrevlex", "lex"):
            raise ValueError(f"Unsupported monomial order: {self.kind}")

    def key(self, m: Monomial) -> Tuple[int, ...]:
        """Sort key: larger key means larger monomial."""
        if self.kind == "lex":
            return m
        return (sum(m),) + tuple(-e for e in reversed(m))

    def __str__(self) -> str:
        return self.kind


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


@dataclass(frozen=True)
class PolynomialRing:
    field: PrimeField
    variables: Tuple[str, ...]
    order: MonomialOrder = DEGREVLEX

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"Duplicate variable names in {self.variables}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def p(self) -> int:
        return self.field.p

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a variable of {self}") from None

    def with_order(self, order: MonomialOrder) -> "PolynomialRing":
        return PolynomialRing(self.field, self.variables, order)

    def unit_monomial(self) -> Monomial:
        return (0,) * self.nvars

    def zero(self) -> "Polynomial":
        return Polynomial(self)

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, value: int) -> "Polynomial":
        return Polynomial(self, [(self.unit_monomial(), value)])

    def monomial(self, exps: Monomial, coeff: int = 1) -> "Polynomial":
        if len(exps) != self.nvars:
            raise ValueError(f"Monomial {exps} does not match {self.nvars} variables")
        return Polynomial(self, [(tuple(exps), coeff)])

    def variable(self, name: str) -> "Polynomial":
        exps = [0] * self.nvars
        exps[self.index(name)] = 1
        return self.monomial(tuple(exps))

    def gens(self) -> Tuple["Polynomial", ...]:
        return tuple(self.variable(name) for name in self.variables)

    def __str__(self) -> str:
        return f"{self.field}[{', '.join(self.variables)}]"


Coercible = Union["Polynomial", int]


class Polynomial:
    """Immutable polynomial; ``terms`` is strictly descending in the ring order."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolynomialRing, terms: Iterable[Term] = ()) -> None:
        p = ring.p
        acc: Dict[Monomial, int] = {}
        for mono, coeff in terms:
            acc[mono] = (acc.get(mono, 0) + coeff) % p
        self.ring = ring
        self.terms: Tuple[Term, ...] = _sorted_terms(ring, acc)
        self._hash: Optional[int] = None

    @classmethod
    def _from_sorted(cls, ring: PolynomialRing, terms: Tuple[Term, ...]) -> "Polynomial":
        poly = cls.__new__(cls)
        poly.ring = ring
        poly.terms = terms
        poly._hash = None
        return poly

    @classmethod
    def from_dict(cls, ring: PolynomialRing, coeffs: Mapping[Monomial, int]) -> "Polynomial":
        """Build from a monomial->coefficient map whose values are already reduced."""
        return cls._from_sorted(ring, _sorted_terms(ring, coeffs))

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("The zero polynomial has no leading monomial")
        return self.terms[0][0]

    @property
    def leading_coeff(self) -> int:
        if not self.terms:
            raise ValueError("The zero polynomial has no leading coefficient")
        return self.terms[0][1]

    def tail(self) -> "Polynomial":
        return Polynomial._from_sorted(self.ring, self.terms[1:])

    def total_degree(self) -> int:
        """Largest total degree of a term; -1 for the zero polynomial."""
        return max((sum(m) for m, _ in self.terms), default=-1)

    def lowest_degree(self) -> int:
        """Smallest total degree of a term (the order at the origin)."""
        return min((sum(m) for m, _ in self.terms), default=-1)

    def constant_term(self) -> int:
        unit = self.ring.unit_monomial()
        for mono, coeff in self.terms:
            if mono == unit:
                return coeff
        return 0

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m, _ in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m, _ in self.terms}) <= 1

    def as_variable(self) -> Optional[str]:
        """Name of the variable when this polynomial is exactly that variable."""
        if len(self.terms) != 1 or self.terms[0][1] != 1:
            return None
        mono = self.terms[0][0]
        if sum(mono) != 1:
            return None
        return self.ring.variables[mono.index(1)]

    def variables_used(self) -> Tuple[str, ...]:
        used = [False] * self.ring.nvars
        for mono, _ in self.terms:
            for i, e in enumerate(mono):
                if e:
                    used[i] = True
        return tuple(name for name, flag in zip(self.ring.variables, used) if flag)

    def exponent_bounds(self) -> Tuple[int, ...]:
        bounds = [0] * self.ring.nvars
        for mono, _ in self.terms:
            for i, e in enumerate(mono):
                if e > bounds[i]:
                    bounds[i] = e
        return tuple(bounds)

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def _coerce(self, other: Coercible) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError(f"Ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other: Coercible) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        p = self.ring.p
        acc = dict(self.terms)
        for mono, coeff in other.terms:
            value = (acc.get(mono, 0) + coeff) % p
            if value:
                acc[mono] = value
            else:
                acc.pop(mono, None)
        return Polynomial.from_dict(self.ring, acc)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        p = self.ring.p
        return Polynomial._from_sorted(self.ring, tuple((m, p - c) for m, c in self.terms))

    def __sub__(self, other: Coercible) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Coercible) -> "Polynomial":
        return (-self) + other

    def scale(self, c: int) -> "Polynomial":
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero()
        if c == 1:
            return self
        return Polynomial._from_sorted(self.ring, tuple((m, coeff * c % p) for m, coeff in self.terms))

    def mul_term(self, mono: Monomial, c: int = 1) -> "Polynomial":
        """Multiply by ``c * mono``; the order is multiplicative so no re-sort is needed."""
        p = self.ring.p
        c %= p
        if c == 0 or not self.terms:
            return self.ring.zero()
        if self.terms and any(b + e > MAX_EXPONENT for b, e in zip(self.exponent_bounds(), mono)):
            raise ResourceExceeded(f"exponent overflow multiplying by {mono}")
        return Polynomial._from_sorted(
            self.ring,
            tuple((tuple(map(add, m, mono)), coeff * c % p) for m, coeff in self.terms),
        )

    def __mul__(self, other: Coercible) -> "Polynomial":
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return self.ring.zero()
        if len(other.terms) == 1:
            mono, coeff = other.terms[0]
            return self.mul_term(mono, coeff)
        if len(self.terms) == 1:
            mono, coeff = self.terms[0]
            return other.mul_term(mono, coeff)
        if any(a + b > MAX_EXPONENT for a, b in zip(self.exponent_bounds(), other.exponent_bounds())):
            raise ResourceExceeded("exponent overflow in polynomial product")
        p = self.ring.p
        acc: Dict[Monomial, int] = {}
        get = acc.get
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                mono = tuple(map(add, m1, m2))
                acc[mono] = (get(mono, 0) + c1 * c2) % p
        return Polynomial.from_dict(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Exponent must be a nonnegative integer, got {exponent!r}")
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.leading_coeff))

    # ------------------------------------------------------------------
    # ring changes
    # ------------------------------------------------------------------
    def to_ring(self, target: PolynomialRing) -> "Polynomial":
        """Re-embed into a ring over the same field whose variables include ours."""
        if target == self.ring:
            return self
        if target.field != self.ring.field:
            raise ValueError(f"Cannot move {self.ring} polynomials into {target}")
        positions = [target.index(name) for name in self.ring.variables]
        width = target.nvars
        terms = []
        for mono, coeff in self.terms:
            exps = [0] * width
            for pos, e in zip(positions, mono):
                exps[pos] = e
            terms.append((tuple(exps), coeff))
        return Polynomial(target, terms)

    def substitute(
        self,
        images: Mapping[str, "Polynomial"],
        *,
        target: Optional[PolynomialRing] = None,
        reduce: Optional[Reducer] = None,
    ) -> "Polynomial":
        return substitute(self, images, target=target, reduce=reduce)

    # ------------------------------------------------------------------
    # dunder plumbing
    # ------------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.terms))
        return self._hash

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_format_term(self.ring.variables, mono, coeff) for mono, coeff in self.terms)

    def __repr__(self) -> str:
        return f"Polynomial({self}, ring={self.ring})"


def _sorted_terms(ring: PolynomialRing, coeffs: Mapping[Monomial, int]) -> Tuple[Term, ...]:
    key = ring.order.key
    items = [(mono, coeff) for mono, coeff in coeffs.items() if coeff]
    items.sort(key=lambda item: key(item[0]), reverse=True)
    return tuple(items)


def _format_term(names: Tuple[str, ...], mono: Monomial, coeff: int) -> str:
    factors: List[str] = []
    for name, e in zip(names, mono):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    if not factors:
        return str(coeff)
    if coeff != 1:
        factors.insert(0, str(coeff))
    return "*".join(factors)


def substitute(
    f: Polynomial,
    images: Mapping[str, Polynomial],
    *,
    target: Optional[PolynomialRing] = None,
    reduce: Optional[Reducer] = None,
) -> Polynomial:
    """Evaluate ``f`` at the given variable images.

    Powers of each image are cached per call. When ``reduce`` is given it is
    applied to every cached power and partial product; it must be a normal
    form modulo an ideal, which keeps the result congruent to the plain
    substitution.
    """
    if target is None:
        sample = next(iter(images.values()), None)
        if sample is None:
            raise ValueError("substitute needs a target ring when no images are given")
        target = sample.ring
    for image in images.values():
        if image.ring != target:
            raise ValueError(f"Image {image} does not live in {target}")
    if reduce is None:
        reduce = _identity

    names = f.ring.variables
    powers: Dict[Tuple[int, int], Polynomial] = {}

    def power(index: int, exponent: int) -> Polynomial:
        cached = powers.get((index, exponent))
        if cached is not None:
            return cached
        if exponent == 1:
            try:
                value = reduce(images[names[index]])
            except KeyError:
                raise ValueError(f"No image given for variable {names[index]!r}") from None
        elif exponent % 2 == 0:
            half = power(index, exponent // 2)
            value = reduce(half * half)
        else:
            value = reduce(power(index, exponent - 1) * power(index, 1))
        powers[(index, exponent)] = value
        return value

    p = target.p
    acc: Dict[Monomial, int] = {}
    for mono, coeff in f.terms:
        product: Optional[Polynomial] = None
        for index, e in enumerate(mono):
            if e == 0:
                continue
            factor = power(index, e)
            product = factor if product is None else reduce(product * factor)
            if not product:
                break
        if product is None:
            product = target.one()
        for m, c in product.terms:
            acc[m] = (acc.get(m, 0) + c * coeff) % p
    return Polynomial.from_dict(target, acc)


def _identity(poly: Polynomial) -> Polynomial:
    return poly
