"""Local homomorphisms, endomorphisms and dynamical systems on presented local rings.

Every check here is a global statement in the polynomial ring used as a
sufficient proxy for the local one: f(I_R) ⊆ I_S, ψ(J) ⊆ I + J and the
commutation ψ∘f = f∘φ are all tested by Gröbner membership.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple

from src.algebra.groebner import ideal_quotient
from src.algebra.polynomial import Polynomial
from src.config import DEFAULT_LIMITS, EngineLimits
from src.exceptions import UndefinedDimension, UnstableIdeal, ValidationFailed
from src.ideals import (
    LocalIdeal,
    LocalRingPresentation,
    Primality,
    dimension_chain,
    is_m_primary,
)
from src.models import CheckStatus, FlatnessReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RingMap:
    """A local homomorphism source → target given by the images of the source variables."""

    source: LocalRingPresentation
    target: LocalRingPresentation
    images: Tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.source.ring.nvars:
            raise ValidationFailed(
                f"{self.label} gives {len(self.images)} images for "
                f"{self.source.ring.nvars} variables of {self.source.name}"
            )
        for var, image in zip(self.source.variables, self.images):
            if image.ring != self.target.ring:
                raise ValidationFailed(f"{self.label}: image of {var} is not in {self.target.name}")
            if image.constant_term():
                raise ValidationFailed(
                    f"{self.label}: image of {var} has a nonzero constant term, so the map is not local",
                    ring=self.target.name,
                )

    @classmethod
    def from_mapping(
        cls,
        source: LocalRingPresentation,
        target: LocalRingPresentation,
        images: Mapping[str, Polynomial],
        name: str = "",
    ) -> "RingMap":
        missing = [v for v in source.variables if v not in images]
        if missing:
            raise ValidationFailed(f"{name or 'map'}: no image given for {', '.join(missing)}")
        return cls(source, target, tuple(images[v] for v in source.variables), name)

    @property
    def label(self) -> str:
        return self.name or f"{self.source.name} -> {self.target.name}"

    def image(self, variable: str) -> Polynomial:
        return self.images[self.source.ring.index(variable)]

    def image_map(self) -> Dict[str, Polynomial]:
        return dict(zip(self.source.variables, self.images))

    def apply(self, f: Polynomial, limits: EngineLimits = DEFAULT_LIMITS) -> Polynomial:
        """f evaluated at the images, in normal form modulo the target's defining ideal."""
        basis = self.target.basis(limits)
        return f.substitute(self.image_map(), target=self.target.ring, reduce=basis.normal_form)

    def apply_ideal(self, J: LocalIdeal, limits: EngineLimits = DEFAULT_LIMITS) -> LocalIdeal:
        if J.ring != self.source:
            raise ValidationFailed(f"{self.label} cannot map an ideal of {J.ring.name}")
        return LocalIdeal(self.target, tuple(self.apply(g, limits) for g in J.generators))

    def maximal_image(self) -> LocalIdeal:
        """f(m)S as an ideal of the target."""
        return LocalIdeal(self.target, self.images)


@dataclass(frozen=True)
class Endomorphism(RingMap):
    def __post_init__(self) -> None:
        if self.source != self.target:
            raise ValidationFailed(f"{self.label}: an endomorphism needs source == target")
        super().__post_init__()

    @classmethod
    def on(
        cls,
        ring: LocalRingPresentation,
        images: Mapping[str, Polynomial],
        name: str = "",
    ) -> "Endomorphism":
        missing = [v for v in ring.variables if v not in images]
        if missing:
            raise ValidationFailed(f"{name or 'endo'}: no image given for {', '.join(missing)}")
        return cls(ring, ring, tuple(images[v] for v in ring.variables), name)

    @property
    def ring(self) -> LocalRingPresentation:
        return self.source


def identity(ring: LocalRingPresentation, name: str = "id") -> Endomorphism:
    return Endomorphism(ring, ring, ring.ring.gens(), name)


def compose(outer: RingMap, inner: RingMap, limits: EngineLimits = DEFAULT_LIMITS) -> RingMap:
    """outer ∘ inner, images reduced modulo the outer target's defining ideal."""
    if inner.target != outer.source:
        raise ValidationFailed(f"Cannot compose {outer.label} after {inner.label}")
    images = tuple(outer.apply(image, limits) for image in inner.images)
    name = f"{outer.label}∘{inner.label}"
    if isinstance(outer, Endomorphism) and isinstance(inner, Endomorphism):
        return Endomorphism(inner.source, outer.target, images, name)
    return RingMap(inner.source, outer.target, images, name)


def iterate(phi: Endomorphism, n: int, limits: EngineLimits = DEFAULT_LIMITS) -> Endomorphism:
    """φ^n by sequential substitution, images kept in normal form modulo I."""
    if n < 0:
        raise ValueError(f"iterate needs n >= 0, got {n}")
    if n == 0:
        return identity(phi.ring, name=f"{phi.label}^0")
    if n == 1:
        return phi
    return _iterate(phi, n, limits)


@lru_cache(maxsize=512)
def _iterate(phi: Endomorphism, n: int, limits: EngineLimits) -> Endomorphism:
    previous = iterate(phi, n - 1, limits)
    # φ^n(v) = φ^{n-1}(φ(v)); φ(v) is small, so its substitution stays cheap.
    images = tuple(previous.apply(image, limits) for image in phi.images)
    logger.debug(
        "Computed iterate",
        extra={"ring": phi.ring.name, "n": n, "basis_size": sum(len(g) for g in images)},
    )
    return Endomorphism(phi.ring, phi.ring, images, f"{phi.label}^{n}")


def check_well_defined(f: RingMap, limits: EngineLimits = DEFAULT_LIMITS) -> None:
    """Raise ValidationFailed unless f maps the source's defining ideal into the target's."""
    target_basis = f.target.basis(limits)
    for g in f.source.defining_ideal:
        image = f.apply(g, limits)
        if not target_basis.contains(image):
            raise ValidationFailed(
                f"{f.label} is not well defined: {g} maps to {image}, "
                f"which is not in the defining ideal of {f.target.name}",
                ring=f.target.name,
            )


def check_finite_length(phi: RingMap, limits: EngineLimits = DEFAULT_LIMITS) -> Primality:
    """Whether f(m) generates a primary ideal of the target, i.e. the closed fiber is zero-dimensional."""
    return is_m_primary(phi.maximal_image(), limits)


def check_stable_ideal(psi: Endomorphism, J: LocalIdeal, limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    return _first_unstable(psi, J, limits) is None


def _first_unstable(psi: Endomorphism, J: LocalIdeal, limits: EngineLimits) -> Optional[Polynomial]:
    if J.ring != psi.ring:
        raise ValidationFailed(f"{J} is not an ideal of {psi.ring.name}")
    for g in J.generators:
        if not J.contains(psi.apply(g, limits), limits):
            return g
    return None


def induced_endo(
    psi: Endomorphism,
    J: LocalIdeal,
    name: str = "",
    limits: EngineLimits = DEFAULT_LIMITS,
) -> Endomorphism:
    """The endomorphism ψ induces on the quotient by a ψ-stable ideal J."""
    offending = _first_unstable(psi, J, limits)
    if offending is not None:
        raise UnstableIdeal(
            f"{J} is not stable under {psi.label}: {offending} maps outside it",
            ring=psi.ring.name,
        )
    quotient = psi.ring.quotient(J.generators)
    basis = quotient.basis(limits)
    images = tuple(basis.normal_form(image) for image in psi.images)
    induced = Endomorphism(quotient, quotient, images, name or f"{psi.label}-bar")
    check_well_defined(induced, limits)
    return induced


@dataclass(frozen=True)
class DynamicalSystem:
    endo: Endomorphism
    validated_finite_length: bool = False

    @property
    def ring(self) -> LocalRingPresentation:
        return self.endo.ring

    @classmethod
    def validate(cls, endo: Endomorphism, limits: EngineLimits = DEFAULT_LIMITS) -> "DynamicalSystem":
        check_well_defined(endo, limits)
        verdict = check_finite_length(endo, limits)
        if verdict is Primality.NO:
            raise ValidationFailed(
                f"{endo.label} is not of finite length: {endo.maximal_image()} is not primary",
                ring=endo.ring.name,
            )
        if verdict is Primality.INCONCLUSIVE:
            logger.warning(
                "Finite length of %s is inconclusive",
                endo.label,
                extra={"ring": endo.ring.name, "status": verdict.value},
            )
        return cls(endo, verdict is Primality.YES)


@dataclass(frozen=True)
class MorphismSetup:
    """Source (R, φ), target (S, ψ), f: R → S and the closed fiber S/f(m)S."""

    source: DynamicalSystem
    target: DynamicalSystem
    f: RingMap
    fiber: LocalRingPresentation
    d: int
    d_prime: int

    @property
    def f_images(self) -> Dict[str, Polynomial]:
        return self.f.image_map()

    @classmethod
    def build(
        cls,
        source: DynamicalSystem,
        target: DynamicalSystem,
        f: RingMap,
        limits: EngineLimits = DEFAULT_LIMITS,
    ) -> "MorphismSetup":
        if f.source != source.ring or f.target != target.ring:
            raise ValidationFailed(
                f"{f.label} runs {f.source.name} -> {f.target.name}, "
                f"but the systems live on {source.ring.name} and {target.ring.name}"
            )
        check_well_defined(f, limits)
        fiber = target.ring.quotient(f.images)
        d = source.ring.dimension(limits)
        try:
            d_prime = fiber.dimension(limits)
        except UndefinedDimension:
            raise ValidationFailed(f"The closed fiber of {f.label} is zero") from None
        return cls(source, target, f, fiber, d, d_prime)


def check_morphism(setup: MorphismSetup, limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """ψ∘f = f∘φ on every source variable, modulo the target's defining ideal."""
    f, phi, psi = setup.f, setup.source.endo, setup.target.endo
    basis = setup.target.ring.basis(limits)
    for var in setup.source.ring.variables:
        lhs = psi.apply(f.image(var), limits)
        rhs = f.apply(phi.image(var), limits)
        if not basis.contains(lhs - rhs):
            logger.info(
                "Morphism does not commute at %s",
                var,
                extra={"ring": setup.target.ring.name, "status": "fail"},
            )
            return False
    return True


def _variable_pattern(f: RingMap) -> Optional[Tuple[str, ...]]:
    names = tuple(image.as_variable() for image in f.images)
    if any(name is None for name in names) or len(set(names)) != len(names):
        return None
    return names  # type: ignore[return-value]


def flatness_advisory(
    setup: MorphismSetup,
    cm: bool = False,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> FlatnessReport:
    """Cheap necessary and sufficient-pattern checks for flatness of f.

    The dimension check is dim R + dim S/f(m)S == dim S. The pattern check
    applies to a regular source whose variables go to distinct target
    variables: those variables must form a regular sequence on S, tested by
    (J : y) == J, or by a drop of one dimension per element when S is
    declared Cohen-Macaulay.
    """
    target = setup.target.ring
    target_dim = target.dimension(limits)
    dimension_ok = setup.d + setup.d_prime == target_dim
    report = dict(
        map=setup.f.label,
        d=setup.d,
        d_prime=setup.d_prime,
        target_dim=target_dim,
        dimension_check=CheckStatus.PASS if dimension_ok else CheckStatus.FAIL,
    )

    pattern = _variable_pattern(setup.f)
    if setup.source.ring.defining_ideal or pattern is None:
        detail = (
            "source has defining relations"
            if setup.source.ring.defining_ideal
            else "images are not distinct variables"
        )
        return FlatnessReport(**report, pattern_check=CheckStatus.NOT_APPLICABLE, detail=detail)

    ring = target.ring
    sequence = [ring.variable(name) for name in pattern]
    if cm:
        method = "dimension-drop"
        regular = _dimension_drops(target, sequence, limits)
    else:
        method = "regular-sequence"
        regular = _is_regular_sequence(target, sequence, limits)
    status = CheckStatus.PASS if regular else CheckStatus.FAIL
    if not dimension_ok or not regular:
        logger.warning(
            "Flatness advisory failed for %s",
            setup.f.label,
            extra={"ring": target.name, "status": "fail"},
        )
    return FlatnessReport(**report, pattern_check=status, method=method)


def _is_regular_sequence(
    ring: LocalRingPresentation,
    sequence: Sequence[Polynomial],
    limits: EngineLimits,
) -> bool:
    current = ring
    for y in sequence:
        basis = current.basis(limits)
        if basis.is_unit() or ideal_quotient(basis, y, limits=limits).generators != basis.generators:
            return False
        current = current.quotient((y,))
    return True


def _dimension_drops(
    ring: LocalRingPresentation,
    sequence: Sequence[Polynomial],
    limits: EngineLimits,
) -> bool:
    try:
        dims = dimension_chain(ring, sequence, limits)
    except UndefinedDimension:
        return False
    return all(after == before - 1 for before, after in zip(dims, dims[1:]))
