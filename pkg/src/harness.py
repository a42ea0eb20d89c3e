"""Exact per-n checks of length additivity and the length inequality for a morphism.

For f: (R, φ) → (S, ψ) with closed fiber S/f(m)S and induced ψ̄ on it:

  additivity (f flat, S Cohen-Macaulay):
      length S/ψ^n(Q)S == length R/φ^n(q)R * length S/[f(m)S + ψ^n(q')S]
  inequality (any morphism):
      λ_n(S, m_S) <= λ_n(R, m_R) * length S/[f(m)S + ψ^n(m_S)S]

where Q is generated by q' together with f(q).
"""

import logging
from typing import Dict, Iterable

from src.algebra.polynomial import Polynomial
from src.config import DEFAULT_LIMITS, EngineLimits
from src.dynamics import (
    DynamicalSystem,
    MorphismSetup,
    check_morphism,
    flatness_advisory,
    induced_endo,
)
from src.entropy import estimate_entropy, length_table
from src.exceptions import UndefinedDimension, ValidationFailed
from src.ideals import LocalIdeal, LocalRingPresentation, dimension_chain
from src.models import (
    AdditivityCheck,
    AdditivityRow,
    EntropyDecomposition,
    EntropyReport,
    InequalityReport,
    InequalityRow,
)

logger = logging.getLogger(__name__)


def sop_check(
    ring: LocalRingPresentation,
    elements: Iterable[Polynomial],
    limits: EngineLimits = DEFAULT_LIMITS,
) -> bool:
    """Whether the elements cut the dimension down by one each, ending at zero."""
    elements = tuple(elements)
    if any(e.constant_term() for e in elements):
        return False
    try:
        dims = dimension_chain(ring, elements, limits)
    except UndefinedDimension:
        return False
    drops = all(after == before - 1 for before, after in zip(dims, dims[1:]))
    return drops and dims[-1] == 0


def fiber_system(setup: MorphismSetup, limits: EngineLimits = DEFAULT_LIMITS) -> DynamicalSystem:
    """(S/f(m)S, ψ̄): f(m)S is ψ-stable whenever ψ∘f = f∘φ."""
    psi = setup.target.endo
    psi_bar = induced_endo(psi, setup.f.maximal_image(), name=f"{psi.label}-bar", limits=limits)
    return DynamicalSystem.validate(psi_bar, limits)


def _require_morphism(setup: MorphismSetup, limits: EngineLimits) -> None:
    if not check_morphism(setup, limits):
        raise ValidationFailed(
            f"{setup.f.label} does not commute with {setup.source.endo.label} "
            f"and {setup.target.endo.label}"
        )


def _report(table: Dict[int, int], ideal: str) -> EntropyReport:
    lengths = [table[n] for n in sorted(table) if n > 0]
    return estimate_entropy(lengths, ideal=ideal, base_length=table.get(0))


def _decomposition(
    target: EntropyReport, source: EntropyReport, fiber: EntropyReport
) -> EntropyDecomposition:
    total = source.headline + fiber.headline
    return EntropyDecomposition(
        target=target.headline,
        source=source.headline,
        fiber=fiber.headline,
        total=total,
        gap=target.headline - total,
    )


def verify_additivity(
    setup: MorphismSetup,
    q: LocalIdeal,
    q_prime: LocalIdeal,
    n_max: int = 3,
    *,
    flat: bool = False,
    cm: bool = False,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> AdditivityCheck:
    """Compare both sides of the product identity for n = 0..n_max.

    Flatness of f and Cohen-Macaulayness of S are the caller's assertions;
    without both the identity is not claimed and ValidationFailed is raised.
    """
    if not (flat and cm):
        raise ValidationFailed(
            f"Additivity for {setup.f.label} needs `assume flat {setup.f.name or '<map>'}` "
            f"and `assume cm {setup.target.ring.name}`"
        )
    if q.ring != setup.source.ring:
        raise ValidationFailed(f"q = {q} is not an ideal of {setup.source.ring.name}")
    if q_prime.ring != setup.target.ring:
        raise ValidationFailed(f"q' = {q_prime} is not an ideal of {setup.target.ring.name}")
    _require_morphism(setup, limits)

    flatness = flatness_advisory(setup, cm=cm, limits=limits)
    fiber = fiber_system(setup, limits)
    if not sop_check(fiber.ring, q_prime.generators, limits):
        raise ValidationFailed(
            f"q' = {q_prime} does not give a system of parameters of {fiber.ring.name}",
            ring=fiber.ring.name,
        )
    fiber_q = LocalIdeal(fiber.ring, q_prime.generators)
    f_of_q = tuple(setup.f.apply(g, limits) for g in q.generators)
    big_q = LocalIdeal(setup.target.ring, q_prime.generators + f_of_q)

    n_values = range(0, n_max + 1)
    lhs = length_table(setup.target, big_q, n_values, limits)
    rhs_r = length_table(setup.source, q, n_values, limits)
    rhs_fiber = length_table(fiber, fiber_q, n_values, limits)

    rows = []
    for n in n_values:
        passed = lhs[n] == rhs_r[n] * rhs_fiber[n]
        rows.append(
            AdditivityRow(
                n=n,
                lhs=lhs[n],
                rhs_factor_r=rhs_r[n],
                rhs_factor_fiber=rhs_fiber[n],
                passed=passed,
            )
        )
        if not passed:
            logger.warning(
                "Additivity fails at n=%d: %d != %d * %d",
                n,
                lhs[n],
                rhs_r[n],
                rhs_fiber[n],
                extra={"ring": setup.target.ring.name, "n": n, "status": "fail"},
            )

    target_report = _report(lhs, str(big_q))
    source_report = _report(rhs_r, str(q))
    fiber_report = _report(rhs_fiber, str(fiber_q))
    return AdditivityCheck(
        map=setup.f.label,
        q=str(q),
        q_prime=str(q_prime),
        big_q=str(big_q),
        n_max=n_max,
        rows=rows,
        flatness=flatness,
        target_entropy=target_report,
        source_entropy=source_report,
        fiber_entropy=fiber_report,
        decomposition=_decomposition(target_report, source_report, fiber_report),
    )


def verify_inequality(
    setup: MorphismSetup,
    n_max: int = 3,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> InequalityReport:
    _require_morphism(setup, limits)
    fiber = fiber_system(setup, limits)

    # λ_0 of a maximal ideal is 1 on every side, so the table starts at n = 1
    n_values = range(1, n_max + 1)
    lhs = length_table(setup.target, setup.target.ring.maximal_ideal(), n_values, limits)
    source = length_table(setup.source, setup.source.ring.maximal_ideal(), n_values, limits)
    factor = length_table(fiber, fiber.ring.maximal_ideal(), n_values, limits)

    rows = []
    for n in n_values:
        bound = source[n] * factor[n]
        rows.append(
            InequalityRow(
                n=n,
                lhs=lhs[n],
                source_length=source[n],
                fiber_factor=factor[n],
                bound=bound,
                passed=lhs[n] <= bound,
            )
        )
        if lhs[n] > bound:
            logger.warning(
                "Inequality fails at n=%d: %d > %d",
                n,
                lhs[n],
                bound,
                extra={"ring": setup.target.ring.name, "n": n, "status": "fail"},
            )

    target_report = _report(lhs, str(setup.target.ring.maximal_ideal()))
    source_report = _report(source, str(setup.source.ring.maximal_ideal()))
    fiber_report = _report(factor, str(fiber.ring.maximal_ideal()))
    return InequalityReport(
        map=setup.f.label,
        n_max=n_max,
        rows=rows,
        target_entropy=target_report,
        source_entropy=source_report,
        fiber_entropy=fiber_report,
        decomposition=_decomposition(target_report, source_report, fiber_report),
    )
