"""Length sequences λ_n of a dynamical system and local entropy estimates.

λ_n is the colength of I + φ^n(q) for an m-primary q. Three estimates are
reported: the naive (1/n) log λ_n, its running minimum (a Fekete upper
bound since log λ_n is subadditive), and the successive ratio
log(λ_{n+1}/λ_n), which is exact at finite n whenever lengths grow
geometrically and is used as the headline.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

from src.config import DEFAULT_LIMITS, EngineLimits
from src.dynamics import DynamicalSystem, iterate
from src.exceptions import LadError, ValidationFailed
from src.ideals import LocalIdeal, Primality, is_m_primary, local_colength
from src.models import EntropyReport
from src.orchestrator import evaluate_indexed

logger = logging.getLogger(__name__)


def _require_primary(q: LocalIdeal, limits: EngineLimits) -> None:
    verdict = is_m_primary(q, limits)
    if verdict is not Primality.YES:
        raise ValidationFailed(
            f"{q} is not certified primary in {q.ring.name} ({verdict.value})",
            ring=q.ring.name,
        )


def length_table(
    system: DynamicalSystem,
    q: LocalIdeal,
    n_values: Iterable[int],
    limits: EngineLimits = DEFAULT_LIMITS,
) -> Dict[int, int]:
    """λ_n for each requested n, keyed and ordered by n."""
    if not system.validated_finite_length:
        raise ValidationFailed(
            f"{system.endo.label} has not been validated as finite length",
            ring=system.ring.name,
        )
    if q.ring != system.ring:
        raise ValidationFailed(f"{q} is not an ideal of {system.ring.name}")
    _require_primary(q, limits)

    ideals: Dict[int, LocalIdeal] = {}
    # iterates first, in n order; the pool only sees colength work
    for n in sorted(set(n_values)):
        try:
            ideals[n] = iterate(system.endo, n, limits).apply_ideal(q, limits)
        except LadError as exc:
            raise exc.with_context(n=n) from exc

    tasks = {n: (lambda J=J: local_colength(J, limits)) for n, J in ideals.items()}
    return evaluate_indexed(tasks, workers=limits.workers, context={"ring": system.ring.name, "ideal": str(q)})


def length_sequence(
    system: DynamicalSystem,
    q: LocalIdeal,
    n_max: int,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> List[int]:
    """[λ_1, ..., λ_{n_max}]."""
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    table = length_table(system, q, range(1, n_max + 1), limits)
    return [table[n] for n in range(1, n_max + 1)]


def _exact_ratio(lengths: Sequence[int]) -> Optional[int]:
    if len(lengths) < 2:
        return None
    ratios = set()
    for a, b in zip(lengths, lengths[1:]):
        if b % a:
            return None
        ratios.add(b // a)
    return ratios.pop() if len(ratios) == 1 else None


def estimate_entropy(
    lengths: Sequence[int],
    ideal: str = "",
    base_length: Optional[int] = None,
) -> EntropyReport:
    if not lengths:
        raise ValidationFailed("Entropy estimation needs at least one length")
    if any(length < 1 for length in lengths):
        raise ValidationFailed(f"Lengths must be positive, got {list(lengths)}")

    n_values = list(range(1, len(lengths) + 1))
    naive = [math.log(length) / n for n, length in zip(n_values, lengths)]
    fekete: List[float] = []
    for value in naive:
        fekete.append(value if not fekete else min(fekete[-1], value))
    ratio = [math.log(b / a) for a, b in zip(lengths, lengths[1:])]

    return EntropyReport(
        ideal=ideal,
        n=n_values,
        length=list(lengths),
        naive=naive,
        fekete=fekete,
        ratio=ratio,
        headline=ratio[-1] if ratio else naive[0],
        exact_ratio=_exact_ratio(lengths),
        base_length=base_length,
    )


def entropy_report(
    system: DynamicalSystem,
    q: LocalIdeal,
    n_max: int,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> EntropyReport:
    """Length sequence plus estimates, with λ_0 = colength of I + q kept as the base length."""
    table = length_table(system, q, range(0, n_max + 1), limits)
    lengths = [table[n] for n in range(1, n_max + 1)]
    report = estimate_entropy(lengths, ideal=str(q), base_length=table[0])
    logger.info(
        "Entropy estimated",
        extra={"ring": system.ring.name, "ideal": str(q), "n": n_max, "status": report.exact_form},
    )
    return report


def is_submultiplicative(lengths: Sequence[int]) -> bool:
    """λ_{m+n} <= λ_m * λ_n for all m + n within range; ``lengths[0]`` is λ_1."""
    count = len(lengths)
    for m in range(1, count + 1):
        for n in range(1, count + 1 - m):
            if lengths[m + n - 1] > lengths[m - 1] * lengths[n - 1]:
                return False
    return True


def frobenius_entropy(dimension: int, p: int) -> float:
    """Local entropy of Frobenius on a d-dimensional ring of characteristic p: d log p."""
    return dimension * math.log(p)
