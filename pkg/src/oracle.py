"""Brute-force colengths by dense linear algebra over F_p.

Independent of the Gröbner pipeline: the quotient k[x]/(I + J + m^D) is
measured as (number of monomials of degree < D) minus the rank of the
truncated multiples of the generators, checked at a doubling D until the
values at D and D + 1 agree.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.algebra.polynomial import Monomial, Polynomial, monomials_of_degree
from src.config import DEFAULT_LIMITS
from src.exceptions import NotFiniteColength
from src.ideals import LocalIdeal, truncation_schedule

logger = logging.getLogger(__name__)


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    M = np.array(matrix, dtype=np.int64) % p
    if M.ndim != 2 or M.size == 0:
        return 0
    rows, cols = M.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.nonzero(M[rank:, col])[0]
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            M[[rank, pivot]] = M[[pivot, rank]]
        inverse = pow(int(M[rank, col]), p - 2, p)
        M[rank] = (M[rank] * inverse) % p
        below = np.nonzero(M[rank + 1 :, col])[0] + rank + 1
        if below.size:
            factors = M[below, col][:, None]
            M[below] = (M[below] - factors * M[rank]) % p
        rank += 1
    return rank


def _monomials_below(nvars: int, bound: int) -> List[Monomial]:
    monos: List[Monomial] = []
    for degree in range(bound):
        monos.extend(monomials_of_degree(nvars, degree))
    return monos


def truncated_matrix(generators: Sequence[Polynomial], nvars: int, bound: int) -> Tuple[np.ndarray, int]:
    """Rows spanning (generators + m^bound)/m^bound, and the number of columns."""
    columns = _monomials_below(nvars, bound)
    index: Dict[Monomial, int] = {m: i for i, m in enumerate(columns)}
    rows: List[np.ndarray] = []
    for g in generators:
        if g.is_zero():
            continue
        room = bound - g.lowest_degree()
        if room <= 0:
            continue
        for shift in _monomials_below(nvars, room):
            row = np.zeros(len(columns), dtype=np.int64)
            for mono, coeff in g.terms:
                product = tuple(a + b for a, b in zip(mono, shift))
                column = index.get(product)
                if column is not None:
                    row[column] = coeff
            rows.append(row)
    if not rows:
        return np.zeros((0, len(columns)), dtype=np.int64), len(columns)
    return np.vstack(rows), len(columns)


def truncated_dimension(generators: Sequence[Polynomial], nvars: int, p: int, bound: int) -> int:
    matrix, ncols = truncated_matrix(generators, nvars, bound)
    return ncols - rank_mod_p(matrix, p)


def oracle_colength(J: LocalIdeal, cap: Optional[int] = None) -> int:
    """Length of the local quotient by I + J, by truncation with m^D.

    D follows the same schedule as ``local_colength``; ``cap`` defaults to the
    engine's ``max_truncation`` budget.
    """
    budget = DEFAULT_LIMITS.max_truncation if cap is None else cap
    ring = J.ring.ring
    generators = J.combined()
    if ring.nvars == 0:
        return 0 if generators else 1
    start = 1 + max((g.total_degree() for g in generators), default=0)

    current: Optional[int] = None
    last_bound = start
    for bound in truncation_schedule(start, budget):
        current = truncated_dimension(generators, ring.nvars, ring.p, bound)
        following = truncated_dimension(generators, ring.nvars, ring.p, bound + 1)
        logger.debug(
            "Oracle truncated dimension",
            extra={"ring": J.ring.name, "ideal": str(J), "truncation": bound, "colength": current},
        )
        if current == following:
            return current
        last_bound = bound
    raise NotFiniteColength(
        f"oracle dimension strictly growing past degree bound {last_bound} (budget {budget}, last value {current})",
        truncation=last_bound,
        colength=current,
    )
