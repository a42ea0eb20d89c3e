import math
import random

import pytest

from src.algebra.field import PrimeField
from src.algebra.polynomial import PolynomialRing
from src.config import EngineLimits
from src.exceptions import NotFiniteColength, ValidationFailed
from src.ideals import (
    LocalIdeal,
    LocalRingPresentation,
    Primality,
    dimension_chain,
    is_m_primary,
    local_colength,
    maximal_power,
    maximal_power_exponent,
    truncated_colength,
    truncation_schedule,
)

F2 = PrimeField(2)


@pytest.fixture
def S():
    ring = PolynomialRing(F2, ("x", "y", "w", "s"))
    x, y, w, s = ring.gens()
    return LocalRingPresentation("S", ring, (s**6, y**3 + x**2))


@pytest.fixture
def plane():
    return LocalRingPresentation("A", PolynomialRing(F2, ("x", "y")))


def _gens(presentation):
    return presentation.ring.gens()


def test_presentation_str_and_dimension(S, plane):
    assert str(plane) == "F_2[[x, y]]"
    assert str(S) == "F_2[[x, y, w, s]]/(s^6, y^3 + x^2)"
    assert S.dimension() == 2
    assert plane.dimension() == 2


def test_presentation_rejects_unit_relation():
    ring = PolynomialRing(F2, ("x",))
    with pytest.raises(ValidationFailed):
        LocalRingPresentation("bad", ring, (ring.variable("x") + 1,))


def test_local_ideal_rejects_units(plane):
    x, _ = _gens(plane)
    with pytest.raises(ValidationFailed):
        LocalIdeal(plane, (x + 1,))


def test_quotient_default_name(S):
    _, y, _, _ = _gens(S)
    fiber = S.quotient((y,))
    assert fiber.name == "S/(y)"
    assert fiber.dimension() == 1


@pytest.mark.parametrize(
    "make, expected",
    [
        (lambda x, y, w, s: (x, y, w, s), 1),
        (lambda x, y, w, s: (y, w), 12),
        (lambda x, y, w, s: (y**3, w**5), 180),
    ],
)
def test_local_colength_on_example_ring(S, make, expected):
    J = LocalIdeal(S, make(*_gens(S)))
    assert local_colength(J) == expected


def test_power_truncation_agrees_with_bracket(S):
    _, y, w, _ = _gens(S)
    J = LocalIdeal(S, (y, w))
    assert local_colength(J, EngineLimits(truncation="power")) == 12


def test_local_length_differs_from_global():
    # x + x^2 = x(1 + x): globally two points, locally only the origin
    line = LocalRingPresentation("L", PolynomialRing(F2, ("x",)))
    (x,) = _gens(line)
    assert local_colength(LocalIdeal(line, (x + x**2,))) == 1


def test_residue_field_has_length_one(S):
    assert local_colength(S.maximal_ideal()) == 1
    closed_point = S.quotient(S.ring.gens(), name="k")
    assert local_colength(LocalIdeal(closed_point, ())) == 1


def test_non_primary_ideal_hits_truncation_cap(S):
    _, y, _, _ = _gens(S)
    with pytest.raises(NotFiniteColength):
        local_colength(LocalIdeal(S, (y,)), EngineLimits(max_truncation=16))


def test_truncation_budget_counts_from_the_start(S):
    _, y, w, _ = _gens(S)
    # the basis reaches degree 6, so N starts at 7 whatever the budget
    assert local_colength(LocalIdeal(S, (y, w)), EngineLimits(max_truncation=1)) == 12


@pytest.mark.parametrize(
    "start, budget, expected",
    [(7, 1, [7]), (7, 16, [7, 14]), (126, 128, [126, 252]), (2, 128, [2, 4, 8, 16, 32, 64, 128]), (9, 0, [])],
)
def test_truncation_schedule(start, budget, expected):
    assert list(truncation_schedule(start, budget)) == expected


@pytest.mark.parametrize("exponent", [150, 200, 300])
def test_high_degree_ideals_fit_the_default_budget(plane, exponent):
    x, y = _gens(plane)
    assert local_colength(LocalIdeal(plane, (x**exponent, y))) == exponent
    assert local_colength(LocalIdeal(plane, (x**exponent, y**2))) == 2 * exponent


def test_truncated_colength_values(S):
    _, y, w, _ = _gens(S)
    J = LocalIdeal(S, (y, w))
    assert truncated_colength(J, 2) == 4
    assert truncated_colength(J, 7) == 12


def test_is_m_primary(S, plane):
    x, y = _gens(plane)
    assert is_m_primary(LocalIdeal(plane, (x**2, y**3))) is Primality.YES
    assert is_m_primary(LocalIdeal(plane, (x,))) is Primality.NO
    _, sy, _, _ = _gens(S)
    verdict = is_m_primary(LocalIdeal(S, (sy,)), EngineLimits(max_truncation=16))
    assert verdict is Primality.INCONCLUSIVE


def test_maximal_power_and_exponent(plane):
    x, y = _gens(plane)
    assert len(maximal_power(plane, 2).generators) == 3
    q = LocalIdeal(plane, (x**2, y**3))
    k = maximal_power_exponent(q)
    assert k == 4
    # m^k ⊆ q ⊆ m brackets the lengths
    assert local_colength(plane.maximal_ideal()) <= local_colength(q) <= local_colength(maximal_power(plane, k))
    with pytest.raises(ValueError):
        maximal_power(plane, 0)


def test_dimension_chain(S):
    _, y, w, _ = _gens(S)
    assert dimension_chain(S, (y, w)) == [2, 1, 0]



def test_complete_intersection_product_rule():
    rng = random.Random(31)
    for nvars in (1, 2, 3):
        presentation = LocalRingPresentation("A", PolynomialRing(F2, ("x", "y", "z")[:nvars]))
        for _ in range(4):
            exponents = [rng.randint(1, 5) for _ in range(nvars)]
            J = LocalIdeal(presentation, tuple(g**a for g, a in zip(presentation.ring.gens(), exponents)))
            assert local_colength(J) == math.prod(exponents)


def test_colength_is_monotone(S):
    x, y, w, s = _gens(S)
    small = LocalIdeal(S, (y**3, w**5))
    large = LocalIdeal(S, (y, w))
    assert all(large.contains(g) for g in small.generators)
    assert local_colength(small) >= local_colength(large)


def test_stabilization_certificate(S):
    _, y, w, _ = _gens(S)
    J = LocalIdeal(S, (y**3, w**5))
    value = local_colength(J)
    # the certified value persists at every larger truncation we try
    assert all(truncated_colength(J, N) == value for N in (13, 14, 20))
