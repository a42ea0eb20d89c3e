import math

import pytest

from src.config import EngineLimits
from src.dynamics import DynamicalSystem
from src.entropy import (
    entropy_report,
    estimate_entropy,
    frobenius_entropy,
    is_submultiplicative,
    length_sequence,
    length_table,
)
from src.exceptions import ValidationFailed
from src.ideals import LocalIdeal, local_colength, maximal_power, maximal_power_exponent


def _system(fx, name):
    return DynamicalSystem.validate(fx.endo(name))


def test_example_base_entropy_is_log_3(example1):
    system = _system(example1, "phi")
    report = entropy_report(system, system.ring.maximal_ideal(), 4)
    assert report.length == [3, 9, 27, 81]
    assert report.base_length == 1
    assert report.exact_ratio == 3
    assert report.exact_form == "log 3"
    assert report.headline == math.log(3)
    assert report.headline == pytest.approx(1.0986, abs=1e-4)


def test_frobenius_entropy_on_regular_ring(load_fixture):
    system = _system(load_fixture("frobenius.lad"), "frob")
    lengths = length_sequence(system, system.ring.maximal_ideal(), 3)
    assert lengths == [9, 81, 729]
    report = estimate_entropy(lengths)
    assert report.headline == pytest.approx(frobenius_entropy(2, 3))
    assert report.exact_form == "log 9"


def test_frobenius_entropy_on_hypersurface(load_fixture):
    system = _system(load_fixture("hypersurface.lad"), "frob")
    lengths = length_sequence(system, system.ring.maximal_ideal(), 3)
    assert lengths == [6, 24, 96]
    assert estimate_entropy(lengths).headline == pytest.approx(frobenius_entropy(2, 2))


def test_zero_dimensional_ring_has_zero_entropy(load_fixture):
    system = _system(load_fixture("zerodim.lad"), "sq")
    lengths = length_sequence(system, system.ring.maximal_ideal(), 6)
    assert lengths == [2, 4, 8, 8, 8, 8]
    report = estimate_entropy(lengths)
    assert report.headline == 0.0
    assert report.exact_ratio is None
    assert report.fekete[-1] == pytest.approx(math.log(8) / 6)


def test_workers_do_not_change_lengths(example1):
    system = _system(example1, "psi")
    q = system.ring.maximal_ideal()
    serial = length_table(system, q, range(0, 3))
    threaded = length_table(system, q, range(0, 3), EngineLimits(workers=4))
    assert serial == threaded
    assert list(threaded) == [0, 1, 2]


def test_target_lengths_of_example(example1):
    system = _system(example1, "psi")
    S = system.ring
    x, y, w, s = S.ring.gens()
    table = length_table(system, LocalIdeal(S, (w, y)), range(0, 4))
    assert [table[n] for n in range(4)] == [12, 180, 2700, 40500]


def test_requires_validated_system(example1):
    system = DynamicalSystem(example1.endo("phi"), validated_finite_length=False)
    with pytest.raises(ValidationFailed, match="not been validated"):
        length_table(system, system.ring.maximal_ideal(), [1])


def test_requires_primary_ideal(load_fixture):
    system = _system(load_fixture("frobenius.lad"), "frob")
    x, _ = system.ring.ring.gens()
    with pytest.raises(ValidationFailed, match="not certified primary"):
        length_table(system, LocalIdeal(system.ring, (x,)), [1])


def test_requires_ideal_of_same_ring(example1):
    system = _system(example1, "phi")
    with pytest.raises(ValidationFailed):
        length_table(system, example1.ring("S").maximal_ideal(), [1])


def test_length_sequence_needs_positive_n_max(example1):
    system = _system(example1, "phi")
    with pytest.raises(ValueError):
        length_sequence(system, system.ring.maximal_ideal(), 0)


def test_estimates_from_lengths():
    report = estimate_entropy([12, 180, 2700, 40500], ideal="(w, y)")
    assert report.n == [1, 2, 3, 4]
    assert report.ratio == [math.log(15)] * 3
    assert report.exact_ratio == 15
    assert report.naive[0] == pytest.approx(math.log(12))
    assert report.fekete == sorted(report.fekete, reverse=True)
    assert abs(report.naive[2] - math.log(15)) < 0.9


def test_single_length_uses_naive_estimate():
    report = estimate_entropy([5])
    assert report.ratio == []
    assert report.headline == pytest.approx(math.log(5))
    assert report.exact_ratio is None


def test_constant_lengths_report_zero_form():
    report = estimate_entropy([4, 4, 4])
    assert report.exact_ratio == 1
    assert report.exact_form == "0"


@pytest.mark.parametrize("lengths", [[], [0, 1], [3, -1]])
def test_bad_lengths_rejected(lengths):
    with pytest.raises(ValidationFailed):
        estimate_entropy(lengths)


def test_base_length_not_serialized():
    report = estimate_entropy([3, 9], base_length=1)
    assert "base_length" not in report.model_dump()


@pytest.mark.parametrize(
    "lengths, expected",
    [([3, 9, 27], True), ([2, 4, 8, 8], True), ([2, 5], False), ([6, 24, 96], True)],
)
def test_is_submultiplicative(lengths, expected):
    assert is_submultiplicative(lengths) is expected


@pytest.mark.parametrize(
    "name, endo, limit",
    [
        ("example1.lad", "phi", math.log(3)),
        ("frobenius.lad", "frob", 2 * math.log(3)),
        ("hypersurface.lad", "frob", 2 * math.log(2)),
        ("fiber.lad", "psibar", math.log(5)),
    ],
)
def test_fixture_sequences_are_submultiplicative_and_bounded(load_fixture, name, endo, limit):
    system = _system(load_fixture(name), endo)
    lengths = length_sequence(system, system.ring.maximal_ideal(), 3)
    assert is_submultiplicative(lengths)
    report = estimate_entropy(lengths)
    assert all(value >= limit - 1e-12 for value in report.naive)
    assert report.headline == pytest.approx(limit)


def test_sandwich_between_primary_ideals(load_fixture):
    system = _system(load_fixture("frobenius.lad"), "frob")
    A = system.ring
    x, y = A.ring.gens()
    q = LocalIdeal(A, (x**2, y))
    m_k = LocalIdeal(A, (x**2, x * y, y**2))
    small = length_table(system, q, range(1, 4))
    large = length_table(system, A.maximal_ideal(), range(1, 4))
    deep = length_table(system, m_k, range(1, 4))
    for n in range(1, 4):
        assert large[n] <= small[n] <= deep[n]


def test_zero_dimensional_lengths_bounded_by_ring_length(load_fixture):
    system = _system(load_fixture("zerodim.lad"), "sq")
    whole = local_colength(LocalIdeal(system.ring, ()))
    assert whole == 8
    assert max(length_sequence(system, system.ring.maximal_ideal(), 5)) <= whole


@pytest.mark.parametrize("exponent, expected", [(1, [3, 9, 27]), (2, [6, 18, 54])])
def test_sandwich_on_the_base_system(example1, exponent, expected):
    system = _system(example1, "phi")
    R = system.ring
    (y,) = R.ring.gens()
    q = LocalIdeal(R, (y**exponent,))
    k = maximal_power_exponent(q)
    assert k == exponent
    lengths = length_table(system, q, range(1, 4))
    outer = length_table(system, R.maximal_ideal(), range(1, 4))
    inner = length_table(system, maximal_power(R, k), range(1, 4))
    assert [lengths[n] for n in range(1, 4)] == expected
    for n in range(1, 4):
        assert outer[n] <= lengths[n] <= inner[n]
