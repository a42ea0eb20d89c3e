import pytest

from src.config import EngineLimits
from src.dynamics import (
    DynamicalSystem,
    Endomorphism,
    MorphismSetup,
    RingMap,
    check_finite_length,
    check_morphism,
    check_stable_ideal,
    check_well_defined,
    compose,
    flatness_advisory,
    identity,
    induced_endo,
    iterate,
)
from src.exceptions import UnstableIdeal, ValidationFailed
from src.ideals import LocalIdeal, LocalRingPresentation, Primality
from src.models import CheckStatus


@pytest.fixture
def S(example1):
    return example1.ring("S")


@pytest.fixture
def psi(example1):
    return example1.endo("psi")


@pytest.fixture
def setup(example1):
    source = DynamicalSystem.validate(example1.endo("phi"))
    target = DynamicalSystem.validate(example1.endo("psi"))
    return MorphismSetup.build(source, target, example1.ring_map("f"))


def test_example_endomorphisms_are_finite_length(example1, psi):
    check_well_defined(psi)
    assert check_finite_length(psi) is Primality.YES
    assert DynamicalSystem.validate(psi).validated_finite_length
    assert DynamicalSystem.validate(example1.endo("phi")).validated_finite_length


def test_iterate_univariate(example1):
    phi = example1.endo("phi")
    (y,) = phi.ring.ring.gens()
    assert iterate(phi, 0).images == (y,)
    assert iterate(phi, 1) is phi
    assert iterate(phi, 3).images == (y**27,)
    with pytest.raises(ValueError):
        iterate(phi, -1)


@pytest.mark.parametrize("a, b", [(1, 1), (1, 2), (2, 2), (0, 3)])
def test_iterates_compose(psi, a, b):
    combined = compose(iterate(psi, a), iterate(psi, b))
    assert combined.images == iterate(psi, a + b).images


def test_identity_is_neutral(psi):
    assert compose(psi, identity(psi.ring)).images == tuple(psi.ring.reduce(g) for g in psi.images)


def test_image_count_and_locality_checked(S):
    x, y, w, s = S.ring.gens()
    with pytest.raises(ValidationFailed):
        Endomorphism(S, S, (x, y, w))
    with pytest.raises(ValidationFailed):
        Endomorphism(S, S, (x + 1, y, w, s))


def test_missing_image_in_mapping(S):
    x, y, w, _ = S.ring.gens()
    with pytest.raises(ValidationFailed, match="no image given for s"):
        Endomorphism.on(S, {"x": x, "y": y, "w": w}, name="partial")


def test_well_definedness_failure_names_relation(S):
    x, y, w, s = S.ring.gens()
    bad = Endomorphism(S, S, (y, y, w, s), "bad")
    with pytest.raises(ValidationFailed, match="not well defined"):
        check_well_defined(bad)


def test_not_finite_length_rejected():
    from src.algebra.field import PrimeField
    from src.algebra.polynomial import PolynomialRing

    plane = LocalRingPresentation("A", PolynomialRing(PrimeField(2), ("x", "y")))
    x, y = plane.ring.gens()
    collapse = Endomorphism(plane, plane, (x**2, plane.ring.zero()), "collapse")
    assert check_finite_length(collapse) is Primality.NO
    with pytest.raises(ValidationFailed, match="not of finite length"):
        DynamicalSystem.validate(collapse)


def test_induced_endomorphism_on_closed_fiber(example1, psi):
    f = example1.ring_map("f")
    J = f.maximal_image()
    assert check_stable_ideal(psi, J)
    psi_bar = induced_endo(psi, J, name="psibar")
    x, y, w, s = psi_bar.ring.ring.gens()
    assert psi_bar.images == (s**3, psi_bar.ring.ring.zero(), w**5, x * s**2)
    assert psi_bar.ring.name == "S/(y)"


def test_induced_commutes_with_iteration(example1, psi):
    J = example1.ring_map("f").maximal_image()
    bar_of_square = induced_endo(iterate(psi, 2), J)
    square_of_bar = iterate(induced_endo(psi, J), 2)
    assert bar_of_square.images == square_of_bar.images


def test_unstable_ideal_rejected(S, psi):
    x, _, _, _ = S.ring.gens()
    J = LocalIdeal(S, (x,))
    assert not check_stable_ideal(psi, J)
    with pytest.raises(UnstableIdeal):
        induced_endo(psi, J)


def test_example_map_commutes(setup):
    assert check_morphism(setup)
    assert (setup.d, setup.d_prime) == (1, 1)
    assert setup.f_images == {"y": setup.target.ring.ring.variable("y")}


def test_wrong_source_endomorphism_does_not_commute(example1):
    R = example1.ring("R")
    (y,) = R.ring.gens()
    square = Endomorphism(R, R, (y**2,), "square")
    setup = MorphismSetup.build(
        DynamicalSystem.validate(square),
        DynamicalSystem.validate(example1.endo("psi")),
        example1.ring_map("f"),
    )
    assert not check_morphism(setup)


def test_setup_rejects_mismatched_rings(example1):
    phi = DynamicalSystem.validate(example1.endo("phi"))
    with pytest.raises(ValidationFailed):
        MorphismSetup.build(phi, phi, example1.ring_map("f"))


@pytest.mark.parametrize("cm, method", [(True, "dimension-drop"), (False, "regular-sequence")])
def test_flatness_advisory_passes_on_example(setup, cm, method):
    report = flatness_advisory(setup, cm=cm)
    assert report.dimension_check is CheckStatus.PASS
    assert report.pattern_check is CheckStatus.PASS
    assert report.method == method
    assert report.target_dim == 2


def test_flatness_advisory_flags_non_flat_map(load_fixture):
    fx = load_fixture("nonflat.lad")
    setup = MorphismSetup.build(
        DynamicalSystem.validate(fx.endo("frob")),
        DynamicalSystem.validate(fx.endo("frobS")),
        fx.ring_map("f"),
    )
    report = flatness_advisory(setup)
    assert report.dimension_check is CheckStatus.FAIL
    assert report.pattern_check is CheckStatus.FAIL


def test_flatness_pattern_not_applicable_for_non_variable_images(example1):
    R, S = example1.ring("R"), example1.ring("S")
    x, y, w, s = S.ring.gens()
    f = RingMap(R, S, (y + w,), "g")
    setup = MorphismSetup(
        DynamicalSystem(example1.endo("phi"), True),
        DynamicalSystem(example1.endo("psi"), True),
        f,
        S.quotient(f.images),
        1,
        1,
    )
    report = flatness_advisory(setup, limits=EngineLimits())
    assert report.pattern_check is CheckStatus.NOT_APPLICABLE


def test_identity_morphism_is_flat(load_fixture, S, psi):
    A = load_fixture("frobenius.lad").ring("A")
    frob = DynamicalSystem.validate(load_fixture("frobenius.lad").endo("frob"))
    report = flatness_advisory(MorphismSetup.build(frob, frob, RingMap(A, A, A.ring.gens(), "id")))
    assert report.dimension_check is CheckStatus.PASS
    assert report.pattern_check is CheckStatus.PASS

    system = DynamicalSystem.validate(psi)
    same = flatness_advisory(MorphismSetup.build(system, system, RingMap(S, S, S.ring.gens(), "id")))
    assert same.dimension_check is CheckStatus.PASS
    assert same.pattern_check is CheckStatus.NOT_APPLICABLE


def test_validated_systems_give_finite_lengths(load_fixture):
    from src.ideals import local_colength

    for name, endo in [("example1.lad", "psi"), ("hypersurface.lad", "frob"), ("nonflat.lad", "frobS")]:
        fx = load_fixture(name)
        system = DynamicalSystem.validate(fx.endo(endo))
        for n in (1, 2):
            assert local_colength(iterate(system.endo, n).apply_ideal(system.ring.maximal_ideal())) > 0
