import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeshift import (
    INF,
    AtomicMeasure,
    MassExceedsOneError,
    NotInDomainError,
    NotNormalizableError,
    ZeroAtomError,
    child_measure_from_parent,
    moments_of,
    parent_measure_from_child,
    root_measure_from_branches,
)
from conftest import DELTA1, DELTA2, random_measure

HALF = Fraction(1, 2)


def test_atoms_merge_and_sort():
    mu = AtomicMeasure.from_atoms([(2, HALF), (1, Fraction(1, 4)), ("2/1", HALF)])
    assert mu.atoms == ((Fraction(1), Fraction(1, 4)), (Fraction(2), Fraction(1)))


def test_negative_location_rejected():
    with pytest.raises(ValueError):
        AtomicMeasure.from_atoms([(-1, 1)])


def test_moments_point_mass():
    for n in (-3, -1, 0, 1, 5):
        assert moments_of(DELTA1, n) == 1


def test_inverse_moment():
    mu = AtomicMeasure.from_atoms([(1, HALF), (4, HALF)])
    assert moments_of(mu, -1) == Fraction(5, 8)


def test_zero_atom_blows_up_negative_moments():
    mu = AtomicMeasure.from_atoms([(0, HALF), (1, HALF)])
    assert moments_of(mu, -1) == INF
    assert moments_of(mu, 0) == 1
    assert moments_of(mu, 2) == HALF


class TestUpwardTransform:
    def test_identity_on_point_mass_at_one(self):
        assert parent_measure_from_child(DELTA1, 1).atoms == DELTA1.atoms

    def test_point_mass_at_two_gains_defect(self):
        rho = parent_measure_from_child(DELTA2, 1)
        assert rho.atoms == ((Fraction(0), HALF), (Fraction(2), HALF))

    def test_domain_bound(self):
        with pytest.raises(NotInDomainError):
            parent_measure_from_child(DELTA2, 4)  # 4 * 1/2 = 2 > 1

    def test_zero_atom_rejected(self):
        mu = AtomicMeasure.from_atoms([(0, HALF), (1, HALF)])
        with pytest.raises(ZeroAtomError):
            parent_measure_from_child(mu, 1)


class TestDownwardTransform:
    def test_inverse_of_upward_example(self):
        rho = AtomicMeasure.from_atoms([(0, HALF), (2, HALF)])
        assert child_measure_from_parent(rho, 1).atoms == DELTA2.atoms

    def test_identity_on_point_mass_at_one(self):
        assert child_measure_from_parent(DELTA1, 1).atoms == DELTA1.atoms

    def test_weight_three(self):
        out = child_measure_from_parent(AtomicMeasure.point_mass(3), 3)
        assert out.atoms == ((Fraction(3), Fraction(1)),)

    def test_first_moment_mismatch(self):
        with pytest.raises(NotNormalizableError):
            child_measure_from_parent(DELTA1, 2)


class TestRoundTrip:
    def test_reference_pair(self):
        mu = AtomicMeasure.from_atoms([(1, HALF), (4, HALF)])
        lam = Fraction(3, 2)  # 3/2 * 5/8 < 1
        rho = parent_measure_from_child(mu, lam)
        assert child_measure_from_parent(rho, lam).atoms == mu.atoms

    def test_randomized(self):
        rng = random.Random(7)
        for _ in range(50):
            mu = random_measure(rng)
            inv = moments_of(mu, -1)
            lam = Fraction(rng.randint(1, 7), rng.randint(8, 16)) / inv
            rho = parent_measure_from_child(mu, lam)
            assert rho.is_probability()
            assert child_measure_from_parent(rho, lam).atoms == mu.atoms
            for n in range(1, 8):
                assert moments_of(rho, n) == lam * moments_of(mu, n - 1)

    @given(st.integers(1, 30), st.integers(1, 9))
    @settings(max_examples=60, deadline=None)
    def test_moment_intertwining(self, num, den):
        loc = Fraction(num, den)
        mu = AtomicMeasure.point_mass(loc)
        lam = min(Fraction(1), loc)  # lam * 1/loc <= 1
        rho = parent_measure_from_child(mu, lam)
        assert moments_of(rho, 0) == 1
        for n in range(1, 6):
            assert moments_of(rho, n) == lam * moments_of(mu, n - 1)


class TestRootMeasure:
    def test_reference_instance(self):
        nu = root_measure_from_branches([DELTA1, DELTA2], [HALF, 1], [1])
        assert nu.atoms == (
            (Fraction(0), Fraction(1, 4)),
            (Fraction(1), HALF),
            (Fraction(2), Fraction(1, 4)),
        )

    def test_single_branch_no_defect(self):
        nu = root_measure_from_branches([DELTA1], [1], [1])
        assert nu.atoms == DELTA1.atoms

    def test_mass_overflow(self):
        with pytest.raises(MassExceedsOneError):
            root_measure_from_branches([DELTA1, DELTA2], [HALF, 1], [2])

    def test_explicit_defect_must_balance(self):
        with pytest.raises(MassExceedsOneError):
            root_measure_from_branches([DELTA1, DELTA2], [HALF, 1], [1], eps=Fraction(1, 2))

    def test_explicit_defect_accepted_when_exact(self):
        nu = root_measure_from_branches([DELTA1, DELTA2], [HALF, 1], [1], eps=Fraction(1, 4))
        assert nu.mass_at(0) == Fraction(1, 4)


class TestMeasureEquality:
    def test_exact_equality(self):
        from treeshift import measures_equal

        a = AtomicMeasure.from_atoms([(1, HALF), (2, HALF)])
        b = AtomicMeasure.from_atoms([(2, HALF), (1, HALF)])
        assert measures_equal(a, b)
        c = AtomicMeasure.from_atoms([(1, HALF), (2, Fraction(1, 3)), (2, Fraction(1, 6))])
        assert measures_equal(a, c)

    def test_float_tolerance(self):
        from treeshift import measures_equal

        a = AtomicMeasure.from_atoms([(1.0, 0.5), (2.0, 0.5)])
        b = AtomicMeasure.from_atoms([(1.0 + 1e-12, 0.5), (2.0, 0.5 - 1e-12)])
        c = AtomicMeasure.from_atoms([(1.0 + 1e-6, 0.5), (2.0, 0.5)])
        assert measures_equal(a, b)
        assert not measures_equal(a, c)
