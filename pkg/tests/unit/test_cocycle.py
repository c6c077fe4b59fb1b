"""
Unit tests for the cocycle module.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.plgroup.core.cocycle import (
    GimelVector,
    LatticeBasis,
    XiVector,
    bump_family,
    classify_subgroup,
    full_xi_sum_check,
    gimel,
    lattice_contains,
    lattice_index,
    lattice_solve,
    mod2_rank,
    nu,
    orbit_partition,
    psi_basis,
    realize_xi,
    sigma_kernel_generators,
    varsigma,
    xi,
    xi_indices,
    zeta_basis,
)
from src.plgroup.core.dyadic import Dyadic
from src.plgroup.core.errors import PreconditionError
from src.plgroup.core.omega import make_tau, make_zeta
from src.plgroup.core.plmap import (
    commutator,
    compose,
    identity,
    invert,
    is_identity,
    is_supported_in,
    translation,
)
from src.plgroup.core.thompson import classify_thompson, grid_bump

ZETAS_3 = [make_zeta(3, k) for k in range(1, 7)]

fc_words = st.lists(
    st.tuples(st.sampled_from(ZETAS_3), st.booleans()), min_size=1, max_size=4
).map(lambda letters: compose(*(invert(g) if inv else g for g, inv in letters)))


def bareiss_determinant(rows):
    """Fraction-free Gaussian elimination over the integers."""
    m = [list(row) for row in rows]
    size, sign, previous = len(m), 1, 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // previous
        previous = m[k][k]
    return sign * m[-1][-1]


class TestXi:
    """Tests for the Xi homomorphism."""

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_zeta_identity(self, n):
        for k in range(1, (1 << n) - 1):
            assert xi(make_zeta(n, k), n) == nu(n, 2 + 2 * k) - nu(n, 2 + k) * 2

    def test_zeta_text(self):
        assert str(xi(make_zeta(2, 1), 2)) == "1:+1 3:-2"

    def test_identity(self):
        assert xi(identity(), 3).is_zero()
        assert str(xi(identity(), 3)) == "0"

    @given(fc_words, fc_words)
    @settings(max_examples=30, deadline=None)
    def test_homomorphism(self, f, g):
        assert xi(compose(f, g), 3) == xi(f, 3) + xi(g, 3)

    @given(fc_words)
    @settings(max_examples=30, deadline=None)
    def test_inverse(self, f):
        assert xi(invert(f), 3) == -xi(f, 3)

    def test_full_sum(self):
        assert full_xi_sum_check(make_zeta(3, 2), 3)
        assert full_xi_sum_check(compose(*ZETAS_3), 3)

    def test_requires_fc(self):
        with pytest.raises(PreconditionError):
            xi(make_tau(2), 2)
        with pytest.raises(PreconditionError):
            xi(translation(2), 2)

    def test_vector_coordinates(self):
        assert xi_indices(3) == [1, 3, 4, 5, 6, 7]
        v = XiVector.from_list(3, [1, 0, -2, 0, 0, 3])
        assert v.as_dict() == {1: 1, 4: -2, 7: 3}
        assert v.to_list() == [1, 0, -2, 0, 0, 3]
        assert (v * 2 - v) == v
        with pytest.raises(PreconditionError):
            XiVector.from_mapping(3, {2: 1})

    def test_nu_reduces_index(self):
        assert nu(2, 4) == nu(2, 1)
        assert nu(2, 3) == nu(2, 6)
        assert nu(2, 2).is_zero()


class TestOrbitsAndGimel:
    """Tests for the orbit partition, gimel and varsigma."""

    def test_partition_level_two(self):
        assert orbit_partition(2).classes == ((2,), (1, 3))
        assert orbit_partition(2).render() == "chi_0 = {2}\nchi_1 = {1, 3}\neta = 1\n"

    def test_partition_level_three(self):
        assert orbit_partition(3).classes == ((2,), (1, 7, 5), (3, 4, 6))

    @pytest.mark.parametrize("n", [3, 5])
    def test_eta_for_prime_levels(self, n):
        assert orbit_partition(n).eta == ((1 << n) - 2) // n

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_partition_covers_indices(self, n):
        members = sorted(i for cls in orbit_partition(n).classes for i in cls)
        assert members == list(range(1, 1 << n))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_factorization_on_zetas(self, n):
        for k in range(1, (1 << n) - 1):
            zeta = make_zeta(n, k)
            assert gimel(zeta, n) == varsigma(xi(zeta, n), n)

    @given(fc_words)
    @settings(max_examples=30, deadline=None)
    def test_factorization_on_words(self, f):
        assert gimel(f, 3) == varsigma(xi(f, 3), 3)

    def test_varsigma_of_zeta(self):
        partition = orbit_partition(3)
        for k in range(1, 7):
            j = partition.class_of[(2 + k) % 7 or 7]
            assert varsigma(xi(make_zeta(3, k), 3), 3).as_dict() == {j: Fraction(-1)}

    def test_vanishes_on_commutators(self):
        tau = make_tau(3)
        assert gimel(commutator(tau, make_zeta(3, 1)), 3).is_zero()
        assert gimel(commutator(make_zeta(3, 2), make_zeta(3, 5)), 3).is_zero()

    def test_vanishes_on_translation(self):
        assert gimel(translation(3), 3).is_zero()

    def test_gimel_text(self):
        vector = GimelVector.from_mapping(3, {1: Fraction(1, 2), 2: Fraction(-3)})
        assert str(vector) == "1:+1/2 2:-3"
        assert not vector.integral


class TestLattices:
    """Tests for lattice membership and indices."""

    @pytest.mark.parametrize("n, index", [(2, 3), (3, 49), (4, 10125)])
    def test_zeta_lattice_index(self, n, index):
        assert lattice_index(zeta_basis(n)) == index

    @pytest.mark.parametrize("n, index", [(2, 3), (3, 49), (4, 10125)])
    def test_zeta_lattice_index_is_determinant(self, n, index):
        basis = zeta_basis(n)
        assert len(basis.vectors) == basis.dimension
        determinant = bareiss_determinant([v.to_list() for v in basis.vectors])
        assert abs(determinant) == index == lattice_index(basis)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-20, 20), min_size=6, max_size=6), st.randoms())
    def test_solve_independent_of_basis_order(self, weights, rng):
        vectors = list(zeta_basis(3).vectors)
        inside = XiVector.zero(3)
        for w, vector in zip(weights, vectors):
            inside = inside + vector * w
        rng.shuffle(vectors)
        shuffled = LatticeBasis(3, vectors)
        for v in (inside, inside + nu(3, 1)):
            coefficients = lattice_solve(v, shuffled)
            assert (coefficients is None) == (lattice_solve(v, zeta_basis(3)) is None)
            if coefficients is not None:
                total = XiVector.zero(3)
                for c, vector in zip(coefficients, vectors):
                    total = total + vector * c
                assert total == v
        assert lattice_solve(inside, shuffled) is not None

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_bump_family_index(self, n):
        family = bump_family(n, (Dyadic(1, 2), Dyadic(1, 1)))
        assert lattice_index(family.basis) == (1 << n) - 1

    @given(st.integers(-30, 30), st.integers(-30, 30))
    def test_solve_matches_cosets(self, a, b):
        v = XiVector.from_list(2, [a, b])
        coefficients = lattice_solve(v, zeta_basis(2))
        assert (coefficients is not None) == ((a - b) % 3 == 0)
        if coefficients is not None:
            total = XiVector.zero(2)
            for c, vector in zip(coefficients, zeta_basis(2).vectors):
                total = total + vector * c
            assert total == v

    def test_empty_basis(self):
        empty = LatticeBasis(2, [])
        assert lattice_solve(XiVector.zero(2), empty) == ()
        assert lattice_solve(nu(2, 1), empty) is None
        assert lattice_index(empty) is None

    def test_mod2_rank(self):
        assert mod2_rank(zeta_basis(2)) == 2

    @pytest.mark.parametrize("n", [2, 3])
    def test_psi_is_varsigma_kernel(self, n):
        psi, kernel = psi_basis(n), sigma_kernel_generators(n)
        assert lattice_contains(psi, kernel)
        assert lattice_contains(kernel, psi)
        assert lattice_contains(zeta_basis(n), psi)

    @pytest.mark.parametrize("n", [2, 3])
    def test_kernel_generators_vanish(self, n):
        for vector in sigma_kernel_generators(n).vectors:
            assert varsigma(vector, n).is_zero()

    def test_classify_subgroup(self):
        zeta = classify_subgroup(make_zeta(3, 1), 3)
        assert (zeta.in_Theta, zeta.in_Delta) == (True, False)
        trivial = classify_subgroup(identity(), 3)
        assert (trivial.in_Theta, trivial.in_Delta) == (True, True)
        assert zeta.render() == "in_Theta=true in_Delta=false"

    def test_bump_family_cached(self):
        window = (Dyadic(1, 2), Dyadic(3, 2))
        assert bump_family(3, window) is bump_family(3, window)


class TestRealize:
    """Tests for realizing Xi vectors by bumps."""

    @pytest.mark.parametrize("n", [2, 3])
    def test_realizes_bump_vector(self, n):
        lo, hi = Dyadic(1, 2), Dyadic(1, 1)
        target = xi(grid_bump(n, Dyadic(1, 3), Dyadic(1, 2)), n) * 3
        realization = realize_xi(target, (lo, hi), n)
        assert realization.realized
        assert xi(realization.element, n) == target
        assert is_supported_in(realization.element, lo, hi)
        assert classify_thompson(realization.element, n).in_Fc

    def test_realizes_lattice_combination(self):
        target = XiVector.from_list(2, [2, -1])
        realization = realize_xi(target, (Dyadic(1, 2), Dyadic(1, 1)), 2)
        assert realization.realized
        assert xi(realization.element, 2) == target

    def test_zero_vector(self):
        realization = realize_xi(XiVector.zero(3), (Dyadic(1, 2), Dyadic(1, 1)), 3)
        assert is_identity(realization.element)

    def test_outside_lattice(self):
        realization = realize_xi(nu(2, 1), (Dyadic(1, 2), Dyadic(1, 1)), 2)
        assert not realization.realized
        assert realization.element is None
        assert realization.hermite is not None

    def test_window_precondition(self):
        with pytest.raises(PreconditionError):
            realize_xi(nu(2, 1), (Dyadic(1, 1), Dyadic(3, 1)), 2)
