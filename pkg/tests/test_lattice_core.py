import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hkreal.errors import BoxTooLarge, DegenerateSpan, InputError, NotSquare, NotSymmetric
from hkreal.lattice_core import (
    Lattice,
    Signature,
    SubspaceBasis,
    direct_sum,
    e8,
    exact_signature,
    gram_of_span,
    hermite_normal_form,
    hyperbolic_plane,
    integer_det,
    integer_kernel,
    integer_vectors_in_box,
    is_primitive_form,
    k3_lattice,
    named_lattice,
    orthogonal_complement,
    positive_vector,
    signature,
    validate_lattice,
)

from helpers import congruent, random_unimodular

U = [[0, 1], [1, 0]]


def float_signature(gram):
    ev = np.linalg.eigvalsh(np.array(gram, dtype=float))
    return (int(np.sum(ev > 1e-6)), int(np.sum(ev < -1e-6)), int(np.sum(np.abs(ev) <= 1e-6)))


def same_span(a, b, tol=1e-9):
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    if a.shape[0] != b.shape[0]:
        return False
    r = np.linalg.matrix_rank(np.vstack([a, b]), tol=tol)
    return r == np.linalg.matrix_rank(a, tol=tol)


class TestValidate:
    def test_hyperbolic_plane(self):
        lat = validate_lattice(U)
        assert lat.rank == 2
        assert lat.gram == ((0, 1), (1, 0))

    def test_asymmetric(self):
        with pytest.raises(NotSymmetric):
            validate_lattice([[0, 1], [2, 0]])

    def test_rank_one(self):
        assert validate_lattice([[2]]).rank == 1

    @pytest.mark.parametrize("gram", [[[1, 0]], [], [[1, 0], [0]]])
    def test_not_square(self, gram):
        with pytest.raises(NotSquare):
            validate_lattice(gram)

    def test_non_integer_entry(self):
        with pytest.raises(InputError):
            validate_lattice([[0.5]])

    def test_json_roundtrip(self):
        lat = k3_lattice()
        assert Lattice.from_dict(lat.to_dict()) == lat


class TestSignature:
    def test_diag_one(self):
        assert signature(validate_lattice([[1]])) == (1, 0, 0)

    def test_hyperbolic_plane(self):
        assert signature(hyperbolic_plane()) == (1, 1, 0)

    def test_k3(self):
        lat = k3_lattice()
        assert lat.rank == 22
        assert signature(lat) == Signature(3, 19, 0)
        assert float_signature(lat.gram) == (3, 19, 0)

    def test_e8_negative_definite_unimodular(self):
        assert signature(e8(-1)) == (0, 8, 0)
        assert integer_det(e8().gram) == 1

    def test_degenerate(self):
        assert exact_signature([[0, 0], [0, 0]]) == (0, 0, 2)
        assert exact_signature([[1, 1], [1, 1]]) == (1, 0, 1)
        assert exact_signature([[0, 1, 0], [1, 0, 0], [0, 0, 0]]) == (1, 1, 1)

    def test_zero_diagonal_pivoting(self):
        # all diagonal entries vanish: exercises the pairing step
        assert exact_signature([[0, 1, 1], [1, 0, 1], [1, 1, 0]]) == (1, 2, 0)

    def test_direct_sum_additive(self):
        assert signature(direct_sum(hyperbolic_plane(), e8(-1))) == (1, 9, 0)

    @pytest.mark.parametrize("name", ["U", "diag(1,1,1,-1)", "U+U+diag(1)", "E8(-1)", "K3"])
    def test_sylvester_stability(self, name):
        lat = named_lattice(name)
        sig = signature(lat)
        rng = np.random.default_rng(7)
        for _ in range(100):
            t = random_unimodular(rng, lat.rank, steps=6)
            assert abs(integer_det(t)) == 1
            assert exact_signature(congruent(lat.gram, t)) == sig

    @given(st.integers(1, 6).flatmap(
        lambda n: st.lists(st.integers(-4, 4), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2)
        .map(lambda xs, n=n: _sym_from_upper(n, xs))))
    def test_agrees_with_float_eigenvalues(self, gram):
        ev = np.abs(np.linalg.eigvalsh(np.array(gram, dtype=float)))
        assume(not np.any((ev > 1e-9) & (ev <= 1e-6)))
        assert exact_signature(gram) == float_signature(gram)


def _sym_from_upper(n, xs):
    g = [[0] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = next(it)
    return g


class TestPrimitive:
    def test_rank_one_even(self):
        assert not is_primitive_form(validate_lattice([[2]]))
        assert not is_primitive_form(validate_lattice([[2]]), "polynomial")

    def test_hyperbolic_plane_depends_on_convention(self):
        # x^T U x = 2 x1 x2: primitive as a bilinear form, twice an integral polynomial
        assert is_primitive_form(hyperbolic_plane())
        assert not is_primitive_form(hyperbolic_plane(), "polynomial")

    def test_odd_diagonal(self):
        lat = validate_lattice([[1, 0], [0, -1]])
        assert is_primitive_form(lat)
        assert is_primitive_form(lat, "polynomial")

    def test_k3_is_primitive_bilinear(self):
        assert is_primitive_form(k3_lattice())

    def test_scaled(self):
        assert not is_primitive_form(e8(3))

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            is_primitive_form(hyperbolic_plane(), "other")


class TestGramOfSpan:
    def test_examples(self):
        lat = named_lattice("diag(1,1,-1)")
        np.testing.assert_array_equal(gram_of_span(lat, [[1, 0, 0], [0, 1, 0]]), [[1, 0], [0, 1]])
        np.testing.assert_array_equal(gram_of_span(lat, [[1, 0, 0], [0, 0, 1]]), [[1, 0], [0, -1]])
        np.testing.assert_array_equal(gram_of_span(hyperbolic_plane(), [[1, 1]]), [[2]])


class TestOrthogonalComplement:
    def test_coordinate_line(self):
        lat = named_lattice("diag(1,1,-1)")
        comp = orthogonal_complement(lat, [[1, 0, 0]])
        assert comp.dim == 2
        assert same_span(comp.vectors, [[0, 1, 0], [0, 0, 1]])

    def test_full_span(self):
        comp = orthogonal_complement(named_lattice("diag(1,1)"), [[1, 0], [0, 1]])
        assert comp.dim == 0

    def test_hyperbolic_plane(self):
        comp = orthogonal_complement(hyperbolic_plane(), [[1, 1]])
        assert same_span(comp.vectors, [[1, -1]])

    def test_isotropic_line_is_degenerate(self):
        with pytest.raises(DegenerateSpan):
            orthogonal_complement(hyperbolic_plane(), [[1, 0]])

    def test_within_subspace(self):
        lat = named_lattice("diag(1,1,1,-1)")
        within = SubspaceBasis([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        comp = orthogonal_complement(lat, [[0, 1, 0, 0]], within=within)
        assert same_span(comp.vectors, [[0, 0, 1, 0], [0, 0, 0, 1]])

    @given(st.integers(0, 10_000))
    def test_orthogonality_property(self, seed):
        rng = np.random.default_rng(seed)
        lat = named_lattice("U+U+diag(1)")
        k = int(rng.integers(1, 4))
        vecs = rng.normal(size=(k, lat.rank))
        try:
            comp = orthogonal_complement(lat, vecs)
        except DegenerateSpan:
            return
        assert comp.dim == lat.rank - k
        assert np.max(np.abs(comp.vectors @ lat.matrix @ vecs.T), initial=0) <= 1e-9


class TestPositiveVector:
    def test_examples(self):
        lat = named_lattice("diag(1,1,-1)")
        v = positive_vector(lat, SubspaceBasis([[0, 1, 0], [0, 0, 1]]))
        assert lat.q(v) > 1e-9
        assert same_span([v], [[0, 1, 0]])
        assert positive_vector(named_lattice("diag(1,-1)"), SubspaceBasis([[0, 1]])) is None
        v = positive_vector(lat, SubspaceBasis([[1, 0, 1], [0, 1, 0]]))
        assert lat.q(v) > 1e-9

    @given(st.integers(0, 10_000))
    def test_found_whenever_exact_index_positive(self, seed):
        rng = np.random.default_rng(seed)
        lat = named_lattice("diag(1,1,1,-1,-1)")
        k = int(rng.integers(1, 4))
        basis = rng.integers(-2, 3, size=(k, lat.rank))
        if np.linalg.matrix_rank(basis) < k:
            return
        restricted = [[lat.b_int(u, v) for v in basis.tolist()] for u in basis.tolist()]
        v = positive_vector(lat, SubspaceBasis(basis))
        if exact_signature(restricted).pos >= 1:
            assert v is not None and lat.q(v) > 1e-9
            assert SubspaceBasis(basis).contains(v, 1e-9)
        else:
            assert v is None


class TestBox:
    @pytest.mark.parametrize("rank,bound", [(1, 1), (2, 1), (3, 2), (4, 1)])
    def test_counts_and_order(self, rank, bound):
        lat = validate_lattice(np.eye(rank, dtype=int).tolist())
        box = integer_vectors_in_box(lat, bound)
        oracle = [v for v in itertools.product(range(-bound, bound + 1), repeat=rank) if any(v)]
        assert [tuple(v) for v in box.tolist()] == oracle

    def test_small_box_counts(self):
        assert integer_vectors_in_box(validate_lattice([[1]]), 1).tolist() == [[-1], [1]]
        assert len(integer_vectors_in_box(named_lattice("diag(1,1)"), 1)) == 8
        assert len(integer_vectors_in_box(named_lattice("diag(1,1,1)"), 2)) == 124

    def test_zero_bound_empty(self):
        assert len(integer_vectors_in_box(hyperbolic_plane(), 0)) == 0

    def test_cap(self):
        with pytest.raises(BoxTooLarge):
            integer_vectors_in_box(k3_lattice(), 1)


class TestIntegerLinearAlgebra:
    def test_det_matches_fraction_elimination(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = rng.integers(-5, 6, size=(4, 4)).tolist()
            assert integer_det(m) == round(np.linalg.det(np.array(m, dtype=float)))

    def test_hnf_shape(self):
        h = hermite_normal_form([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
        for i, row in enumerate(h):
            piv = next(j for j, x in enumerate(row) if x)
            assert row[piv] > 0
            for above in h[:i]:
                assert 0 <= above[piv] < row[piv]
        assert abs(integer_det(h)) == abs(integer_det([[2, 4, 4], [-6, 6, 12], [10, 4, 16]]))

    @pytest.mark.parametrize("seed", range(20))
    def test_kernel_is_saturated(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(-2, 3, size=(2, 4)).tolist()
        basis = integer_kernel(a)
        bm = np.array(basis, dtype=float).reshape(len(basis), 4)
        for v in basis:
            assert all(sum(r[j] * v[j] for j in range(4)) == 0 for r in a)
        # oracle: every small integer kernel vector is an integer combination of the basis
        for x in itertools.product(range(-3, 4), repeat=4):
            if any(sum(r[j] * x[j] for j in range(4)) for r in a):
                continue
            coeffs, *_ = np.linalg.lstsq(bm.T, np.array(x, dtype=float), rcond=None)
            assert np.allclose(bm.T @ coeffs, x)
            assert np.allclose(coeffs, np.round(coeffs), atol=1e-9)

    def test_kernel_of_hyperbolic_swap(self):
        assert integer_kernel([[-1, 1], [1, -1]]) == [(1, 1)]
        assert integer_kernel([[1, 1], [1, 1]]) == [(1, -1)]


class TestNamed:
    def test_names(self):
        assert named_lattice("U") == hyperbolic_plane()
        assert named_lattice("E8(-1)") == e8(-1)
        assert named_lattice("K3") == k3_lattice()
        assert named_lattice("diag(1, -1)").gram == ((1, 0), (0, -1))
        assert named_lattice("U⊕diag(1)").rank == 3

    def test_unknown(self):
        with pytest.raises(InputError):
            named_lattice("D4")


def test_fraction_free_signature_has_no_float():
    # the exact routine must accept Fractions and big integers unchanged
    big = 10**30
    assert exact_signature([[Fraction(big), 1], [1, Fraction(-1, big)]]) == (1, 1, 0)
