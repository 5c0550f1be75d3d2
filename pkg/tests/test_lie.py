import pytest

from kacbps.errors import ConsistencyError, PreconditionError, ResourceLimitError
from kacbps.lie import (
    Generator,
    GradedDims,
    GradedGenerators,
    borcherds_bozec_dims,
    free_lie_dims,
    kac_moody_generators,
    km_root_mult_recursion,
    lyndon_words,
    serre_quotient_dims,
    uea_dims,
)
from kacbps.quiver import box_vectors, symmetrized_form
from kacbps.series import HalfLaurent


def gens(*items):
    return GradedGenerators.of(items)


class TestFreeLie:
    def test_one_even_generator(self):
        dims = free_lie_dims(gens(((1,), 0)), (3,))
        assert [dims.total((n,)) for n in (1, 2, 3)] == [1, 0, 0]

    def test_two_generators(self):
        dims = free_lie_dims(gens(((1, 0), 0), ((0, 1), 0)), (2, 2))
        assert dims.total((1, 1)) == 1
        assert dims.total((2, 1)) == 1
        assert dims.total((2, 2)) == 1

    def test_levels_one_and_two(self):
        dims = free_lie_dims(gens(((1,), 0), ((2,), 0)), (3,))
        assert dims.total((3,)) == 1
        more = free_lie_dims(gens(((1,), 0), ((2,), 0), ((3,), 0)), (3,))
        assert more.total((3,)) == 2

    def test_odd_generator_squares(self):
        dims = free_lie_dims(gens(((1,), 1)), (3,))
        assert dims[(1,)] == HalfLaurent({1: -1})
        assert dims[(2,)] == HalfLaurent({2: 1})
        assert dims.total((3,)) == 0

    def test_multiplicity(self):
        dims = free_lie_dims(gens(((1,), 0, 2)), (3,))
        # free Lie algebra on two letters: necklace counts 2, 1, 2
        assert [dims.total((n,)) for n in (1, 2, 3)] == [2, 1, 2]

    def test_word_limit(self):
        letters = gens(((1,), 0, 3)).letters((12,))
        with pytest.raises(ResourceLimitError):
            lyndon_words(letters, (12,), limit=100)

    def test_generator_validation(self):
        with pytest.raises(PreconditionError):
            Generator((0, 0))
        with pytest.raises(PreconditionError):
            Generator((1,), 0, -1)

    def test_unknown_method_mismatch_is_loud(self, monkeypatch):
        import kacbps.lie as lie

        monkeypatch.setattr(lie, "free_lie_dims_witt", lambda g, b: GradedDims(tuple(b), {}))
        with pytest.raises(ConsistencyError):
            lie.free_lie_dims(gens(((1,), 0)), (2,))


class TestSerreQuotients:
    def test_kronecker(self, kronecker):
        g, cm = kac_moody_generators(kronecker)
        dims = serre_quotient_dims(g, cm, (3, 3))
        expected = {(1, 0): 1, (0, 1): 1, (1, 1): 1, (2, 1): 1, (1, 2): 1, (2, 2): 1, (3, 1): 0,
                    (3, 2): 1, (2, 3): 1, (3, 3): 1, (0, 2): 0}
        assert {d: dims.total(d) for d in expected} == expected

    def test_a2(self, a2):
        g, cm = kac_moody_generators(a2)
        dims = serre_quotient_dims(g, cm, (2, 2))
        assert sorted(dims.keys()) == [(0, 1), (1, 0), (1, 1)]

    def test_jordan_bozec(self, jordan):
        dims = borcherds_bozec_dims(jordan, (5,))
        assert [dims.total((n,)) for n in range(1, 6)] == [1] * 5

    def test_two_loop_bozec(self, two_loop):
        dims = borcherds_bozec_dims(two_loop, (3,))
        assert [dims.total((n,)) for n in (1, 2, 3)] == [1, 1, 2]

    def test_loop_free_bozec_is_kac_moody(self, a3):
        assert borcherds_bozec_dims(a3, (2, 2, 2)) == km_root_mult_recursion(a3, (2, 2, 2))

    def test_quotient_below_free(self, kronecker):
        g, cm = kac_moody_generators(kronecker)
        free = free_lie_dims(g, (3, 3))
        quot = serre_quotient_dims(g, cm, (3, 3))
        for d in box_vectors((3, 3)):
            assert quot.total(d) <= free.total(d)

    def test_central_imaginary_generators(self, kronecker):
        # real simple roots plus a degree -2 generator at each n*delta
        items = [((1, 0), 0), ((0, 1), 0)] + [((n, n), -2) for n in (1, 2, 3)]
        g = gens(*items)
        form = [[symmetrized_form(kronecker, a.grading, b.grading) for b in g.generators] for a in g.generators]
        dims = serre_quotient_dims(g, form, (3, 3))
        km = km_root_mult_recursion(kronecker, (3, 3))
        for n in (1, 2, 3):
            assert dims[(n, n)] == km[(n, n)] + HalfLaurent.monomial(-2)
        assert dims[(2, 1)] == km[(2, 1)]

    def test_explicit_real_flags(self, kronecker):
        # a generator at the real root (2,1) pairs to 2 but is not a simple root
        g = gens(((1, 0), 0), ((2, 1), 0))
        form = [[symmetrized_form(kronecker, a.grading, b.grading) for b in g.generators] for a in g.generators]
        flagged = serre_quotient_dims(g, form, (4, 2), real=[True, True])
        unflagged = serre_quotient_dims(g, form, (4, 2), real=[True, False])
        assert flagged.total((3, 1)) <= unflagged.total((3, 1))

    def test_form_size_checked(self, kronecker):
        g, _ = kac_moody_generators(kronecker)
        with pytest.raises(PreconditionError):
            serre_quotient_dims(g, [[2]], (1, 1))


class TestRecursion:
    def test_kronecker_up_to_eight(self, kronecker):
        mult = km_root_mult_recursion(kronecker, (8, 8), max_total=8)
        for d in box_vectors((8, 8)):
            if sum(d) > 8:
                continue
            norm = symmetrized_form(kronecker, d, d)
            assert mult.total(d) == (1 if norm in (0, 2) and d[0] == d[1] or norm == 2 else 0)

    def test_a2(self, a2):
        mult = km_root_mult_recursion(a2, (3, 3))
        assert sorted(mult.keys()) == [(0, 1), (1, 0), (1, 1)]

    def test_simple_roots(self, affine_a2, a3):
        for q in (affine_a2, a3):
            mult = km_root_mult_recursion(q, (1,) * q.n)
            assert all(mult.total(q.unit(i)) == 1 for i in range(q.n))

    def test_needs_loop_free(self, jordan):
        with pytest.raises(PreconditionError):
            km_root_mult_recursion(jordan, (2,))

    def test_max_total_matches_full(self, a3):
        full = km_root_mult_recursion(a3, (3, 3, 3))
        part = km_root_mult_recursion(a3, (3, 3, 3), max_total=4)
        assert all(part[d] == full[d] for d in box_vectors((3, 3, 3)) if sum(d) <= 4)


class TestEnveloping:
    def test_kronecker(self, kronecker):
        env = uea_dims(km_root_mult_recursion(kronecker, (2, 2)))
        assert env.total((1, 1)) == 2

    def test_polynomial_algebra(self):
        env = uea_dims(GradedDims((5,), {(1,): HalfLaurent.const(1)}))
        assert [env.total((n,)) for n in range(1, 6)] == [1] * 5

    def test_jordan_partitions(self, jordan):
        env = uea_dims(borcherds_bozec_dims(jordan, (4,)))
        assert [env.total((n,)) for n in range(1, 5)] == [1, 2, 3, 5]

    def test_rejects_negative_dims(self):
        with pytest.raises(PreconditionError):
            uea_dims(GradedDims((2,), {(1,): HalfLaurent.const(-1)}))


def test_graded_dims_json_round_trip(kronecker):
    dims = km_root_mult_recursion(kronecker, (2, 2))
    data = dims.to_json()
    assert data[0] == [[0, 1], [[0, 1]]]
    assert GradedDims.from_json((2, 2), data) == dims
    assert dims.dumps().startswith("[[[0,1]")
