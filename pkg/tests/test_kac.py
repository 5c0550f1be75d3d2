import json

import numpy as np
import pytest

from kacbps.errors import ConsistencyError, PreconditionError, ResourceLimitError
from kacbps.kac.brute import (
    FiniteFieldRep,
    brute_count_abs_indec,
    brute_count_indecomposable,
    census,
    endo_structure,
    has_oriented_cycle,
)
from kacbps.kac.cache import KacCache
from kacbps.kac.hua import HuaEvaluator, conjugate, hua_kac, hua_kac_box, pairing, partitions, tuple_count
from kacbps.kac.interpolate import (
    degree_bound,
    galois_inversion_check,
    galois_inversion_terms,
    interpolate_kac,
    interpolate_kac_detailed,
    nilpotent_degree_bound,
)
from kacbps.kac.nilpotency import NilpotencyClass, requires_full_nilpotency, satisfies
from kacbps.kac.polynomial import KacPolynomial, lagrange_coefficients
from kacbps.quiver import double, euler_form, reorient


class TestPolynomial:
    def test_render_and_values(self, kronecker):
        p = KacPolynomial.from_coefficients(kronecker, (1, 1), [1, 1])
        assert p.render() == "q+1"
        assert p(2) == 3 and p.constant_term() == 1 and p.degree == 1
        assert KacPolynomial.from_coefficients(kronecker, (2, 1), []).render() == "0"
        assert p.to_json() == {"d": [1, 1], "coefficients": [1, 1], "rendered": "q+1"}

    def test_rejects_non_polynomials(self, kronecker):
        from kacbps.series import HalfLaurent

        with pytest.raises(ConsistencyError):
            KacPolynomial(kronecker, (1, 1), HalfLaurent({-2: 1}))
        with pytest.raises(ConsistencyError):
            KacPolynomial(kronecker, (1, 1), HalfLaurent({1: 1}))

    def test_lagrange(self):
        coeffs = lagrange_coefficients([2, 3, 5], [4 + 2 + 1, 9 + 3 + 1, 25 + 5 + 1])
        assert coeffs == [1, 1, 1]


class TestHua:
    def test_examples(self, jordan, kronecker, a2, two_loop):
        assert hua_kac(jordan, (1,)).render() == "q"
        assert hua_kac(kronecker, (1, 1)).render() == "q+1"
        assert hua_kac(a2, (2, 1)).render() == "0"
        assert hua_kac(two_loop, (1,)).render() == "q^(2)"

    def test_frozen_values(self, jordan, two_loop, affine_a2, a2_loop):
        # independent brute-force counts fix these
        assert [hua_kac(jordan, (n,)).render() for n in (1, 2, 3)] == ["q"] * 3
        assert hua_kac(two_loop, (2,)).render() == "q^(5)+q^(3)"
        assert hua_kac(two_loop, (3,)).render() == "q^(10)+q^(8)+q^(7)+q^(6)+q^(5)+q^(4)"
        assert hua_kac(affine_a2, (1, 1, 1)).render() == "q+2"
        assert hua_kac(a2_loop, (1, 2)).render() == "q^(2)+q"

    def test_zero_dimension(self, a2):
        with pytest.raises(PreconditionError):
            hua_kac(a2, (0, 0))

    def test_feasibility_limit(self, a3):
        with pytest.raises(ResourceLimitError, match="partition tuples"):
            HuaEvaluator(a3, (8, 8, 8), tuple_limit=1000)

    def test_partition_helpers(self):
        assert [len(partitions(n)) for n in range(7)] == [1, 1, 2, 3, 5, 7, 11]
        assert conjugate((3, 1)) == (2, 1, 1)
        assert pairing((2,), (1, 1)) == 2
        assert tuple_count((1, 1)) == 4

    def test_orientation_independence(self, a2, kronecker, affine_a2):
        for q, box in ((a2, (3, 3)), (kronecker, (2, 2)), (affine_a2, (2, 1, 1))):
            ours = hua_kac_box(q, box)
            theirs = hua_kac_box(reorient(q, [0]), box)
            assert {d: p.coefficients for d, p in ours.items()} == {d: p.coefficients for d, p in theirs.items()}

    def test_degree_bound_and_constant_term(self, corpus):
        for q in corpus.values():
            for d, p in hua_kac_box(q, (2,) * q.n).items():
                assert not p.polynomial or p.degree <= 1 - euler_form(q, d, d)
                assert p.constant_term() >= 0


class TestBrute:
    def test_examples(self, jordan, a2):
        assert brute_count_abs_indec(jordan, (1,), 2) == 2
        assert brute_count_abs_indec(a2, (1, 1), 2) == 1
        assert brute_count_abs_indec(jordan, (2,), 2, NilpotencyClass.SSN) == 1

    def test_census_fields(self, kronecker):
        c = census(kronecker, (1, 1), 2)
        assert (c.orbits, c.abs_indecomposable, c.indecomposable) == (4, 3, 3)

    def test_indecomposable_exceeds_absolute_over_small_fields(self, jordan):
        # an irreducible quadratic block over F_2 is indecomposable, not absolutely
        assert brute_count_indecomposable(jordan, (2,), 2) == 3
        assert brute_count_abs_indec(jordan, (2,), 2) == 2

    def test_cap(self, two_loop):
        with pytest.raises(ResourceLimitError):
            brute_count_abs_indec(two_loop, (3,), 3, cap=1000)

    def test_bad_inputs(self, jordan):
        with pytest.raises(PreconditionError):
            brute_count_abs_indec(jordan, (1,), 4)
        with pytest.raises(PreconditionError):
            brute_count_abs_indec(jordan, (0,), 2)
        with pytest.raises(PreconditionError):
            census(jordan, (1,), 2, over="R")

    def test_jobs_do_not_change_results(self, kronecker, a2_loop):
        for q, d in ((kronecker, (2, 2)), (a2_loop, (1, 2))):
            assert census(q, d, 3, jobs=1) == census(q, d, 3, jobs=4)

    def test_oriented_cycle_detection(self, affine_a2, a3, jordan):
        assert has_oriented_cycle(affine_a2, (1, 1, 1))
        assert not has_oriented_cycle(affine_a2, (1, 1, 0))
        assert not has_oriented_cycle(a3, (1, 1, 1))
        assert has_oriented_cycle(jordan, (1,))


class TestRepresentations:
    def test_radical(self, jordan):
        block = FiniteFieldRep(jordan, (2,), 3, (np.array([[0, 1], [0, 0]]),))
        info = block.radical_data()
        assert (info.dim, info.dim_radical, info.local) == (2, 1, True)
        assert block.is_absolutely_indecomposable()
        split = FiniteFieldRep(jordan, (2,), 3, (np.array([[1, 0], [0, 2]]),))
        assert not split.is_indecomposable()

    def test_irreducible_block_is_not_absolutely_indecomposable(self, jordan):
        rot = FiniteFieldRep(jordan, (2,), 3, (np.array([[0, 2], [1, 0]]),))  # x^2 + 1
        assert rot.is_indecomposable()
        assert not rot.is_absolutely_indecomposable()

    def test_shapes(self, a2):
        with pytest.raises(PreconditionError):
            FiniteFieldRep(a2, (1, 2), 2, (np.zeros((3, 3)),))

    def test_guard(self, jordan):
        # End of a regular nilpotent block is local, so no shortcut applies
        block = (np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]]),)
        with pytest.raises(ResourceLimitError):
            endo_structure(jordan, (3,), block, 3, guard=10)
        assert endo_structure(jordan, (3,), block, 3).dim_radical == 2


class TestNilpotency:
    def test_jordan_classes(self, jordan):
        nil = [np.array([[0, 1], [0, 0]])]
        unipotent = [np.array([[1, 1], [0, 1]])]
        for cls in ("N", "SN", "SSN"):
            assert satisfies(jordan, (2,), nil, 2, cls)
            assert not satisfies(jordan, (2,), unipotent, 2, cls)
        assert satisfies(jordan, (2,), unipotent, 2, "ALL")

    def test_one_nilpotent_ignores_non_loops(self, a2_loop):
        # i -> j and a loop at j: SN only constrains the loop
        mats = [np.array([[1]]), np.array([[0]])]
        assert satisfies(a2_loop, (1, 1), mats, 2, NilpotencyClass.SN)

    def test_double_flags(self, jordan):
        qb = double(jordan)
        a = np.array([[0, 1], [0, 0]])
        astar = np.array([[1, 0], [0, 1]])
        assert satisfies(qb, (2,), [a, astar], 3, "SN")
        assert not satisfies(qb, (2,), [a, astar], 3, "N")
        assert not satisfies(qb, (2,), [astar, a], 3, "SN")
        assert satisfies(qb, (2,), [a, np.zeros((2, 2))], 3, "SSN")

    def test_full_nilpotency_rules(self, jordan):
        assert requires_full_nilpotency(jordan, "SSN")
        assert not requires_full_nilpotency(jordan, "SN")
        assert not requires_full_nilpotency(double(jordan), "SSN")

    def test_parse(self):
        assert NilpotencyClass.parse("ssn") is NilpotencyClass.SSN
        with pytest.raises(PreconditionError):
            NilpotencyClass.parse("XYZ")


class TestInterpolation:
    def test_jordan_ssn(self, jordan):
        for n in (1, 2, 3):
            assert interpolate_kac(jordan, (n,), NilpotencyClass.SSN).render() == "1"

    def test_matches_hua(self, kronecker, a2):
        assert interpolate_kac(kronecker, (1, 1)).render() == "q+1"
        assert interpolate_kac(a2, (2, 1)).render() == "0"

    def test_two_loop_ssn_low_degrees(self, two_loop):
        assert interpolate_kac(two_loop, (1,), "SSN").render() == "1"
        assert interpolate_kac(two_loop, (2,), "SSN").render() == "q+1"

    def test_details(self, jordan):
        res = interpolate_kac_detailed(jordan, (1,), "ALL")
        assert res.bound == 1 and list(res.samples) == [2, 3] and list(res.checks) == [5]

    def test_nilpotent_degree_bounds(self, jordan, two_loop):
        assert [nilpotent_degree_bound(jordan, (n,)) for n in (1, 2, 3)] == [0, 0, 1]
        assert [nilpotent_degree_bound(two_loop, (n,)) for n in (1, 2, 3)] == [0, 1, 3]
        assert degree_bound(two_loop, (2,), "ALL") == 5
        assert degree_bound(two_loop, (2,), "SSN") == 1

    def test_too_few_primes(self, two_loop):
        with pytest.raises(ResourceLimitError):
            interpolate_kac(two_loop, (2,), "ALL", primes=(2, 3))

    def test_galois(self, jordan, a2, kronecker):
        assert galois_inversion_check(jordan, (2,), 2)
        assert galois_inversion_check(a2, (2, 2), 2)
        assert galois_inversion_check(a2, (1, 1), 3)
        lhs, rhs = galois_inversion_terms(kronecker, (2, 2), 2)
        assert lhs == rhs == 4


class TestCache:
    def test_round_trip(self, tmp_path, kronecker):
        path = tmp_path / "cache.json"
        cache = KacCache(path)
        poly = hua_kac(kronecker, (1, 1))
        cache.put(kronecker, (1, 1), "ALL", "hua", poly)
        cache.save()
        again = KacCache(path)
        assert again.get(kronecker, (1, 1), "ALL", "hua") == poly
        assert again.get(kronecker, (1, 1), "ALL", "brute") is None

    def test_corrupted_file_is_ignored(self, tmp_path, kronecker):
        path = tmp_path / "cache.json"
        path.write_text("{not json")
        with pytest.warns(RuntimeWarning, match="ignoring"):
            cache = KacCache(path)
        assert cache.entries == {}
        path.write_text(json.dumps({"format": 1, "entries": {"x": ["a"]}}))
        with pytest.warns(RuntimeWarning):
            KacCache(path)
