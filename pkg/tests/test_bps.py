import pytest

from kacbps.bps import (
    HYPERBOLIC,
    INVERTED,
    ISOTROPIC,
    PLAIN,
    REAL_SIMPLE,
    affine_bps_character,
    affine_data,
    bps_character,
    coha_character,
    coha_coefficient_by_symmetric_powers,
    cuspidal_extract,
    multiset_partitions,
    serre_vanishing_suite,
    zeroth_piece_character,
)
from kacbps.errors import ConfigurationError, PreconditionError
from kacbps.kac.cache import KacCache
from kacbps.quiver import Quiver, box_vectors
from kacbps.series import HalfLaurent

from .conftest import make


def q_(e):
    return HalfLaurent.monomial(2 * e)


class TestBPSCharacter:
    def test_kronecker(self, kronecker):
        chars = bps_character(kronecker, "ALL", (2, 2))
        assert chars.convention == INVERTED
        assert chars[(1, 0)] == HalfLaurent.const(1)
        assert chars[(1, 1)] == q_(-1) + 1
        assert chars[(2, 2)] == q_(-1) + 1
        assert chars[(2, 1)] == HalfLaurent.const(1)
        assert not chars[(2, 0)]

    def test_two_loop(self, two_loop):
        chars = bps_character(two_loop, "ALL", (3,))
        assert chars[(1,)] == q_(-2)
        assert chars[(2,)] == q_(-5) + q_(-3)
        assert chars[(3,)] == sum((q_(-e) for e in (10, 8, 7, 6, 5, 4)), HalfLaurent())

    def test_nilpotent_keeps_q(self, jordan):
        chars = bps_character(jordan, "N", (3,))
        assert chars.convention == PLAIN
        assert all(chars[(n,)] == HalfLaurent.const(1) for n in (1, 2, 3))

    def test_cache_round_trip(self, kronecker, tmp_path):
        cache = KacCache(tmp_path / "k.json")
        first = bps_character(kronecker, "ALL", (2, 2), cache=cache)
        cache.save()
        again = bps_character(kronecker, "ALL", (2, 2), cache=KacCache(tmp_path / "k.json"))
        assert first == again


class TestCoHA:
    def test_jordan_first_degree(self, jordan):
        s = coha_character(jordan, (2,), (-2, 6))
        assert s[(1,)] == q_(-1) + 1 + q_(1) + q_(2) + q_(3)

    def test_jordan_second_degree(self, jordan):
        s = coha_character(jordan, (2,), (-2, 6))
        coeffs = {e: int(c) for e, c in s[(2,)].items()}
        assert coeffs == {-2: 2, 0: 3, 2: 3, 4: 4, 6: 4}

    def test_empty_quiver(self):
        q = make(["1"], [])
        s = coha_character(q, (3,), (-4, 4), torus_factor=False)
        assert [s[(n,)] for n in (1, 2, 3)] == [HalfLaurent.const(1)] * 3

    def test_window_must_contain_zero(self, jordan):
        with pytest.raises(ConfigurationError):
            coha_character(jordan, (1,), (2, 6))

    def test_needs_unrestricted_input(self, jordan):
        with pytest.raises(PreconditionError):
            coha_character(jordan, (1,), bps=bps_character(jordan, "N", (1,)))

    def test_symmetric_powers_agree(self, kronecker):
        window = (-6, 6)
        s = coha_character(kronecker, (2, 2), window)
        for d in box_vectors((2, 2)):
            assert coha_coefficient_by_symmetric_powers(kronecker, d, window) == s[d]

    def test_twist_shifts(self, kronecker):
        window = (-8, 8)
        plain = coha_character(kronecker, (1, 1), (-8, 10))
        twisted = coha_character(kronecker, (1, 1), window, twist=True)
        # chi((1,1),(1,1)) = 2 - 2 = 0 and chi((1,0),(1,0)) = 1
        assert twisted[(1, 1)] == plain[(1, 1)].truncate(window)
        assert twisted[(1, 0)] == plain[(1, 0)].shift(-2).truncate(window)

    def test_multiset_partitions(self):
        parts = [(1, 0), (0, 1), (1, 1)]
        got = list(multiset_partitions((1, 1), parts))
        assert len(got) == 2
        assert {(1, 1): 1} in got
        assert len(list(multiset_partitions((3,), [(1,), (2,), (3,)]))) == 3


class TestZerothPiece:
    def test_jordan(self, jordan):
        z = zeroth_piece_character(jordan, (3,))
        assert z[(0,)] == HalfLaurent.const(1)
        assert all(not z[(n,)] for n in (1, 2, 3))

    def test_a2(self, a2):
        z = zeroth_piece_character(a2, (1, 1))
        assert z.total((1, 1)) == 2

    def test_a2_loop_sees_only_the_real_vertex(self, a2_loop):
        z = zeroth_piece_character(a2_loop, (2, 2))
        assert z.total((2, 0)) == 1
        assert not z[(0, 1)]


class TestAffine:
    def test_kronecker_matches_kac(self, kronecker):
        aff = affine_bps_character(kronecker, (3, 3))
        assert aff.delta == (1, 1)
        assert aff.character == bps_character(kronecker, "ALL", (3, 3))
        assert (2, 1) in aff.real_roots

    def test_cycle(self, affine_a2):
        assert affine_data(affine_a2) == (1, 1, 1)
        aff = affine_bps_character(affine_a2, (1, 1, 1))
        assert aff.character[(1, 1, 1)] == q_(-1) + 2

    def test_not_semidefinite(self):
        q = make("ab", [("a", "b")] * 3)
        with pytest.raises(PreconditionError, match="semidefinite"):
            affine_data(q)

    def test_finite_type(self, a2):
        with pytest.raises(PreconditionError, match="dimension 0"):
            affine_data(a2)


class TestSerreVanishing:
    def test_a2(self, a2):
        assert serre_vanishing_suite(a2) == [((2, 1), True), ((1, 2), True)]

    def test_kronecker(self, kronecker):
        assert serre_vanishing_suite(kronecker) == [((3, 1), True), ((1, 3), True)]

    def test_skips_loops(self, a2_loop):
        assert [d for d, _ in serre_vanishing_suite(a2_loop)] == [(2, 1)]


class TestExtraction:
    def test_a2_only_simples(self, a2):
        report = cuspidal_extract(a2, (2, 2))
        assert [e.d for e in report.entries] == [(0, 1), (1, 0)]
        assert all(e.tag == REAL_SIMPLE for e in report.entries)

    def test_kronecker(self, kronecker):
        report = cuspidal_extract(kronecker, (3, 3))
        assert report.nonnegative
        by_d = {e.d: e for e in report.entries}
        assert set(by_d) == {(0, 1), (1, 0), (1, 1), (2, 2), (3, 3)}
        for n in (1, 2, 3):
            assert by_d[(n, n)].tag == ISOTROPIC
            assert by_d[(n, n)].residual == q_(-1)

    def test_two_loop(self, two_loop):
        report = cuspidal_extract(two_loop, (3,))
        assert report.nonnegative
        assert {e.tag for e in report.entries} == {HYPERBOLIC}
        assert report.residual((2,)) == q_(-5) + q_(-3)
        assert report.residual((3,)) == sum((q_(-e) for e in (10, 8, 6, 4)), HalfLaurent())

    def test_json_shape(self, kronecker):
        data = cuspidal_extract(kronecker, (1, 1)).to_json()
        assert set(data) == {"quiver", "convention", "characters", "extraction"}
        assert data["convention"] == INVERTED
        assert data["extraction"][0] == {"d": [0, 1], "residual": [[0, 1, 1]], "tag": REAL_SIMPLE,
                                         "nonnegative": True}


def test_quiver_type_used(kronecker):
    assert isinstance(kronecker, Quiver)
