from fractions import Fraction

import pytest

from kacbps.errors import DimensionMismatchError, PreconditionError, QuiverParseError
from kacbps.quiver import (
    Quiver,
    cartan_matrix,
    double,
    euler_form,
    generator_index,
    lagrangian_half_dim,
    load_quiver,
    nakajima_dim,
    quiver_from_json,
    real_subquiver,
    reorient,
    restrict_dim,
    slope,
    slope_sublattice,
    symmetrized_form,
    triple,
)


def test_euler_form_examples(jordan, a2, kronecker):
    for n in range(4):
        assert euler_form(jordan, (n,), (n,)) == 0
    assert euler_form(a2, (1, 0), (0, 1)) == -1
    assert euler_form(a2, (0, 1), (1, 0)) == 0
    assert euler_form(kronecker, (1, 1), (1, 1)) == 0


def test_symmetrized_form_examples(jordan, two_loop, kronecker):
    assert symmetrized_form(jordan, (1,), (1,)) == 0
    assert symmetrized_form(two_loop, (1,), (1,)) == -2
    assert euler_form(kronecker, (1, 1), (1, 0)) == 1
    assert euler_form(kronecker, (1, 0), (1, 1)) == -1
    assert symmetrized_form(kronecker, (1, 1), (1, 0)) == 0


def test_mismatched_vectors(a2):
    with pytest.raises(DimensionMismatchError):
        euler_form(a2, (1,), (1, 0))
    with pytest.raises(DimensionMismatchError):
        a2.dim((1, -1))


def test_double_and_triple(a2, jordan):
    assert len(double(a2).arrows) == 2
    assert len(triple(a2).arrows) == 4
    t = triple(jordan)
    assert t.n == 1 and len(t.arrows) == 3 and t.loops_at(0) == 3
    for n in range(1, 5):
        assert euler_form(t, (n,), (n,)) == -2 * n * n


def test_triple_identity(a2):
    d = (1, 1)
    assert euler_form(a2, d, d) == sum(x * x for x in d) + euler_form(triple(a2), d, d) // 2
    assert euler_form(triple(a2), d, d) == -2


def test_double_pairs_arrows_positionally(kronecker):
    qb = double(kronecker)
    m = len(kronecker.arrows)
    for k, (s, t) in enumerate(kronecker.arrows):
        assert qb.arrows[k + m] == (t, s)
    assert qb.kinds == ("a",) * m + ("a*",) * m


def test_classification(a2_loop, two_loop, jordan):
    assert a2_loop.real_vertices == (0,)
    assert a2_loop.isotropic_vertices == (1,)
    assert two_loop.hyperbolic_vertices == (0,)
    assert jordan.vertex_class(0) == "isotropic"
    assert all(triple(a2_loop).loops_at(i) >= 1 for i in range(2))


def test_slopes():
    assert slope((0, 0), (3, 5)) == 0
    assert slope((1, 0), (1, 1)) == Fraction(1, 2)
    accepts = slope_sublattice((1, 0), 1)
    assert accepts((1, 0)) and not accepts((1, 1)) and accepts((0, 0))
    assert slope_sublattice((0, 0), 0)((4, 7))
    with pytest.raises(PreconditionError):
        slope((1, 0), (0, 0))


def test_nakajima_dim(jordan, a2):
    for n in range(5):
        assert nakajima_dim(jordan, (1,), (n,)) == 2 * n
    assert nakajima_dim(a2, (0, 0), (0, 0)) == 0
    assert nakajima_dim(a2, (1, 1), (1, 1)) == 2
    assert lagrangian_half_dim(a2, (1, 1), (1, 1)) == 1


def test_real_subquiver(jordan, a2, a2_loop):
    assert real_subquiver(jordan).n == 0
    assert real_subquiver(a2) == a2
    sub = real_subquiver(a2_loop)
    assert sub.vertices == ("i",) and sub.arrows == ()
    assert restrict_dim(a2_loop, sub, (2, 0)) == (2,)
    assert restrict_dim(a2_loop, sub, (1, 1)) is None


def test_json_loader_reports_position(tmp_path):
    good = '{"vertices": ["i", "j"], "arrows": [{"src": "i", "tgt": "j"}]}'
    q = quiver_from_json(good)
    assert q.arrows == (("i", "j"),)
    with pytest.raises(QuiverParseError, match=r"arrows\[1\]\.tgt"):
        quiver_from_json('{"vertices": ["i"], "arrows": [{"src": "i", "tgt": "i"}, {"src": "i", "tgt": "k"}]}')
    with pytest.raises(QuiverParseError, match="duplicate"):
        quiver_from_json('{"vertices": ["i", "i"], "arrows": []}')
    with pytest.raises(QuiverParseError, match="line 1"):
        quiver_from_json("{oops")
    path = tmp_path / "q.json"
    path.write_text(good)
    assert load_quiver(path) == q


def test_constructor_rejects_bad_input():
    with pytest.raises(PreconditionError):
        Quiver(("i", "i"), ())
    with pytest.raises(PreconditionError):
        Quiver(("i",), (("i", "j"),))


def test_generator_index_form(two_loop, a2_loop):
    idx = generator_index(two_loop, (3,))
    assert idx.elements == ((0, 1), (0, 2), (0, 3))
    for a, (i, n) in enumerate(idx.elements):
        for b, (j, m) in enumerate(idx.elements):
            assert idx.form[a][b] == n * m * cartan_matrix(two_loop)[i][j]
    idx = generator_index(a2_loop, (2, 2))
    assert idx.elements == ((0, 1), (1, 1), (1, 2))
    assert idx.is_real(0) and not idx.is_real(1)


def test_reorient_and_hash(kronecker):
    flipped = reorient(kronecker, [0, 1])
    assert flipped.arrows == (("2", "1"), ("2", "1"))
    assert flipped.canonical_hash() != kronecker.canonical_hash()
    assert len(kronecker.canonical_hash()) == 16
