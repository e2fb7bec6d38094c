import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grstar import ncpoly as nc
from grstar.ncpoly import DegreeError, GrElement, bullet, cup, cup_pow, inner, involution, star, trace
from grstar.oracles import catalan, count_matched_pairings
from grstar.scalars import ContextMismatch


def W(*letters, l=3):
    return GrElement.word(letters, l)


def X(i, l=2):
    return GrElement.letter(i, l)


word2 = st.lists(st.integers(1, 2), max_size=6).map(tuple)
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
element2 = st.dictionaries(word2, coeff, max_size=4).map(lambda d: GrElement(2, d))


def test_intro_identity():
    got = star(W(1, 2, 3), W(3, 2))
    assert got == W(1, 2, 3, 3, 2) + W(1, 2, 2) + W(1)


@pytest.mark.parametrize(
    "u, v, expected",
    [
        ((1,), (1,), [(1, 1), ()]),
        ((1,), (2,), [(1, 2)]),
        ((), (1, 2), [(1, 2)]),
        ((1, 2), (2, 1), [(1, 2, 2, 1), (1, 1), ()]),
        ((1, 2), (1, 2), [(1, 2, 1, 2)]),
    ],
)
def test_star_on_words(u, v, expected):
    got = star(GrElement.word(u, 2), GrElement.word(v, 2))
    assert got == nc.element_from_words(expected, 2)


def test_bullet_and_norms():
    assert bullet(X(1), X(2)) == GrElement.word((1, 2), 2)
    c = cup(2)
    assert inner(bullet(c, c), bullet(c, c)) == 4 == inner(c, c) ** 2
    assert cup_pow(2, 2) == bullet(c, c)


def test_involution_examples():
    assert involution(W(1, 2, 3)) == W(3, 2, 1)
    assert involution(cup(3)) == cup(3)
    assert involution(star(X(1), X(2))) == GrElement.word((2, 1), 2)


@pytest.mark.parametrize("i, j", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_trace_of_letter_product(i, j):
    assert trace(star(X(i), X(j))) == (1 if i == j else 0)


def test_inner_examples():
    assert inner(cup(2), cup(2)) == 2
    assert inner(cup(5), cup(5)) == 5
    b = X(1)
    assert inner(bullet(cup(2), b), bullet(b, cup(2))) == 1


def test_cup_conventions():
    assert cup(2) == GrElement(2, {(1, 1): 1, (2, 2): 1})
    assert cup_pow(0, 2) == GrElement.one(2)
    assert cup_pow(-1, 2) == GrElement.zero(2)
    assert cup_pow(-3, 2) == GrElement.zero(2)


def test_caps():
    assert nc.cap_left(GrElement.word((1, 1, 2), 2)) == X(2)
    assert nc.cap_left(GrElement.word((1, 2, 2), 2)) == GrElement.zero(2)
    assert nc.cap_right(cup(2)) == GrElement.one(2).scale(2)
    with pytest.raises(DegreeError):
        nc.cap_left(X(1))
    with pytest.raises(DegreeError):
        nc.cap_right(X(1) + GrElement.word((1, 1), 2))


def test_vn_projection():
    a = GrElement.word((1, 2), 2)
    assert nc.vn_project(a, 2) == a
    assert nc.vn_project(cup(2), 2) == GrElement.zero(2)
    with pytest.raises(DegreeError):
        nc.vn_project(X(1) + a, 2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_vn_projection_properties(n, rng):
    for _ in range(10):
        a = nc.random_element(rng, 2, 0, 5, homogeneous=n)
        p = nc.vn_project(a, n)
        assert nc.vn_project(p, n) == p
        assert not nc.cap_left(p) and not nc.cap_right(p)
        # residual is orthogonal to V_n
        for v in nc.vn_basis(2, n):
            assert inner(a - p, v) == 0


def test_z_vector():
    b = X(1)
    z, nsq = nc.z_vector(b)
    assert nsq == Fraction(3, 2)
    zn = nc.z_normalized(b)
    assert inner(zn, zn) == 1
    assert nc.cap_right(zn) == GrElement.zero(2)
    with pytest.raises(DegreeError):
        nc.z_vector(cup(2))


def test_times_j_examples():
    w = lambda *s: GrElement.word(s, 2)
    assert nc.times_j(w(1, 2), w(2, 1), 1) == w(1, 1)
    assert nc.times_j(w(1, 2), w(1, 2), 1) == GrElement.zero(2)
    assert nc.times_identity(2, 1) == cup(2)
    with pytest.raises(DegreeError):
        nc.times_j(w(1), w(1), 1)


@pytest.mark.parametrize("j", [1, 2])
def test_times_j_is_matrix_product(j, rng):
    for _ in range(10):
        c = nc.random_element(rng, 2, 0, 6, homogeneous=2 * j)
        d = nc.random_element(rng, 2, 0, 6, homogeneous=2 * j)
        prod = nc.mat_float(nc.times_j(c, d, j), j)
        np.testing.assert_allclose(prod, nc.mat_float(c, j) @ nc.mat_float(d, j), atol=1e-12)
        np.testing.assert_allclose(nc.mat_float(involution(c), j), nc.mat_float(c, j).T, atol=1e-12)
        assert nc.from_mat(nc.mat(c, j), 2, j) == c
        unit = nc.times_identity(2, j)
        assert nc.times_j(unit, c, j) == c == nc.times_j(c, unit, j)


def test_alpha_examples():
    w = GrElement.word((1, 2, 2), 2)
    assert nc.alpha_j(w, 0) == GrElement.one(2)
    assert nc.alpha_j(X(1), 1) == GrElement.word((1, 1), 2)
    with pytest.raises(DegreeError):
        nc.alpha_j(w, 4)


@pytest.mark.parametrize("side", ["left", "right"])
def test_alpha_tangle_matches_formula_and_is_psd(side, rng):
    for _ in range(50):
        n = rng.randint(0, 4)
        a = nc.random_element(rng, 2, 0, 4, homogeneous=n)
        for j in range(n + 1):
            al = nc.alpha_j(a, j, side)
            assert al == nc.alpha_j_direct(a, j, side)
            assert np.linalg.eigvalsh(nc.mat_float(al, j)).min() >= -1e-10
            # <alpha x d, d> >= 0 for a random d
            d = nc.random_element(rng, 2, 0, 3, homogeneous=2 * j)
            assert trace(star(nc.times_j(al, d, j), involution(d))).sign() >= 0 or not d


def test_norm_bound_examples():
    assert nc.left_mult_norm_bound(GrElement.one(2)) == pytest.approx(1.0)
    assert nc.left_mult_norm_bound(X(1)) == pytest.approx(2.0)


def test_mult_matrix_matches_star(rng):
    a = nc.random_element(rng, 2, 3, 3)
    N = 5
    m = nc.left_mult_matrix(a, N).toarray()
    mr = nc.left_mult_matrix(a, N, side="right").toarray()
    index = {w: i for i, w in enumerate(w for n in range(N + 1) for w in nc.words(2, n))}
    for w, i in index.items():
        b = GrElement.word(w, 2)
        for side, mat, prod in (("left", m, star(a, b)), ("right", mr, star(b, a))):
            col = np.zeros(len(index))
            for u, c in prod.items():
                if len(u) <= N:
                    col[index[u]] = float(c)
            np.testing.assert_allclose(mat[:, i], col, atol=1e-12, err_msg=side)


def test_mult_norm_below_bound(rng):
    for _ in range(5):
        a = nc.random_element(rng, 2, 3, 3)
        assert nc.left_mult_norm(a, 7) <= nc.left_mult_norm_bound(a) + 1e-9


def test_moments_against_catalan():
    x = X(1)
    p = GrElement.one(2)
    for n in range(17):
        assert trace(p) == (catalan(n // 2) if n % 2 == 0 else 0)
        p = star(p, x)


def test_json_round_trip(rng):
    a = nc.random_element(rng, 3, 4, 5)
    obj = json.loads(json.dumps(a.to_json()))
    assert obj["l"] == 3 and obj["delta"] == "3"
    assert GrElement.from_json(obj) == a
    z = nc.z_normalized(X(2))
    assert GrElement.from_json(json.loads(json.dumps(z.to_json()))) == z


def test_normal_form_prunes_zeros():
    a = GrElement(2, {(1,): 1, (2,): 0})
    assert a.support() == {(1,)}
    assert (a - a).support() == set()
    assert [w for w, _ in GrElement(2, {(2,): 1, (1, 1): 1, (1,): 1}).items()] == [(1,), (2,), (1, 1)]


def test_context_mismatch():
    with pytest.raises(ContextMismatch):
        X(1, 2) + X(1, 3)
    with pytest.raises(ValueError):
        GrElement.word((3,), 2)
    with pytest.raises(TypeError):
        X(1) * X(1)


# -- properties -----------------------------------------------------------------


@given(element2, element2, element2)
def test_star_associative(a, b, c):
    assert star(star(a, b), c) == star(a, star(b, c))


@given(element2, element2, element2)
def test_bullet_associative_and_distributive(a, b, c):
    assert bullet(bullet(a, b), c) == bullet(a, bullet(b, c))
    assert star(a, b + c) == star(a, b) + star(a, c)


@given(element2)
def test_units(a):
    one = GrElement.one(2)
    assert star(one, a) == a == star(a, one)
    assert bullet(one, a) == a == bullet(a, one)


@given(element2, element2)
def test_involution_anti_homomorphism(a, b):
    assert involution(star(a, b)) == star(involution(b), involution(a))
    assert involution(bullet(a, b)) == bullet(involution(b), involution(a))
    assert involution(involution(a)) == a


@given(element2, element2)
def test_trace_tracial_and_inner(a, b):
    assert trace(star(a, b)) == trace(star(b, a))
    assert inner(a, b) == trace(star(a, involution(b)))


@given(element2)
def test_positivity(a):
    assert trace(star(a, involution(a))).sign() >= 0
    assert trace(star(a, involution(a))) == inner(a, a)


@given(element2, element2)
def test_gradedness(a, b):
    for n, pa in a.homogeneous_parts().items():
        for m, pb in b.homogeneous_parts().items():
            allowed = {n + m - 2 * k for k in range(min(n, m) + 1)}
            assert star(pa, pb).degrees() <= allowed
            assert bullet(pa, pb).degrees() <= {n + m}


@given(element2, element2)
def test_even_part_closed(a, b):
    even = lambda x: GrElement(2, {w: c for w, c in x.items() if len(w) % 2 == 0})
    assert all(n % 2 == 0 for n in star(even(a), even(b)).degrees())


@given(st.integers(1, 2), st.lists(st.integers(1, 2), min_size=1, max_size=4).map(tuple), coeff, coeff)
def test_bullet_norm_multiplicative(n, w, c1, c2):
    a = GrElement(2, {w: c1, tuple(reversed(w)): c2})
    b = GrElement(2, {(1,) * n: c2, (2,) * n: 1})
    assert inner(bullet(a, b), bullet(a, b)) == inner(a, a) * inner(b, b)


def test_mixed_moments_oracle(rng):
    for _ in range(100):
        w = tuple(rng.randint(1, 2) for _ in range(rng.randint(0, 10)))
        p = GrElement.one(2)
        for x in w:
            p = star(p, X(x))
        assert trace(p) == count_matched_pairings(w)


def test_cstar_identity(rng):
    for _ in range(20):
        j = rng.randint(1, 2)
        c = nc.random_element(rng, 2, 0, 5, homogeneous=2 * j)
        lhs = np.linalg.norm(nc.mat_float(nc.times_j(c, involution(c), j), j), 2)
        rhs = np.linalg.norm(nc.mat_float(c, j), 2) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)
