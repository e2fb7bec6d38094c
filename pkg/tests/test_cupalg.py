import random

import pytest

from grstar import cupalg
from grstar.cupalg import TowerElement, eb_basis, eb_vector, include_up, tower_trace, tower_unit, wedge_k
from grstar.exact_linalg import rank
from grstar.ncpoly import DegreeError, GrElement, cup, cup_pow, star, vn_basis, words
from grstar.scalars import field

X1 = GrElement.letter(1, 2)


def test_eb_basis_small():
    basis = eb_basis(X1, 1)
    assert [v.label for v in basis] == ["BCup(0)"]
    assert basis[0].norm_sq == 1
    found = {v.label: v.norm_sq for v in eb_basis(X1, 3)}
    assert found["BCup(1)"] == 2
    assert found["ZCup(0,0)"] == field(2).rational(3) / 2


@pytest.mark.parametrize("b", [X1, GrElement(2, {(1,): "3/5", (2,): "4/5"})])
def test_normalized_gram_is_identity(b):
    vecs = [v.normalized() for v in eb_basis(b, 8)]
    ok, witness = cupalg.is_identity(cupalg.gram(vecs))
    assert ok, witness


def test_gram_trivial():
    assert cupalg.gram([GrElement.one(2)]) == [[1]]
    ok, _ = cupalg.is_identity(cupalg.gram([GrElement.word(w, 2) for w in words(2, 3)]))
    assert ok


@pytest.mark.parametrize("n", range(1, 9))
def test_eb_degree_counts(n):
    keys = cupalg.eb_keys_of_degree(n)
    vecs = [eb_vector(X1, *k).element for k in keys]
    assert all(v.is_homogeneous(n) for v in vecs)
    assert rank([[v.coeff(w).q for w in words(2, n)] for v in vecs]) == len(keys)


def test_eb_rank_check():
    assert cupalg.eb_rank_check(X1, 7)


def test_non_unit_b_rejected():
    with pytest.raises(ValueError):
        cupalg.cup_action_families_check(X1.scale(2), 1, 1)
    with pytest.raises(DegreeError):
        cupalg.cup_action_families_check(cup(2), 1, 1)


def test_left_cup_on_b():
    fld = X1.field
    got = cupalg.cup_action_expand("left", eb_vector(X1, "B", 0, 0), X1)
    assert got == {("Z", 0, 0): fld.sqrt_delta_minus_inv(), ("B", 0, 1): fld.rational(1) / 2, ("B", 0, 0): fld.one}
    # and the expansion reassembles the star product
    y = star(cup(2), X1)
    total = GrElement.zero(2)
    for key, c in got.items():
        e = eb_vector(X1, *key)
        total = total + e.element.scale(c * e.display_factor())
    assert total == y


@pytest.mark.parametrize("side", ["left", "right"])
@pytest.mark.parametrize("key", [("B", 0, 0), ("B", 0, 2), ("Z", 0, 0), ("Z", 0, 1), ("Z", 1, 0), ("Z", 2, 2)])
def test_cup_action_families(side, key):
    got = cupalg.cup_action_expand(side, eb_vector(X1, *key), X1)
    assert got == cupalg.expected_cup_action(side, key, X1.field)


def test_cup_families_check_small():
    assert cupalg.cup_action_families_check(X1, 3, 3)


@pytest.mark.parametrize("letters", [2, 3])
def test_alpha_model(letters):
    report = cupalg.alpha_model_check(4, letters)
    assert report, report.witness


def test_alpha_model_entries():
    from grstar.spectral import alpha_matrix_exact

    fld = field(3)
    g = 4
    m = alpha_matrix_exact(3, g, g)
    d = fld.rational(3)
    for r in range(g):
        coupling = fld.sqrt_delta_minus_inv() / fld.sqrt_delta()
        assert coupling * coupling == 1 - 1 / (d * d)
        assert m[0 * g + r][1 * g + r] == coupling == m[1 * g + r][0 * g + r]
        if r + 1 < g:
            assert m[r][r + 1] == 1 / d == m[r + 1][r]
    for i in range(2, g):
        for r in range(g):
            for j in range(g):
                for r2 in range(g):
                    want = 1 if r == r2 and abs(i - j) == 1 else 0
                    if j >= 2 or (j == 1 and i == 2):
                        assert m[i * g + r][j * g + r2] == want


def test_coarse_v_examples():
    v2 = vn_basis(2, 2)
    v, w = v2[0], v2[-1]
    assert cupalg.coarse_check_V(v, w, 0, 0, 0, 0)
    assert cupalg.coarse_check_V(v, v, 1, 1, 1, 1)
    assert cupalg.coarse_check_V(v, v, 1, 0, 0, 1)
    assert cupalg.coarse_check_V_basis(2, (2, 3), 2)
    with pytest.raises(ValueError):
        cupalg.coarse_check_V(cup(2), v, 0, 0, 0, 0)


@pytest.mark.parametrize(
    "n, dims", [(0, [1, 0, 0]), (1, [0, 2, 0]), (2, [1, 0, 3]), (3, [0, 4, 4]), (4, [1, 0, 15]), (5, [0, 6, 26])]
)
def test_e123(n, dims):
    out = cupalg.e123_decomposition(n, 2)
    assert out["dims"] == dims and out["pass"] and out["total"] == 2 ** n


def test_e123_three_letters():
    for n in range(4):
        assert cupalg.e123_decomposition(n, 3)["pass"]


# -- tower -------------------------------------------------------------------------


@pytest.fixture(params=[False, True], ids=["default", "mirror"])
def mirror(request):
    return request.param


def test_wedge_zero_is_star(rng):
    for _ in range(100):
        a = cupalg.random_tower_element(rng, 0, 2, 5)
        b = cupalg.random_tower_element(rng, 0, 2, 5)
        assert wedge_k(a, b).element == star(a.element, b.element)


def test_wedge_example():
    a = TowerElement(1, GrElement.word((1, 1, 1), 2))
    got = wedge_k(a, a).element
    assert got == GrElement.word((1, 1, 1, 1), 2) + GrElement.word((1, 1), 2)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_tower_algebra(k, mirror, rng):
    unit = tower_unit(k, 2, mirror=mirror)
    assert tower_trace(unit) == 1
    assert include_up(unit).element == tower_unit(k + 1, 2, mirror=mirror).element
    for _ in range(40):
        a, b, c = (cupalg.random_tower_element(rng, k, 2, 3, mirror=mirror) for _ in range(3))
        assert wedge_k(wedge_k(a, b), c).element == wedge_k(a, wedge_k(b, c)).element
        assert wedge_k(unit, a).element == a.element == wedge_k(a, unit).element
        assert tower_trace(wedge_k(a, b)) == tower_trace(wedge_k(b, a))
        assert tower_trace(include_up(a)) == tower_trace(a)
        assert include_up(wedge_k(a, b)).element == wedge_k(include_up(a), include_up(b)).element
        assert wedge_k(a, b).adjoint().element == wedge_k(b.adjoint(), a.adjoint()).element


@pytest.mark.parametrize("k", [0, 1, 2])
def test_relative_commutant(k, mirror):
    report = cupalg.relative_commutant_check(k, 4 if k < 2 else 3, mirror=mirror)
    assert report, report.witness


def test_tower_errors():
    with pytest.raises(DegreeError):
        TowerElement(2, GrElement.word((1, 2), 2))
    a = TowerElement(1, GrElement.word((1, 2), 2))
    with pytest.raises(ValueError):
        wedge_k(a, TowerElement(0, GrElement.word((1, 2), 2)))
    with pytest.raises(ValueError):
        wedge_k(a, TowerElement(1, GrElement.word((1, 2), 2), mirror=True))


def test_tower_str():
    a = TowerElement(1, GrElement.word((1, 2, 2), 2))
    assert str(a) == "(X1|X2|X2)"
