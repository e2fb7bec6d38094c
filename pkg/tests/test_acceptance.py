"""Acceptance criteria 1-14, one test each, at the stated tolerances.

Every test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary.  Run just this file with

    pytest tests/test_acceptance.py -v
"""

import random
import time
from fractions import Fraction

import numpy as np

from grstar import cupalg, ncpoly, spectral, tangle
from grstar.cupalg import TowerElement, include_up, tower_trace, tower_unit, wedge_k
from grstar.ncpoly import GrElement, bullet, cup, inner, involution, star, trace
from grstar.oracles import catalan, count_matched_pairings, jacobi_moment, noncrossing_pairings
from grstar.verify import _random_composite

SEED = 20261016


def word(*letters, l=2):
    return GrElement.word(letters, l)


def test_01_intro_identity(criterion):
    with criterion(1, "intro identity, exact, < 1 ms") as c:
        a, b = word(1, 2, 3, l=3), word(3, 2, l=3)
        want = word(1, 2, 3, 3, 2, l=3) + word(1, 2, 2, l=3) + word(1, l=3)
        assert star(a, b) == want
        best = min(_timed(lambda: star(a, b)) for _ in range(50))
        c.detail = f"best of 50: {best * 1e3:.3f} ms"
        assert best < 1e-3


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def test_02_semicircle_moments(criterion):
    with criterion(2, "trace(X1^2n) = Catalan(n), n <= 8, three-way, < 10 s") as c:
        t0 = time.perf_counter()
        x = GrElement.letter(1, 2)
        p = GrElement.one(2)
        for n in range(17):
            if n % 2 == 0:
                engine = trace(p)
                pairings = sum(1 for _ in noncrossing_pairings(range(n)))
                paths = jacobi_moment(n)
                assert engine == pairings == paths == catalan(n // 2), n
            p = star(p, x)
        elapsed = time.perf_counter() - t0
        c.detail = f"{elapsed:.2f} s"
        assert elapsed < 10


def test_03_mixed_moments(criterion):
    with criterion(3, "200 random words, star trace = matched pairings, < 30 s") as c:
        rng = random.Random(SEED + 3)
        t0 = time.perf_counter()
        letters = [GrElement.letter(i, 2) for i in (1, 2)]
        nonzero = 0
        for _ in range(200):
            w = ncpoly.random_word(rng, 2, 10)
            p = GrElement.one(2)
            for i in w:
                p = star(p, letters[i - 1])
            want = count_matched_pairings(w)
            assert trace(p) == want, w
            nonzero += want != 0
        elapsed = time.perf_counter() - t0
        c.detail = f"{elapsed:.2f} s, {nonzero} non-zero moments"
        assert elapsed < 30


def test_04_eb_orthonormal(criterion):
    with criterion(4, "normalized E_b Gram up to degree 10 is the identity") as c:
        b = GrElement.letter(1, 2)
        vecs = cupalg.eb_basis(b, 10)
        ok, witness = cupalg.is_identity(cupalg.gram([v.normalized() for v in vecs]))
        assert ok, witness
        z = ncpoly.z_normalized(b)
        assert inner(z, z) == 1
        assert inner(bullet(cup(2), b), bullet(b, cup(2))) == 1
        c.detail = f"{len(vecs)} vectors"


def test_05_cup_action(criterion):
    with criterion(5, "cup-action families k,r <= 6 and alpha model on an 8x8 grid") as c:
        b = GrElement.letter(1, 2)
        fam = cupalg.cup_action_families_check(b, 6, 6)
        assert fam, fam.witness
        model = cupalg.alpha_model_check(8, 2)
        assert model, model.witness
        c.detail = f"{fam.witness['identities']} identities, {fam.seconds + model.seconds:.1f} s"


def test_06_coarse_v(criterion):
    with criterion(6, "coarse V correspondence on a basis of V2+V3, k,r <= 4") as c:
        rep = cupalg.coarse_check_V_basis(2, (2, 3), 4)
        assert rep, rep.witness
        c.detail = f"basis size {rep.witness['basis_size']}"


def test_07_s_polynomials(criterion):
    with criterion(7, "S_n,t(c_t) e0 = e_n exact, n <= 30, delta = 2") as c:
        ts = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)]
        for t in ts:
            for n in range(31):
                assert spectral.s_poly_check(n, t, 2), (n, t)
        c.detail = f"{31 * len(ts)} cases"


def test_08_chebyshev(criterion):
    with criterion(8, "Chebyshev P_n orthonormal for the semicircle, n,m <= 10") as c:
        phi = spectral.MomentFunctional()
        for n in range(11):
            for m in range(11):
                assert phi.pair(spectral.chebyshev_P(n), spectral.chebyshev_P(m)) == (n == m)
        c.detail = "121 pairs"


def test_09_confinement(criterion):
    with criterion(9, "c_t spectra in [-2,2], atoms <= 0.01 and decreasing, < 60 s") as c:
        t0 = time.perf_counter()
        rep = spectral.confinement_check(
            ts=(-2, -1, 0, 1, 2), deltas=(2, 3), Ns=(250, 500, 1000, 2000), tol=1e-9, atom_cap=0.01, noise=0.10
        )
        elapsed = time.perf_counter() - t0
        assert rep, rep.witness
        c.detail = f"largest atom at N=2000: {rep.witness['largest_atom_at_max_N']:.4g}, {elapsed:.1f} s"
        assert elapsed < 60


def test_10_outlier_bound(criterion):
    with criterion(10, "h(z) inequality on 100 points of (2, 6]") as c:
        grid = spectral.default_zgrid(100, 6.0)
        assert len(grid) == 100 and grid.min() > 2 and grid.max() == 6
        margins = []
        for delta in (2, 3):
            for t in (-2, -1, 0, 1, 2):
                rep = spectral.no_outlier_check(t, delta, grid)
                assert rep, rep.witness
                margins.append(rep.witness["margin"])
        c.detail = f"smallest margin {min(margins):.4g}"
        assert min(margins) > 0


def test_11_multiplication_bound(criterion):
    with criterion(11, "compressed multiplication norm below the bound; alpha_j PSD") as c:
        rng = random.Random(SEED + 11)
        worst_gap, worst_eig = -np.inf, np.inf
        for _ in range(50):
            a = ncpoly.random_element(rng, 2, 4, n_terms=4)
            norm = ncpoly.left_mult_norm(a, 12)
            bound = ncpoly.left_mult_norm_bound(a)
            worst_gap = max(worst_gap, norm - bound)
            assert norm <= bound + 1e-9, (str(a), norm, bound)
            for n, part in a.homogeneous_parts().items():
                for side in ("left", "right"):
                    for j in range(n + 1):
                        al = ncpoly.alpha_j(part, j, side)
                        ev = float(np.linalg.eigvalsh(ncpoly.mat_float(al, j)).min())
                        worst_eig = min(worst_eig, ev)
                        assert ev >= -1e-10, (str(part), j, side, ev)
        c.detail = f"max norm - bound {worst_gap:.3g}, min alpha eigenvalue {worst_eig:.3g}"


def test_12_tangles(criterion):
    with criterion(12, "tangle evaluator vs direct operations, composition, loops") as c:
        rng = random.Random(SEED + 12)
        l = 2
        for _ in range(100):
            n, m = rng.randint(0, 4), rng.randint(0, 4)
            a = ncpoly.random_element(rng, l, 0, 3, homogeneous=n)
            b = ncpoly.random_element(rng, l, 0, 3, homogeneous=m)
            assert tangle.evaluate(tangle.star_tangle(n, m), [a, b], l) == star(a, b)
            assert tangle.evaluate(tangle.bullet_tangle(n, m), [a, b], l) == bullet(a, b)
            d = ncpoly.random_element(rng, l, 0, 3, homogeneous=n + 2)
            assert tangle.evaluate(tangle.cap_left_tangle(n + 2), [d], l) == ncpoly.cap_left(d)
            assert tangle.evaluate(tangle.cap_right_tangle(n + 2), [d], l) == ncpoly.cap_right(d)
            b2 = ncpoly.random_element(rng, l, 0, 3, homogeneous=n)
            got = tangle.evaluate(tangle.pairing_tangle(n), [a, involution(b2)], l)
            assert got == GrElement.one(l).scale(inner(a, b2))
        for _ in range(50):
            t, i, s, xs, ys = _random_composite(rng, l)
            glued = tangle.compose(t, i, s)
            assert tangle.validate(glued)
            lhs = tangle.evaluate(glued, xs[: i - 1] + ys + xs[i:], l)
            rhs = tangle.evaluate(t, xs[: i - 1] + [tangle.evaluate(s, ys, l)] + xs[i:], l)
            assert lhs == rhs
            base = tangle.evaluate(t, xs, l)
            assert tangle.evaluate(tangle.add_loop(t), xs, l) == base.scale(l)
        loop = tangle.compose(tangle.cap_tangle(), 1, tangle.cup_tangle())
        assert loop.loops == 1 and tangle.evaluate(loop, [], l) == GrElement.one(l).scale(l)
        c.detail = "100 inputs per operation, 50 composites"


def test_13_tower(criterion):
    with criterion(13, "tower: wedge_0 = star, associativity, trace, inclusion, matrix units") as c:
        rng = random.Random(SEED + 13)
        for _ in range(200):
            a = cupalg.random_tower_element(rng, 0, 2, 5)
            b = cupalg.random_tower_element(rng, 0, 2, 5)
            assert wedge_k(a, b).element == star(a.element, b.element)
        for k in (0, 1, 2):
            unit = tower_unit(k, 2)
            assert tower_trace(unit) == 1
            assert include_up(unit).element == tower_unit(k + 1, 2).element
            for _ in range(60):
                a, b, d = (cupalg.random_tower_element(rng, k, 2, 3) for _ in range(3))
                ab = wedge_k(a, b)
                assert wedge_k(ab, d).element == wedge_k(a, wedge_k(b, d)).element
                assert tower_trace(ab) == tower_trace(wedge_k(b, a))
                assert include_up(ab).element == wedge_k(include_up(a), include_up(b)).element
                assert tower_trace(include_up(a)) == tower_trace(a)
        rep = cupalg.relative_commutant_check(1, 6, 2)
        assert rep, rep.witness
        c.detail = f"{rep.witness['matrix_units']} matrix units, {rep.witness['words_checked']} words"


def test_14_axioms(criterion):
    with criterion(14, "associativity, traciality, anti-homomorphism, positivity (300 each)") as c:
        rng = random.Random(SEED + 14)
        for _ in range(300):
            l = rng.choice((2, 3))
            a, b, d = (ncpoly.random_element(rng, l, 4) for _ in range(3))
            assert star(star(a, b), d) == star(a, star(b, d))
            assert trace(star(a, b)) == trace(star(b, a))
            assert involution(star(a, b)) == star(involution(b), involution(a))
            assert trace(star(a, involution(a))).sign() >= 0
        c.detail = "300 exact cases each"
