"""Property suites behind ``grstar verify``.

Each check is a top-level function cfg -> CheckReport with its own RNG
stream derived from (seed, check name), so results do not depend on which
checks run or in what order.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import cupalg, ncpoly, oracles, spectral, tangle
from .ncpoly import GrElement, bullet, inner, involution, random_element, star, trace
from .report import CheckReport, timed

SUITES = ("ncpoly", "tangle", "cupalg", "spectral")


@dataclass(frozen=True)
class VerifyConfig:
    letters: int = 2
    seed: int = 0
    cases: int = 100
    max_degree: int = 6
    truncation: int = 2000
    mult_truncation: int = 8
    grid: int = 5
    ts: tuple = (-2, -1, 0, 1, 2)
    deltas: tuple = (2, 3)

    def rng(self, name: str) -> random.Random:
        return random.Random(f"{self.seed}:{name}")


def _params(cfg: VerifyConfig, **extra) -> dict:
    out = {"letters": cfg.letters, "seed": cfg.seed}
    out.update(extra)
    return out


def _first_failure(cases, predicate):
    """(True, count) or (False, witness) for the first case that fails."""
    n = 0
    for case in cases:
        ok = predicate(*case)
        if not ok:
            return False, {"case": n, "inputs": [str(x) for x in case]}
        n += 1
    return True, {"cases": n}


# -- ncpoly ------------------------------------------------------------------------


def check_intro_identity(cfg: VerifyConfig) -> CheckReport:
    def run():
        w = lambda s: GrElement.word(s, 3)
        got = star(w((1, 2, 3)), w((3, 2)))
        want = w((1, 2, 3, 3, 2)) + w((1, 2, 2)) + w((1,))
        return got == want, {"value": str(got)}

    return timed("intro_identity", {}, run)


def _rand(cfg, rng, deg=None, hom=None, terms=3):
    return random_element(rng, cfg.letters, deg if deg is not None else cfg.max_degree, terms, homogeneous=hom)


def check_star_associative(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("star_assoc")
    cases = [tuple(_rand(cfg, rng, 4) for _ in range(3)) for _ in range(cfg.cases)]
    return timed(
        "star_associative",
        _params(cfg, cases=cfg.cases),
        lambda: _first_failure(cases, lambda a, b, c: star(star(a, b), c) == star(a, star(b, c))),
    )


def check_units(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("units")
    one = GrElement.one(cfg.letters)
    cases = [(_rand(cfg, rng),) for _ in range(cfg.cases)]
    return timed(
        "units",
        _params(cfg, cases=cfg.cases),
        lambda: _first_failure(
            cases, lambda a: star(one, a) == a == star(a, one) and bullet(one, a) == a == bullet(a, one)
        ),
    )


def check_involution(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("involution")
    cases = [(_rand(cfg, rng), _rand(cfg, rng)) for _ in range(cfg.cases)]

    def ok(a, b):
        return involution(star(a, b)) == star(involution(b), involution(a)) and involution(
            bullet(a, b)
        ) == bullet(involution(b), involution(a))

    return timed("involution_antihom", _params(cfg, cases=cfg.cases), lambda: _first_failure(cases, ok))


def check_tracial(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("tracial")
    cases = [(_rand(cfg, rng), _rand(cfg, rng)) for _ in range(cfg.cases)]
    return timed(
        "tracial",
        _params(cfg, cases=cfg.cases),
        lambda: _first_failure(cases, lambda a, b: trace(star(a, b)) == trace(star(b, a))),
    )


def check_positive(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("positive")
    cases = [(_rand(cfg, rng, min(cfg.max_degree, 8), terms=4),) for _ in range(cfg.cases)]
    return timed(
        "positivity",
        _params(cfg, cases=cfg.cases),
        lambda: _first_failure(cases, lambda a: trace(star(a, involution(a))).sign() >= 0),
    )


def check_inner_is_trace(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("inner_trace")
    cases = [(_rand(cfg, rng), _rand(cfg, rng)) for _ in range(cfg.cases)]
    return timed(
        "inner_equals_trace",
        _params(cfg, cases=cfg.cases),
        lambda: _first_failure(cases, lambda a, b: inner(a, b) == trace(star(a, involution(b)))),
    )


def check_moments(cfg: VerifyConfig) -> CheckReport:
    def run():
        x = GrElement.letter(1, cfg.letters)
        p = GrElement.one(cfg.letters)
        rows = []
        for n in range(17):
            eng = trace(p)
            want = spectral.semicircle_moments(n)
            pair = oracles.count_matched_pairings((1,) * n)
            path = oracles.jacobi_moment(n)
            rows.append([n, str(eng), str(want)])
            if not (eng == want == pair == path):
                return False, {"n": n, "engine": eng, "catalan": want, "pairings": pair, "paths": path}
            p = star(p, x)
        return True, {"moments": rows}

    return timed("semicircle_moments", _params(cfg, upto=16), run)


def check_mixed_moments(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("mixed")

    def run():
        for i in range(cfg.cases):
            n = rng.randint(0, 10)
            w = tuple(rng.randint(1, cfg.letters) for _ in range(n))
            p = GrElement.one(cfg.letters)
            for x in w:
                p = star(p, GrElement.letter(x, cfg.letters))
            if trace(p) != oracles.count_matched_pairings(w):
                return False, {"word": list(w), "engine": trace(p)}
        return True, {"cases": cfg.cases}

    return timed("mixed_moments", _params(cfg, cases=cfg.cases), run)


def check_alpha_psd(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("alpha_psd")

    def run():
        worst = 0.0
        for _ in range(cfg.cases // 2 or 1):
            n = rng.randint(0, 4)
            a = random_element(rng, cfg.letters, 0, 4, homogeneous=n)
            for side in ("left", "right"):
                for j in range(n + 1):
                    al = ncpoly.alpha_j(a, j, side)
                    if al != ncpoly.alpha_j_direct(a, j, side):
                        return False, {"element": str(a), "j": j, "side": side, "reason": "tangle and formula disagree"}
                    ev = float(np.linalg.eigvalsh(ncpoly.mat_float(al, j)).min())
                    worst = min(worst, ev)
                    if ev < -1e-10:
                        return False, {"element": str(a), "j": j, "side": side, "min_eig": ev}
        return True, {"min_eig": worst}

    return timed("alpha_psd", _params(cfg, cases=cfg.cases // 2 or 1), run)


def check_mult_bound(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("mult_bound")
    count = max(cfg.cases // 10, 3)

    def run():
        worst = -np.inf
        for _ in range(count):
            a = random_element(rng, cfg.letters, 4, 3)
            for side in ("left", "right"):
                bound = ncpoly.left_mult_norm_bound(a, side)
                norm = ncpoly.left_mult_norm(a, cfg.mult_truncation, side)
                worst = max(worst, norm - bound)
                if norm > bound + 1e-9:
                    return False, {"element": str(a), "side": side, "norm": norm, "bound": bound}
        return True, {"max_norm_minus_bound": worst}

    return timed("mult_bound", _params(cfg, cases=count, truncation=cfg.mult_truncation), run)


def check_cstar_identity(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("cstar")

    def run():
        for _ in range(cfg.cases // 2 or 1):
            j = rng.randint(1, 2)
            c = random_element(rng, cfg.letters, 0, 5, homogeneous=2 * j)
            cc = ncpoly.times_j(c, involution(c), j)
            lhs = np.linalg.norm(ncpoly.mat_float(cc, j), 2)
            rhs = np.linalg.norm(ncpoly.mat_float(c, j), 2) ** 2
            if abs(lhs - rhs) > 1e-9 * max(1.0, rhs):
                return False, {"element": str(c), "lhs": lhs, "rhs": rhs}
            d = random_element(rng, cfg.letters, 0, 5, homogeneous=2 * j)
            if involution(ncpoly.times_j(c, d, j)) != ncpoly.times_j(involution(d), involution(c), j):
                return False, {"element": str(c), "reason": "x is not compatible with *"}
        return True, None

    return timed("cstar_identity", _params(cfg), run)


# -- tangle ------------------------------------------------------------------------


def check_tangle_products(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("tangle_products")
    l = cfg.letters

    def run():
        for _ in range(cfg.cases):
            n, m = rng.randint(0, 4), rng.randint(0, 4)
            a = random_element(rng, l, 0, 3, homogeneous=n)
            b = random_element(rng, l, 0, 3, homogeneous=m)
            if tangle.evaluate(tangle.star_tangle(n, m), [a, b], l) != star(a, b):
                return False, {"op": "star", "a": str(a), "b": str(b)}
            if tangle.evaluate(tangle.bullet_tangle(n, m), [a, b], l) != bullet(a, b):
                return False, {"op": "bullet", "a": str(a), "b": str(b)}
            c = random_element(rng, l, 0, 3, homogeneous=n + 2)
            if tangle.evaluate(tangle.cap_left_tangle(n + 2), [c], l) != ncpoly.cap_left(c):
                return False, {"op": "cap_left", "a": str(c)}
            if tangle.evaluate(tangle.cap_right_tangle(n + 2), [c], l) != ncpoly.cap_right(c):
                return False, {"op": "cap_right", "a": str(c)}
            b2 = random_element(rng, l, 0, 3, homogeneous=n)
            got = tangle.evaluate(tangle.pairing_tangle(n), [a, involution(b2)], l)
            if got != GrElement.one(l).scale(inner(a, b2)):
                return False, {"op": "pairing", "a": str(a), "b": str(b2)}
        if tangle.evaluate(tangle.cup_tangle(), [], l) != ncpoly.cup(l):
            return False, {"op": "cup"}
        return True, {"cases": cfg.cases}

    return timed("tangle_products", _params(cfg, cases=cfg.cases), run)


def _random_composite(rng: random.Random, l: int):
    k = rng.randint(1, 3)
    sizes = [rng.randint(0, 6) for _ in range(k)]
    n0 = rng.randint(0, 6)
    if (n0 + sum(sizes)) % 2:
        n0 += 1
    t = tangle.random_tangle(rng, n0, sizes)
    i = rng.randint(1, k)
    inner_sizes = [rng.randint(0, 4) for _ in range(rng.randint(0, 2))]
    if (sizes[i - 1] + sum(inner_sizes)) % 2:
        inner_sizes = inner_sizes[:-1] + [inner_sizes[-1] + 1] if inner_sizes else [1]
    s = tangle.random_tangle(rng, sizes[i - 1], inner_sizes)
    xs = [random_element(rng, l, 0, 2, homogeneous=m) for m in sizes]
    ys = [random_element(rng, l, 0, 2, homogeneous=m) for m in inner_sizes]
    return t, i, s, xs, ys


def check_tangle_composition(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("tangle_compose")
    l = cfg.letters
    count = max(cfg.cases // 2, 1)

    def run():
        for n in range(count):
            t, i, s, xs, ys = _random_composite(rng, l)
            glued = tangle.compose(t, i, s)
            if not tangle.validate(glued):
                return False, {"case": n, "reason": tangle.validate(glued).reason}
            lhs = tangle.evaluate(glued, xs[: i - 1] + ys + xs[i:], l)
            rhs = tangle.evaluate(t, xs[: i - 1] + [tangle.evaluate(s, ys, l)] + xs[i:], l)
            if lhs != rhs:
                return False, {"case": n, "outer": t.to_json(), "inner": s.to_json(), "disk": i}
        return True, {"cases": count}

    return timed("tangle_composition", _params(cfg, cases=count), run)


def check_tangle_loops_and_reflection(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("tangle_loops")
    l = cfg.letters

    def run():
        glued = tangle.compose(tangle.cap_tangle(), 1, tangle.cup_tangle())
        if glued.loops != 1 or tangle.evaluate(glued, [], l) != GrElement.one(l).scale(l):
            return False, {"reason": "cap on cup is not one loop"}
        for n in range(cfg.cases):
            t, _, _, xs, _ = _random_composite(rng, l)
            base = tangle.evaluate(t, xs, l)
            if tangle.evaluate(tangle.add_loop(t), xs, l) != base.scale(l):
                return False, {"case": n, "reason": "loop factor"}
            mirrored = tangle.evaluate(tangle.reflect(t), [involution(x) for x in xs], l)
            if mirrored != involution(base):
                return False, {"case": n, "reason": "reflection", "tangle": t.to_json()}
            k = rng.randint(0, 3)
            x = random_element(rng, l, 0, 3, homogeneous=2 * k)
            right = tangle.evaluate(tangle.trace_tangle(k, "right"), [x], l)
            left = tangle.evaluate(tangle.trace_tangle(k, "left"), [x], l)
            if left != right:
                return False, {"case": n, "reason": "spherical invariance"}
        return True, {"cases": cfg.cases}

    return timed("tangle_loops_reflection", _params(cfg, cases=cfg.cases), run)


# -- cupalg ------------------------------------------------------------------------


def check_eb_gram(cfg: VerifyConfig) -> CheckReport:
    def run():
        b = GrElement.letter(1, cfg.letters)
        vecs = cupalg.eb_basis(b, 10)
        ok, wit = cupalg.is_identity(cupalg.gram([v.normalized() for v in vecs]))
        if not ok:
            return ok, wit
        z = ncpoly.z_normalized(b)
        c = ncpoly.cup(cfg.letters)
        if inner(z, z) != 1 or inner(bullet(c, b), bullet(b, c)) != 1:
            return False, {"reason": "Z_b norm or cup pairing"}
        if not cupalg.eb_rank_check(b, 10):
            return False, {"reason": "rank"}
        return True, {"vectors": len(vecs)}

    return timed("eb_gram", _params(cfg, degree_cap=10), run)


def check_cup_families(cfg: VerifyConfig) -> CheckReport:
    r = cupalg.cup_action_families_check(GrElement.letter(1, cfg.letters), cfg.grid - 1, cfg.grid - 1)
    r.parameters["seed"] = cfg.seed
    return r


def check_alpha_model(cfg: VerifyConfig) -> CheckReport:
    return cupalg.alpha_model_check(cfg.grid, cfg.letters)


def check_coarse_v(cfg: VerifyConfig) -> CheckReport:
    return cupalg.coarse_check_V_basis(cfg.letters, (2, 3), 4)


def check_e123(cfg: VerifyConfig) -> CheckReport:
    def run():
        reports = [cupalg.e123_decomposition(n, cfg.letters) for n in range(cfg.max_degree + 1)]
        bad = [r for r in reports if not r["pass"]]
        return not bad, bad[0] if bad else {"dims": {r["n"]: r["dims"] for r in reports}}

    return timed("e123_decomposition", _params(cfg, upto=cfg.max_degree), run)


def check_tower(cfg: VerifyConfig) -> CheckReport:
    rng = cfg.rng("tower")
    l = cfg.letters

    def run():
        for _ in range(cfg.cases):
            a = random_element(rng, l, 4, 3)
            b = random_element(rng, l, 4, 3)
            w = cupalg.wedge_k(cupalg.TowerElement(0, a), cupalg.TowerElement(0, b))
            if w.element != star(a, b):
                return False, {"reason": "wedge_0 differs from star", "a": str(a), "b": str(b)}
        W = cupalg.wedge_k
        for k in range(3):
            unit = cupalg.tower_unit(k, l)
            for _ in range(max(cfg.cases // 3, 1)):
                a, b, c = (cupalg.random_tower_element(rng, k, l, 3) for _ in range(3))
                if W(W(a, b), c).element != W(a, W(b, c)).element:
                    return False, {"k": k, "reason": "associativity"}
                if cupalg.tower_trace(W(a, b)) != cupalg.tower_trace(W(b, a)):
                    return False, {"k": k, "reason": "traciality"}
                if W(unit, a).element != a.element or W(a, unit).element != a.element:
                    return False, {"k": k, "reason": "unit"}
                up = cupalg.include_up
                if up(W(a, b)).element != W(up(a), up(b)).element:
                    return False, {"k": k, "reason": "include_up is not multiplicative"}
                if cupalg.tower_trace(up(a)) != cupalg.tower_trace(a):
                    return False, {"k": k, "reason": "include_up changes the trace"}
                if up(a.adjoint()).element != up(a).adjoint().element:
                    return False, {"k": k, "reason": "include_up does not commute with *"}
            if cupalg.include_up(unit).element != cupalg.tower_unit(k + 1, l).element:
                return False, {"k": k, "reason": "include_up is not unital"}
        for k in (1, 2):
            rep = cupalg.relative_commutant_check(k, 4, l)
            if not rep:
                return False, rep.witness
        return True, {"cases": cfg.cases}

    return timed("tower", _params(cfg, cases=cfg.cases), run)


# -- spectral ------------------------------------------------------------------------


def check_s_polys(cfg: VerifyConfig) -> CheckReport:
    def run():
        for t in (0, Fraction(1, 2), 1, 2):
            for n in range(31):
                if not spectral.s_poly_check(n, t, 2):
                    return False, {"t": str(t), "n": n}
        return True, {"n_max": 30}

    return timed("s_polynomials", {"delta": 2, "t": ["0", "1/2", "1", "2"]}, run)


def check_chebyshev(cfg: VerifyConfig) -> CheckReport:
    def run():
        phi = spectral.MomentFunctional()
        polys = [spectral.chebyshev_P(n) for n in range(11)]
        for n, m in itertools.product(range(11), repeat=2):
            if phi.pair(polys[n], polys[m]) != (1 if n == m else 0):
                return False, {"n": n, "m": m}
        if not oracles.hankel_psd([phi(i) for i in range(16)], 8):
            return False, {"reason": "Hankel matrix not positive"}
        return True, {"n_max": 10}

    return timed("chebyshev_orthonormal", {}, run)


def check_confinement(cfg: VerifyConfig) -> CheckReport:
    Ns = sorted({max(cfg.truncation // 8, 2), max(cfg.truncation // 4, 2), max(cfg.truncation // 2, 2), cfg.truncation})
    return spectral.confinement_check(cfg.ts, cfg.deltas, Ns)


def check_outliers(cfg: VerifyConfig) -> CheckReport:
    def run():
        margins = {}
        for t in cfg.ts:
            for d in cfg.deltas:
                rep = spectral.no_outlier_check(t, d)
                margins[f"t={t},delta={d}"] = rep.witness.get("margin") if rep.witness else None
                if not rep:
                    return False, rep.witness
        return True, {"margins": margins}

    return timed("outlier_bound", {"t": list(map(str, cfg.ts)), "delta": list(map(str, cfg.deltas))}, run)


def check_free_truncation(cfg: VerifyConfig) -> CheckReport:
    def run():
        N = 200
        mu = spectral.spectral_measure(spectral.free_jacobi(N))
        for n in range(0, N // 2, 2):
            m = mu.moment(n)
            c = oracles.catalan(n // 2)
            if abs(m - c) > 1e-9 * c:
                return False, {"n": n, "moment": m, "catalan": c}
        if abs(mu.total_weight - 1) > 1e-12:
            return False, {"total_weight": mu.total_weight}
        bound = spectral.pp_mass_bound(0, 2, 1000)
        return True, {"max_weight_ct_N1000": bound}

    return timed("free_truncation", {"N": 200}, run)


REGISTRY: dict[str, list[Callable[[VerifyConfig], CheckReport]]] = {
    "ncpoly": [
        check_intro_identity,
        check_star_associative,
        check_units,
        check_involution,
        check_tracial,
        check_positive,
        check_inner_is_trace,
        check_moments,
        check_mixed_moments,
        check_alpha_psd,
        check_mult_bound,
        check_cstar_identity,
    ],
    "tangle": [check_tangle_products, check_tangle_composition, check_tangle_loops_and_reflection],
    "cupalg": [
        check_eb_gram,
        check_cup_families,
        check_alpha_model,
        check_coarse_v,
        check_e123,
        check_tower,
    ],
    "spectral": [check_s_polys, check_chebyshev, check_confinement, check_outliers, check_free_truncation],
}


def _run_one(args) -> CheckReport:
    fn, cfg = args
    return fn(cfg)


def run_suite(suite: str = "all", cfg: VerifyConfig | None = None, jobs: int = 1) -> list[CheckReport]:
    """Run a suite; the report order is the registry order whatever the job count."""
    cfg = cfg or VerifyConfig()
    if suite == "all":
        fns = [fn for s in SUITES for fn in REGISTRY[s]]
    elif suite in REGISTRY:
        fns = REGISTRY[suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, [(fn, cfg) for fn in fns]))
    return [fn(cfg) for fn in fns]


def config_dict(cfg: VerifyConfig) -> dict:
    d = asdict(cfg)
    d["ts"] = [str(t) for t in cfg.ts]
    d["deltas"] = [str(x) for x in cfg.deltas]
    return d
