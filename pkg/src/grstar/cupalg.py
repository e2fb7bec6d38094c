"""The cup subalgebra: the basis E_b, cup-action expansions, the L^2 decomposition
into E1 + E2 + E3, coarse correspondences over V, and the tower products.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import exact_linalg, kernels
from .ncpoly import (
    DegreeError,
    GrElement,
    bullet,
    cap_left,
    cap_right,
    cup,
    cup_pow,
    inner,
    involution,
    star,
    times_j,
    vn_basis,
    words,
    z_vector,
)
from .report import CheckReport, timed
from .scalars import Field, FieldScalar

__all__ = [
    "EbVector",
    "ExpansionError",
    "TowerElement",
    "alpha_model_check",
    "coarse_check_V",
    "coarse_check_V_basis",
    "cup_action_expand",
    "cup_action_families_check",
    "e123_decomposition",
    "eb_basis",
    "eb_rank_check",
    "eb_vector",
    "expected_cup_action",
    "gram",
    "include_up",
    "relative_commutant_check",
    "tower_trace",
    "tower_unit",
    "wedge_k",
]


class ExpansionError(ArithmeticError):
    """A cup action left a non-zero residual outside the E_b family."""


# -- E_b -----------------------------------------------------------------------


@dataclass(frozen=True)
class EbVector:
    """b.cup^r (kind "B") or cup^k . Z~_b . cup^r (kind "Z"), unnormalised."""

    kind: str
    k: int
    r: int
    element: GrElement
    norm_sq: FieldScalar

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.kind, self.k, self.r)

    @property
    def label(self) -> str:
        return f"BCup({self.r})" if self.kind == "B" else f"ZCup({self.k},{self.r})"

    @property
    def degree(self) -> int:
        return 1 + 2 * self.r if self.kind == "B" else 3 + 2 * (self.k + self.r)

    @property
    def grid_index(self) -> tuple[int, int]:
        return (0, self.r) if self.kind == "B" else (self.k + 1, self.r)

    @property
    def field(self) -> Field:
        return self.element.field

    def display_factor(self) -> FieldScalar:
        """element * factor is the displayed form (Z_b normalised, cups not)."""
        fld = self.field
        return fld.one if self.kind == "B" else 1 / fld.sqrt_delta_minus_inv()

    def unit_factor(self) -> FieldScalar:
        """element * factor has norm one."""
        fld = self.field
        if self.kind == "B":
            return 1 / fld.delta_power_half(self.r)
        return 1 / (fld.delta_power_half(self.k + self.r) * fld.sqrt_delta_minus_inv())

    def normalized(self) -> GrElement:
        return self.element.scale(self.unit_factor())


def _check_unit(b: GrElement) -> None:
    if not b.is_homogeneous(1) or not b:
        raise DegreeError("b must be a non-zero element of P_1")
    if inner(b, b) != 1:
        raise ValueError(f"b must be a unit vector, squared norm is {inner(b, b)}")


@lru_cache(maxsize=4096)
def eb_vector(b: GrElement, kind: str, k: int, r: int) -> EbVector:
    """One member of the E_b family with its exact squared norm."""
    if k < 0 or r < 0:
        raise ValueError("k and r must be non-negative")
    fld = b.field
    right = cup_pow(r, b.letters, fld)
    if kind == "B":
        if k:
            raise ValueError("BCup vectors carry no left cups")
        el = bullet(b, right)
    elif kind == "Z":
        z, _ = z_vector(b)
        el = bullet(bullet(cup_pow(k, b.letters, fld), z), right)
    else:
        raise ValueError(f"kind must be 'B' or 'Z', got {kind!r}")
    return EbVector(kind, k, r, el, inner(el, el))


def eb_keys_of_degree(n: int) -> list[tuple[str, int, int]]:
    if n < 1 or n % 2 == 0:
        return []
    keys = [("B", 0, (n - 1) // 2)]
    if n >= 3:
        s = (n - 3) // 2
        keys += [("Z", k, s - k) for k in range(s + 1)]
    return keys


def eb_basis(b: GrElement, degree_cap: int) -> list[EbVector]:
    """Every E_b vector of degree at most degree_cap, ordered by degree."""
    _check_unit(b)
    out = []
    for n in range(1, degree_cap + 1):
        out += [eb_vector(b, *key) for key in eb_keys_of_degree(n)]
    return out


def gram(vectors: Sequence[GrElement]) -> list[list[FieldScalar]]:
    return [[inner(u, v) for v in vectors] for u in vectors]


def is_identity(m: Sequence[Sequence[FieldScalar]]) -> tuple[bool, object]:
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if x != (1 if i == j else 0):
                return False, {"entry": [i, j], "value": x}
    return True, None


def eb_rank_check(b: GrElement, degree_cap: int) -> CheckReport:
    """The E_b vectors of each degree are independent: exact rank equals their count."""

    def run():
        for n in range(1, degree_cap + 1):
            vecs = [eb_vector(b, *key).element for key in eb_keys_of_degree(n)]
            if not vecs:
                continue
            support = sorted({w for v in vecs for w in v.support()})
            rows = [[v.coeff(w) for w in support] for v in vecs]
            rk = exact_linalg.rank(rows)
            if rk != len(vecs):
                return False, {"degree": n, "rank": rk, "count": len(vecs)}
        return True, None

    return timed("eb_rank", {"degree_cap": degree_cap, "l": b.letters}, run)


# -- cup action ----------------------------------------------------------------


def expected_cup_action(side: str, key: tuple[str, int, int], fld: Field) -> dict:
    """Coefficients of cup*x (left) or x*cup (right) in displayed form.

    Both sides use b.cup^r and cup^k . Z_b . cup^r with Z_b normalised; terms
    with a negative exponent are dropped.
    """
    kind, k, r = key
    one = fld.one
    d = fld.rational(fld.delta)
    out: dict = {}
    if side == "left":
        if kind == "B":
            out[("Z", 0, r)] = fld.sqrt_delta_minus_inv()
            out[("B", 0, r + 1)] = 1 / d
            out[("B", 0, r)] = one
            if r >= 1:
                out[("B", 0, r - 1)] = one
        elif k == 0:
            out[("Z", 1, r)] = one
            out[("Z", 0, r)] = one
            out[("B", 0, r)] = fld.sqrt_delta_minus_inv()
        else:
            out[("Z", k + 1, r)] = one
            out[("Z", k, r)] = one
            out[("Z", k - 1, r)] = d
    elif side == "right":
        out[(kind, k, r + 1)] = one
        out[(kind, k, r)] = one
        if r >= 1:
            out[(kind, k, r - 1)] = d
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return out


def _neighbours(key: tuple[str, int, int]) -> list[tuple[str, int, int]]:
    """E_b keys within grid distance two and degree distance two of key."""
    i0, r0 = (0, key[2]) if key[0] == "B" else (key[1] + 1, key[2])
    out = []
    for i in range(max(0, i0 - 2), i0 + 3):
        for r in range(max(0, r0 - 2), r0 + 3):
            if abs(i - i0) + abs(r - r0) > 2:
                continue
            out.append(("B", 0, r) if i == 0 else ("Z", i - 1, r))
    return out


def _expand_raw(side: str, x: EbVector, b: GrElement) -> dict:
    """Coefficients of the cup action on x.element over unnormalised E_b elements."""
    c = cup(b.letters, b.field)
    y = star(c, x.element) if side == "left" else star(x.element, c)
    coeffs: dict = {}
    residual = y
    for key in _neighbours(x.key):
        e = eb_vector(b, *key)
        if abs(e.degree - x.degree) > 2:
            continue
        coef = inner(y, e.element) / e.norm_sq
        if coef:
            coeffs[key] = coef
            residual = residual - e.element.scale(coef)
    if residual:
        w, v = residual.items()[0]
        raise ExpansionError(
            f"{side} cup action on {x.label} leaves a residual outside E_b (e.g. word {w} with {v})"
        )
    return coeffs


def cup_action_expand(side: str, x: EbVector, b: GrElement, form: str = "display") -> dict:
    """cup*x or x*cup re-expressed exactly in the E_b family.

    form="display" uses the displayed vectors (b.cup^r, cup^k.Z_b.cup^r) for
    both input and output; form="unit" uses the orthonormal basis.
    """
    raw = _expand_raw(side, x, b)
    out = {}
    for key, c in raw.items():
        e = eb_vector(b, *key)
        if form == "display":
            out[key] = c * x.display_factor() / e.display_factor()
        elif form == "unit":
            out[key] = c * x.unit_factor() / e.unit_factor()
        else:
            raise ValueError(f"form must be 'display' or 'unit', got {form!r}")
    return out


def cup_action_families_check(b: GrElement, kmax: int, rmax: int) -> CheckReport:
    """Every displayed cup-action identity for k <= kmax, r <= rmax, both sides."""
    _check_unit(b)

    def run():
        count = 0
        keys = [("B", 0, r) for r in range(rmax + 1)]
        keys += [("Z", k, r) for k in range(kmax + 1) for r in range(rmax + 1)]
        for side in ("left", "right"):
            for key in keys:
                got = cup_action_expand(side, eb_vector(b, *key), b)
                want = expected_cup_action(side, key, b.field)
                if got != want:
                    return False, {
                        "side": side,
                        "vector": eb_vector(b, *key).label,
                        "got": {str(k): v for k, v in got.items()},
                        "expected": {str(k): v for k, v in want.items()},
                    }
                count += 1
        return True, {"identities": count}

    return timed("cup_action_families", {"kmax": kmax, "rmax": rmax, "l": b.letters}, run)


def alpha_model_check(grid_cap: int, letters: int = 2, b: GrElement | None = None) -> CheckReport:
    """The normalised cup generator (cup - 1)/sqrt(delta) acts on the E_b grid as
    alpha + (s+s*) x 1 from the left and as 1 x (s+s*) from the right, exactly."""
    from .spectral import alpha_matrix_exact, free_jacobi_exact

    if grid_cap < 2:
        raise ValueError("grid_cap must be at least 2")
    b = b if b is not None else GrElement.letter(1, letters)
    _check_unit(b)
    fld = b.field
    g = grid_cap
    left_model = alpha_matrix_exact(fld.delta, g, g)
    jac = free_jacobi_exact(fld, g)
    inv_root = 1 / fld.sqrt_delta()

    def index(key):
        i, r = (0, key[2]) if key[0] == "B" else (key[1] + 1, key[2])
        return i * g + r if i < g and r < g else None

    def run():
        for i in range(g):
            for r in range(g):
                key = ("B", 0, r) if i == 0 else ("Z", i - 1, r)
                src = i * g + r
                x = eb_vector(b, *key)
                for side in ("left", "right"):
                    col = {}
                    for tkey, c in cup_action_expand(side, x, b, form="unit").items():
                        t = index(tkey)
                        if t is not None:
                            col[t] = c
                    col[src] = col.get(src, fld.zero) - 1
                    for t in range(g * g):
                        got = col.get(t, fld.zero) * inv_root
                        if side == "left":
                            want = left_model[t][src]
                        else:
                            ti, tr = divmod(t, g)
                            want = jac[tr][r] if ti == i else fld.zero
                        if got != want:
                            return False, {
                                "side": side,
                                "row": list(divmod(t, g)),
                                "column": [i, r],
                                "got": got,
                                "expected": want,
                            }
        return True, {"grid": [g, g]}

    return timed("alpha_model", {"grid_cap": grid_cap, "l": letters, "delta": fld.delta}, run)


# -- E1 + E2 + E3 and coarse correspondences -------------------------------------


def _in_v(v: GrElement) -> bool:
    if not v.is_homogeneous() or not v or v.degree() < 2:
        return False
    return not cap_left(v) and not cap_right(v)


def _cupped(v: GrElement, k: int, r: int) -> GrElement:
    fld = v.field
    return bullet(bullet(cup_pow(k, v.letters, fld), v), cup_pow(r, v.letters, fld))


def coarse_check_V(v: GrElement, v2: GrElement, k: int, r: int, k2: int, r2: int) -> bool:
    """<cup^k.v.cup^r, cup^k2.v2.cup^r2> = delta^(k+r) [k=k2][r=r2] <v, v2>."""
    if not (_in_v(v) and _in_v(v2)):
        raise ValueError("coarse_check_V needs inputs killed by both caps")
    lhs = inner(_cupped(v, k, r), _cupped(v2, k2, r2))
    if (k, r) != (k2, r2):
        return lhs == 0
    return lhs == inner(v, v2) * v.field.rational(v.field.delta) ** (k + r)


def coarse_check_V_basis(letters: int = 2, degrees: Iterable[int] = (2, 3), cap: int = 4) -> CheckReport:
    """coarse_check_V over an exact basis of the given V_n, all k, r, k2, r2 <= cap."""
    degrees = tuple(degrees)

    def run():
        basis = [v for n in degrees for v in vn_basis(letters, n)]
        kr = [(k, r) for k in range(cap + 1) for r in range(cap + 1)]
        cupped = {(i, k, r): _cupped(v, k, r) for i, v in enumerate(basis) for k, r in kr}
        fld = basis[0].field if basis else None
        checks = 0
        for i, v in enumerate(basis):
            for j, v2 in enumerate(basis):
                base = inner(v, v2)
                for k, r in kr:
                    a = cupped[(i, k, r)]
                    for k2, r2 in kr:
                        checks += 1
                        if v.degree() + 2 * (k + r) != v2.degree() + 2 * (k2 + r2):
                            continue  # different grades are orthogonal by construction
                        lhs = inner(a, cupped[(j, k2, r2)])
                        want = base * fld.rational(fld.delta) ** (k + r) if (k, r) == (k2, r2) else 0
                        if lhs != want:
                            return False, {"pair": [i, j], "k,r": [k, r], "k2,r2": [k2, r2], "got": lhs}
        return True, {"basis_size": len(basis), "checks": checks}

    return timed("coarse_V", {"l": letters, "degrees": list(degrees), "cap": cap}, run)


def e123_decomposition(n: int, letters: int = 2) -> dict:
    """Exact dimensions of P_n inside E1 (cups), E2 (bimodule of P_1) and E3 (bimodule of V)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    fld = GrElement.one(letters).field
    e1 = [cup_pow(n // 2, letters, fld)] if n % 2 == 0 else []
    e2: list[GrElement] = []
    for i in range(1, letters + 1):
        b = GrElement.letter(i, letters, fld)
        e2 += [eb_vector(b, *key).element for key in eb_keys_of_degree(n)]
    e3: list[GrElement] = []
    for m in range(2, n + 1):
        if (n - m) % 2:
            continue
        s = (n - m) // 2
        for v in vn_basis(letters, m, fld):
            e3 += [_cupped(v, k, s - k) for k in range(s + 1)]
    all_words = list(words(letters, n))

    def rank_of(vecs):
        if not vecs:
            return 0
        return exact_linalg.rank([[v.coeff(w).q for w in all_words] for v in vecs])

    dims = [rank_of(e1), rank_of(e2), rank_of(e3)]
    orthogonal = all(
        inner(x, y) == 0 for xs, ys in ((e1, e2), (e1, e3), (e2, e3)) for x in xs for y in ys
    )
    total = letters ** n
    return {
        "n": n,
        "l": letters,
        "dims": dims,
        "total": total,
        "orthogonal": orthogonal,
        "pass": orthogonal and sum(dims) == total,
    }


# -- the tower Gr_k(P) -------------------------------------------------------------


@dataclass(frozen=True)
class TowerElement:
    """Element of Gr_k(P): every word splits as (left k | middle | right k)."""

    k: int
    element: GrElement
    mirror: bool = False

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        for w, _ in self.element.items():
            if len(w) < 2 * self.k:
                raise DegreeError(f"word {w} is shorter than 2k = {2 * self.k}")

    @property
    def letters(self) -> int:
        return self.element.letters

    def segments(self):
        k = self.k
        for w, c in self.element.items():
            yield (w[:k], w[k: len(w) - k], w[len(w) - k:]), c

    def __add__(self, other: "TowerElement") -> "TowerElement":
        _same_tower(self, other)
        return TowerElement(self.k, self.element + other.element, self.mirror)

    def __sub__(self, other: "TowerElement") -> "TowerElement":
        _same_tower(self, other)
        return TowerElement(self.k, self.element - other.element, self.mirror)

    def scale(self, c) -> "TowerElement":
        return TowerElement(self.k, self.element.scale(c), self.mirror)

    def adjoint(self) -> "TowerElement":
        return TowerElement(self.k, involution(self.element), self.mirror)

    def __str__(self) -> str:
        parts = []
        for (l, m, r), c in self.segments():
            fmt = lambda s: "".join(f"X{x}" for x in s) or "1"
            coef = "" if c == 1 else f"{c}*"
            parts.append(f"{coef}({fmt(l)}|{fmt(m)}|{fmt(r)})")
        return " + ".join(parts) or "0"


def _same_tower(a: TowerElement, b: TowerElement) -> None:
    if a.k != b.k:
        raise ValueError(f"tower levels differ: k={a.k} vs k={b.k}")
    if a.mirror != b.mirror:
        raise ValueError("cannot mix mirrored and unmirrored tower conventions")
    a.element.same_context(b.element)


def _wedge_mirror(a_items, b_items, k, acc):
    for u, ca in a_items:
        nu = len(u)
        ra, lead, mid_a = u[nu - k:], u[:k], u[k: nu - k]
        for v, cb in b_items:
            if v[:k] != ra:
                continue
            nv = len(v)
            mid_b, tail = v[k: nv - k], v[nv - k:]
            c = ca * cb
            for m in kernels.star_words(mid_a, mid_b):
                w = lead + m + tail
                acc[w] = acc[w] + c if w in acc else c
    return acc


def wedge_k(a: TowerElement, b: TowerElement) -> TowerElement:
    """Glue through-strands, then star-contract the middles."""
    _same_tower(a, b)
    x, y = a.element, b.element
    rational = x.is_rational() and y.is_rational()
    xi, yi = x._kernel_items(rational), y._kernel_items(rational)
    if a.mirror:
        acc = _wedge_mirror(xi, yi, a.k, {})
    else:
        acc = kernels.wedge_accumulate(xi, yi, a.k, {})
    return TowerElement(a.k, GrElement._wrap(x.letters, x.field, acc), a.mirror)


def tower_unit(k: int, letters: int, fld: Field | None = None, mirror: bool = False) -> TowerElement:
    terms = {u + (u if mirror else u[::-1]): 1 for u in words(letters, k)}
    return TowerElement(k, GrElement(letters, terms, fld), mirror)


def include_up(a: TowerElement) -> TowerElement:
    """Add one through-strand on each side."""
    acc: dict = {}
    l = a.letters
    for w, c in a.element.items():
        for i in range(1, l + 1):
            out = (i,) + w + (i,) if not a.mirror else (i,) + w[: len(w) - a.k] + (i,) + w[len(w) - a.k:]
            acc[out] = c
    return TowerElement(a.k + 1, GrElement._wrap(l, a.element.field, acc), a.mirror)


def tower_trace(a: TowerElement) -> FieldScalar:
    """tau_k(a) = delta^-k <a, 1_k>, normalised so that tau_k(1_k) = 1."""
    fld = a.element.field
    unit = tower_unit(a.k, a.letters, fld, a.mirror)
    return inner(a.element, unit.element) / fld.rational(fld.delta) ** a.k


def random_tower_element(rng: random.Random, k: int, letters: int, max_middle: int, n_terms: int = 3, mirror: bool = False) -> TowerElement:
    terms: dict = {}
    for _ in range(n_terms):
        n = 2 * k + rng.randint(0, max_middle)
        w = tuple(rng.randint(1, letters) for _ in range(n))
        terms[w] = terms.get(w, Fraction(0)) + Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3))
    return TowerElement(k, GrElement(letters, terms), mirror)


def relative_commutant_check(k: int, degree_cap: int, letters: int = 2, mirror: bool = False) -> CheckReport:
    """Pure through-strand elements (u||v) commute with the image of Gr(P) in
    level k and multiply like the x-product of P_2k (matrix units)."""

    def run():
        if k == 0:
            return True, {"note": "level 0 commutant is the scalars"}
        fld = GrElement.one(letters).field
        units = [
            TowerElement(k, GrElement.word(u + v, letters, 1, fld), mirror)
            for u in words(letters, k)
            for v in words(letters, k)
        ]
        for p, q in itertools.product(units, repeat=2):
            got = wedge_k(p, q).element
            if mirror:
                (u, v), (u2, v2) = [(next(iter(x.element.support()))[:k], next(iter(x.element.support()))[k:]) for x in (p, q)]
                want = GrElement.word(u + v2, letters, 1, fld) if v == u2 else GrElement.zero(letters, fld)
            else:
                want = times_j(p.element, q.element, k)
            if got != want:
                return False, {"table_entry": [str(p), str(q)], "got": str(got), "expected": str(want)}
        checked = 0
        for n in range(degree_cap + 1):
            for w in words(letters, n):
                x = TowerElement(0, GrElement.word(w, letters, 1, fld), mirror)
                for _ in range(k):
                    x = include_up(x)
                for e in units:
                    if wedge_k(e, x).element != wedge_k(x, e).element:
                        return False, {"unit": str(e), "word": list(w)}
                checked += 1
        return True, {"matrix_units": len(units), "words_checked": checked}

    return timed("relative_commutant", {"k": k, "degree_cap": degree_cap, "l": letters, "mirror": mirror}, run)
