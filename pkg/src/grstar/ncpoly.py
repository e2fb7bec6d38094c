"""Noncommutative polynomials as the unshaded planar algebra Gr(P).

Elements are finite linear combinations of words over the letters 1..l with
exact coefficients.  Words of each length form an orthonormal basis, so the
inner product is a coefficient sum and the trace is the coefficient of the
empty word.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import exact_linalg, kernels
from .scalars import ContextMismatch, Field, FieldScalar, as_fraction, field

Word = tuple  # tuple[int, ...], letters 1..l

__all__ = [
    "DegreeError",
    "GrElement",
    "alpha_j",
    "alpha_j_direct",
    "bullet",
    "cap_left",
    "cap_right",
    "cup",
    "cup_pow",
    "inner",
    "involution",
    "left_mult_matrix",
    "left_mult_norm",
    "left_mult_norm_bound",
    "mat",
    "mat_float",
    "random_element",
    "star",
    "star_power",
    "times_j",
    "trace",
    "vn_basis",
    "vn_project",
    "words",
    "z_vector",
]


class DegreeError(ValueError):
    """An operation received an element of the wrong degree."""


def words(l: int, n: int) -> Iterator[Word]:
    """All words of length n over 1..l in lexicographic order."""
    return itertools.product(range(1, l + 1), repeat=n)


def word_index(w: Sequence[int], l: int) -> int:
    idx = 0
    for x in w:
        idx = idx * l + (x - 1)
    return idx


class GrElement:
    """Immutable element of Gr(P) for the polynomial planar algebra on l letters."""

    __slots__ = ("_terms", "letters", "field")

    def __init__(self, letters: int, terms: Mapping[Word, object] | None = None, fld: Field | None = None):
        if letters < 1:
            raise ValueError("need at least one letter")
        self.letters = letters
        self.field = fld if fld is not None else field(letters)
        clean: dict[Word, FieldScalar] = {}
        for w, c in (terms or {}).items():
            w = tuple(int(x) for x in w)
            for x in w:
                if not 1 <= x <= letters:
                    raise ValueError(f"letter {x} out of range 1..{letters}")
            c = self.field.coerce(c)
            if w in clean:
                c = clean[w] + c
            if c:
                clean[w] = c
            else:
                clean.pop(w, None)
        self._terms = clean

    @classmethod
    def _wrap(cls, letters: int, fld: Field, acc: dict) -> "GrElement":
        obj = object.__new__(cls)
        obj.letters = letters
        obj.field = fld
        terms = {}
        for w, c in acc.items():
            if isinstance(c, Fraction):
                if c:
                    terms[w] = FieldScalar._raw(fld, c, Fraction(0), Fraction(0), Fraction(0))
            elif c:
                terms[w] = c
        obj._terms = terms
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, letters: int, fld: Field | None = None) -> "GrElement":
        return cls(letters, {}, fld)

    @classmethod
    def one(cls, letters: int, fld: Field | None = None) -> "GrElement":
        return cls(letters, {(): 1}, fld)

    @classmethod
    def word(cls, w: Sequence[int], letters: int, coeff=1, fld: Field | None = None) -> "GrElement":
        return cls(letters, {tuple(w): coeff}, fld)

    @classmethod
    def letter(cls, i: int, letters: int, fld: Field | None = None) -> "GrElement":
        return cls(letters, {(i,): 1}, fld)

    # -- inspection -------------------------------------------------------
    @property
    def delta(self) -> Fraction:
        return self.field.delta

    def items(self) -> list[tuple[Word, FieldScalar]]:
        """Terms in normal form: by degree, then lexicographically."""
        return sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def coeff(self, w: Sequence[int]) -> FieldScalar:
        return self._terms.get(tuple(w), self.field.zero)

    def support(self) -> set[Word]:
        return set(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        """Largest word length (-1 for the zero element)."""
        return max((len(w) for w in self._terms), default=-1)

    def degrees(self) -> set[int]:
        return {len(w) for w in self._terms}

    def is_homogeneous(self, n: int | None = None) -> bool:
        degs = self.degrees()
        if n is None:
            return len(degs) <= 1
        return degs <= {n}

    def homogeneous_part(self, n: int) -> "GrElement":
        return GrElement._wrap(self.letters, self.field, {w: c for w, c in self._terms.items() if len(w) == n})

    def homogeneous_parts(self) -> dict[int, "GrElement"]:
        return {n: self.homogeneous_part(n) for n in sorted(self.degrees())}

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self._terms.values())

    def _kernel_items(self, rational: bool) -> list:
        if rational:
            return [(w, c.q) for w, c in self._terms.items()]
        return list(self._terms.items())

    def same_context(self, other: "GrElement") -> None:
        if self.letters != other.letters or self.field is not other.field:
            raise ContextMismatch(
                f"contexts differ: l={self.letters}, delta={self.delta} vs l={other.letters}, delta={other.delta}"
            )

    # -- vector space -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GrElement):
            return NotImplemented
        self.same_context(other)
        acc = dict(self._terms)
        for w, c in other._terms.items():
            acc[w] = acc[w] + c if w in acc else c
        return GrElement._wrap(self.letters, self.field, acc)

    def __neg__(self):
        return GrElement._wrap(self.letters, self.field, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GrElement):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "GrElement":
        c = self.field.coerce(c)
        if not c:
            return GrElement.zero(self.letters, self.field)
        return GrElement._wrap(self.letters, self.field, {w: v * c for w, v in self._terms.items()})

    def __mul__(self, c):
        if isinstance(c, GrElement):
            raise TypeError("use star() or bullet() to multiply two elements")
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(1 / self.field.coerce(c))

    def __eq__(self, other):
        if not isinstance(other, GrElement):
            return NotImplemented
        return self.letters == other.letters and self.field is other.field and self._terms == other._terms

    def __hash__(self):
        return hash((self.letters, self.field.delta, frozenset(self._terms.items())))

    # -- products as methods ----------------------------------------------
    def star(self, other: "GrElement") -> "GrElement":
        return star(self, other)

    def bullet(self, other: "GrElement") -> "GrElement":
        return bullet(self, other)

    def adjoint(self) -> "GrElement":
        return involution(self)

    # -- io ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "l": self.letters,
            "delta": str(self.delta),
            "terms": [{"word": list(w), "coeff": c.to_json()} for w, c in self.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "GrElement":
        l = int(obj["l"])
        fld = field(as_fraction(obj.get("delta", l)))
        terms: dict[Word, FieldScalar] = {}
        for t in obj.get("terms", []):
            c = fld.from_json(t["coeff"]) if isinstance(t["coeff"], Mapping) else fld.rational(t["coeff"])
            w = tuple(t["word"])
            terms[w] = terms[w] + c if w in terms else c
        return cls(l, terms, fld)

    def __repr__(self) -> str:
        return f"GrElement(l={self.letters}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self.items():
            mono = "".join(f"X{x}" for x in w) or "1"
            if c == 1:
                parts.append(mono)
            elif c.is_rational():
                parts.append(f"{c.q}*{mono}" if w else str(c.q))
            else:
                parts.append(f"({c})*{mono}" if w else f"({c})")
        return " + ".join(parts)


# -- products ----------------------------------------------------------------


def _binary(a: GrElement, b: GrElement, accumulate) -> GrElement:
    a.same_context(b)
    rational = a.is_rational() and b.is_rational()
    acc = accumulate(a._kernel_items(rational), b._kernel_items(rational), {})
    return GrElement._wrap(a.letters, a.field, acc)


def star(a: GrElement, b: GrElement) -> GrElement:
    """The star product: sum over partial contractions of a's tail with b's head."""
    return _binary(a, b, kernels.star_accumulate)


def bullet(a: GrElement, b: GrElement) -> GrElement:
    """Graded concatenation of words."""
    return _binary(a, b, kernels.bullet_accumulate)


def star_power(a: GrElement, n: int) -> GrElement:
    result = GrElement.one(a.letters, a.field)
    for _ in range(n):
        result = star(result, a)
    return result


def involution(a: GrElement) -> GrElement:
    """Reverse each word; coefficients are real so conjugation is trivial."""
    return GrElement._wrap(a.letters, a.field, {w[::-1]: c for w, c in a._terms.items()})


def trace(a: GrElement) -> FieldScalar:
    return a.coeff(())


def inner(a: GrElement, b: GrElement) -> FieldScalar:
    """<a, b> with words orthonormal; linear in a, conjugate-linear in b."""
    a.same_context(b)
    small, large = (a._terms, b._terms) if len(a._terms) <= len(b._terms) else (b._terms, a._terms)
    total = a.field.zero
    rational = Fraction(0)
    for w, c in small.items():
        d = large.get(w)
        if d is None:
            continue
        if c.is_rational() and d.is_rational():
            rational += c.q * d.q
        else:
            total = total + c * d
    return total + rational if rational else total


def norm_sq(a: GrElement) -> FieldScalar:
    return inner(a, a)


# -- cups and caps -----------------------------------------------------------


def cup(letters: int, fld: Field | None = None) -> GrElement:
    return GrElement(letters, {(i, i): 1 for i in range(1, letters + 1)}, fld)


def cup_pow(r: int, letters: int, fld: Field | None = None) -> GrElement:
    """r-fold bullet power of the cup; 1 for r = 0 and 0 for r < 0."""
    if r < 0:
        return GrElement.zero(letters, fld)
    result = GrElement.one(letters, fld)
    c = cup(letters, fld)
    for _ in range(r):
        result = bullet(result, c)
    return result


def _check_cap_degree(a: GrElement) -> None:
    low = [w for w in a._terms if len(w) < 2]
    if low:
        raise DegreeError(f"cap applied to a component of degree {len(low[0])} < 2")


def cap_left(a: GrElement) -> GrElement:
    """Join the first two strands: X_i X_j w -> [i == j] w."""
    _check_cap_degree(a)
    acc: dict = {}
    for w, c in a._terms.items():
        if w[0] == w[1]:
            t = w[2:]
            acc[t] = acc[t] + c if t in acc else c
    return GrElement._wrap(a.letters, a.field, acc)


def cap_right(a: GrElement) -> GrElement:
    """Join the last two strands: w X_i X_j -> [i == j] w."""
    _check_cap_degree(a)
    acc: dict = {}
    for w, c in a._terms.items():
        if w[-1] == w[-2]:
            t = w[:-2]
            acc[t] = acc[t] + c if t in acc else c
    return GrElement._wrap(a.letters, a.field, acc)


# -- V_n: elements killed by both caps ---------------------------------------


@lru_cache(maxsize=None)
def _vn_data(letters: int, n: int):
    """Rational basis of V_n (as word->Fraction dicts) and the inverse of its Gram matrix."""
    if n < 2:
        raise DegreeError("V_n is only defined for n >= 2")
    all_words = list(words(letters, n))
    index = {w: i for i, w in enumerate(all_words)}
    shorter = {w: i for i, w in enumerate(words(letters, n - 2))}
    rows = [[Fraction(0)] * len(all_words) for _ in range(2 * len(shorter))]
    offset = len(shorter)
    for w, i in index.items():
        if w[0] == w[1]:
            rows[shorter[w[2:]]][i] += 1
        if w[-1] == w[-2]:
            rows[offset + shorter[w[:-2]]][i] += 1
    basis_vecs = exact_linalg.nullspace(rows, len(all_words), Fraction(0), Fraction(1))
    basis = [{all_words[i]: x for i, x in enumerate(vec) if x} for vec in basis_vecs]
    k = len(basis)
    gram = [[sum((u[w] * v[w] for w in u if w in v), Fraction(0)) for v in basis] for u in basis]
    if k:
        aug = [gram[i] + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
        red, _ = exact_linalg.rref(aug)
        ginv = [row[k:] for row in red]
    else:
        ginv = []
    return basis, ginv


def vn_basis(letters: int, n: int, fld: Field | None = None) -> list[GrElement]:
    basis, _ = _vn_data(letters, n)
    return [GrElement(letters, b, fld) for b in basis]


def vn_project(a: GrElement, n: int) -> GrElement:
    """Orthogonal projection of a homogeneous degree-n element onto V_n."""
    if not a.is_homogeneous(n):
        raise DegreeError(f"vn_project expects a homogeneous element of degree {n}")
    basis, ginv = _vn_data(a.letters, n)
    if not basis or not a:
        return GrElement.zero(a.letters, a.field)
    fld = a.field
    rhs = []
    for b in basis:
        acc = fld.zero
        for w, x in b.items():
            c = a._terms.get(w)
            if c is not None:
                acc = acc + c * x
        rhs.append(acc)
    coeffs = [sum((g * r for g, r in zip(row, rhs)), fld.zero) for row in ginv]
    acc: dict = {}
    for c, b in zip(coeffs, basis):
        if not c:
            continue
        for w, x in b.items():
            v = c * x
            acc[w] = acc[w] + v if w in acc else v
    return GrElement._wrap(a.letters, fld, acc)


# -- Z_b ---------------------------------------------------------------------


def z_vector(b: GrElement) -> tuple[GrElement, FieldScalar]:
    """Unnormalised Z~_b = cup.b - b.cup / delta and its exact squared norm."""
    if not b.is_homogeneous(1) or not b:
        raise DegreeError("z_vector expects a non-zero element of P_1")
    c = cup(b.letters, b.field)
    z = bullet(c, b) - bullet(b, c).scale(1 / b.field.rational(b.delta))
    return z, inner(z, z)


def z_normalized(b: GrElement) -> GrElement:
    z, _ = z_vector(b)
    return z.scale(1 / b.field.sqrt_delta_minus_inv())


# -- the C*-algebras (P_2j, x) -----------------------------------------------


def times_j(c: GrElement, d: GrElement, j: int) -> GrElement:
    """(u.v) x (u'.v') = [reverse(v) == u'] u.v' on words split in halves of length j."""
    c.same_context(d)
    if not (c.is_homogeneous(2 * j) and d.is_homogeneous(2 * j)):
        raise DegreeError(f"times_j expects elements of degree {2 * j}")
    by_head: dict[Word, list] = {}
    for w, x in d._terms.items():
        by_head.setdefault(w[:j], []).append((w[j:], x))
    acc: dict = {}
    for w, x in c._terms.items():
        key = w[j:][::-1]
        for tail, y in by_head.get(key, ()):
            out = w[:j] + tail
            v = x * y
            acc[out] = acc[out] + v if out in acc else v
    return GrElement._wrap(c.letters, c.field, acc)


def times_identity(letters: int, j: int, fld: Field | None = None) -> GrElement:
    return GrElement(letters, {u + u[::-1]: 1 for u in words(letters, j)}, fld)


def mat(c: GrElement, j: int) -> list[list[FieldScalar]]:
    """Faithful matrix picture: u.v -> E[u, reverse(v)] (size l^j)."""
    if not c.is_homogeneous(2 * j):
        raise DegreeError(f"mat expects an element of degree {2 * j}")
    size = c.letters ** j
    m = [[c.field.zero] * size for _ in range(size)]
    for w, x in c._terms.items():
        r = word_index(w[:j], c.letters)
        s = word_index(w[j:][::-1], c.letters)
        m[r][s] = m[r][s] + x
    return m


def mat_float(c: GrElement, j: int) -> np.ndarray:
    if not c.is_homogeneous(2 * j):
        raise DegreeError(f"mat expects an element of degree {2 * j}")
    size = c.letters ** j
    m = np.zeros((size, size))
    for w, x in c._terms.items():
        m[word_index(w[:j], c.letters), word_index(w[j:][::-1], c.letters)] += float(x)
    return m


def from_mat(m: Sequence[Sequence], letters: int, j: int, fld: Field | None = None) -> GrElement:
    all_j = list(words(letters, j))
    terms = {}
    for r, u in enumerate(all_j):
        for s, v in enumerate(all_j):
            if m[r][s]:
                terms[u + v[::-1]] = m[r][s]
    return GrElement(letters, terms, fld)


# -- the alpha_j elements and the multiplication bound -----------------------


def alpha_j(a: GrElement, j: int, side: str = "left") -> GrElement:
    """Partial self-pairing of a with a* leaving 2j free strands, via the tangle evaluator.

    ``side="left"`` pairs the first n-j strands of a (the ones a left star
    product never touches); ``side="right"`` pairs the last n-j.
    """
    from . import tangle

    if not a.is_homogeneous():
        raise DegreeError("alpha_j expects a homogeneous element")
    n = a.degree() if a else 0
    if not 0 <= j <= n:
        raise DegreeError(f"j={j} out of range 0..{n}")
    t = tangle.alpha_tangle(n, j, side=side)
    return tangle.evaluate(t, [a, involution(a)], a.letters)


def alpha_j_direct(a: GrElement, j: int, side: str = "left") -> GrElement:
    """Same element as ``alpha_j`` from the closed formula; used as a cross-check."""
    if not a.is_homogeneous():
        raise DegreeError("alpha_j expects a homogeneous element")
    n = a.degree() if a else 0
    if not 0 <= j <= n:
        raise DegreeError(f"j={j} out of range 0..{n}")
    groups: dict[Word, list] = {}
    for w, c in a._terms.items():
        if side == "left":
            groups.setdefault(w[: n - j], []).append((w[n - j:], c))
        else:
            groups.setdefault(w[j:], []).append((w[:j], c))
    acc: dict = {}
    for members in groups.values():
        for w1, c1 in members:
            for w2, c2 in members:
                out = w1 + w2[::-1]
                v = c1 * c2
                acc[out] = acc[out] + v if out in acc else v
    return GrElement._wrap(a.letters, a.field, acc)


def _opnorm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def left_mult_norm_bound(a: GrElement, side: str = "left") -> float:
    """C = sum over homogeneous parts and j of sqrt(||alpha_j||) in (P_2j, x)."""
    total = 0.0
    for n, part in a.homogeneous_parts().items():
        for j in range(n + 1):
            al = alpha_j(part, j, side=side)
            total += float(np.sqrt(max(_opnorm(mat_float(al, j)), 0.0)))
    return total


def left_mult_matrix(a: GrElement, max_degree: int, side: str = "left"):
    """Sparse float matrix of b -> a*b (or b*a) compressed to words of length <= max_degree."""
    from scipy import sparse

    l = a.letters
    offsets = [0]
    for m in range(max_degree + 1):
        offsets.append(offsets[-1] + l ** m)
    dim = offsets[-1]
    rows, cols, vals = [], [], []
    for u, c in a._terms.items():
        cf = float(c)
        n = len(u)
        for m in range(max_degree + 1):
            for k in range(min(n, m) + 1):
                out_len = n + m - 2 * k
                if out_len > max_degree:
                    continue
                if side == "left":
                    # v = reverse(tail_k(u)) + rest, output = head(u) + rest
                    prefix = u[n - k:][::-1]
                    head = u[: n - k]
                    block = l ** (m - k)
                    col0 = offsets[m] + word_index(prefix, l) * block
                    row0 = offsets[out_len] + word_index(head, l) * block
                    rest = np.arange(block)
                    cols.append(col0 + rest)
                    rows.append(row0 + rest)
                else:
                    # b*a: v = rest + reverse(head_k(u)), output = rest + tail(u)
                    suffix = u[:k][::-1]
                    tail = u[k:]
                    block = l ** (m - k)
                    rest = np.arange(block)
                    cols.append(offsets[m] + rest * (l ** k) + word_index(suffix, l))
                    rows.append(offsets[out_len] + rest * (l ** (n - k)) + word_index(tail, l))
                vals.append(np.full(block, cf))
    if not rows:
        return sparse.csr_matrix((dim, dim))
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def left_mult_norm(a: GrElement, max_degree: int, side: str = "left") -> float:
    """Operator norm of the compressed multiplication matrix."""
    m = left_mult_matrix(a, max_degree, side=side)
    if m.nnz == 0:
        return 0.0
    if m.shape[0] <= 600:
        return float(np.linalg.norm(m.toarray(), 2))
    from scipy.sparse.linalg import svds

    s = svds(m, k=1, return_singular_vectors=False, tol=1e-12, maxiter=20000, random_state=0)
    return float(s[0])


# -- random elements (verification suites) -----------------------------------


def random_word(rng: random.Random, letters: int, max_len: int, min_len: int = 0) -> Word:
    n = rng.randint(min_len, max_len)
    return tuple(rng.randint(1, letters) for _ in range(n))


def random_element(
    rng: random.Random,
    letters: int,
    max_degree: int,
    n_terms: int = 3,
    homogeneous: int | None = None,
    fld: Field | None = None,
    coeff_range: int = 5,
) -> GrElement:
    """Random element with small rational coefficients."""
    terms: dict[Word, Fraction] = {}
    for _ in range(n_terms):
        if homogeneous is None:
            w = random_word(rng, letters, max_degree)
        else:
            w = tuple(rng.randint(1, letters) for _ in range(homogeneous))
        num = rng.randint(-coeff_range, coeff_range) or 1
        den = rng.randint(1, 3)
        terms[w] = terms.get(w, Fraction(0)) + Fraction(num, den)
    return GrElement(letters, terms, fld)


def element_from_words(ws: Iterable[Sequence[int]], letters: int, fld: Field | None = None) -> GrElement:
    terms: dict[Word, int] = {}
    for w in ws:
        w = tuple(w)
        terms[w] = terms.get(w, 0) + 1
    return GrElement(letters, terms, fld)
