"""Unshaded planar tangles as combinatorial data, and their action on Gr(P).

A tangle is an outer disk (id 0) and ordered inner disks (ids 1..k), each
with a number of boundary points and a marked point.  Strands form a perfect
matching of all boundary points; closed loops are only counted.  Boundary
points are numbered counterclockwise and every disk is read counterclockwise
starting at its marked point.

Planarity is decided on the sphere: each disk becomes a vertex whose rotation
is its counterclockwise point order (reversed for the outer disk, which is
seen from outside), strands become edges, and every connected component must
have Euler characteristic 2.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import kernels
from .ncpoly import DegreeError, GrElement
from .scalars import Field, FieldScalar, as_fraction, field

Endpoint = tuple[int, int]

__all__ = [
    "Disk",
    "Tangle",
    "TangleError",
    "Validation",
    "add_loop",
    "alpha_tangle",
    "bullet_tangle",
    "cap_left_tangle",
    "cap_right_tangle",
    "compose",
    "cup_tangle",
    "cap_tangle",
    "evaluate",
    "identity_tangle",
    "pairing_tangle",
    "product_tangle",
    "random_tangle",
    "reflect",
    "rotation_tangle",
    "star_tangle",
    "trace_tangle",
    "validate",
]


class TangleError(ValueError):
    """Invalid tangle or arity mismatch."""


@dataclass(frozen=True)
class Disk:
    points: int
    star: int = 0


@dataclass(frozen=True)
class Tangle:
    outer: Disk
    inner: tuple[Disk, ...] = ()
    strands: tuple[tuple[Endpoint, Endpoint], ...] = ()
    loops: int = 0
    # optional explicit cyclic orders, outer disk first; each must list the
    # disk's points counterclockwise (any starting point)
    rotation: tuple[tuple[int, ...], ...] | None = dc_field(default=None, compare=False)

    def disk(self, d: int) -> Disk:
        return self.outer if d == 0 else self.inner[d - 1]

    @property
    def disks(self) -> tuple[Disk, ...]:
        return (self.outer,) + self.inner

    def partner_map(self) -> dict[Endpoint, Endpoint]:
        m: dict[Endpoint, Endpoint] = {}
        for a, b in self.strands:
            m[a] = b
            m[b] = a
        return m

    # -- json ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "outer": {"points": self.outer.points, "star": self.outer.star},
            "inner": [{"points": d.points, "star": d.star} for d in self.inner],
            "strands": [[list(a), list(b)] for a, b in self.strands],
            "loops": self.loops,
            "rotation": None if self.rotation is None else [list(r) for r in self.rotation],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Tangle":
        try:
            outer = Disk(int(obj["outer"]["points"]), int(obj["outer"].get("star", 0)))
            inner = tuple(Disk(int(d["points"]), int(d.get("star", 0))) for d in obj.get("inner", []))
            strands = tuple(
                ((int(a[0]), int(a[1])), (int(b[0]), int(b[1]))) for a, b in obj.get("strands", [])
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise TangleError(f"malformed tangle JSON: {exc}") from exc
        rot = obj.get("rotation")
        rotation = None if rot is None else tuple(tuple(int(x) for x in r) for r in rot)
        return cls(outer, inner, strands, int(obj.get("loops", 0)), rotation)


class Validation(NamedTuple):
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


# -- validation --------------------------------------------------------------


def _is_ccw_cycle(order: Sequence[int], n: int) -> bool:
    if sorted(order) != list(range(n)):
        return False
    if n == 0:
        return True
    start = order[0]
    return all(order[i] == (start + i) % n for i in range(n))


def validate(t: Tangle) -> Validation:
    """Perfect matching, marked points in range, genus 0 on every component."""
    disks = t.disks
    for d, disk in enumerate(disks):
        if disk.points < 0:
            return Validation(False, f"disk {d} has a negative point count")
        if disk.points == 0 and disk.star != 0:
            return Validation(False, f"disk {d} has no points but marked point {disk.star}")
        if disk.points and not 0 <= disk.star < disk.points:
            return Validation(False, f"disk {d} marked point {disk.star} out of range")
    if t.loops < 0:
        return Validation(False, "negative loop count")
    seen: set[Endpoint] = set()
    for a, b in t.strands:
        for d, p in (a, b):
            if not 0 <= d < len(disks) or not 0 <= p < disks[d].points:
                return Validation(False, f"endpoint {(d, p)} does not exist")
        if a == b:
            return Validation(False, f"strand joins endpoint {a} to itself")
        for e in (a, b):
            if e in seen:
                return Validation(False, f"endpoint {e} used by two strands")
            seen.add(e)
    total = sum(d.points for d in disks)
    if len(seen) != total:
        missing = next((d, p) for d, disk in enumerate(disks) for p in range(disk.points) if (d, p) not in seen)
        return Validation(False, f"endpoint {missing} is not on any strand")
    if t.rotation is not None:
        if len(t.rotation) != len(disks):
            return Validation(False, "rotation system must list every disk")
        for d, order in enumerate(t.rotation):
            if not _is_ccw_cycle(order, disks[d].points):
                return Validation(False, f"rotation of disk {d} is not a counterclockwise cyclic order")
    chi, comps = euler_characteristics(t)
    for comp, x in zip(comps, chi):
        if x != 2:
            return Validation(False, f"component with disks {sorted(comp)} has Euler characteristic {x}")
    return Validation(True, "")


def euler_characteristics(t: Tangle) -> tuple[list[int], list[set[int]]]:
    """V - E + F for each connected component of the disk graph."""
    disks = t.disks
    partner = t.partner_map()
    parent = list(range(len(disks)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (d1, _), (d2, _) in t.strands:
        r1, r2 = find(d1), find(d2)
        if r1 != r2:
            parent[r1] = r2
    comps: dict[int, set[int]] = {}
    for d in range(len(disks)):
        comps.setdefault(find(d), set()).add(d)

    def sigma(e: Endpoint) -> Endpoint:
        d, p = e
        n = disks[d].points
        return (d, (p - 1) % n) if d == 0 else (d, (p + 1) % n)

    chis, comp_list = [], []
    for comp in comps.values():
        darts = [(d, p) for d in comp for p in range(disks[d].points)]
        if not darts:
            chis.append(2)
            comp_list.append(comp)
            continue
        visited: set[Endpoint] = set()
        faces = 0
        for start in darts:
            if start in visited:
                continue
            faces += 1
            e = start
            while e not in visited:
                visited.add(e)
                e = sigma(partner[e])
        edges = len(darts) // 2
        chis.append(len(comp) - edges + faces)
        comp_list.append(comp)
    return chis, comp_list


def _require_valid(t: Tangle) -> None:
    v = validate(t)
    if not v:
        raise TangleError(f"invalid tangle: {v.reason}")


# -- operations on tangles ---------------------------------------------------


def add_loop(t: Tangle, count: int = 1) -> Tangle:
    return replace(t, loops=t.loops + count)


def reflect(t: Tangle) -> Tangle:
    """Mirror image T*: every disk is read clockwise from the same marked point."""

    def flip(e: Endpoint) -> Endpoint:
        d, p = e
        disk = t.disk(d)
        return (d, (2 * disk.star - 1 - p) % disk.points)

    strands = tuple((flip(a), flip(b)) for a, b in t.strands)
    return Tangle(t.outer, t.inner, strands, t.loops)


def compose(t: Tangle, i: int, s: Tangle) -> Tangle:
    """Place s inside inner disk i (1-based) of t, lining up marked points."""
    if not 1 <= i <= len(t.inner):
        raise TangleError(f"tangle has no inner disk {i}")
    slot = t.inner[i - 1]
    if slot.points != s.outer.points:
        raise TangleError(f"arity mismatch: disk {i} has {slot.points} points, tangle has {s.outer.points}")
    _require_valid(t)
    _require_valid(s)
    n = slot.points
    k_s = len(s.inner)

    def t_node(e: Endpoint):
        d, p = e
        if d == i:
            return ("g", p)
        if d == 0:
            return ("r", (0, p))
        return ("r", (d if d < i else d - 1 + k_s, p))

    def s_node(e: Endpoint):
        d, p = e
        if d == 0:
            # outer point p of s sits at reading offset (p - star); same offset on slot
            return ("g", (slot.star + (p - s.outer.star)) % n) if n else ("g", p)
        return ("r", (i - 1 + d, p))

    adj: dict = {}
    for a, b in t.strands:
        na, nb = t_node(a), t_node(b)
        adj.setdefault(na, []).append(nb)
        adj.setdefault(nb, []).append(na)
    for a, b in s.strands:
        na, nb = s_node(a), s_node(b)
        adj.setdefault(na, []).append(nb)
        adj.setdefault(nb, []).append(na)

    strands = []
    visited: set = set()
    for node in adj:
        if node[0] != "r" or node in visited:
            continue
        prev, cur = None, node
        visited.add(cur)
        while True:
            nbrs = adj[cur]
            nxt = nbrs[0] if nbrs[0] != prev or len(nbrs) == 1 else nbrs[1]
            if len(nbrs) == 2 and nbrs[0] == nbrs[1]:
                nxt = nbrs[0]
            prev, cur = cur, nxt
            visited.add(cur)
            if cur[0] == "r":
                break
        strands.append((node[1], cur[1]))
    # glue points not reached from a real endpoint form closed loops
    new_loops = 0
    for node in adj:
        if node[0] == "g" and node not in visited:
            new_loops += 1
            stack = [node]
            while stack:
                x = stack.pop()
                if x in visited:
                    continue
                visited.add(x)
                stack.extend(adj[x])
    inner = t.inner[: i - 1] + s.inner + t.inner[i:]
    strands.sort()
    return Tangle(t.outer, inner, tuple(strands), t.loops + s.loops + new_loops)


# -- evaluation ----------------------------------------------------------------


@lru_cache(maxsize=4096)
def _plan(t: Tangle):
    offsets = [0]
    for d in t.inner:
        offsets.append(offsets[-1] + d.points)

    def flat(e: Endpoint) -> int:
        d, p = e
        disk = t.inner[d - 1]
        return offsets[d - 1] + (p - disk.star) % disk.points

    n0 = t.outer.points
    outer_src: list[int] = [0] * n0
    pairs = []
    nfree = 0
    for a, b in t.strands:
        if a[0] == 0 and b[0] == 0:
            outer_src[(a[1] - t.outer.star) % n0] = -(nfree + 1)
            outer_src[(b[1] - t.outer.star) % n0] = -(nfree + 1)
            nfree += 1
        elif a[0] == 0 or b[0] == 0:
            o, x = (a, b) if a[0] == 0 else (b, a)
            outer_src[(o[1] - t.outer.star) % n0] = flat(x)
        else:
            pairs.append((flat(a), flat(b)))
    return pairs, tuple(outer_src), nfree


def evaluate(
    t: Tangle | Sequence[Tangle],
    inputs: Sequence[GrElement],
    letters: int,
    delta=None,
) -> GrElement:
    """Multilinear action of a tangle (or a formal sum of tangles) on Gr(P).

    Each strand carries a letter; a disk weighs the assignment by the
    coefficient of the word read from its marked point; closed loops give
    delta each.  delta defaults to the number of letters, the only value for
    which evaluation commutes with composition.
    """
    if not isinstance(t, Tangle):
        parts = [evaluate(x, inputs, letters, delta) for x in t]
        if not parts:
            raise TangleError("empty tangle sum")
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        return total
    _require_valid(t)
    if len(inputs) != len(t.inner):
        raise TangleError(f"tangle has {len(t.inner)} inner disks but got {len(inputs)} inputs")
    for x in inputs:
        if x.letters != letters:
            raise TangleError("input letter count differs from evaluation letter count")
    if delta is not None:
        fld = field(delta)
        inputs = [_rehome(x, fld) for x in inputs]
    elif inputs:
        fld = inputs[0].field
        for x in inputs[1:]:
            inputs[0].same_context(x)
    else:
        fld = field(letters)
    for k, (x, disk) in enumerate(zip(inputs, t.inner), start=1):
        if not x.is_homogeneous(disk.points):
            raise DegreeError(f"input {k} must be homogeneous of degree {disk.points}")
    pairs, outer_src, nfree = _plan(t)
    rational = all(x.is_rational() for x in inputs)
    term_lists = [x._kernel_items(rational) for x in inputs]
    acc: dict = {}
    contract = kernels.contract_words
    for combo in itertools.product(*term_lists):
        flat: tuple = ()
        coeff = Fraction(1) if rational else fld.one
        for w, c in combo:
            flat += w
            coeff = coeff * c
        for out in contract(flat, pairs, outer_src, nfree, letters):
            acc[out] = acc[out] + coeff if out in acc else coeff
    result = GrElement._wrap(letters, fld, acc)
    if t.loops:
        result = result.scale(fld.rational(fld.delta) ** t.loops)
    return result


def _rehome(x: GrElement, fld: Field) -> GrElement:
    if x.field is fld:
        return x
    if not x.is_rational():
        raise TangleError("delta override needs rational input coefficients")
    return GrElement(x.letters, {w: c.q for w, c in x.items()}, fld)


# -- builders ----------------------------------------------------------------


def _check_arity(*ns: int) -> None:
    for n in ns:
        if not isinstance(n, int) or n < 0:
            raise TangleError(f"invalid arity {n!r}")


def _built(t: Tangle) -> Tangle:
    _require_valid(t)
    return t


def identity_tangle(n: int) -> Tangle:
    return rotation_tangle(n, 0)


def rotation_tangle(n: int, k: int = 1) -> Tangle:
    """Output word is the input word rotated left by k."""
    _check_arity(n)
    strands = tuple(((0, q), (1, (q + k) % n)) for q in range(n)) if n else ()
    return _built(Tangle(Disk(n), (Disk(n),), strands))


def cup_tangle() -> Tangle:
    return _built(Tangle(Disk(2), (), (((0, 0), (0, 1)),)))


def cap_tangle() -> Tangle:
    """Closes a 2-point disk; composing it with cup_tangle leaves one loop."""
    return _built(Tangle(Disk(0), (Disk(2),), (((1, 0), (1, 1)),)))


def bullet_tangle(n: int, m: int) -> Tangle:
    _check_arity(n, m)
    strands = [((0, i), (1, i)) for i in range(n)] + [((0, n + i), (2, i)) for i in range(m)]
    return _built(Tangle(Disk(n + m), (Disk(n), Disk(m)), tuple(strands)))


def product_tangle(n: int, m: int, k: int) -> Tangle:
    """The k-th term of the star product: k strands join a's tail to b's head."""
    _check_arity(n, m, k)
    if k > min(n, m):
        raise TangleError(f"cannot contract {k} strands between {n}- and {m}-boxes")
    strands = [((0, i), (1, i)) for i in range(n - k)]
    strands += [((1, n - k + p), (2, k - 1 - p)) for p in range(k)]
    strands += [((0, n - k + i), (2, k + i)) for i in range(m - k)]
    return _built(Tangle(Disk(n + m - 2 * k), (Disk(n), Disk(m)), tuple(strands)))


def star_tangle(n: int, m: int) -> tuple[Tangle, ...]:
    """Formal sum of tangles whose evaluation is the star product on P_n x P_m."""
    _check_arity(n, m)
    return tuple(product_tangle(n, m, k) for k in range(min(n, m) + 1))


def cap_left_tangle(n: int) -> Tangle:
    _check_arity(n)
    if n < 2:
        raise TangleError("cap needs at least two points")
    strands = [((1, 0), (1, 1))] + [((0, i), (1, i + 2)) for i in range(n - 2)]
    return _built(Tangle(Disk(n - 2), (Disk(n),), tuple(strands)))


def cap_right_tangle(n: int) -> Tangle:
    _check_arity(n)
    if n < 2:
        raise TangleError("cap needs at least two points")
    strands = [((1, n - 2), (1, n - 1))] + [((0, i), (1, i)) for i in range(n - 2)]
    return _built(Tangle(Disk(n - 2), (Disk(n),), tuple(strands)))


def pairing_tangle(n: int) -> Tangle:
    """Inner product tangle: fed (a, b*) it returns <a, b> times the empty word."""
    _check_arity(n)
    strands = tuple(((1, i), (2, n - 1 - i)) for i in range(n))
    return _built(Tangle(Disk(0), (Disk(n), Disk(n)), strands))


def trace_tangle(n: int, side: str = "right") -> Tangle:
    """Closure of a 2n-box by nested strands; side picks which way the strands go round."""
    _check_arity(n)
    strands = tuple(((1, i), (1, 2 * n - 1 - i)) for i in range(n))
    star = 0 if side == "right" or n == 0 else n
    return _built(Tangle(Disk(0), (Disk(2 * n, star),), strands))


def alpha_tangle(n: int, j: int, side: str = "left") -> Tangle:
    """Pair n-j strands of a (disk 1) with a* (disk 2), leaving 2j free strands."""
    _check_arity(n, j)
    if j > n:
        raise TangleError(f"j={j} exceeds n={n}")
    if side == "left":
        strands = [((1, p), (2, n - 1 - p)) for p in range(n - j)]
        strands += [((0, i), (1, n - j + i)) for i in range(j)]
        strands += [((0, j + i), (2, i)) for i in range(j)]
    elif side == "right":
        strands = [((1, n - 1 - q), (2, q)) for q in range(n - j)]
        strands += [((0, i), (1, i)) for i in range(j)]
        strands += [((0, j + i), (2, n - j + i)) for i in range(j)]
    else:
        raise TangleError(f"side must be 'left' or 'right', got {side!r}")
    return _built(Tangle(Disk(2 * j), (Disk(n), Disk(n)), tuple(strands)))


# -- random planar tangles ---------------------------------------------------


def _random_noncrossing(rng: random.Random, items: list) -> list[tuple]:
    if not items:
        return []
    partner = rng.randrange(0, len(items) // 2) * 2 + 1
    inside = items[1:partner]
    outside = items[partner + 1:]
    return [(items[0], items[partner])] + _random_noncrossing(rng, inside) + _random_noncrossing(rng, outside)


def random_tangle(rng: random.Random, n_outer: int, inner_points: Sequence[int], random_stars: bool = True) -> Tangle:
    """Random planar tangle with the given disk sizes (total point count must be even).

    Inner disks are joined to the outer circle by channels; walking round the
    cut region meets every inner disk clockwise, so a non-crossing matching of
    that boundary walk is planar.
    """
    if (n_outer + sum(inner_points)) % 2:
        raise TangleError("total number of boundary points must be even")
    walk: list[Endpoint] = [(0, p) for p in range(n_outer)]
    for d, npts in enumerate(inner_points, start=1):
        pos = rng.randint(0, len(walk))
        start = rng.randrange(npts) if npts else 0
        block = [(d, (start - q) % npts) for q in range(npts)]
        walk[pos:pos] = block
    # rotate the walk so the matching is not anchored at outer point 0
    if walk:
        r = rng.randrange(len(walk))
        walk = walk[r:] + walk[:r]
    strands = tuple(sorted(_random_noncrossing(rng, walk)))
    outer = Disk(n_outer, rng.randrange(n_outer) if (random_stars and n_outer) else 0)
    inner = tuple(Disk(n, rng.randrange(n) if (random_stars and n) else 0) for n in inner_points)
    return Tangle(outer, inner, strands, 0)
