"""Jacobi operators: the free one s+s*, its rank-two perturbations c_t, their
orthogonal polynomials, spectral measures and outlier bounds.

Exact work (polynomial identities, the alpha matrix) runs over FieldScalar;
spectral diagnostics run in floating point on the tridiagonal structure.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .oracles import catalan
from .report import CheckReport, timed
from .scalars import Field, FieldScalar, as_fraction, field

__all__ = [
    "DiscreteSpectralMeasure",
    "JacobiMatrix",
    "MomentFunctional",
    "alpha_matrix",
    "alpha_matrix_exact",
    "chebyshev_P",
    "ct_matrix",
    "free_jacobi",
    "h_function",
    "no_outlier_check",
    "pp_mass_bound",
    "s_poly",
    "s_poly_check",
    "semicircle_moments",
    "spectral_measure",
    "sweep",
]

Poly = list  # coefficients, lowest degree first


# -- Jacobi matrices -------------------------------------------------------------


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal N x N matrix with exact and float views."""

    diag_exact: tuple[FieldScalar, ...]
    offdiag_exact: tuple[FieldScalar, ...]

    @property
    def N(self) -> int:
        return len(self.diag_exact)

    @property
    def field(self) -> Field:
        return self.diag_exact[0].field

    @property
    def diag(self) -> np.ndarray:
        return np.array([float(x) for x in self.diag_exact])

    @property
    def offdiag(self) -> np.ndarray:
        return np.array([float(x) for x in self.offdiag_exact])

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def exact_rows(self) -> list[list[FieldScalar]]:
        fld = self.field
        n = self.N
        m = [[fld.zero] * n for _ in range(n)]
        for i, x in enumerate(self.diag_exact):
            m[i][i] = x
        for i, x in enumerate(self.offdiag_exact):
            m[i][i + 1] = x
            m[i + 1][i] = x
        return m

    def matvec(self, v: Sequence[FieldScalar]) -> list[FieldScalar]:
        """Exact product with a vector of FieldScalars."""
        n = self.N
        d, e = self.diag_exact, self.offdiag_exact
        out = []
        for i in range(n):
            acc = d[i] * v[i] if d[i] else self.field.zero
            if i > 0 and e[i - 1]:
                acc = acc + e[i - 1] * v[i - 1]
            if i + 1 < n and e[i]:
                acc = acc + e[i] * v[i + 1]
            out.append(acc)
        return out


def _check_delta(delta) -> Fraction:
    d = as_fraction(delta)
    if d <= 1:
        raise ValueError(f"delta must exceed 1, got {delta}")
    return d


def ct_matrix(t, delta, N: int) -> JacobiMatrix:
    """Truncation of c_t: corner t/delta, first coupling sqrt(1 - delta^-2), then ones."""
    d = _check_delta(delta)
    t = as_fraction(t)
    if not -2 <= t <= 2:
        raise ValueError(f"t must lie in [-2, 2], got {t}")
    if N < 2:
        raise ValueError("truncation size must be at least 2")
    fld = field(d)
    diag = (fld.rational(t / d),) + (fld.zero,) * (N - 1)
    off = (fld.sqrt_one_minus_inv_sq(),) + (fld.one,) * (N - 2)
    return JacobiMatrix(diag, off)


def free_jacobi(N: int, delta=2) -> JacobiMatrix:
    """Truncation of s+s*: zero diagonal, unit couplings (delta only fixes the context)."""
    if N < 1:
        raise ValueError("truncation size must be positive")
    fld = field(_check_delta(delta))
    return JacobiMatrix((fld.zero,) * N, (fld.one,) * (N - 1))


def free_jacobi_exact(fld: Field, n: int) -> list[list[FieldScalar]]:
    return free_jacobi(n, fld.delta).exact_rows() if n > 1 else [[fld.zero]]


# -- the alpha model on the E_b grid ------------------------------------------------


def alpha_matrix_exact(delta, kcap: int, rcap: int) -> list[list[FieldScalar]]:
    """alpha + (s+s*) x 1 on span{e_k x e_r : k < kcap, r < rcap}, index k*rcap + r.

    alpha(e_0 x x) = (c - 1) e_1 x x + delta^-1 e_0 x (s+s*)x,
    alpha(e_1 x x) = (c - 1) e_0 x x, alpha(e_k x x) = 0 for k >= 2,
    with c = sqrt(1 - delta^-2).
    """
    if kcap < 2 or rcap < 2:
        raise ValueError("caps must be at least 2")
    fld = field(_check_delta(delta))
    n = kcap * rcap
    m = [[fld.zero] * n for _ in range(n)]
    c1 = fld.sqrt_one_minus_inv_sq() - 1
    inv_d = fld.rational(1 / fld.delta)

    def at(k, r):
        return k * rcap + r

    for r in range(rcap):
        # alpha on e_0 x e_r and e_1 x e_r
        m[at(1, r)][at(0, r)] += c1
        for r2 in (r - 1, r + 1):
            if 0 <= r2 < rcap:
                m[at(0, r2)][at(0, r)] += inv_d
        m[at(0, r)][at(1, r)] += c1
        # (s+s*) x 1
        for k in range(kcap):
            for k2 in (k - 1, k + 1):
                if 0 <= k2 < kcap:
                    m[at(k2, r)][at(k, r)] += 1
    return m


def alpha_matrix(delta, kcap: int, rcap: int) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in alpha_matrix_exact(delta, kcap, rcap)])


# -- polynomials -----------------------------------------------------------------


def _poly_x_times(p: Poly, zero) -> Poly:
    return [zero] + list(p)


def _poly_sub(p: Poly, q: Poly, zero) -> Poly:
    n = max(len(p), len(q))
    p = list(p) + [zero] * (n - len(p))
    q = list(q) + [zero] * (n - len(q))
    return [a - b for a, b in zip(p, q)]


def chebyshev_P(n: int) -> list[Fraction]:
    """P_0 = 1, P_1 = X, P_n = X P_{n-1} - P_{n-2}; coefficients lowest first."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    zero = Fraction(0)
    prev, cur = [Fraction(1)], [zero, Fraction(1)]
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, _poly_sub(_poly_x_times(cur, zero), prev, zero)
    return cur


def s_poly(n: int, t, delta) -> list[FieldScalar]:
    """S_0 = 1, S_1 = (X - t/delta)/c, S_2 = X S_1 - c, then S_n = X S_{n-1} - S_{n-2},
    where c = sqrt(1 - delta^-2)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    d = _check_delta(delta)
    t = as_fraction(t)
    fld = field(d)
    zero = fld.zero
    c = fld.sqrt_one_minus_inv_sq()
    s0 = [fld.one]
    if n == 0:
        return s0
    inv_c = 1 / c
    s1 = [fld.rational(-t / d) * inv_c, inv_c]
    if n == 1:
        return s1
    s2 = _poly_sub(_poly_x_times(s1, zero), [c], zero)
    prev, cur = s1, s2
    for _ in range(n - 2):
        prev, cur = cur, _poly_sub(_poly_x_times(cur, zero), prev, zero)
    return cur


def apply_poly_e0(poly: Sequence[FieldScalar], J: JacobiMatrix) -> list[FieldScalar]:
    """poly(J) e_0, exactly."""
    fld = J.field
    v = [fld.one] + [fld.zero] * (J.N - 1)
    out = [fld.zero] * J.N
    for c in poly:
        c = fld.coerce(c)
        if c:
            out = [o + c * x for o, x in zip(out, v)]
        v = J.matvec(v)
    return out


def s_poly_check(n: int, t, delta) -> bool:
    """S_{n,t}(c_t) e_0 = e_n on a truncation large enough to avoid the edge."""
    J = ct_matrix(t, delta, n + 2)
    got = apply_poly_e0(s_poly(n, t, delta), J)
    return all(x == (1 if i == n else 0) for i, x in enumerate(got))


def poly_to_json(poly: Sequence) -> list:
    return [x.to_json() if hasattr(x, "to_json") else str(x) for x in poly]


# -- semicircle moments ----------------------------------------------------------


def semicircle_moments(n: int) -> Fraction:
    if n < 0:
        raise ValueError("moment order must be non-negative")
    return Fraction(catalan(n // 2)) if n % 2 == 0 else Fraction(0)


class MomentFunctional:
    """Linear functional X^n -> n-th semicircle moment."""

    def __call__(self, n: int) -> Fraction:
        return semicircle_moments(n)

    def apply(self, poly: Sequence) -> Fraction:
        return sum((Fraction(c) * self(i) for i, c in enumerate(poly) if c), Fraction(0))

    def pair(self, p: Sequence, q: Sequence) -> Fraction:
        prod = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                prod[i + j] += Fraction(a) * Fraction(b)
        return self.apply(prod)

    def hankel(self, size: int) -> list[list[Fraction]]:
        return [[self(i + j) for j in range(size)] for i in range(size)]


# -- spectral measures -------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteSpectralMeasure:
    eigenvalues: np.ndarray
    weights: np.ndarray

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.eigenvalues.tolist(), self.weights.tolist()))

    def moment(self, n: int) -> float:
        return float(np.sum(self.weights * self.eigenvalues ** n))

    @property
    def max_weight(self) -> float:
        return float(self.weights.max())

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


def spectral_measure(J: JacobiMatrix, method: str = "tridiagonal") -> DiscreteSpectralMeasure:
    """Eigenvalues of J with the squared e_0 components of the eigenvectors as weights."""
    if J.N < 2:
        raise ValueError("truncation size must be at least 2")
    if method == "tridiagonal":
        vals, vecs = eigh_tridiagonal(J.diag, J.offdiag)
    elif method == "dense":
        vals, vecs = np.linalg.eigh(J.dense())
    else:
        raise ValueError(f"unknown method {method!r}")
    return DiscreteSpectralMeasure(vals, vecs[0, :] ** 2)


def power_moments(J: JacobiMatrix, nmax: int) -> np.ndarray:
    """<J^n e_0, e_0> for n = 0..nmax by repeated tridiagonal products."""
    d, e = J.diag, J.offdiag
    v = np.zeros(J.N)
    v[0] = 1.0
    out = np.empty(nmax + 1)
    for n in range(nmax + 1):
        out[n] = v[0]
        w = d * v
        w[:-1] += e * v[1:]
        w[1:] += e * v[:-1]
        v = w
    return out


def moment_error(J: JacobiMatrix, mu: DiscreteSpectralMeasure, nmax: int = 20) -> float:
    nmax = min(nmax, J.N - 1)
    ref = power_moments(J, nmax)
    got = np.array([mu.moment(n) for n in range(nmax + 1)])
    return float(np.max(np.abs(got - ref)))


def pp_mass_bound(t, delta, N: int) -> float:
    """Largest atom of the e_0 spectral measure of the truncated c_t."""
    if N < 2:
        raise ValueError("truncation size must be at least 2")
    return spectral_measure(ct_matrix(t, delta, N)).max_weight


# -- outlier exclusion -----------------------------------------------------------


def h_function(z, t, delta):
    """h(z) = (z - t/delta)(z + sqrt(z^2 - 4))/2 for z >= 2 (vectorised)."""
    d = float(_check_delta(delta))
    z = np.asarray(z, dtype=float)
    return (z - float(t) / d) * (z + np.sqrt(z * z - 4.0)) / 2.0


def default_zgrid(points: int = 100, upper: float = 6.0) -> np.ndarray:
    """points values in (2, upper], excluding the edge 2 itself."""
    return np.linspace(2.0, upper, points + 1)[1:]


def h_margin(t, delta, zgrid: Sequence[float] | None = None) -> float:
    zgrid = default_zgrid() if zgrid is None else np.asarray(zgrid, dtype=float)
    d = float(_check_delta(delta))
    h = h_function(zgrid, t, delta)
    return float(np.min(h - (1 - d ** -2) - (1 / d - 1) ** 2))


def no_outlier_check(t, delta, zgrid: Sequence[float] | None = None) -> CheckReport:
    """h(z) - (1 - delta^-2) > (delta^-1 - 1)^2 and h increasing on a grid above 2.

    Outliers below -2 reduce to this case: c_{-t} is unitarily equivalent to -c_t.
    """
    z = default_zgrid() if zgrid is None else np.asarray(zgrid, dtype=float)

    def run():
        if np.any(z <= 2):
            raise ValueError("grid values must exceed 2")
        h = h_function(z, t, delta)
        margin = h_margin(t, delta, z)
        increasing = bool(np.all(np.diff(h) > 0)) if len(z) > 1 else True
        return margin > 0 and increasing, {"margin": margin, "increasing": increasing}

    return timed("no_outlier", {"t": str(t), "delta": str(delta), "points": len(z)}, run)


# -- sweeps --------------------------------------------------------------------------

CSV_COLUMNS = ["t", "delta", "N", "min_eig", "max_eig", "max_atom_weight", "moment_err", "h_margin"]


def sweep_row(t, delta, N: int) -> dict:
    J = ct_matrix(t, delta, N)
    mu = spectral_measure(J)
    return {
        "t": str(as_fraction(t)),
        "delta": str(as_fraction(delta)),
        "N": N,
        "min_eig": float(mu.eigenvalues.min()),
        "max_eig": float(mu.eigenvalues.max()),
        "max_atom_weight": mu.max_weight,
        "moment_err": moment_error(J, mu),
        "h_margin": h_margin(t, delta),
    }


def sweep(ts: Iterable, deltas: Iterable, Ns: Iterable[int]) -> list[dict]:
    """One row per (t, delta, N), in input order."""
    from concurrent.futures import ThreadPoolExecutor

    cases = [(t, d, n) for d in deltas for t in ts for n in Ns]
    # LAPACK releases the GIL, so threads give real parallelism here
    with ThreadPoolExecutor() as pool:
        return list(pool.map(lambda c: sweep_row(*c), cases))


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def confinement_check(
    ts: Sequence = (-2, -1, 0, 1, 2),
    deltas: Sequence = (2, 3),
    Ns: Sequence[int] = (250, 500, 1000, 2000),
    tol: float = 1e-9,
    atom_cap: float = 0.01,
    noise: float = 0.10,
) -> CheckReport:
    """Eigenvalues stay in [-2, 2]; the largest e_0 atom is small and shrinks with N."""
    Ns = sorted(Ns)

    def run():
        rows = sweep(ts, deltas, Ns)
        by_case: dict = {}
        for row in rows:
            by_case.setdefault((row["t"], row["delta"]), []).append(row)
        for (t, d), case in by_case.items():
            case.sort(key=lambda r: r["N"])
            for row in case:
                if row["min_eig"] < -2 - tol or row["max_eig"] > 2 + tol:
                    return False, {"outlier": row}
            weights = [r["max_atom_weight"] for r in case]
            if weights[-1] > atom_cap:
                return False, {"heavy_atom": case[-1]}
            for a, b in zip(weights, weights[1:]):
                if b > a * (1 + noise):
                    return False, {"not_decreasing": {"t": t, "delta": d, "weights": weights}}
        top = [r for r in rows if r["N"] == Ns[-1]]
        worst = max(top, key=lambda r: r["max_atom_weight"])
        return True, {"cases": len(rows), "largest_atom_at_max_N": worst["max_atom_weight"]}

    return timed("spectrum_confinement", {"t": list(map(str, ts)), "delta": list(map(str, deltas)), "N": list(Ns)}, run)
