"""Independent reference implementations used to cross-check the library.

Everything here deliberately avoids the production code paths: brute
force enumeration instead of recursive constructions, sympy symbolic
series instead of the hand-rolled expansion, dense sparse-matrix solves
instead of the DST solver, and an exact-skeleton Brownian bridge
estimator instead of the closed-form crossing probability.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import sympy as sp


# ---------------------------------------------------------------------------
# Combinatorics by brute force


def brute_dyck_heights(n: int) -> list[tuple[int, ...]]:
    """All nonnegative +-1 walks of length 2n from 0 to 0, as height tuples."""
    out = []
    for steps in itertools.product((1, -1), repeat=2 * n):
        h = [0]
        for s in steps:
            h.append(h[-1] + s)
        if min(h) >= 0 and h[-1] == 0:
            out.append(tuple(h))
    return sorted(out)


def _all_matchings(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    a, rest = items[0], items[1:]
    for i, b in enumerate(rest):
        for sub in _all_matchings(rest[:i] + rest[i + 1 :]):
            yield ((a, b),) + sub


def _crossing(l1: tuple[int, int], l2: tuple[int, int]) -> bool:
    (a, b), (c, d) = sorted(l1), sorted(l2)
    if a > c:
        (a, b), (c, d) = (c, d), (a, b)
    return a < c < b < d


def brute_noncrossing_pairings(n: int) -> list[tuple[tuple[int, int], ...]]:
    out = []
    for m in _all_matchings(tuple(range(1, 2 * n + 1))):
        if not any(_crossing(p, q) for p, q in itertools.combinations(m, 2)):
            out.append(tuple(sorted(tuple(sorted(l)) for l in m)))
    return sorted(out)


def brute_valence2_patterns(npoints: int) -> list[tuple[tuple[int, int], ...]]:
    """Planar valence-2 link patterns on npoints boundary points, found by
    matching 2*npoints interleaved slots (point j owns slots 2j-1, 2j),
    discarding matchings that pair a point with itself, and projecting
    slots back to points."""
    seen = set()
    for m in _all_matchings(tuple(range(1, 2 * npoints + 1))):
        if any(_crossing(p, q) for p, q in itertools.combinations(m, 2)):
            continue
        if any((a + 1) // 2 == (b + 1) // 2 for a, b in m):
            continue
        proj = tuple(
            sorted(tuple(sorted(((a + 1) // 2, (b + 1) // 2))) for a, b in m)
        )
        seen.add(proj)
    return sorted(seen)


def brute_arrow_relation(a_links, b_links) -> bool:
    """Permutation definition: b must re-pair the left endpoints of a with
    a permutation of the right endpoints of a."""
    a_pts = sorted(l[0] for l in a_links)
    b_pts = [dict(a_links)[p] for p in a_pts]
    want = set(tuple(sorted(l)) for l in b_links)
    for perm in itertools.permutations(b_pts):
        trial = set(tuple(sorted((p, q))) for p, q in zip(a_pts, perm))
        if trial == want:
            return True
    return False


# ---------------------------------------------------------------------------
# Symbolic series via sympy


def _sympy_expr(combo, subs: dict[int, sp.Expr]) -> sp.Expr:
    total = sp.Integer(0)
    for key, coeff in combo.terms.items():
        term = sp.Rational(coeff.numerator, coeff.denominator)
        for (a, b), e2 in key:
            term *= (subs[b] - subs[a]) ** sp.Rational(e2, 2)
        total += term
    return total


def _rational_subs(point: dict[int, Fraction]) -> dict[int, sp.Expr]:
    return {lab: sp.Rational(val.numerator, val.denominator) for lab, val in point.items()}


def sympy_series_coefficient(combo, u: int, v: int, order: Fraction, point: dict[int, Fraction]):
    """Exact coefficient of eps^order of combo at x_v = x_u + eps,
    evaluated at the rational collapsed configuration `point` (which maps
    every variable except v).

    Substituting eps = d^2 turns the half-integer ladder into an ordinary
    integer Laurent series in d; the wanted coefficient sits at d^(2 order).
    """
    d = sp.Symbol("d", positive=True)
    subs = _rational_subs(point)
    subs[v] = subs[u] + d**2
    expr = _sympy_expr(combo, subs)
    k2 = Fraction(order) * 2
    if k2.denominator != 1:
        raise ValueError("order must be a half-integer")
    k2 = int(k2)
    ser = sp.series(expr, d, 0, k2 + 1).removeO()
    return sp.expand(ser).coeff(d, k2)


def sympy_fused_limit(combo, u: int, v: int, r: Fraction, point: dict[int, Fraction]):
    """lim_{eps->0+} eps^-r combo(x_v = x_u + eps) at a rational point."""
    d = sp.Symbol("d", positive=True)
    subs = _rational_subs(point)
    subs[v] = subs[u] + d**2
    r = Fraction(r)
    expr = _sympy_expr(combo, subs) * d ** sp.Rational(-2 * r.numerator, r.denominator)
    return sp.limit(expr, d, 0, "+")


# ---------------------------------------------------------------------------
# Numeric collapse by Richardson extrapolation


def richardson_collapse(f, r: float, gaps=(1e-2, 1e-3, 1e-4), dps: int = 40, step: float = 1.0) -> float:
    """Extrapolated limit of eps^-r f(eps).

    The normalized values are assumed to have an expansion in powers of
    s = eps^step (step=1 for an integer correction ladder, 1/2 when the
    series advances in half-integer powers); Lagrange extrapolation to
    s = 0 over all supplied gaps kills the first len(gaps)-1 corrections.
    """
    with mpmath.workdps(dps):
        ss = [mpmath.mpf(e) ** step for e in gaps]
        vals = [f(mpmath.mpf(e)) / mpmath.mpf(e) ** r for e in gaps]
        total = mpmath.mpf(0)
        for i, (si, vi) in enumerate(zip(ss, vals)):
            w = mpmath.mpf(1)
            for j, sj in enumerate(ss):
                if j != i:
                    w *= sj / (sj - si)
            total += w * vi
        return float(total)


# ---------------------------------------------------------------------------
# Lattice reference solves


def dense_interior_laplacian(shape: tuple[int, int]):
    """Standard 5-point Dirichlet Laplacian on an (m, n) interior grid."""
    import scipy.sparse as spr

    m, n = shape
    idx = np.arange(m * n).reshape(m, n)
    rows, cols, vals = [], [], []
    for i in range(m):
        for j in range(n):
            rows.append(idx[i, j])
            cols.append(idx[i, j])
            vals.append(4.0)
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                a, b = i + di, j + dj
                if 0 <= a < m and 0 <= b < n:
                    rows.append(idx[i, j])
                    cols.append(idx[a, b])
                    vals.append(-1.0)
    return spr.csc_matrix((vals, (rows, cols)), shape=(m * n, m * n))


def dense_harmonic_extension(boundary: np.ndarray) -> np.ndarray:
    """Solve the discrete Dirichlet problem on the full (ny+1, nx+1) grid
    given boundary values (interior entries of `boundary` are ignored)."""
    import scipy.sparse.linalg as sla

    grid = boundary.astype(float).copy()
    m, n = grid.shape[0] - 2, grid.shape[1] - 2
    A = dense_interior_laplacian((m, n))
    rhs = np.zeros((m, n))
    rhs[0, :] += grid[0, 1:-1]
    rhs[-1, :] += grid[-1, 1:-1]
    rhs[:, 0] += grid[1:-1, 0]
    rhs[:, -1] += grid[1:-1, -1]
    sol = sla.spsolve(A, rhs.ravel()).reshape(m, n)
    grid[1:-1, 1:-1] = sol
    return grid


def dense_gff_variances(shape: tuple[int, int]) -> np.ndarray:
    """diag((-Delta)^-1) on the interior grid: exact pointwise variances."""
    import scipy.sparse.linalg as sla

    A = dense_interior_laplacian(shape).tocsc()
    lu = sla.splu(A)
    n = shape[0] * shape[1]
    out = np.empty(n)
    eye = np.eye(n)
    sol = lu.solve(eye)
    out[:] = np.diag(sol)
    return out.reshape(shape)


def bridge_same_sign_probability(a: float, b: float, samples: int, rng, steps: int = 32) -> tuple[float, float]:
    """Monte-Carlo estimate (mean, stderr) of the probability that a unit
    time Brownian bridge from a to b never hits zero.

    Uses a coarse Gaussian skeleton plus the exact per-segment bridge
    no-hit factor 1 - exp(-2 v w / dt), so the estimator is unbiased at
    any step count."""
    dt = 1.0 / steps
    t = np.linspace(0.0, 1.0, steps + 1)
    w = rng.standard_normal((samples, steps)).cumsum(axis=1) * math.sqrt(dt)
    w = np.concatenate([np.zeros((samples, 1)), w], axis=1)
    bridge = w - t[None, :] * w[:, -1:]
    path = a + (b - a) * t[None, :] + bridge
    v0, v1 = path[:, :-1], path[:, 1:]
    seg = np.where(v0 * v1 > 0, -np.expm1(-2.0 * v0 * v1 / dt), 0.0)
    est = seg.prod(axis=1)
    return float(est.mean()), float(est.std(ddof=1) / math.sqrt(samples))


# ---------------------------------------------------------------------------
# Elliptic modulus via theta constants


def theta_modulus_from_ratio(ratio: float, dps: int = 30) -> float:
    """k with K(k')/K(k) = ratio through the nome: q_n = exp(-pi ratio),
    k = (theta2/theta3)^2."""
    with mpmath.workdps(dps):
        qn = mpmath.exp(-mpmath.pi * mpmath.mpf(ratio))
        k = (mpmath.jtheta(2, 0, qn) / mpmath.jtheta(3, 0, qn)) ** 2
        return float(k)
