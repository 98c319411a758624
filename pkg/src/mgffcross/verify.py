"""Independent numerical checks: null-field PDEs, Moebius covariance,
collapse asymptotics, positivity and upper bounds.

All differential checks run in mpmath extended precision with central
differences; residuals are reported relative to |f| times the natural
scale min_gap^(-order), so a correct function scores ~1e-8 or better at
step 1e-3 while a perturbed one scores order one.  Nothing here shares
code with the symbolic fusion route beyond the evaluator, which is the
point: these are the cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import coulomb, partition_fn
from .combinat import (
    PairPartition,
    enumerate_link_patterns,
    enumerate_pairings,
    make_pairing,
)
from .coulomb import MonomialCombo
from .partition_fn import CONSTANTS, as_point_dict


@dataclass(frozen=True)
class PdeOperatorSpec:
    """Order (2 or 3) and per-point conformal weights of a null-field check."""

    order: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if self.order not in (2, 3):
            raise ValueError("supported operator orders are 2 and 3")


def _uniform_weights(npoints: int, w: Fraction) -> tuple[Fraction, ...]:
    return (w,) * npoints


def default_operator(order: int, npoints: int) -> PdeOperatorSpec:
    """Weight h=1/4 per unfused point (order 2), H=1 per fused (order 3)."""
    w = CONSTANTS.h if order == 2 else CONSTANTS.H
    return PdeOperatorSpec(order, _uniform_weights(npoints, w))


class _MpEval:
    """Point evaluations of a combo with shifted coordinates, cached."""

    def __init__(self, f: MonomialCombo, x: dict[int, float], step: float, dps: int):
        self.f = f
        self.dps = dps
        self.labels = sorted(x)
        with mpmath.workdps(dps):
            self.x0 = {k: mpmath.mpf(v) for k, v in x.items()}
            self.h = mpmath.mpf(step)
        self.cache: dict[tuple[tuple[int, int], ...], mpmath.mpf] = {}

    def __call__(self, shifts: dict[int, int] = {}):
        key = tuple(sorted(shifts.items()))
        got = self.cache.get(key)
        if got is None:
            with mpmath.workdps(self.dps):
                pt = dict(self.x0)
                for lab, mult in shifts.items():
                    pt[lab] = pt[lab] + mult * self.h
                got = coulomb.evaluate(self.f, pt, dps=self.dps)
            self.cache[key] = got
        return got

    # fourth-order central stencils: truncation ~ h^4 * f^(n+4), far below
    # the check tolerances even on configurations with gaps near 1/4

    def d1(self, i):
        return (
            -self({i: 2}) + 8 * self({i: 1}) - 8 * self({i: -1}) + self({i: -2})
        ) / (12 * self.h)

    def d2(self, i):
        return (
            -self({i: 2})
            + 16 * self({i: 1})
            - 30 * self()
            + 16 * self({i: -1})
            - self({i: -2})
        ) / (12 * self.h**2)

    def d3(self, i):
        return (
            -self({i: 3})
            + 8 * self({i: 2})
            - 13 * self({i: 1})
            + 13 * self({i: -1})
            - 8 * self({i: -2})
            + self({i: -3})
        ) / (8 * self.h**3)

    def d11(self, i, j):
        w = ((2, -1), (1, 8), (-1, -8), (-2, 1))
        acc = mpmath.mpf(0)
        for si, wi in w:
            for sj, wj in w:
                acc += wi * wj * self({i: si, j: sj})
        return acc / (144 * self.h**2)


def _min_gap(x: dict[int, float]) -> float:
    vals = sorted(x.values())
    return min(b - a for a, b in zip(vals, vals[1:]))


def pde2_residual(
    f: MonomialCombo,
    x,
    j: int,
    op: PdeOperatorSpec | None = None,
    step: float = 1e-3,
    dps: int = 30,
) -> float:
    """Normalized residual of the second-order null-field operator at point j:

        (kappa/2) d_j^2 f + sum_{i != j} [ 2/(x_i - x_j) d_i f
                                           - 2 w_i/(x_i - x_j)^2 f ].

    Scale: |f| * min_gap^-2.
    """
    xd = as_point_dict(x)
    if op is None:
        op = default_operator(2, len(xd))
    ev = _MpEval(f, xd, step, dps)
    with mpmath.workdps(dps):
        kappa = mpmath.mpf(CONSTANTS.kappa)
        total = kappa / 2 * ev.d2(j)
        f0 = ev()
        for idx, i in enumerate(ev.labels):
            if i == j:
                continue
            d = ev.x0[i] - ev.x0[j]
            w = mpmath.mpf(op.weights[idx].numerator) / op.weights[idx].denominator
            total += 2 / d * ev.d1(i) - 2 * w / d**2 * f0
        scale = abs(f0) / mpmath.mpf(_min_gap(xd)) ** 2
        if scale == 0:
            raise ValueError("function vanishes at the test point")
        return float(abs(total) / scale)


def pde3_residual(
    f: MonomialCombo,
    y,
    j: int,
    op: PdeOperatorSpec | None = None,
    step: float = 1e-3,
    dps: int = 30,
) -> float:
    """Normalized residual of the third-order operator at fused point j:

        d_j^3 f - 4 sum_{i != j} [ w_i/(y_i - y_j)^2 d_j f
                                   - 1/(y_i - y_j) d_i d_j f ]
                + 2 sum_{i != j} [ 2 w_i/(y_i - y_j)^3 f
                                   - 1/(y_i - y_j)^2 d_i f ].

    Scale: |f| * min_gap^-3.
    """
    yd = as_point_dict(y)
    if op is None:
        op = default_operator(3, len(yd))
    ev = _MpEval(f, yd, step, dps)
    with mpmath.workdps(dps):
        total = ev.d3(j)
        f0 = ev()
        djf = ev.d1(j)
        for idx, i in enumerate(ev.labels):
            if i == j:
                continue
            d = ev.x0[i] - ev.x0[j]
            w = mpmath.mpf(op.weights[idx].numerator) / op.weights[idx].denominator
            total -= 4 * (w / d**2 * djf - ev.d11(i, j) / d)
            total += 2 * (2 * w / d**3 * f0 - ev.d1(i) / d**2)
        scale = abs(f0) / mpmath.mpf(_min_gap(yd)) ** 3
        if scale == 0:
            raise ValueError("function vanishes at the test point")
        return float(abs(total) / scale)


def mobius_covariance_check(
    f: MonomialCombo,
    weights: tuple[Fraction, ...],
    x,
    abcd: tuple[float, float, float, float],
    dps: int = 40,
) -> float:
    """Relative error of f(x) = prod phi'(x_i)^{w_i} f(phi(x)) for the
    Moebius map phi = (a z + b)/(c z + d).

    Requires ad - bc > 0 and the pole -d/c outside the convex hull of
    the points, so phi preserves their order.
    """
    a, b, c, d = abcd
    det = a * d - b * c
    if det <= 0:
        raise ValueError("need positive determinant")
    xd = as_point_dict(x)
    xs = sorted(xd.values())
    if c != 0:
        pole = -d / c
        if xs[0] <= pole <= xs[-1]:
            raise ValueError("Moebius pole inside the configuration")
    with mpmath.workdps(dps):
        am, bm, cm, dm = (mpmath.mpf(t) for t in (a, b, c, d))
        detm = am * dm - bm * cm
        mapped = {}
        jac = mpmath.mpf(1)
        for idx, (lab, v) in enumerate(sorted(xd.items())):
            vm = mpmath.mpf(v)
            mapped[lab] = (am * vm + bm) / (cm * vm + dm)
            dphi = detm / (cm * vm + dm) ** 2
            w = weights[idx]
            jac *= dphi ** (mpmath.mpf(w.numerator) / w.denominator)
        lhs = coulomb.evaluate(f, xd, dps=dps)
        rhs = jac * coulomb.evaluate(f, mapped, dps=dps)
        return float(abs(lhs - rhs) / abs(lhs))


def asymptotics_check(
    a: PairPartition,
    j: int,
    x=None,
    gaps: tuple[float, ...] = (1e-2, 1e-3, 1e-4),
    dps: int = 40,
) -> dict:
    """Compare the symbolic collapse of Z_a at position j against the
    numerically extrapolated limit of the unfused function.

    The unfused Z_a is evaluated at x_{j+1} = x_j + eps for the given
    gaps, normalized by eps^r with the proper collapse order r, and
    Richardson-extrapolated assuming the integer series ladder; the
    result must match the exact fused value.
    """
    n2 = 2 * a.n
    if x is None:
        x = tuple(float(t) for t in range(1, n2))  # collapsed configuration
    xd = {i + 1: v for i, v in enumerate(x)} if not hasattr(x, "keys") else dict(x)
    if len(xd) != n2 - 1:
        raise ValueError("need a configuration for the collapsed points")
    linked = (j, j + 1) in a.links
    r = Fraction(-1, 2) if linked else Fraction(1, 2)
    fused = partition_fn.fuse_once(a, j)
    with mpmath.workdps(dps):
        exact = coulomb.evaluate(fused, xd, dps=dps)
        z = partition_fn.pure_partition(a)
        vals = []
        for eps in gaps:
            em = mpmath.mpf(eps)
            pt = {}
            for lab in range(1, n2 + 1):
                if lab <= j:
                    pt[lab] = mpmath.mpf(xd[lab])
                elif lab == j + 1:
                    pt[lab] = mpmath.mpf(xd[j]) + em
                else:
                    pt[lab] = mpmath.mpf(xd[lab - 1])
            raw = coulomb.evaluate(z, pt, dps=dps)
            vals.append(raw / em ** (mpmath.mpf(r.numerator) / r.denominator))
        e1, e2 = mpmath.mpf(gaps[-2]), mpmath.mpf(gaps[-1])
        extrap = (e1 * vals[-1] - e2 * vals[-2]) / (e1 - e2)
        rel = float(abs(extrap - exact) / abs(exact))
    return {
        "pairing": a.links,
        "position": j,
        "order": r,
        "values": [float(v) for v in vals],
        "extrapolated": float(extrap),
        "exact": float(exact),
        "rel_error": rel,
    }


def upper_bound_combo(a: PairPartition) -> MonomialCombo:
    """prod over links (x_b - x_a)^(-1/2), the refined pointwise bound."""
    return MonomialCombo.monomial(1, {l: Fraction(-1, 2) for l in a.links})


def bounds_check(a: PairPartition, x, slack: float = 1e-12) -> dict:
    """0 < Z_a(x) <= prod_links (x_b - x_a)^(-1/2), with tiny slack for
    the configurations where the bound is attained."""
    xd = as_point_dict(x)
    z = coulomb.evaluate(partition_fn.pure_partition(a), xd)
    ub = coulomb.evaluate(upper_bound_combo(a), xd)
    ok = (z > 0.0) and (z <= ub * (1.0 + slack))
    return {"pairing": a.links, "z": z, "bound": ub, "ok": bool(ok)}


def perturb_combo(f: MonomialCombo, rel: float) -> MonomialCombo:
    """Add rel * c0 * m0 * (x_b - x_a) built from the first term of f: a
    shape distortion (not a global rescale, which every relation here is
    blind to) that any residual check must flag."""
    if f.is_zero() or rel == 0:
        return f
    key = sorted(f.terms)[0]
    if not key:
        raise ValueError("cannot perturb a constant")
    frac = Fraction(rel).limit_denominator(10**12)
    (pair, e2), rest = key[0], key[1:]
    bumped = (((pair, e2 + 2),) if e2 != -2 else ()) + rest
    bump = MonomialCombo({tuple(sorted(bumped)): f.terms[key] * frac})
    return f + bump


# ---------------------------------------------------------------------------
# Named suites for the command line


def _sample_configs(npoints: int, count: int, rng) -> list[tuple[float, ...]]:
    out = []
    for _ in range(count):
        gaps = rng.uniform(0.25, 1.75, size=npoints)
        start = rng.uniform(-2.0, 2.0)
        xs = start + gaps.cumsum()
        out.append(tuple(float(v) for v in xs))
    return out


def run_suite(
    suite: str,
    npoints: int = 4,
    seed: int = 0,
    perturb: float = 0.0,
    configs: int = 3,
    dps: int = 30,
) -> list[dict]:
    """Run one named check suite; returns a list of check records with
    fields name, value, tol, ok.  `perturb` != 0 corrupts each checked
    function first (negative control: checks should then fail)."""
    import numpy as np

    rng = np.random.default_rng(seed)
    checks: list[dict] = []

    def record(name: str, value: float, tol: float):
        checks.append({"name": name, "value": value, "tol": tol, "ok": bool(value <= tol)})

    if suite == "pde":
        n = npoints // 2
        order2 = [(f"Z{a.links}", partition_fn.pure_partition(a)) for a in enumerate_pairings(n)]
        order2 += [(f"U{a.links}", partition_fn.conformal_block(a)) for a in enumerate_pairings(n)]
        for name, f in order2:
            g = perturb_combo(f, perturb)
            for x in _sample_configs(npoints, configs, rng):
                for j in range(1, npoints + 1):
                    record(f"pde2 {name} j={j}", pde2_residual(g, x, j, dps=dps), 1e-5)
        order3 = [
            (f"Zhat{p.links}", partition_fn.fused_pure_partition(p))
            for p in enumerate_link_patterns((2,) * npoints)
        ]
        order3.append(("Ztotal", partition_fn.z_mgff_total(npoints)))
        for name, f in order3:
            g = perturb_combo(f, perturb)
            for y in _sample_configs(npoints, configs, rng):
                for j in range(1, npoints + 1):
                    record(f"pde3 {name} j={j}", pde3_residual(g, y, j, dps=dps), 1e-4)
    elif suite == "cov":
        n = npoints // 2
        targets: list[tuple[str, MonomialCombo, tuple[Fraction, ...]]] = []
        for a in enumerate_pairings(n):
            targets.append(
                (f"Z{a.links}", partition_fn.pure_partition(a), _uniform_weights(npoints, CONSTANTS.h))
            )
            targets.append(
                (f"U{a.links}", partition_fn.conformal_block(a), _uniform_weights(npoints, CONSTANTS.h))
            )
        for p in enumerate_link_patterns((2,) * npoints):
            targets.append(
                (
                    f"Zhat{p.links}",
                    partition_fn.fused_pure_partition(p),
                    _uniform_weights(npoints, CONSTANTS.H),
                )
            )
        targets.append(
            ("Ztotal", partition_fn.z_mgff_total(npoints), _uniform_weights(npoints, CONSTANTS.H))
        )
        maps = [(1.0, 0.3, 0.0, 1.0), (1.3, 0.0, 0.0, 0.7)]
        for _ in range(20):
            c = float(rng.uniform(0.05, 0.3))
            d = float(rng.uniform(3.0, 6.0))
            maps.append((float(rng.uniform(0.5, 2.0)), float(rng.uniform(-0.5, 0.5)), c, d))
        for name, f, w in targets:
            g = perturb_combo(f, perturb)
            for x in _sample_configs(npoints, configs, rng):
                for abcd in maps:
                    xs = sorted(x)
                    if abcd[2] != 0 and xs[0] <= -abcd[3] / abcd[2] <= xs[-1]:
                        continue
                    record(
                        f"mobius {name} {abcd}",
                        mobius_covariance_check(g, w, x, abcd, dps=dps + 10),
                        1e-9,
                    )
    elif suite == "asy":
        n = npoints // 2
        for a in enumerate_pairings(n):
            for j in range(1, 2 * n):
                rep = asymptotics_check(a, j)
                checks.append(
                    {
                        "name": f"asy Z{a.links} j={j} r={rep['order']}",
                        "value": rep["rel_error"],
                        "tol": 1e-6,
                        "ok": rep["rel_error"] <= 1e-6,
                    }
                )
    elif suite == "bounds":
        n = npoints // 2
        pairings = enumerate_pairings(n)
        for x in _sample_configs(npoints, max(configs * 10, 20), rng):
            for a in pairings:
                rep = bounds_check(a, x)
                margin = 0.0 if rep["ok"] else abs(rep["z"] - rep["bound"])
                checks.append(
                    {
                        "name": f"bound Z{a.links}",
                        "value": margin,
                        "tol": 0.0,
                        "ok": rep["ok"],
                    }
                )
    else:
        raise ValueError(f"unknown suite {suite!r} (use pde, cov, asy or bounds)")
    return checks
