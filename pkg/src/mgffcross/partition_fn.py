"""Pure partition functions at kappa = 4 and their valence-2 fusions.

Conformal blocks are the difference-product monomials

    U_alpha = prod_{i<j} (x_j - x_i)^(theta_alpha(i,j)/2),

where theta is +1 when i and j are both up-step or both down-step
positions of the pairing alpha and -1 otherwise.  Pure partition
functions are the integer recombinations Z_alpha = sum_beta
Minv[alpha, beta] U_beta with the inverse incidence matrix; they are
positive on ordered configurations and satisfy the null-field second
order PDEs.

Fusing the points pairwise, x_{2j} -> x_{2j-1}, at normalized order
+1/2 per pair produces the partition functions of valence-2 insertions:
Zhat of a link pattern is the full pairwise fusion of Z over the slot
lift of the pattern.  Two independent routes are provided, a sequential
one (repeated fuse_pair) and a closed-form grouped one, plus the total
partition function that normalizes crossing probabilities.

All variable labels are 1-based; fused functions live on labels 1..2N.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import coulomb
from .combinat import (
    DyckPath,
    LinkPattern,
    LocalShape,
    PairPartition,
    dyck_from_pairing,
    local_shape,
    make_pairing,
    tau,
)
from .coulomb import MonomialCombo
from .incidence import inverse_row


@dataclass(frozen=True)
class Constants:
    """Fixed parameters of the critical model.

    kappa: SLE parameter of the level lines.
    h: boundary weight of a single marked point.
    H: boundary weight of a fused (valence 2) marked point.
    lam: height gap unit; boundary data jumps by multiples of 2*lam.
    """

    kappa: float = 4.0
    h: Fraction = Fraction(1, 4)
    H: Fraction = Fraction(1)
    lam: float = math.pi / 2


CONSTANTS = Constants()


# ---------------------------------------------------------------------------
# Point configurations and sign tables


@dataclass(frozen=True)
class PointConfig:
    """Strictly increasing finite tuple of real boundary coordinates."""

    xs: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        object.__setattr__(self, "xs", xs)
        if any(not math.isfinite(x) for x in xs):
            raise ValueError("coordinates must be finite")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("coordinates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.xs)

    def as_dict(self) -> dict[int, float]:
        return {i + 1: x for i, x in enumerate(self.xs)}


def as_point_dict(x) -> dict[int, float]:
    """Accept a PointConfig, a mapping, or a plain increasing sequence."""
    if isinstance(x, PointConfig):
        return x.as_dict()
    if hasattr(x, "keys"):
        return {int(k): v for k, v in x.items()}
    return PointConfig(tuple(x)).as_dict()


@dataclass(frozen=True)
class ThetaTable:
    """Pair sign table of a pairing: +1 same step type, -1 opposite."""

    pairing: PairPartition
    signs: tuple[tuple[int, ...], ...]

    def sign(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("theta needs distinct indices")
        return self.signs[i - 1][j - 1]


@lru_cache(maxsize=None)
def theta_table(p: PairPartition) -> ThetaTable:
    ups = p.a_points()
    n2 = 2 * p.n
    rows = tuple(
        tuple(
            0 if i == j else (1 if ((i in ups) == (j in ups)) else -1)
            for j in range(1, n2 + 1)
        )
        for i in range(1, n2 + 1)
    )
    return ThetaTable(p, rows)


# ---------------------------------------------------------------------------
# Conformal blocks and pure partition functions


def conformal_block(a: PairPartition) -> MonomialCombo:
    """U_a as an exact monomial: exponent theta(i,j)/2 on every pair i<j."""
    th = theta_table(a)
    n2 = 2 * a.n
    exps = [((i, j), th.sign(i, j)) for i in range(1, n2 + 1) for j in range(i + 1, n2 + 1)]
    return MonomialCombo.from_doubled(1, exps)


@lru_cache(maxsize=None)
def pure_partition(a: PairPartition) -> MonomialCombo:
    """Z_a = sum over beta of Minv[a, beta] * U_beta, exact."""
    out = MonomialCombo.zero()
    for beta, coeff in inverse_row(a):
        out = out + conformal_block(beta).scale(coeff)
    return out


def fuse_once(a: PairPartition, j: int) -> MonomialCombo:
    """Collapse x_{j+1} -> x_j in Z_a at the order set by the link structure.

    If {j, j+1} is a link of a, the two points close a level line and
    the normalized limit sits at order -1/2 (it reproduces the smaller
    pure partition function with that link removed).  Otherwise the
    limit sits at order +1/2 and is a partition function with one
    valence-2 insertion.  Result keeps labels 1..2N-1, gap closed.
    """
    n2 = 2 * a.n
    if not 1 <= j <= n2 - 1:
        raise ValueError(f"position {j} out of range")
    linked = (j, j + 1) in a.links
    r = Fraction(-1, 2) if linked else Fraction(1, 2)
    c = coulomb.fuse_pair(pure_partition(a), j, j + 1, j, r)
    shift = {k: k - 1 for k in range(j + 2, n2 + 1)}
    return c.rename(shift) if shift else c


# ---------------------------------------------------------------------------
# Full pairwise fusion


def _fusion_slot_pairs(npoints: int) -> tuple[tuple[int, int], ...]:
    return tuple((2 * j - 1, 2 * j) for j in range(1, npoints + 1))


def _finish_relabel(c: MonomialCombo, npoints: int) -> MonomialCombo:
    return c.rename({2 * j - 1: j for j in range(1, npoints + 1)})


@lru_cache(maxsize=None)
def fused_pure_partition(p: LinkPattern) -> MonomialCombo:
    """Zhat of a valence-2 link pattern on 2N points, in labels 1..2N.

    Sequential route: start from Z of the slot lift tau(p) on 4N points
    and fuse each slot pair (2j-1, 2j) at order +1/2.  The order of the
    pair fusions does not matter; lower-order cancellation at each step
    is verified exactly by fuse_pair.
    """
    if set(p.valences) != {2}:
        raise ValueError("pattern must have valence 2 at every point")
    c = pure_partition(tau(p))
    for u, v in _fusion_slot_pairs(p.npoints):
        c = coulomb.fuse_pair(c, u, v, u, Fraction(1, 2))
    return _finish_relabel(c, p.npoints)


def _partial_matchings(items: tuple[int, ...]):
    """All ways to pick disjoint unordered pairs from items (possibly none).

    Yields (pairs, unmatched)."""
    if not items:
        yield (), ()
        return
    first, rest = items[0], items[1:]
    # first stays unmatched
    for pairs, un in _partial_matchings(rest):
        yield pairs, (first,) + un
    # first pairs with a later item
    for idx, second in enumerate(rest):
        others = rest[:idx] + rest[idx + 1 :]
        for pairs, un in _partial_matchings(others):
            yield ((first, second),) + pairs, un


def fused_pure_partition_grouped(p: LinkPattern) -> MonomialCombo:
    """Zhat by the closed-form route, grouping the fusion series directly.

    Runs over base pairings beta in the inverse-incidence row of the
    slot lift whose Dyck path has no peak at any odd position.  Odd
    positions carrying a valley form the set J; the fused limit of the
    grouped series is an explicit sum over partial matchings of J.
    Independent of `fused_pure_partition` except for shared primitives.
    """
    if set(p.valences) != {2}:
        raise ValueError("pattern must have valence 2 at every point")
    n2 = p.npoints
    alpha = tau(p)
    out = MonomialCombo.zero()
    for beta, coeff in inverse_row(alpha):
        d = dyck_from_pairing(beta)
        shapes = {j: local_shape(d, 2 * j - 1) for j in range(1, n2 + 1)}
        if any(s is LocalShape.MAX for s in shapes.values()):
            continue
        jset = tuple(j for j in range(1, n2 + 1) if shapes[j] is LocalShape.MIN)
        rest = tuple(i for i in range(1, n2 + 1) if i not in jset)
        th = theta_table(beta)
        g_exps = [
            ((i, i2), 4 * th.sign(2 * i, 2 * i2))
            for i, i2 in itertools.combinations(rest, 2)
        ]
        gmono = MonomialCombo.from_doubled(1, g_exps)
        ssum = MonomialCombo.zero()
        for pairs, unmatched in _partial_matchings(jset):
            term = MonomialCombo.constant(1)
            for a_, b_ in pairs:
                lo, hi = (a_, b_) if a_ < b_ else (b_, a_)
                term = term * MonomialCombo.from_doubled(2, [((lo, hi), -4)])
            dead = False
            for u in unmatched:
                zu = MonomialCombo.zero()
                for i in rest:
                    lo, hi = (i, u) if i < u else (u, i)
                    orient = 1 if i > u else -1
                    zu = zu + MonomialCombo.from_doubled(
                        2 * th.sign(2 * i, 2 * u - 1) * orient, [((lo, hi), -2)]
                    )
                if zu.is_zero():
                    dead = True
                    break
                term = term * zu
            if not dead:
                ssum = ssum + term
        out = out + (gmono * ssum).scale(coeff)
    return out


# ---------------------------------------------------------------------------
# Total partition function and reference paths


def z_mgff_total(npoints: int) -> MonomialCombo:
    """Total partition function in fused variables y_1..y_npoints:
    prod_{i<j} (y_j - y_i)^(2 (-1)^(j-i)).  Equals the sum of Zhat over
    all patterns whose lift is reachable from the ground state."""
    if npoints < 2 or npoints % 2:
        raise ValueError("need an even number of points >= 2")
    exps = [
        ((i, j), 4 * (-1) ** (j - i))
        for i in range(1, npoints + 1)
        for j in range(i + 1, npoints + 1)
    ]
    return MonomialCombo.from_doubled(1, exps)


def omega_path(npoints: int) -> DyckPath:
    """Ground-state slot path: heights 0,1,2,1 repeated, on 2*npoints steps."""
    if npoints < 2 or npoints % 2:
        raise ValueError("need an even number of points >= 2")
    heights = []
    for _ in range(npoints // 2):
        heights.extend((0, 1, 2, 1))
    heights.append(0)
    return DyckPath(tuple(heights))


def omega_pairing(npoints: int) -> PairPartition:
    """Pairing of the ground-state path: {4j+1, 4j+4} and {4j+2, 4j+3}."""
    pairs = []
    for j in range(npoints // 2):
        pairs.append((4 * j + 1, 4 * j + 4))
        pairs.append((4 * j + 2, 4 * j + 3))
    return make_pairing(pairs)


def halved_path(b: DyckPath) -> DyckPath:
    """Path on half as many steps through every second height, halved.

    Defined when b has no extremum at an odd position, i.e. consecutive
    even heights always differ."""
    h = b.heights
    sub = h[::2]
    for x, y in zip(sub, sub[1:]):
        if x == y:
            raise ValueError("path has an extremum at an odd position")
    return DyckPath(tuple(x // 2 for x in sub))


# ---------------------------------------------------------------------------
# Boundary data profile


@dataclass(frozen=True)
class BoundaryProfile:
    """Piecewise constant boundary data encoded by a Dyck path.

    plateaus[k] is the boundary value on the k-th interval between
    marked points (2N+1 intervals, outermost ones at -2*lam), and
    point_heights[k-1] is the effective height variable at marked point
    k.  Descriptive only; no numerics depend on it.
    """

    plateaus: tuple[float, ...]
    point_heights: tuple[float, ...]

    @classmethod
    def from_path(cls, b: DyckPath, lam: float = CONSTANTS.lam) -> "BoundaryProfile":
        h = b.heights
        plat = tuple(2 * lam * (x - 1) for x in h)
        pts = tuple(lam * (h[k - 1] + h[k] - 2) for k in range(1, len(h)))
        return cls(plat, pts)


# ---------------------------------------------------------------------------
# Convenience evaluation helpers


def evaluate_block(a: PairPartition, x, dps: int | None = None):
    return coulomb.evaluate(conformal_block(a), as_point_dict(x), dps=dps)


def evaluate_pure(a: PairPartition, x, dps: int | None = None):
    return coulomb.evaluate(pure_partition(a), as_point_dict(x), dps=dps)


def evaluate_fused(p: LinkPattern, x, dps: int | None = None):
    return coulomb.evaluate(fused_pure_partition(p), as_point_dict(x), dps=dps)
