"""Exact algebra of products of pairwise differences with half-integer powers.

Objects here are finite sums of monomials

    c * prod_{a<b} (x_b - x_a)^{e(a,b)},   e(a,b) in (1/2) Z,

with rational coefficients.  Exponents are stored doubled as integers,
so the arithmetic is exact end to end.  Variables are integer labels;
a pair key (a, b) always has a < b and the base is x_b - x_a, which is
positive on ordered configurations x_a < x_b.

The main nontrivial operation is `fuse_pair`: substitute
x_v = x_u + eps and extract the coefficient of eps^r as eps -> 0+,
verifying that every lower order cancels exactly.  Since only the
(u, v) factor is singular at eps = 0, each monomial contributes a
generalized binomial expansion of its regular factors, and everything
stays inside the same monomial class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import DivergenceError, TruncationLimitError

# Hard cap on how deep a series is developed past its leading order.
SERIES_ORDER_CAP = 16

Pair = tuple[int, int]
ExpKey = tuple[tuple[Pair, int], ...]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


def half_binomial(e2: int, k: int) -> Fraction:
    """Generalized binomial coefficient C(e2/2, k) for integer e2."""
    num = Fraction(1)
    for t in range(k):
        num *= Fraction(e2 - 2 * t, 2)
    return num / math.factorial(k)


@dataclass(frozen=True)
class Monomial:
    """Single term: coeff * prod (x_b - x_a)^(e2/2) over the exponent items."""

    coeff: Fraction
    exponents: ExpKey  # sorted ((a, b), e2) with e2 != 0

    def exponent(self, a: int, b: int) -> Fraction:
        key = (a, b) if a < b else (b, a)
        for p, e2 in self.exponents:
            if p == key:
                return Fraction(e2, 2)
        return Fraction(0)


def _canon_exponents(exps) -> ExpKey:
    """Merge and sort exponent items; drop zeros.  Input items may repeat."""
    acc: dict[Pair, int] = {}
    for pair, e2 in exps:
        a, b = pair
        if not a < b:
            raise ValueError(f"pair {pair} not ordered")
        acc[pair] = acc.get(pair, 0) + e2
    return tuple(sorted((p, e) for p, e in acc.items() if e != 0))


class MonomialCombo:
    """Finite rational combination of difference-product monomials.

    Internally a dict from canonical exponent keys to nonzero Fractions;
    supports +, -, scalar and combo multiplication, exact equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[ExpKey, Fraction] | None = None):
        self.terms: dict[ExpKey, Fraction] = {}
        if terms:
            for key, c in terms.items():
                if c != 0:
                    self.terms[key] = _as_fraction(c)

    # -- constructors

    @staticmethod
    def zero() -> "MonomialCombo":
        return MonomialCombo()

    @staticmethod
    def constant(c) -> "MonomialCombo":
        c = _as_fraction(c)
        return MonomialCombo({(): c} if c else None)

    @staticmethod
    def monomial(coeff, exponents) -> "MonomialCombo":
        """exponents: mapping or iterable of ((a, b), e) with e in (1/2)Z,
        given either as Fraction/int exponents or as (pair, e2) doubled ints
        via `doubled=True` semantics of from_doubled."""
        items = exponents.items() if hasattr(exponents, "items") else exponents
        doubled = []
        for pair, e in items:
            e = _as_fraction(e) * 2
            if e.denominator != 1:
                raise ValueError("exponents must be half-integers")
            doubled.append((tuple(pair), int(e)))
        return MonomialCombo.from_doubled(coeff, doubled)

    @staticmethod
    def from_doubled(coeff, doubled_exponents) -> "MonomialCombo":
        c = _as_fraction(coeff)
        if c == 0:
            return MonomialCombo()
        return MonomialCombo({_canon_exponents(doubled_exponents): c})

    # -- inspection

    def monomials(self) -> tuple[Monomial, ...]:
        return tuple(Monomial(c, k) for k, c in sorted(self.terms.items()))

    def variables(self) -> tuple[int, ...]:
        vs: set[int] = set()
        for key in self.terms:
            for (a, b), _ in key:
                vs.add(a)
                vs.add(b)
        return tuple(sorted(vs))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonomialCombo):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "<combo 0>"
        parts = []
        for key, c in sorted(self.terms.items())[:4]:
            fac = "*".join(f"d({a},{b})^{e2}/2" for (a, b), e2 in key) or "1"
            parts.append(f"{c}*{fac}")
        more = "" if len(self.terms) <= 4 else f" +{len(self.terms) - 4} terms"
        return f"<combo {' + '.join(parts)}{more}>"

    # -- ring operations

    def __add__(self, other: "MonomialCombo") -> "MonomialCombo":
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        res = MonomialCombo()
        res.terms = out
        return res

    def __neg__(self) -> "MonomialCombo":
        res = MonomialCombo()
        res.terms = {k: -c for k, c in self.terms.items()}
        return res

    def __sub__(self, other: "MonomialCombo") -> "MonomialCombo":
        return self + (-other)

    def scale(self, c) -> "MonomialCombo":
        c = _as_fraction(c)
        if c == 0:
            return MonomialCombo()
        res = MonomialCombo()
        res.terms = {k: c * v for k, v in self.terms.items()}
        return res

    def __mul__(self, other):
        if isinstance(other, MonomialCombo):
            out: dict[ExpKey, Fraction] = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    key = _canon_exponents(k1 + k2)
                    s = out.get(key, Fraction(0)) + c1 * c2
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
            res = MonomialCombo()
            res.terms = out
            return res
        return self.scale(other)

    __rmul__ = __mul__

    # -- relabeling

    def rename(self, mapping: dict[int, int]) -> "MonomialCombo":
        """Relabel variables.  A pair whose orientation flips picks up
        (-1)^e; that is only legal for integer exponents (even e2)."""
        img = {v: mapping.get(v, v) for v in self.variables()}
        if len(set(img.values())) != len(img):
            raise ValueError("relabeling must be injective on the variables")
        out: dict[ExpKey, Fraction] = {}
        for key, c in self.terms.items():
            items = []
            sign = 1
            for (a, b), e2 in key:
                na, nb = img.get(a, a), img.get(b, b)
                if na == nb:
                    raise ValueError("relabeling collapses a pair")
                if na > nb:
                    if e2 % 2:
                        raise ValueError(
                            f"orientation flip of pair ({a},{b}) with half-integer power"
                        )
                    na, nb = nb, na
                    if (e2 // 2) % 2:
                        sign = -sign
                items.append(((na, nb), e2))
            ckey = _canon_exponents(items)
            s = out.get(ckey, Fraction(0)) + sign * c
            if s:
                out[ckey] = s
            else:
                out.pop(ckey, None)
        res = MonomialCombo()
        res.terms = out
        return res

    def to_string(self) -> str:
        """Full exact dump, deterministic order, for debugging."""
        if not self.terms:
            return "0"
        lines = []
        for key, c in sorted(self.terms.items()):
            fac = " ".join(f"(x{b}-x{a})^({e2}/2)" for (a, b), e2 in key)
            lines.append(f"{c} {fac}".rstrip())
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(c: MonomialCombo, values, dps: int | None = None):
    """Evaluate at x = values (mapping label -> number, or a sequence taken
    as labels 1..len).  With dps set, works in mpmath arithmetic at that
    precision and returns an mpf.

    Requires x_b - x_a nonzero on every used pair, and positive whenever
    the exponent is a strict half-integer.
    """
    if not hasattr(values, "keys"):
        values = {i + 1: v for i, v in enumerate(values)}
    if dps is not None:
        import mpmath

        with mpmath.workdps(dps):
            vals = {k: mpmath.mpf(v) if not isinstance(v, mpmath.mpf) else v
                    for k, v in values.items()}
            return _evaluate_core(c, vals, mpmath_mode=True)
    return _evaluate_core(c, {k: float(v) for k, v in values.items()}, mpmath_mode=False)


def _evaluate_core(c: MonomialCombo, vals, mpmath_mode: bool):
    if mpmath_mode:
        import mpmath

        sqrt = mpmath.sqrt
        total = mpmath.mpf(0)
        one = mpmath.mpf(1)
    else:
        sqrt = math.sqrt
        total = 0.0
        one = 1.0
    pow_cache: dict[tuple[Pair, int], object] = {}
    diff_cache: dict[Pair, object] = {}

    def factor(pair: Pair, e2: int):
        got = pow_cache.get((pair, e2))
        if got is not None:
            return got
        d = diff_cache.get(pair)
        if d is None:
            a, b = pair
            try:
                d = vals[b] - vals[a]
            except KeyError as exc:
                raise ValueError(f"no value for variable {exc.args[0]}") from None
            if d == 0:
                raise ValueError(f"coincident points for pair {pair}")
            diff_cache[pair] = d
        if e2 % 2 and d < 0:
            raise ValueError(f"negative base for half-integer power on pair {pair}")
        q, r = divmod(e2, 2)
        val = d**q
        if r:
            val = val * sqrt(d)
        pow_cache[(pair, e2)] = val
        return val

    for key, coeff in sorted(c.terms.items()):
        term = one * (coeff.numerator) / coeff.denominator
        for pair, e2 in key:
            term = term * factor(pair, e2)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Fusion: x_v -> x_u + eps


def _check_adjacent(c: MonomialCombo, u: int, v: int) -> None:
    if not u < v:
        raise ValueError("need u < v")
    between = [w for w in c.variables() if u < w < v]
    if between:
        raise ValueError(f"variables {between} lie strictly between fused pair ({u},{v})")


def _term_series(key: ExpKey, coeff: Fraction, u: int, v: int, r2: int):
    """Contribution of one monomial to the eps^(r2/2) coefficient after
    substituting x_v = x_u + eps.  Yields (exp_key, coeff) pieces."""
    e2uv = 0
    others: list[tuple[int, int]] = []  # (i, e2 of pair with v)
    base: list[tuple[Pair, int]] = []
    for (a, b), e2 in key:
        if (a, b) == (u, v):
            e2uv = e2
        elif b == v:
            others.append((a, e2))
            base.append(((min(a, u), max(a, u)), e2))
        elif a == v:
            others.append((b, e2))
            base.append(((min(b, u), max(b, u)), e2))
        else:
            base.append(((a, b), e2))
    k2 = r2 - e2uv
    if k2 < 0 or k2 % 2:
        return
    k = k2 // 2
    if k > SERIES_ORDER_CAP:
        raise TruncationLimitError(f"series depth {k} exceeds cap {SERIES_ORDER_CAP}")
    if k == 0:
        yield _canon_exponents(base), coeff
        return

    # distribute k among the regular factors (x_i - x_v)^(e2/2):
    #   i < u: (x_u - x_i) + eps, expansion sign +1
    #   i > v: (x_i - x_u) - eps, expansion sign -1
    def distribute(idx: int, left: int, extra: list, factor: Fraction):
        if idx == len(others):
            if left == 0:
                yield _canon_exponents(base + extra), coeff * factor
            return
        i, e2 = others[idx]
        pair = (min(i, u), max(i, u))
        for ki in range(left + 1):
            f = half_binomial(e2, ki)
            if f == 0:
                continue
            if ki % 2 and i > v:
                f = -f
            piece = extra + [(pair, -2 * ki)] if ki else extra
            yield from distribute(idx + 1, left - ki, piece, factor * f)

    yield from distribute(0, k, [], Fraction(1))


def series_coefficient(c: MonomialCombo, u: int, v: int, order) -> MonomialCombo:
    """Coefficient of eps^order in c after x_v = x_u + eps, exact.

    The result keeps label u for the fusion point and drops v.  Requires
    no other variable of c between u and v, so that all non-fused factors
    stay bounded away from zero as eps -> 0+.
    """
    _check_adjacent(c, u, v)
    order = _as_fraction(order)
    r2 = order * 2
    if r2.denominator != 1:
        raise ValueError("order must be a half-integer")
    r2 = int(r2)
    out: dict[ExpKey, Fraction] = {}
    for key, coeff in c.terms.items():
        for ekey, cc in _term_series(key, coeff, u, v, r2):
            s = out.get(ekey, Fraction(0)) + cc
            if s:
                out[ekey] = s
            else:
                out.pop(ekey, None)
    res = MonomialCombo()
    res.terms = out
    return res


def fuse_pair(c: MonomialCombo, u: int, v: int, target: int, r) -> MonomialCombo:
    """Normalized fusion limit lim eps^-r [c at x_v = x_u + eps].

    Every series order below r must cancel exactly across the combo,
    otherwise DivergenceError reports the first surviving order.  The
    fused point is relabeled u -> target.
    """
    _check_adjacent(c, u, v)
    r = _as_fraction(r)
    r2 = r * 2
    if r2.denominator != 1:
        raise ValueError("fusion order must be a half-integer")
    r2 = int(r2)
    if c.is_zero():
        return MonomialCombo()
    min_e2 = min(
        (dict(key).get((u, v), 0) for key in c.terms),
        default=0,
    )
    if r2 - min_e2 > 2 * SERIES_ORDER_CAP:
        raise TruncationLimitError(
            f"{(r2 - min_e2) / 2} orders from leading exceeds cap {SERIES_ORDER_CAP}"
        )
    for o2 in range(min_e2, r2):
        low = series_coefficient(c, u, v, Fraction(o2, 2))
        if not low.is_zero():
            raise DivergenceError(
                f"order {Fraction(o2, 2)} below requested {r} has nonzero coefficient"
            )
    res = series_coefficient(c, u, v, r)
    if target != u:
        res = res.rename({u: target})
    return res
