"""Crossing probabilities, rectangle geometry, and the cluster dictionary."""

import math
import random

import pytest

from mgffcross import incidence, partition_fn
from mgffcross.combinat import enumerate_link_patterns, enumerate_pairings, tau
from mgffcross.errors import IncompatiblePartitionsError
from mgffcross.probability import (
    ClusterPartitions,
    RectanglePolygon,
    canonical_partition,
    cluster_pattern_table,
    connection_probability,
    cross_ratio,
    cross_ratio_rectangle,
    crossing_probability,
    outcome_distribution,
    pattern_from_cluster_partitions,
    rect_boundary_to_halfplane,
    rectangle_distribution,
    solve_modulus,
)

from oracles import theta_modulus_from_ratio


def random_points(n, rng, lo=0.25, hi=1.75):
    xs = [0.0]
    for _ in range(n - 1):
        xs.append(xs[-1] + rng.uniform(lo, hi))
    return tuple(xs)


def closed_forms_n2(q):
    """The three 4-point pattern probabilities in enumeration order."""
    return (
        (1 - q) ** 4,
        2 * q * (1 - q) * (2 - q + q * q),
        q ** 4,
    )


# ---------------------------------------------------------------------------
# cross ratio


def test_cross_ratio_frozen():
    assert cross_ratio((0.0, 1.0, 2.0, 3.0)) == pytest.approx(0.25, rel=1e-15)


def test_cross_ratio_needs_four_points():
    with pytest.raises(ValueError):
        cross_ratio((0.0, 1.0, 2.0))


def test_cross_ratio_affine_invariant():
    rng = random.Random(5)
    for _ in range(5):
        y = random_points(4, rng)
        a, b = rng.uniform(0.5, 3.0), rng.uniform(-2.0, 2.0)
        mapped = tuple(a * v + b for v in y)
        assert cross_ratio(mapped) == pytest.approx(cross_ratio(y), rel=1e-12)


def test_cross_ratio_mobius_invariant():
    # full fractional-linear map with the pole left of every point
    y = (0.0, 0.7, 1.9, 3.2)
    phi = lambda v: (2.0 * v + 3.0) / (v + 5.0)
    mapped = tuple(phi(v) for v in y)
    assert mapped == tuple(sorted(mapped))
    assert cross_ratio(mapped) == pytest.approx(cross_ratio(y), rel=1e-12)


# ---------------------------------------------------------------------------
# four-point closed forms


def test_four_point_distribution_matches_closed_forms():
    rng = random.Random(11)
    for _ in range(5):
        y = random_points(4, rng)
        q = cross_ratio(y)
        dist = outcome_distribution(4, y)
        want = closed_forms_n2(q)
        for got, ref in zip(dist.probs, want):
            assert got == pytest.approx(ref, rel=1e-10)


def test_four_point_frozen_values():
    dist = outcome_distribution(4, (0.0, 1.0, 2.0, 3.0))
    assert dist.probs[0] == pytest.approx(0.31640625, rel=1e-12)
    assert dist.probs[1] == pytest.approx(0.6796875, rel=1e-12)
    assert dist.probs[2] == pytest.approx(0.00390625, rel=1e-12)


def test_four_point_pattern_identity():
    # index 2 carries the doubled chords {1,4},{2,3}: the q^4 outcome
    dist = outcome_distribution(4, (0.0, 1.0, 2.0, 3.0))
    pats = enumerate_link_patterns((2, 2, 2, 2))
    assert dist.patterns == pats
    assert pats[2].links.count((1, 4)) == 2
    assert pats[2].links.count((2, 3)) == 2
    assert pats[0].links.count((1, 2)) == 2


# ---------------------------------------------------------------------------
# distributions at higher N


@pytest.mark.parametrize("npoints", [2, 4, 6])
def test_distribution_is_normalized(npoints):
    rng = random.Random(npoints)
    y = random_points(npoints, rng)
    dist = outcome_distribution(npoints, y)  # constructor checks sum == 1
    assert len(dist.patterns) == len(enumerate_link_patterns((2,) * npoints))
    assert all(p >= 0.0 for p in dist.probs)


def test_distribution_support_is_reachable_set():
    y = random_points(6, random.Random(3))
    dist = outcome_distribution(6, y)
    om = partition_fn.omega_pairing(6)
    for pat, prob in zip(dist.patterns, dist.probs):
        reachable = incidence.arrow_relation(om, tau(pat))
        assert (prob > 1e-12) == reachable


def test_crossing_probability_mobius_invariant():
    # same-weight covariance in numerator and denominator cancels, so the
    # probabilities only depend on the configuration up to fractional-linear
    # order-preserving maps
    rng = random.Random(17)
    y = random_points(4, rng)
    pats = enumerate_link_patterns((2, 2, 2, 2))
    for a, b, c, d in ((1.7, 0.4, 0.0, 1.0), (1.0, 0.0, 0.05, 3.0), (0.6, -0.2, 0.1, 5.0)):
        phi = lambda v: (a * v + b) / (c * v + d)
        mapped = tuple(phi(v) for v in y)
        assert mapped == tuple(sorted(mapped))
        for p in pats:
            assert crossing_probability(p, mapped) == pytest.approx(
                crossing_probability(p, y), rel=1e-9
            )


def test_prob_of_and_json():
    y = (0.0, 1.0, 2.0, 3.0)
    dist = outcome_distribution(4, y)
    for pat, prob in zip(dist.patterns, dist.probs):
        assert dist.prob_of(pat) == prob
    rows = dist.as_json()
    assert len(rows) == 3
    assert rows[2]["prob"] == dist.probs[2]
    assert rows[0]["pattern"] == [list(l) for l in dist.patterns[0].links]


# ---------------------------------------------------------------------------
# connection probabilities between pairings


@pytest.mark.parametrize("n", [1, 2, 3])
def test_connection_rows_sum_to_one(n):
    rng = random.Random(40 + n)
    x = random_points(2 * n, rng)
    for a in enumerate_pairings(n):
        total = 0.0
        for b in enumerate_pairings(n):
            p = connection_probability(a, b, x)
            if not incidence.arrow_relation(a, b):
                assert p == 0.0
            else:
                assert p > 0.0
            total += p
        assert total == pytest.approx(1.0, rel=1e-10)


def test_connection_probability_from_rainbow():
    # the fully nested pairing reaches only itself, so that row is certain
    from mgffcross.combinat import make_pairing

    rainbow = make_pairing([(1, 4), (2, 3)])
    x = (0.0, 1.0, 2.5, 3.0)
    assert connection_probability(rainbow, rainbow, x) == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------------------
# elliptic modulus and rectangle cross ratio


def test_solve_modulus_square():
    k, kp = solve_modulus(1.0)
    assert k == pytest.approx(math.sqrt(0.5), rel=1e-14)
    assert kp == pytest.approx(math.sqrt(0.5), rel=1e-14)


@pytest.mark.parametrize("ratio", [0.2, 0.5, 1.0, 1.7, 3.0, 8.0])
def test_solve_modulus_against_theta_oracle(ratio):
    k, kp = solve_modulus(ratio)
    assert k == pytest.approx(theta_modulus_from_ratio(ratio), rel=1e-12, abs=1e-15)
    assert k * k + kp * kp == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_solve_modulus_rejects_bad_ratio(bad):
    with pytest.raises(ValueError):
        solve_modulus(bad)


def test_cross_ratio_rectangle_square():
    assert cross_ratio_rectangle(1.0) == pytest.approx(0.5, rel=1e-14)


@pytest.mark.parametrize("L", [0.2, 0.5, 0.8, 1.3, 2.0, 5.0])
def test_cross_ratio_rectangle_duality(L):
    assert cross_ratio_rectangle(L) + cross_ratio_rectangle(1.0 / L) == pytest.approx(
        1.0, abs=1e-12
    )


def test_cross_ratio_rectangle_monotone():
    Ls = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
    qs = [cross_ratio_rectangle(L) for L in Ls]
    assert all(a > b for a, b in zip(qs, qs[1:]))
    assert qs[-1] < 0.05  # wide boxes make the long doubled crossing rare


# ---------------------------------------------------------------------------
# rectangle polygons and the boundary map


def test_corner_rectangle_marks():
    R = RectanglePolygon.corners(2.0)
    assert R.marks == (5.0, 0.0, 2.0, 3.0)
    assert R.perimeter == 6.0
    assert R.npoints == 4
    assert R.point_xy(R.marks[0]) == (0.0, 1.0)
    assert R.point_xy(R.marks[1]) == (0.0, 0.0)
    assert R.point_xy(R.marks[2]) == (2.0, 0.0)
    assert R.point_xy(R.marks[3]) == (2.0, 1.0)


def test_rectangle_validation():
    with pytest.raises(ValueError):
        RectanglePolygon(0.0, (3.0, 0.0, 1.0, 2.0))
    with pytest.raises(ValueError):
        RectanglePolygon(1.0, (3.0, 0.5, 1.0, 2.0))  # y_2 off the origin
    with pytest.raises(ValueError):
        RectanglePolygon(1.0, (3.0, 0.0, 2.0, 1.0))  # out of cyclic order
    with pytest.raises(ValueError):
        RectanglePolygon(1.0, (3.0, 0.0, 1.0))  # odd count


def test_halfplane_images_of_corners():
    for L in (0.5, 1.0, 2.0):
        R = RectanglePolygon.corners(L)
        y = rect_boundary_to_halfplane(R)
        k, _ = solve_modulus(2.0 / L)
        assert y[0] == pytest.approx(-1.0 / k, rel=1e-9)
        assert y[1] == pytest.approx(-1.0, rel=1e-9)
        assert y[2] == pytest.approx(1.0, rel=1e-9)
        assert y[3] == pytest.approx(1.0 / k, rel=1e-9)
        assert list(y) == sorted(y)


def test_halfplane_map_preserves_cross_ratio():
    for L in (0.5, 1.0, 3.0):
        y = rect_boundary_to_halfplane(RectanglePolygon.corners(L))
        assert cross_ratio(y) == pytest.approx(cross_ratio_rectangle(L), rel=1e-9)


def test_six_mark_rectangle_maps_and_normalizes():
    R = RectanglePolygon(2.0, (5.5, 0.0, 1.0, 2.0, 2.5, 4.0))
    y = rect_boundary_to_halfplane(R)
    assert len(y) == 6
    assert all(math.isfinite(v) for v in y)
    assert list(y) == sorted(y)
    dist = rectangle_distribution(R)  # constructor checks normalization
    assert len(dist.probs) == 15
    assert all(p >= 0.0 for p in dist.probs)


def test_rectangle_distribution_square():
    dist = rectangle_distribution(RectanglePolygon.corners(1.0))
    assert dist.probs[0] == pytest.approx(0.0625, rel=1e-10)
    assert dist.probs[1] == pytest.approx(0.875, rel=1e-10)
    assert dist.probs[2] == pytest.approx(0.0625, rel=1e-10)


def test_rectangle_distribution_reflection():
    wide = rectangle_distribution(RectanglePolygon.corners(2.0))
    tall = rectangle_distribution(RectanglePolygon.corners(0.5))
    assert wide.probs[0] == pytest.approx(tall.probs[2], rel=1e-9)
    assert wide.probs[2] == pytest.approx(tall.probs[0], rel=1e-9)
    assert wide.probs[1] == pytest.approx(tall.probs[1], rel=1e-9)
    assert wide.probs[2] < wide.probs[0]  # long doubled crossing is rarer


# ---------------------------------------------------------------------------
# cluster dictionary


def test_canonical_partition():
    assert canonical_partition([(3, 1), (2,)]) == ((1, 3), (2,))
    assert canonical_partition([]) == ()


def test_cluster_partitions_validation():
    with pytest.raises(ValueError):
        ClusterPartitions(2, ((2, 1),), ((1,), (2,)))  # not canonical
    with pytest.raises(ValueError):
        ClusterPartitions(2, ((1,),), ((1,), (2,)))  # misses arc 2


def test_pattern_from_clusters_all_singletons_is_ring():
    singles = ((1,), (2,))
    pat = pattern_from_cluster_partitions(ClusterPartitions(2, singles, singles))
    assert sorted(pat.links) == [(1, 2), (1, 4), (2, 3), (3, 4)]


def test_pattern_from_clusters_wired_positive():
    pat = pattern_from_cluster_partitions(
        ClusterPartitions(2, ((1, 2),), ((1,), (2,)))
    )
    assert sorted(pat.links) == [(1, 4), (1, 4), (2, 3), (2, 3)]


def test_pattern_from_clusters_wired_negative():
    pat = pattern_from_cluster_partitions(
        ClusterPartitions(2, ((1,), (2,)), ((1, 2),))
    )
    assert sorted(pat.links) == [(1, 2), (1, 2), (3, 4), (3, 4)]


def test_pattern_from_clusters_rejects_interleaving():
    with pytest.raises(IncompatiblePartitionsError):
        pattern_from_cluster_partitions(ClusterPartitions(2, ((1, 2),), ((1, 2),)))


@pytest.mark.parametrize("n,size", [(1, 1), (2, 3), (3, 12)])
def test_cluster_table_size(n, size):
    assert len(cluster_pattern_table(n)) == size


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cluster_table_bijects_onto_reachable_patterns(n):
    table = cluster_pattern_table(n)
    values = list(table.values())
    assert len(set(values)) == len(values)  # injective
    om = partition_fn.omega_pairing(2 * n)
    reachable = {
        p
        for p in enumerate_link_patterns((2,) * 2 * n)
        if incidence.arrow_relation(om, tau(p))
    }
    assert set(values) == reachable


@pytest.mark.parametrize("n", [2, 3])
def test_cluster_table_entries_are_consistent(n):
    for (pos, neg), pat in cluster_pattern_table(n).items():
        redo = pattern_from_cluster_partitions(ClusterPartitions(n, pos, neg))
        assert redo == pat
