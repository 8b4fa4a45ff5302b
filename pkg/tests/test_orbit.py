import math

import numpy as np
import pytest

from rotorb.geometry import Angle, Line3, Point2
from rotorb.orbit import (
    GapReport,
    OrbitCloud,
    SamplerBudget,
    audit_cloud,
    bfs_orbit,
    circle_gap_stats,
    coverage,
    discreteness_report,
    ladder_k,
    ladder_orbit,
    make_density_report,
    mesh_estimate,
    sphere_confinement_check,
)
from rotorb.words import Letter, make_generators, stationary_eval

GOLDEN = math.pi * (math.sqrt(5) - 1) / 2


def golden_pair_2d():
    return make_generators(2, [
        (Point2(0, 0), Angle.raw(GOLDEN)),
        (Point2(1, 0), Angle.raw(GOLDEN)),
    ])


def order4_pair_3d():
    return make_generators(3, [
        (Line3((0, 0, 0), (1, 0, 0)), Angle.rational_pi(1, 2)),
        (Line3((0, 0, 1), (0, 1, 0)), Angle.rational_pi(1, 2)),
    ])


def brute_force_points(gens, P, max_len, max_exp):
    """Independent enumeration: recursive word listing plus the words-module
    evaluator, no kernels, no spatial hashing."""
    pts = []

    def walk(word, last, depth):
        f = stationary_eval(gens, word)
        pts.append(tuple((np.asarray(P, float) @ f.linear + f.shift).tolist()))
        if depth == max_len:
            return
        for g in range(len(gens)):
            if g == last:
                continue
            for e in gens.exponent_range(g, max_exp):
                walk(word + (Letter(g, e),), g, depth + 1)

    walk((), -1, 0)
    return pts


def hausdorff_cheb(A, B):
    diffs = np.abs(A[:, None, :] - B[None, :, :]).max(axis=2)
    return max(float(diffs.min(axis=1).max()), float(diffs.min(axis=0).max()))


# --- bfs basics ---

def test_budget_validation():
    with pytest.raises(ValueError):
        SamplerBudget(-1, 1, 1)
    with pytest.raises(ValueError):
        SamplerBudget(0, 0, 1)
    with pytest.raises(ValueError):
        SamplerBudget(0, 1, 0)


def test_bfs_zero_length_is_seed_only():
    gens = golden_pair_2d()
    cloud = bfs_orbit(gens, [0.3, 0.4], "stationary", SamplerBudget(0, 3, 100))
    assert len(cloud) == 1
    assert cloud.points[0] == pytest.approx([0.3, 0.4])
    assert cloud.word_len.tolist() == [0]
    assert not cloud.truncated


def test_bfs_rejects_bad_mode_and_seed():
    gens = golden_pair_2d()
    with pytest.raises(ValueError):
        bfs_orbit(gens, [0, 0], "sideways", SamplerBudget(1, 1, 10))
    with pytest.raises(ValueError):
        bfs_orbit(gens, [0, 0, 0], "stationary", SamplerBudget(1, 1, 10))
    with pytest.raises(ValueError):
        bfs_orbit(gens, [math.nan, 0], "stationary", SamplerBudget(1, 1, 10))


def test_single_generator_circle_count():
    gens = make_generators(2, [(Point2(0, 0), Angle.raw(GOLDEN))])
    cloud = bfs_orbit(gens, [1.0, 0.0], "stationary", SamplerBudget(1, 5, 1000))
    assert len(cloud) == 11  # seed + exponents -5..5 sans 0
    assert np.linalg.norm(cloud.points, axis=1) == pytest.approx(np.ones(11))


def test_bfs_determinism():
    gens = golden_pair_2d()
    a = bfs_orbit(gens, [0.5, 0.5], "peripatetic", SamplerBudget(3, 2, 10_000))
    b = bfs_orbit(gens, [0.5, 0.5], "peripatetic", SamplerBudget(3, 2, 10_000))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.word_len, b.word_len)
    assert np.array_equal(a.node_ids, b.node_ids)


def test_bfs_truncation():
    gens = golden_pair_2d()
    cloud = bfs_orbit(gens, [0.5, 0.5], "stationary", SamplerBudget(4, 2, 17))
    assert len(cloud) == 17
    assert cloud.truncated
    full = bfs_orbit(gens, [0.5, 0.5], "stationary", SamplerBudget(4, 2, 10**7))
    assert not full.truncated
    # the truncated cloud is a prefix of the full one
    assert np.array_equal(full.points[:17], cloud.points)


def test_bfs_matches_brute_force_on_rational_pair():
    gens = order4_pair_3d()
    P = [0.5, 1 / 3, 0.25]
    cloud = bfs_orbit(gens, P, "stationary", SamplerBudget(3, 10, 10**6))
    raw = np.array(brute_force_points(gens, P, 3, 10))
    distinct = np.unique(np.round(raw, 6), axis=0)
    assert len(cloud) == len(distinct)
    got = np.unique(np.round(cloud.points, 6), axis=0)
    assert np.allclose(got, distinct, atol=1e-9)


def test_word_log_reconstruction_and_audit():
    gens = golden_pair_2d()
    P = [0.5, 0.5]
    for mode in ("stationary", "peripatetic"):
        cloud = bfs_orbit(gens, P, mode, SamplerBudget(4, 2, 100_000))
        # word lengths recorded per point match the reconstructed words
        for idx in (0, len(cloud) // 2, len(cloud) - 1):
            word = cloud.log.word_of(int(cloud.node_ids[idx]))
            assert len(word) == cloud.word_len[idx]
        assert audit_cloud(gens, cloud, P, mode, fraction=0.05, seed=3) < 1e-8


def test_full_audit_small_cloud():
    gens = order4_pair_3d()
    P = [0.5, 1 / 3, 0.25]
    for mode in ("stationary", "peripatetic"):
        cloud = bfs_orbit(gens, P, mode, SamplerBudget(3, 10, 10**6))
        assert audit_cloud(gens, cloud, P, mode, fraction=1.0, seed=0) < 1e-10


def test_mode_duality_on_clouds():
    # reduced words up to a fixed length are closed under reversal, so both
    # disciplines enumerate the same raw point set and the deduplicated
    # clouds can differ only within the snapping cell
    gens = golden_pair_2d()
    budget = SamplerBudget(3, 2, 10**6)
    stat = bfs_orbit(gens, [0.5, 0.5], "stationary", budget)
    peri = bfs_orbit(gens, [0.5, 0.5], "peripatetic", budget)
    assert abs(len(stat) - len(peri)) <= 2
    assert hausdorff_cheb(stat.points, peri.points) < 1.5 * stat.dedup_cell


def test_orbit_cloud_validation():
    with pytest.raises(ValueError):
        OrbitCloud(dim=2, points=np.zeros((3, 3)), word_len=np.zeros(3, dtype=int))
    with pytest.raises(ValueError):
        OrbitCloud(dim=2, points=np.zeros((3, 2)), word_len=np.zeros(2, dtype=int))
    with pytest.raises(ValueError):
        OrbitCloud(dim=2, points=np.zeros((1, 2)), word_len=np.array([-1]))


# --- circle gaps ---

def test_gap_stats_quarter_turn():
    rep = circle_gap_stats(Angle.rational_pi(1, 2), 4)
    assert rep.gaps == ((0.25, 4),)
    assert rep.max_gap == 0.25
    # extra sweeps revisit the same four spots
    rep10 = circle_gap_stats(Angle.rational_pi(1, 2), 10)
    assert rep10.gaps == ((0.25, 4),)


def test_gap_stats_trivial_cases():
    rep = circle_gap_stats(Angle.raw(1.0), 1)
    assert rep.gaps == ((1.0, 1),)
    assert rep.max_gap == 1.0
    rep = circle_gap_stats(Angle.rational_pi(0, 1), 50)
    assert rep.gaps == ((1.0, 1),)
    with pytest.raises(ValueError):
        circle_gap_stats(Angle.raw(1.0), 0)


def sort_oracle_gaps(x, n):
    # independent float path: sort fractional parts directly
    pos = np.sort(np.unique((np.arange(n) * x) % 1.0))
    gaps = np.diff(pos)
    gaps = np.append(gaps, pos[0] + 1.0 - pos[-1])
    return gaps


def test_gap_stats_three_distance():
    x = math.sqrt(2) - 1
    angle = Angle.raw(2 * math.pi * x)
    for n in (100, 1000, 10_000):
        rep = circle_gap_stats(angle, n)
        assert rep.distinct_gaps <= 3
        total = sum(length * count for length, count in rep.gaps)
        assert total == pytest.approx(1.0, abs=1e-12)
        oracle = sort_oracle_gaps(angle.radians() / (2 * math.pi), n)
        assert rep.max_gap == pytest.approx(float(oracle.max()), abs=1e-9)
        assert sum(c for _, c in rep.gaps) == len(oracle)
    small = circle_gap_stats(angle, 1000)
    big = circle_gap_stats(angle, 10_000)
    assert big.max_gap < small.max_gap


def test_gap_stats_handles_negative_angles():
    rep = circle_gap_stats(Angle.raw(-2 * math.pi * 0.3), 7)
    total = sum(length * count for length, count in rep.gaps)
    assert total == pytest.approx(1.0, abs=1e-12)
    assert all(length > 0 for length, _ in rep.gaps)


# --- ladder ---

def test_ladder_k():
    assert ladder_k((math.sqrt(5) - 1) / 2) == 1
    assert ladder_k(1 / math.pi) == 3
    with pytest.raises(ValueError):
        ladder_k(0.5)
    with pytest.raises(ValueError):
        ladder_k(1 / 3)
    with pytest.raises(ValueError):
        ladder_k(1.5)


def test_ladder_validation():
    gens = golden_pair_2d()
    with pytest.raises(ValueError):
        ladder_orbit(gens, [0.2, 0.3], 0)
    with pytest.raises(ValueError):
        ladder_orbit(gens, [0.2, 0.3], 2, mode="peripatetic")
    with pytest.raises(ValueError):
        ladder_orbit(make_generators(2, [(Point2(0, 0), Angle.raw(GOLDEN))]),
                     [0.2, 0.3], 2)
    rational = make_generators(2, [
        (Point2(0, 0), Angle.rational_pi(1, 2)),
        (Point2(1, 0), Angle.raw(GOLDEN)),
    ])
    with pytest.raises(ValueError):
        ladder_orbit(rational, [0.2, 0.3], 2)


def test_ladder_stage_structure():
    gens = golden_pair_2d()
    stages = ladder_orbit(gens, [0.2, 0.3], 4)
    assert [s.stage for s in stages] == [1, 2, 3, 4]
    assert [s.axis_used for s in stages] == [0, 1, 0, 1]
    assert [s.exp_bound for s in stages] == [2, 4, 8, 16]
    assert len(stages[0].points) == 3  # 2k+1 with k=1
    prev = None
    for s in stages:
        if prev is not None:
            # exponent 0 re-emits the previous stage first, bit for bit
            assert np.array_equal(s.points.points[:len(prev)], prev)
        prev = s.points.points


def test_ladder_mesh_nonincreasing():
    gens = golden_pair_2d()
    stages = ladder_orbit(gens, [0.2, 0.3], 4)
    probe = ((0.5, 0.0), 1.2)
    meshes = [mesh_estimate(s.points, probe, 12) for s in stages]
    for a, b in zip(meshes, meshes[1:]):
        assert b <= a + 1e-12


# --- density diagnostics ---

def test_mesh_estimate_single_point():
    cloud = OrbitCloud(dim=2, points=np.array([[0.0, 0.0]]), word_len=np.zeros(1, dtype=int))
    r = 1.0
    for res in (5, 11, 31):
        est = mesh_estimate(cloud, ((0.0, 0.0), r), res)
        h = 2 * r / res
        assert est <= r
        assert est >= r - 2 * h
    with pytest.raises(ValueError):
        mesh_estimate(OrbitCloud(dim=2, points=np.empty((0, 2)),
                                 word_len=np.empty(0, dtype=int)), ((0, 0), 1.0), 5)


def test_mesh_estimate_regular_grid():
    h = 0.1
    xs = np.arange(-1.0, 1.0 + h / 2, h)
    grid = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
    cloud = OrbitCloud(dim=2, points=grid, word_len=np.zeros(len(grid), dtype=int))
    est = mesh_estimate(cloud, ((0.0, 0.0), 0.8), 33)
    assert est <= h * math.sqrt(2) / 2 + 1e-9


def test_coverage_extremes_and_monotonicity():
    n = 10
    c, r = np.array([0.0, 0.0]), 1.0
    h = 2 * r / n
    axes = np.linspace(-r + h / 2, r - h / 2, n)
    centers = np.stack(np.meshgrid(axes, axes, indexing="ij"), axis=-1).reshape(-1, 2)
    inside = centers[np.linalg.norm(centers, axis=1) <= r]
    full = OrbitCloud(dim=2, points=inside, word_len=np.zeros(len(inside), dtype=int))
    assert coverage(full, ((0.0, 0.0), r), n) == 1.0
    empty = OrbitCloud(dim=2, points=np.empty((0, 2)), word_len=np.empty(0, dtype=int))
    assert coverage(empty, ((0.0, 0.0), r), n) == 0.0
    rng = np.random.default_rng(8)
    pts = rng.uniform(-1, 1, size=(200, 2))
    sub = OrbitCloud(dim=2, points=pts[:40], word_len=np.zeros(40, dtype=int))
    sup = OrbitCloud(dim=2, points=pts, word_len=np.zeros(200, dtype=int))
    assert coverage(sub, ((0.0, 0.0), r), n) <= coverage(sup, ((0.0, 0.0), r), n)


def test_density_report_bundles_both_metrics():
    rng = np.random.default_rng(4)
    pts = rng.uniform(-1, 1, size=(500, 2))
    cloud = OrbitCloud(dim=2, points=pts, word_len=np.zeros(500, dtype=int))
    rep = make_density_report(cloud, (0.0, 0.0), 1.0, 10)
    assert 0.0 <= rep.coverage_fraction <= 1.0
    assert rep.mesh_estimate > 0
    assert rep.probe_region == ((0.0, 0.0), 1.0)
    assert rep.grid_res == 10


def test_sphere_confinement_intersecting_vs_skew():
    golden2 = Angle.raw(GOLDEN * 0.7)
    meet = make_generators(3, [
        (Line3((0, 0, 0), (1, 0, 0)), Angle.raw(GOLDEN)),
        (Line3((0, 0, 0), (0, 1, 0)), golden2),
    ])
    P = [0.5, 1 / 3, 0.25]
    V = [0.0, 0.0, 0.0]
    r0 = float(np.linalg.norm(np.asarray(P)))
    cloud = bfs_orbit(meet, P, "peripatetic", SamplerBudget(5, 2, 3000))
    assert len(cloud) >= 1500
    dev, ok = sphere_confinement_check(cloud, V, r0)
    assert ok and dev < 1e-9

    skew = make_generators(3, [
        (Line3((0, 0, 0), (1, 0, 0)), Angle.raw(GOLDEN)),
        (Line3((0.1, 0, 0.1), (0, 1, 0)), golden2),
    ])
    cloud2 = bfs_orbit(skew, P, "peripatetic", SamplerBudget(5, 2, 3000))
    dev2, ok2 = sphere_confinement_check(cloud2, V, r0)
    assert not ok2 and dev2 > 0.01

    with pytest.raises(ValueError):
        sphere_confinement_check(
            OrbitCloud(dim=2, points=np.zeros((1, 2)), word_len=np.zeros(1, dtype=int)),
            [0, 0], 1.0)


def test_discreteness_report():
    one = OrbitCloud(dim=2, points=np.array([[1.0, 2.0]]), word_len=np.zeros(1, dtype=int))
    assert discreteness_report(one) == (1, math.inf)
    two = OrbitCloud(dim=2, points=np.array([[0.0, 0.0], [3.0, 4.0]]),
                     word_len=np.zeros(2, dtype=int))
    count, dist = discreteness_report(two)
    assert count == 2
    assert dist == pytest.approx(5.0)
    with pytest.raises(ValueError):
        discreteness_report(OrbitCloud(dim=2, points=np.empty((0, 2)),
                                       word_len=np.empty(0, dtype=int)))


def test_discreteness_on_order4_orbit():
    gens = order4_pair_3d()
    cloud = bfs_orbit(gens, [0.5, 1 / 3, 0.25], "peripatetic", SamplerBudget(4, 10, 10**6))
    count, dist = discreteness_report(cloud)
    assert count == len(cloud)
    # quarter-turn pair about these axes lands on a lattice of pitch 1/12
    assert dist >= 1 / 12 - 1e-9
