import math
import random

import numpy as np
import pytest

from rotorb.geometry import classify_angle
from rotorb.orbit import SamplerBudget
from rotorb.tetra import (
    EDGE_KEYS,
    HEX_SLAB_TOL,
    VERTEX_LABELS,
    Tetrahedron,
    canonical_edge_key,
    dihedral_angle,
    dihedral_cos,
    edge_rotations,
    edge_supplement_angle,
    hexagon_report,
    irregular_edge_supplements,
    parse_tumble_steps,
    regular_tetrahedron,
    tumble,
)

SQRT6 = math.sqrt(6.0)


def rodrigues(p, base, u, theta):
    # independent axis-angle rotation of p about the line base + t*u
    v = np.asarray(p, dtype=float) - base
    c, s = math.cos(theta), math.sin(theta)
    return base + v * c + np.cross(u, v) * s + u * (u @ v) * (1 - c)


def outward_dihedral_cos(verts, i, j, k, m):
    # oracle via outward face normals: inner angle is pi minus normal angle
    def outward(a, b, c, opp):
        n = np.cross(verts[b] - verts[a], verts[c] - verts[a])
        if n @ (verts[opp] - verts[a]) > 0:
            n = -n
        return n / np.linalg.norm(n)

    n1 = outward(i, j, k, m)
    n2 = outward(i, j, m, k)
    return -float(n1 @ n2)


def test_regular_tetrahedron_vertices():
    t = regular_tetrahedron(SQRT6)
    h = math.sqrt(3.0) / 2.0
    got = {tuple(np.round(v / h).astype(int)) for v in t.vertices}
    assert got == {(1, 1, 1), (1, -1, -1), (-1, -1, 1), (-1, 1, -1)}
    assert np.abs(t.barycenter()).max() < 1e-12
    for i in range(4):
        for j in range(i + 1, 4):
            assert np.linalg.norm(t.vertices[i] - t.vertices[j]) == pytest.approx(SQRT6)


def test_positive_orientation():
    t = regular_tetrahedron(2.0)
    vol = np.linalg.det(t.vertices[1:] - t.vertices[0]) / 6.0
    assert vol > 0
    # swapping two labels flips orientation and must be rejected
    bad = t.vertices.copy()
    bad[[2, 3]] = bad[[3, 2]]
    with pytest.raises(ValueError):
        Tetrahedron(vertices=bad, edge_length=2.0)


def test_tetrahedron_validation():
    with pytest.raises(ValueError):
        regular_tetrahedron(0.0)
    with pytest.raises(ValueError):
        regular_tetrahedron(-1.0)
    with pytest.raises(ValueError):
        Tetrahedron(vertices=np.zeros((3, 3)), edge_length=1.0)
    verts = regular_tetrahedron(1.0).vertices.copy()
    verts[0] *= 1.001  # breaks three edge lengths
    with pytest.raises(ValueError):
        Tetrahedron(vertices=verts, edge_length=1.0)
    with pytest.raises(ValueError):
        Tetrahedron(vertices=regular_tetrahedron(1.0).vertices, edge_length=2.0)


def test_dihedral_angle_exact_and_scale_invariant():
    tags = set()
    for edge in (1.0, SQRT6, 10.0):
        a = dihedral_angle(regular_tetrahedron(edge))
        assert a.cosval * 3 == 1
        assert a.radians() == pytest.approx(math.acos(1.0 / 3.0), abs=1e-15)
        tags.add(a)
    assert len(tags) == 1  # identical tag regardless of scale


def test_dihedral_cross_check_against_normals():
    t = regular_tetrahedron(SQRT6)
    for (u, v) in EDGE_KEYS:
        i, j = VERTEX_LABELS.index(u), VERTEX_LABELS.index(v)
        k, m = [x for x in range(4) if x not in (i, j)]
        got = dihedral_cos(t.vertices, i, j, k, m)
        assert got == pytest.approx(outward_dihedral_cos(t.vertices, i, j, k, m), abs=1e-12)
        assert got == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_supplement_angle_is_irrational_multiple():
    a = edge_supplement_angle()
    assert a.radians() == pytest.approx(math.pi - math.acos(1.0 / 3.0), abs=1e-15)
    cls = classify_angle(a)
    assert not cls.is_rational
    assert cls.finite_order is None


def test_edge_rotation_axes_run_through_vertices():
    t = regular_tetrahedron(SQRT6)
    rset = edge_rotations(t)
    assert len(rset) == 6
    for (u, v) in EDGE_KEYS:
        er = rset[(u, v)]
        b, d = er.axis.base_array(), er.axis.dir_array()
        for label in (u, v):
            off = t.vertex(label) - b
            assert np.linalg.norm(off - (off @ d) * d) < 1e-12
        # flipped means the stored direction runs V->U instead of U->V
        uv = t.vertex(v) - t.vertex(u)
        uv = uv / np.linalg.norm(uv)
        assert np.allclose(d, -uv if er.flipped else uv, atol=1e-12)
        assert er.angle == edge_supplement_angle()


def test_rolling_sign_is_exclusive():
    # exactly one sign carries the larger opposite vertex onto the plane of
    # the face holding the smaller one
    t = regular_tetrahedron(SQRT6)
    rset = edge_rotations(t)
    theta = edge_supplement_angle().radians()
    for (u, v) in EDGE_KEYS:
        w1, w2 = sorted(set(VERTEX_LABELS) - {u, v})
        er = rset[(u, v)]
        b, d = er.axis.base_array(), er.axis.dir_array()
        plane_n = np.cross(t.vertex(v) - t.vertex(u), t.vertex(w1) - t.vertex(u))
        plane_n = plane_n / np.linalg.norm(plane_n)

        def dev(sign):
            img = rodrigues(t.vertex(w2), b, d, sign * theta)
            return abs((img - t.vertex(u)) @ plane_n)

        assert dev(+1) < 1e-9
        assert dev(-1) > 1e-3


def test_edge_rotation_matches_axis_angle_oracle():
    t = regular_tetrahedron(2.5)
    rset = edge_rotations(t)
    theta = edge_supplement_angle().radians()
    rng = random.Random(7)
    gens = rset.to_generator_set()
    assert len(gens) == 6
    for trial in range(30):
        i = rng.randrange(6)
        er = rset[EDGE_KEYS[i]]
        p = np.array([rng.uniform(-2, 2) for _ in range(3)])
        iso = gens.rotation(i, 1)
        got = p @ iso.linear + iso.shift
        want = rodrigues(p, er.axis.base_array(), er.axis.dir_array(), theta)
        assert np.abs(got - want).max() < 1e-12


def test_canonical_edge_key():
    assert canonical_edge_key("BA") == ("A", "B")
    assert canonical_edge_key(("D", "C")) == ("C", "D")
    for bad in ("AA", "AE", "A", "ABC", ""):
        with pytest.raises(ValueError):
            canonical_edge_key(bad)


def test_parse_tumble_steps():
    got = parse_tumble_steps(["AB", "-CD", "+BA", ("DB", -1)])
    assert got == ((("A", "B"), 1), (("C", "D"), -1), (("A", "B"), 1), (("B", "D"), -1))
    with pytest.raises(ValueError):
        parse_tumble_steps([("AB", 2)])
    with pytest.raises(ValueError):
        parse_tumble_steps(["AX"])


def test_one_tumble_coplanarity():
    t = regular_tetrahedron(SQRT6)
    tr = tumble(t, t.barycenter(), ["AB"])
    A, B, C, D = t.vertices
    n = np.cross(B - A, C - A)
    n = n / np.linalg.norm(n)
    D_img = tr.vertex_history[-1][3]
    assert abs((D_img - A) @ n) < 1e-9
    # axis endpoints stay put
    assert np.abs(tr.vertex_history[-1][0] - A).max() < 1e-12
    assert np.abs(tr.vertex_history[-1][1] - B).max() < 1e-12


def test_barycenter_chord():
    # distance from barycenter to any edge line is sqrt(3)/2 at edge sqrt(6),
    # so one tumble moves it by 2*(sqrt(3)/2)*sqrt(2/3) = sqrt(2)
    t = regular_tetrahedron(SQRT6)
    A, B = t.vertices[0], t.vertices[1]
    d = (B - A) / np.linalg.norm(B - A)
    off = t.barycenter() - A
    perp = off - (off @ d) * d
    assert np.linalg.norm(perp) == pytest.approx(math.sqrt(3.0) / 2.0)

    tr = tumble(t, t.barycenter(), ["AB"])
    hop = np.linalg.norm(tr.point_history[1] - tr.point_history[0])
    assert hop == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_tumble_preserves_shape():
    t = regular_tetrahedron(SQRT6)
    rng = random.Random(11)
    steps = []
    prev = None
    for _ in range(50):
        key = EDGE_KEYS[rng.randrange(6)]
        sign = rng.choice([1, -1])
        steps.append((key, sign))
        prev = key
    tr = tumble(t, np.array([0.3, -0.2, 0.5]), steps)
    assert tr.vertex_history.shape == (51, 4, 3)
    for verts in tr.vertex_history[::7]:
        for i in range(4):
            for j in range(i + 1, 4):
                d = np.linalg.norm(verts[i] - verts[j])
                assert d == pytest.approx(SQRT6, abs=1e-9)
        vol = np.linalg.det(verts[1:] - verts[0]) / 6.0
        assert vol == pytest.approx(SQRT6 ** 3 / (6 * math.sqrt(2)), abs=1e-9)


def test_tumble_roundtrip_is_identity():
    t = regular_tetrahedron(SQRT6)
    tr = tumble(t, np.array([1.0, 2.0, 3.0]), ["CD", "-CD"])
    assert len(tr.vertex_history) == 3  # both moves recorded, no cancellation
    assert np.abs(tr.vertex_history[-1] - t.vertices).max() < 1e-9
    assert np.abs(tr.point_history[-1] - tr.point_history[0]).max() < 1e-9
    assert np.abs(tr.total.linear - np.eye(3)).max() < 1e-9
    assert np.abs(tr.total.shift).max() < 1e-9


def test_tumble_axes_ride_with_solid():
    t = regular_tetrahedron(SQRT6)
    tr = tumble(t, t.barycenter(), ["AB", "BC"])
    for step in range(3):
        verts = tr.vertex_history[step]
        axes = tr.axes_history[step]
        for (u, v) in EDGE_KEYS:
            ax = axes[(u, v)]
            b, d = ax.base_array(), ax.dir_array()
            for lab in (u, v):
                p = verts[VERTEX_LABELS.index(lab)]
                off = p - b
                assert np.linalg.norm(off - (off @ d) * d) < 1e-9


def test_tumble_vertex_history_matches_total():
    t = regular_tetrahedron(1.0)
    tr = tumble(t, t.vertices[0], [("AD", 1), ("BC", -1), ("AD", 1)])
    final = t.vertices @ tr.total.linear + tr.total.shift
    assert np.abs(final - tr.vertex_history[-1]).max() < 1e-12


def test_tumble_rejects_bad_input():
    t = regular_tetrahedron(1.0)
    with pytest.raises(ValueError):
        tumble(t, np.zeros(2), ["AB"])
    with pytest.raises(ValueError):
        tumble(t, np.zeros(3), ["AQ"])


def test_hexagon_report_small_budget():
    t = regular_tetrahedron(SQRT6)
    budget = SamplerBudget(max_len=3, max_exp=1, max_points=4000)
    rep = hexagon_report(t, (), budget)
    assert not rep.degenerate
    assert rep.warnings == ()
    assert rep.budget is budget
    assert rep.slab_tol == HEX_SLAB_TOL
    assert rep.point_count == len(rep.in_plane_points) > 3
    # every reported point really lies in the slab
    n = np.array(rep.plane_normal)
    p0 = np.array(rep.plane_point)
    dev = np.abs((rep.in_plane_points - p0) @ n)
    assert dev.max() < HEX_SLAB_TOL
    # the seed chord bounds the spacing from above; at this fixed budget the
    # minimum is observed to land exactly on it
    assert rep.min_nn_distance <= math.sqrt(2.0) + 1e-9
    assert rep.min_nn_distance == pytest.approx(math.sqrt(2.0), abs=1e-6)
    assert sum(c for _, c in rep.nn_histogram) == rep.point_count


def test_hexagon_report_warns_off_reference_setup():
    t = regular_tetrahedron(2.0)
    budget = SamplerBudget(max_len=1, max_exp=1, max_points=100)
    rep = hexagon_report(t, (), budget)
    assert any("sqrt(6)" in w for w in rep.warnings)

    t6 = regular_tetrahedron(SQRT6)
    rep2 = hexagon_report(t6, (), budget, P=np.array([0.05, 0.0, 0.0]))
    assert any("barycenter" in w for w in rep2.warnings)


def test_hexagon_report_degenerate_seed():
    # a point on the AB axis is fixed by r_AB, collapsing the seed triple
    t = regular_tetrahedron(SQRT6)
    mid = 0.5 * (t.vertices[0] + t.vertices[1])
    budget = SamplerBudget(max_len=1, max_exp=1, max_points=100)
    rep = hexagon_report(t, (), budget, P=mid)
    assert rep.degenerate
    assert rep.plane_normal is None
    assert rep.point_count == 0
    assert rep.min_nn_distance == math.inf
    assert rep.nn_histogram == ()


def test_hexagon_report_nonempty_word_seed():
    t = regular_tetrahedron(SQRT6)
    budget = SamplerBudget(max_len=2, max_exp=1, max_points=2000)
    from rotorb.words import Letter

    rep = hexagon_report(t, (Letter(3, 1),), budget)
    assert not rep.degenerate
    assert rep.point_count > 0
    # Pf itself passes its own slab filter
    seed0 = np.array(rep.seed_triple[0])
    n = np.array(rep.plane_normal)
    assert min(np.abs((rep.in_plane_points - seed0) @ n)) < HEX_SLAB_TOL


def test_irregular_supplements_match_normal_oracle():
    rng = random.Random(3)
    base = regular_tetrahedron(2.0).vertices.copy()
    verts = base + 0.15 * np.array(
        [[rng.uniform(-1, 1) for _ in range(3)] for _ in range(4)])
    sup = irregular_edge_supplements(verts)
    assert set(sup) == set(EDGE_KEYS)
    vals = set()
    for (u, v) in EDGE_KEYS:
        i, j = VERTEX_LABELS.index(u), VERTEX_LABELS.index(v)
        k, m = [x for x in range(4) if x not in (i, j)]
        want = math.pi - math.acos(outward_dihedral_cos(verts, i, j, k, m))
        assert sup[(u, v)].radians() == pytest.approx(want, abs=1e-9)
        vals.add(round(sup[(u, v)].radians(), 9))
    assert len(vals) > 1  # perturbation actually broke the symmetry

    reg = irregular_edge_supplements(regular_tetrahedron(3.0).vertices)
    for a in reg.values():
        assert a.radians() == pytest.approx(math.pi - math.acos(1 / 3), abs=1e-12)

    flat = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
    with pytest.raises(ValueError):
        irregular_edge_supplements(flat)


def test_generator_set_roundtrip():
    t = regular_tetrahedron(SQRT6)
    rset = edge_rotations(t)
    gens = rset.to_generator_set()
    assert gens.dim == 3
    assert len(gens) == 6
    for i, key in enumerate(EDGE_KEYS):
        assert rset.index_of(key) == i
        assert rset.index_of(key[1] + key[0] if isinstance(key, str) else (key[1], key[0])) == i
