import numpy as np
import pytest

from mdk.lattice import NormalizedTriangle
from mdk.potential import build_potential, critical_values
from mdk.tracing import matching_path, trace_branch_points

P2 = NormalizedTriangle(1, 0, 1, 1, 1)


def test_constant_path_is_trivial():
    p = build_potential(P2)
    traj = trace_branch_points(p, 1.0, 1.0)
    assert traj.steps == 1
    assert not traj.collisions


def test_p2_single_collision_on_segment_to_t0():
    p = build_potential(P2)
    t0 = critical_values(p)[0].t
    traj = trace_branch_points(p, 0.0, t0)
    assert len(traj.collisions) == 1
    ev = traj.collisions[0]
    assert abs(ev.location - 1.0) < 1e-8  # x^a = (h/n) t0 = 1
    # conjugation stability: along a real segment the root multiset is
    # closed under conjugation at every sample
    for roots in traj.roots[:: max(1, traj.steps // 16)]:
        conj = np.conj(roots)
        d = np.abs(roots[:, None] - conj[None, :])
        assert d.min(axis=1).max() < 1e-8


def test_matching_path_p2():
    p = build_potential(P2)
    mp = matching_path(p, critical_values(p)[0])
    lo, hi = sorted(mp.endpoint_turns)
    assert lo == pytest.approx(1 / 3, abs=1e-9)
    assert hi == pytest.approx(2 / 3, abs=1e-9)
    # endpoints lie in D(0): |x|^3 = 4
    for z in mp.endpoints:
        assert abs(abs(z) ** 3 - 4) < 1e-8
    # path is symmetric under conjugation (real-coefficient family, real t0)
    pl = mp.polyline
    assert np.abs(pl - np.conj(pl[::-1])).max() < 1e-6


@pytest.mark.parametrize("abcde", [(1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2)])
def test_matching_path_endpoint_arguments(abcde):
    p = build_potential(NormalizedTriangle(*abcde))
    mp = matching_path(p, critical_values(p)[0])
    lo, hi = sorted(mp.endpoint_turns)
    g_over_2n = p.g / (2 * p.n)
    assert lo == pytest.approx(g_over_2n, abs=1e-8)
    assert hi == pytest.approx(1 - g_over_2n, abs=1e-8)
    # collision abscissa: x^a = (h/n) t0
    t0 = mp.critical_value.t
    assert abs(mp.collision_point**p.a - (p.h / p.n) * t0) < 1e-8


def test_matching_paths_rotate_with_the_critical_value():
    p = build_potential(P2)
    cvs = critical_values(p)
    base = matching_path(p, cvs[0])
    rot = matching_path(p, cvs[1])
    # the branch family is invariant under x -> zeta x, t -> zeta^a t with
    # zeta^n = 1, so the rotated path endpoints are a rotation of the base's
    zeta = np.exp(2j * np.pi / 3)
    rotated = {z * zeta for z in base.endpoints}
    for z in rot.endpoints:
        assert min(abs(z - w) for w in rotated) < 1e-8


def test_separation_into_groups_at_infinity():
    # past the positive real critical value, h roots head to the origin and
    # the remaining a*g split into a angular clusters going off to infinity
    p = build_potential(NormalizedTriangle(3, 0, 1, 2, 2))
    t0 = critical_values(p)[0].t
    traj = trace_branch_points(p, t0 * 1.0000001, 2000.0, steps=256)
    final = traj.roots[-1]
    mods = np.abs(final)
    small = np.sort(mods)[: p.h]
    big = final[np.argsort(mods)[p.h :]]
    assert small.max() < 1e-3
    assert np.abs(big).min() > 5.0
    # a = 3 angular clusters around the cube roots of t
    angles = np.sort(np.angle(big) % (2 * np.pi))
    gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
    clusters = int(np.sum(gaps > 2 * np.pi / (3 * p.a)))
    assert clusters == p.a
