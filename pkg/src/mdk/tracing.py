"""Branch-point continuation along segments in the base plane.

Traces the n roots of the branch polynomial as t moves along a straight
segment, keeping a consistent labelling of roots from step to step by
globally optimal assignment.  The step size adapts so that no root moves
a significant fraction of the minimum pairwise root distance in a single
step; the expected behaviour is that pairs of roots merge only at the
terminal point of a segment ending on a critical value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AmbiguousMatching, ContinuityLoss
from .potential import CriticalValue, Potential, branch_points
from .roots import aberth

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CollisionEvent:
    step: int
    pair: tuple[int, int]
    location: complex
    t: complex


@dataclass
class Trajectory:
    """Matched root positions sampled along a base segment."""

    ts: list[complex]
    roots: list[np.ndarray]
    collisions: list[CollisionEvent] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.ts)

    @property
    def degree(self) -> int:
        return len(self.roots[0])

    def root_path(self, i: int) -> np.ndarray:
        return np.array([r[i] for r in self.roots])

    def to_json(self) -> dict:
        return {
            "t": [[t.real, t.imag] for t in self.ts],
            "roots": [
                [[z.real, z.imag] for z in self.root_path(i)] for i in range(self.degree)
            ],
            "collisions": [
                {
                    "step": c.step,
                    "pair": list(c.pair),
                    "location": [c.location.real, c.location.imag],
                    "t": [c.t.real, c.t.imag],
                }
                for c in self.collisions
            ],
        }


def _match(old: np.ndarray, new: np.ndarray, ambiguity_tol: float, scale: float) -> np.ndarray:
    """Assign new roots to old labels, minimum total displacement.

    Raises ``AmbiguousMatching`` when a 2-swap of the optimal assignment
    costs within ``ambiguity_tol`` of it while the two sources are well
    separated (so the alternatives are materially different pairings).
    """
    cost = np.abs(old[:, None] - new[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    base = cost[rows, perm[rows]]
    n = len(old)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(old[i] - old[j]) < 1e-6 * scale:
                continue  # coincident sources: either pairing is equivalent
            if abs(new[perm[i]] - new[perm[j]]) < 1e-6 * scale:
                continue  # coincident targets (a collision): likewise
            swap_delta = (
                cost[i, perm[j]] + cost[j, perm[i]] - base[i] - base[j]
            )
            if swap_delta < ambiguity_tol * scale:
                raise AmbiguousMatching(
                    f"two root pairings within {ambiguity_tol:.1e} of optimal "
                    f"(labels {i}, {j})"
                )
    return new[perm]


def trace_branch_points(
    p: Potential,
    t_start: complex,
    t_end: complex,
    steps: int = 64,
    collision_tol: float = 1e-6,
    terminal_window: float = 1e-8,
    ambiguity_tol: float = 1e-12,
    min_step: float = 1e-12,
    max_steps: int = 200_000,
) -> Trajectory:
    """Trace all branch points along the segment from t_start to t_end.

    ``steps`` sets the initial subdivision; the tracer halves the step
    whenever the minimum pairwise distance of the incoming roots drops
    below four times the largest single-step root motion, except inside
    the terminal window where merging is expected.  Collisions are
    detected at the terminal point only: pairs within
    ``collision_tol * scale`` of each other are reported with their
    midpoint.
    """
    t_start, t_end = complex(t_start), complex(t_end)
    first = branch_points(p, t_start)
    current = first.roots.copy()
    scale = float(np.median(np.abs(current)))
    traj = Trajectory(ts=[t_start], roots=[current.copy()])

    if t_end == t_start:
        return traj

    s = 0.0
    ds = ds_init = 1.0 / steps
    velocity = np.zeros_like(current)  # droots/ds from the last accepted step
    total = 0
    while s < 1.0:
        if total > max_steps:
            raise ContinuityLoss(f"exceeded {max_steps} continuation steps")
        total += 1
        s_next = min(1.0, s + ds)
        dsa = s_next - s
        t = t_start + s_next * (t_end - t_start)
        predicted = current + velocity * dsa
        new = aberth(p.branch_coeffs(t), start=predicted)
        matched = _match(predicted, new, ambiguity_tol, scale)
        errors = np.abs(matched - predicted)
        dists = np.abs(matched[:, None] - matched[None, :])
        np.fill_diagonal(dists, np.inf)
        nearest = dists.min(axis=1)
        # per-root: the prediction error (configuration change the matcher
        # had to absorb) may not be a large fraction of the gap to the
        # root's own nearest neighbour
        ratio = float(np.max(errors / np.maximum(nearest, 1e-300)))
        near_end = (1.0 - s_next) < terminal_window
        if ratio > 0.25 and not near_end:
            if ds / 2 < min_step:
                raise ContinuityLoss(
                    f"step size exhausted at s={s:.6g} (error/gap ratio {ratio:.3e})"
                )
            ds /= 2
            continue
        velocity = (matched - current) / dsa
        current = matched
        s = s_next
        traj.ts.append(t)
        traj.roots.append(current.copy())
        if ratio < 1.0 / 16.0 and ds < ds_init:
            ds = min(2 * ds, ds_init)

    # collision scan at the terminal point
    final = traj.roots[-1]
    dists = np.abs(final[:, None] - final[None, :])
    seen = set()
    for i in range(len(final)):
        for j in range(i + 1, len(final)):
            if dists[i, j] < collision_tol * scale and (i, j) not in seen:
                seen.add((i, j))
                traj.collisions.append(
                    CollisionEvent(
                        step=len(traj.ts) - 1,
                        pair=(i, j),
                        location=(final[i] + final[j]) / 2,
                        t=traj.ts[-1],
                    )
                )
    return traj


@dataclass
class MatchingPath:
    """The x-plane arc traced by a merging pair of branch points."""

    polyline: np.ndarray
    endpoints: tuple[complex, complex]
    collision_point: complex
    pair: tuple[int, int]
    critical_value: CriticalValue
    trajectory: Trajectory

    @property
    def endpoint_turns(self) -> tuple[float, float]:
        """Arguments of the two t=0 endpoints in units of full turns."""
        return (
            math.atan2(self.endpoints[0].imag, self.endpoints[0].real) / TWO_PI % 1.0,
            math.atan2(self.endpoints[1].imag, self.endpoints[1].real) / TWO_PI % 1.0,
        )

    def to_json(self) -> dict:
        return {
            "polyline": [[z.real, z.imag] for z in self.polyline],
            "endpoints": [[z.real, z.imag] for z in self.endpoints],
            "collision_point": [self.collision_point.real, self.collision_point.imag],
            "critical_index": self.critical_value.index,
        }


def matching_path(p: Potential, cv: CriticalValue, steps: int = 64) -> MatchingPath:
    """Trace 0 -> cv.t and extract the arc of the unique merging pair.

    The path is the union of the two pre-collision trajectories: from one
    t=0 branch point to the collision point and back out to the other t=0
    branch point.
    """
    traj = trace_branch_points(p, 0.0, cv.t, steps=steps)
    if len(traj.collisions) != 1:
        raise ContinuityLoss(
            f"expected exactly one collision at t={cv.t}, found {len(traj.collisions)}"
        )
    ev = traj.collisions[0]
    i, j = ev.pair
    forward = traj.root_path(i)
    backward = traj.root_path(j)[::-1]
    polyline = np.concatenate([forward, np.array([ev.location]), backward])
    return MatchingPath(
        polyline=polyline,
        endpoints=(complex(forward[0]), complex(backward[-1])),
        collision_point=ev.location,
        pair=(i, j),
        critical_value=cv,
        trajectory=traj,
    )
