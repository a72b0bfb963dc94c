"""Maximal epsilon-separated nets by greedy lattice scan."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ModelSpace, PointCloud, PointRef


@dataclass(frozen=True)
class EpsilonNet:
    epsilon: float
    centers: tuple[PointRef, ...]
    space: ModelSpace
    resolution: int

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def coords(self) -> np.ndarray:
        return np.array([c.coords for c in self.centers], dtype=float)


def build_epsilon_net(space: ModelSpace, epsilon: float, resolution: int) -> EpsilonNet:
    """Scan the dense sample in order, keeping points at distance >= epsilon
    from every point kept so far.

    Blocking every candidate within epsilon of each accepted center is the
    same test as the pairwise scan, done with one vectorised pass per center.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not isinstance(space, PointCloud):
        h = space.sample_spacing(resolution)
        if not h < epsilon / 4:
            raise ValueError(
                f"resolution {resolution} too coarse: spacing {h:.6g} must be below epsilon/4 = {epsilon / 4:.6g}")
    cands = space.dense_sample(resolution)
    C = np.array([c.coords for c in cands], dtype=float)
    blocked = np.zeros(len(cands), dtype=bool)
    centers = []
    start = 0
    while True:
        free = np.flatnonzero(~blocked[start:])
        if free.size == 0:
            break
        k = start + int(free[0])
        centers.append(cands[k])
        blocked |= space.distances_from(cands[k], C) < epsilon
        blocked[k] = True
        start = k + 1
    return EpsilonNet(float(epsilon), tuple(centers), space, int(resolution))


def net_violations(net: EpsilonNet) -> dict:
    """Separation and covering defects of ``net`` against its own candidate set."""
    space = net.space
    C = net.coords
    sep = [
        (i, j)
        for i, c in enumerate(net.centers)
        for j in np.flatnonzero(space.distances_from(c, C) < net.epsilon)
        if j != i
    ]
    cands = space.dense_sample(net.resolution)
    X = np.array([c.coords for c in cands], dtype=float)
    nearest = np.full(len(cands), np.inf)
    for c in net.centers:
        nearest = np.minimum(nearest, space.distances_from(c, X))
    uncovered = np.flatnonzero(nearest >= net.epsilon)
    return {"separation": sep, "uncovered": uncovered.tolist()}
