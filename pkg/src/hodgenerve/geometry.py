"""Model spaces: flat tori, round 2-spheres and explicit point clouds."""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .minball import min_enclosing_ball, min_norm_point


class ChartError(ValueError):
    """Points do not fit in one chart of the space."""


@dataclass(frozen=True)
class PointRef:
    """A point of a model space.

    ``index`` points into the space's canonical sample list (``None`` for
    points built from raw coordinates).
    """

    index: int | None
    coords: tuple[float, ...]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


class ModelSpace:
    kind: str = ""

    def distance(self, a: PointRef, b: PointRef) -> float:
        raise NotImplementedError

    def distances_from(self, a: PointRef, coords: np.ndarray) -> np.ndarray:
        """Vectorised distance from ``a`` to each row of ``coords``."""
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def dense_sample(self, resolution: int) -> list[PointRef]:
        raise NotImplementedError

    def sample_spacing(self, resolution: int) -> float:
        """Largest gap between neighbouring lattice points."""
        raise NotImplementedError

    def guard_radius(self) -> float:
        """Default bound for ``3 * epsilon`` when building nerves."""
        return math.inf

    def diameter(self) -> float:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class FlatTorus(ModelSpace):
    """R^n modulo the lattice generated by ``lengths``."""

    kind = "flat_torus"

    def __init__(self, lengths):
        lengths = tuple(float(x) for x in lengths)
        if not lengths or any(x <= 0 for x in lengths):
            raise ValueError(f"torus side lengths must be positive, got {lengths}")
        self.lengths = lengths
        self._L = np.asarray(lengths)

    @property
    def dim(self) -> int:
        return len(self.lengths)

    def point(self, coords) -> PointRef:
        c = np.mod(np.asarray(coords, dtype=float), self._L)
        return PointRef(None, tuple(float(x) for x in c))

    def wrapped_difference(self, a, b) -> np.ndarray:
        """Shortest representative of ``b - a`` on each axis."""
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        return d - self._L * np.round(d / self._L)

    def distance(self, a: PointRef, b: PointRef) -> float:
        if a.coords == b.coords:
            return 0.0
        return float(np.linalg.norm(self.wrapped_difference(a.coords, b.coords)))

    def distances_from(self, a: PointRef, coords: np.ndarray) -> np.ndarray:
        d = np.abs(np.asarray(coords, dtype=float) - a.array) % self._L
        d = np.minimum(d, self._L - d)
        return np.sqrt((d * d).sum(axis=1))

    def volume(self) -> float:
        return float(np.prod(self._L))

    def diameter(self) -> float:
        return float(np.linalg.norm(self._L / 2))

    def dense_sample(self, resolution: int) -> list[PointRef]:
        if resolution < 2:
            raise ValueError("resolution must be at least 2")
        axes = [np.arange(resolution) * (L / resolution) for L in self.lengths]
        pts = []
        for k, combo in enumerate(itertools.product(*axes)):
            pts.append(PointRef(k, tuple(float(x) for x in combo)))
        return pts

    def sample_spacing(self, resolution: int) -> float:
        return max(self.lengths) / resolution

    def guard_radius(self) -> float:
        # 3 eps < 3 L/4  <=>  eps below the convexity radius L/4
        return 0.75 * min(self.lengths)

    def describe(self) -> dict:
        return {"kind": self.kind, "lengths": list(self.lengths)}


class RoundSphere(ModelSpace):
    """The round 2-sphere of radius ``radius`` embedded in R^3."""

    kind = "sphere"
    dim = 2

    def __init__(self, radius: float):
        if radius <= 0:
            raise ValueError(f"sphere radius must be positive, got {radius}")
        self.radius = float(radius)

    def point(self, coords) -> PointRef:
        v = np.asarray(coords, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("cannot project the origin onto the sphere")
        v = v * (self.radius / n)
        return PointRef(None, tuple(float(x) for x in v))

    def from_angles(self, theta: float, phi: float) -> PointRef:
        """Colatitude ``theta`` in [0, pi], longitude ``phi``."""
        R = self.radius
        return self.point((R * math.sin(theta) * math.cos(phi),
                           R * math.sin(theta) * math.sin(phi),
                           R * math.cos(theta)))

    def distance(self, a: PointRef, b: PointRef) -> float:
        if a.coords == b.coords:
            return 0.0
        u, v = a.array, b.array
        # atan2 form stays accurate for nearly equal and nearly antipodal points
        cross = np.linalg.norm(np.cross(u, v))
        dot = float(u @ v)
        return self.radius * math.atan2(cross, dot)

    def distances_from(self, a: PointRef, coords: np.ndarray) -> np.ndarray:
        C = np.asarray(coords, dtype=float)
        u = a.array
        cross = np.linalg.norm(np.cross(C, u), axis=1)
        return self.radius * np.arctan2(cross, C @ u)

    def volume(self) -> float:
        return 4.0 * math.pi * self.radius ** 2

    def diameter(self) -> float:
        return math.pi * self.radius

    def dense_sample(self, resolution: int) -> list[PointRef]:
        """Latitude/longitude lattice with each pole listed once."""
        if resolution < 2:
            raise ValueError("resolution must be at least 2")
        pts: list[PointRef] = []
        for i in range(resolution):
            theta = math.pi * i / (resolution - 1)
            if i in (0, resolution - 1):
                p = self.from_angles(theta, 0.0)
                pts.append(PointRef(len(pts), p.coords))
                continue
            for j in range(resolution):
                p = self.from_angles(theta, 2 * math.pi * j / resolution)
                pts.append(PointRef(len(pts), p.coords))
        return pts

    def sample_spacing(self, resolution: int) -> float:
        return max(math.pi * self.radius / (resolution - 1),
                   2 * math.pi * self.radius / resolution)

    def guard_radius(self) -> float:
        # simplices then have diameter < pi R / 2, inside an open hemisphere
        return 0.75 * math.pi * self.radius

    def tangent_frame(self, base: PointRef) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unit normal, east and north vectors at ``base``."""
        n = base.array / self.radius
        east = np.cross([0.0, 0.0, 1.0], n)
        if np.linalg.norm(east) < 1e-12:
            east = np.array([0.0, 1.0, 0.0])
        east /= np.linalg.norm(east)
        north = np.cross(n, east)
        return n, east, north

    def describe(self) -> dict:
        return {"kind": self.kind, "radius": self.radius}


class PointCloud(ModelSpace):
    """A finite metric space given by points and a distance table."""

    kind = "point_cloud"

    def __init__(self, points, table=None):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(self.points)
        if table is None:
            diff = self.points[:, None, :] - self.points[None, :, :]
            table = np.sqrt((diff * diff).sum(axis=2))
        table = np.asarray(table, dtype=float)
        if table.shape != (n, n):
            raise ValueError(f"distance table has shape {table.shape}, expected {(n, n)}")
        if not np.allclose(table, table.T, rtol=0, atol=1e-12) or np.any(np.diag(table) != 0):
            raise ValueError("distance table must be symmetric with zero diagonal")
        self.table = table

    @classmethod
    def from_csv(cls, path) -> "PointCloud":
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                rows.append([float(x) for x in row])
        if not rows:
            raise ValueError(f"{path}: no points")
        return cls(rows)

    def __len__(self) -> int:
        return len(self.points)

    def _check(self, p: PointRef) -> int:
        if p.index is None or not 0 <= p.index < len(self.points):
            raise IndexError(f"point index {p.index} out of range for cloud of {len(self.points)}")
        return p.index

    def distance(self, a: PointRef, b: PointRef) -> float:
        return float(self.table[self._check(a), self._check(b)])

    def distances_from(self, a: PointRef, coords: np.ndarray) -> np.ndarray:
        # rows of coords are cloud points, matched through the table
        return self.table[self._check(a)][self._indices_of(coords)]

    def _indices_of(self, coords) -> np.ndarray:
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        lookup = {tuple(p): i for i, p in enumerate(self.points)}
        return np.array([lookup[tuple(c)] for c in coords], dtype=int)

    def volume(self) -> float:
        raise ValueError("a point cloud has no volume")

    def diameter(self) -> float:
        return float(self.table.max())

    def dense_sample(self, resolution: int) -> list[PointRef]:
        return [PointRef(i, tuple(float(x) for x in p)) for i, p in enumerate(self.points)]

    def sample_spacing(self, resolution: int) -> float:
        return 0.0

    def describe(self) -> dict:
        return {"kind": self.kind, "n_points": len(self.points)}


def distance(space: ModelSpace, a: PointRef, b: PointRef) -> float:
    return space.distance(a, b)


def dense_sample(space: ModelSpace, resolution: int) -> list[PointRef]:
    return space.dense_sample(resolution)


def lift_to_chart(space: ModelSpace, base: PointRef, pts) -> np.ndarray:
    """Euclidean coordinates of ``pts`` in a chart centred at ``base``.

    Torus: nearest lift, an isometry while every point is within L/4 of base.
    Sphere: geodesic normal coordinates (east, north), radially exact.
    """
    pts = list(pts)
    if isinstance(space, FlatTorus):
        limit = min(space.lengths) / 4
        out = np.array([space.wrapped_difference(base.coords, p.coords) for p in pts]).reshape(len(pts), space.dim)
        far = np.linalg.norm(out, axis=1) if len(pts) else np.zeros(0)
        if np.any(far >= limit):
            raise ChartError(f"point at distance {far.max():.6g} from base, chart radius is {limit:.6g}")
        return out
    if isinstance(space, RoundSphere):
        R = space.radius
        limit = math.pi * R / 3
        n, east, north = space.tangent_frame(base)
        out = np.zeros((len(pts), 2))
        for k, p in enumerate(pts):
            d = space.distance(base, p)
            if d >= limit:
                raise ChartError(f"point at distance {d:.6g} from base, chart radius is {limit:.6g}")
            v = p.array / R
            t = v - (v @ n) * n
            tn = np.linalg.norm(t)
            if tn > 0:
                out[k] = d * np.array([t @ east, t @ north]) / tn
        return out
    raise ChartError(f"{space.kind} has no charts")


def _torus_minimax(space: FlatTorus, pts: list[PointRef]) -> float:
    base = pts[0].array
    lifted = np.array([space.wrapped_difference(base, p.coords) for p in pts])
    _, r = min_enclosing_ball(lifted)
    if r < min(space.lengths) / 4:
        # below the convexity radius the nearest lift is the optimal one
        return r
    m = len(pts) - 1
    if 3 ** (space.dim * m) > 20_000:
        raise ChartError("points too spread out for an exact torus 1-center")
    best = r
    shifts = np.array(list(itertools.product((-1, 0, 1), repeat=space.dim)), dtype=float) * space._L
    for combo in itertools.product(range(len(shifts)), repeat=m):
        trial = lifted.copy()
        trial[1:] += shifts[list(combo)]
        best = min(best, min_enclosing_ball(trial)[1])
    return best


def _sphere_minimax(space: RoundSphere, pts: list[PointRef]) -> float:
    R = space.radius
    for p in pts[1:]:
        if space.distance(pts[0], p) >= math.pi * R / 2:
            raise ChartError("sphere points must lie within pi R / 2 of the first point")
    unit = np.array([p.array for p in pts]) / R
    # every vector has positive dot product with the first, so the origin is
    # outside the hull and the nearest point sits on a face of <= 3 vertices
    c = min_norm_point(unit, max_face=3)
    return R * math.acos(min(1.0, float(np.linalg.norm(c))))


def _cloud_minimax(space: PointCloud, pts: list[PointRef]) -> float:
    idx = [space._check(p) for p in pts]
    return float(space.table[:, idx].max(axis=1).min())


def minimax_center_radius(space: ModelSpace, pts) -> float:
    """Smallest r such that one point of the space is within r of all ``pts``."""
    pts = list(pts)
    if not pts:
        raise ValueError("minimax_center_radius of an empty point list")
    if len(pts) == 1:
        return 0.0
    if isinstance(space, FlatTorus):
        return _torus_minimax(space, pts)
    if isinstance(space, RoundSphere):
        return _sphere_minimax(space, pts)
    if isinstance(space, PointCloud):
        return _cloud_minimax(space, pts)
    raise TypeError(f"unsupported space {type(space).__name__}")


def intersection_test_method(space: ModelSpace) -> str:
    return "witness" if isinstance(space, PointCloud) else "exact"


def space_from_config(section: dict, base_dir: Path | None = None) -> ModelSpace:
    """Build a space from a parsed ``[space]`` section."""
    kind = section.get("kind")
    if kind == "flat_torus":
        return FlatTorus(section["lengths"])
    if kind == "sphere":
        return RoundSphere(section["radius"])
    if kind == "point_cloud":
        path = Path(section["points_file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return PointCloud.from_csv(path)
    raise ValueError(f"unknown space kind {kind!r}")
