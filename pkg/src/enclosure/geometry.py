"""Exact computational geometry backing the asymptotic formulas.

Support functions, cones, broken-path distances, first reflectors,
shape-operator determinants and space-time directions.  Everything here
is pure and deterministic; all values are safe to share across threads.

Curvature sign convention: the obstacle's mean curvature is reported
positive for a convex body with respect to its outward normal (sphere of
radius R gives H = 1/R, K = 1/R^2).  With that convention the enclosing
surface (spheroid through the first reflector, or the sphere of nearest
distance) carries the opposite-definite shape operator, and the
determinant difference det(S(outer) - S(obstacle)) is nonnegative for
convex obstacles; for a sphere obstacle it equals (1/d + 1/R)^2.  The
orientation was fixed by checking that positivity holds on sphere pairs,
not assumed from a textbook convention.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .config import GEOM_TOL

__all__ = [
    "Direction2",
    "ComplexFrequency",
    "Polygon",
    "PolygonSet",
    "Disc",
    "Cone2",
    "SpacetimeDirection",
    "SphereObstacle",
    "BallSource",
    "SurfaceCurvature",
    "CurvaturePair",
    "support_function",
    "is_regular_direction",
    "generalized_support",
    "broken_path_min",
    "nearest_distance",
    "first_reflection_scan",
    "sphere_level_set",
    "spheroid_level_set",
    "level_set_curvatures",
    "shape_operator_det",
    "SpacetimeRegion",
    "spacetime_support",
]


# ---------------------------------------------------------------------------
# Directions and complex frequencies
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Direction2:
    """Unit direction in the plane together with its orthogonal companion.

    ``perp`` follows the det(perp, omega) > 0 orientation by default,
    i.e. perp = (omega_2, -omega_1) (clockwise rotation).  The opposite
    (counter-clockwise) companion is available as an explicit flag, never
    implicitly.
    """

    omega: np.ndarray
    perp: np.ndarray
    convention: str = "det_positive"

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        perp = np.asarray(self.perp, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "perp", perp)
        if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
            raise ValueError("omega must be a unit vector")
        if abs(np.linalg.norm(perp) - 1.0) > 1e-12:
            raise ValueError("perp must be a unit vector")
        if abs(float(omega @ perp)) > 1e-12:
            raise ValueError("omega and perp must be orthogonal")
        det = perp[0] * omega[1] - perp[1] * omega[0]
        if self.convention == "det_positive" and det <= 0:
            raise ValueError("det(perp, omega) must be positive")
        if self.convention == "ccw" and det >= 0:
            raise ValueError("ccw convention requires det(perp, omega) < 0")

    @classmethod
    def from_angle(cls, theta: float, convention: str = "det_positive") -> "Direction2":
        omega = np.array([np.cos(theta), np.sin(theta)])
        if convention == "det_positive":
            perp = np.array([omega[1], -omega[0]])
        elif convention == "ccw":
            perp = np.array([-omega[1], omega[0]])
        else:
            raise ValueError(f"unknown convention {convention!r}")
        return cls(omega, perp, convention)

    @classmethod
    def from_vector(cls, v, convention: str = "det_positive") -> "Direction2":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector has no direction")
        return cls.from_angle(float(np.arctan2(v[1], v[0])), convention)

    @property
    def angle(self) -> float:
        return float(np.arctan2(self.omega[1], self.omega[0]))


@dataclass(frozen=True)
class ComplexFrequency:
    """Large parameter tau with the complex vector of the probe exponential.

    Planar variant: z = tau (omega + i perp), z.z = 0.
    Heat variant:   z = c tau (omega + i sqrt(1 - 1/(c^2 tau)) perp), z.z = tau,
    requiring c^2 tau > 1.
    """

    tau: float
    z: np.ndarray
    c: Optional[float] = None

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        z = np.asarray(self.z, dtype=complex)
        object.__setattr__(self, "z", z)
        zz = complex(z @ z)
        if self.c is None:
            if abs(zz) > 1e-9 * max(1.0, self.tau**2):
                raise ValueError("planar variant requires z.z = 0")
        else:
            if self.c**2 * self.tau <= 1:
                raise ValueError("heat variant requires c^2 tau > 1")
            if abs(zz - self.tau) > 1e-9 * max(1.0, self.tau):
                raise ValueError("heat variant requires z.z = tau")

    @classmethod
    def planar(cls, tau: float, direction: Direction2) -> "ComplexFrequency":
        z = tau * (direction.omega + 1j * direction.perp)
        return cls(tau, z, None)

    @classmethod
    def heat(cls, tau: float, c: float, direction: Direction2) -> "ComplexFrequency":
        if c**2 * tau <= 1:
            raise ValueError("heat variant requires c^2 tau > 1")
        z = c * tau * (direction.omega + 1j * np.sqrt(1.0 - 1.0 / (c**2 * tau)) * direction.perp)
        return cls(tau, z, c)


# ---------------------------------------------------------------------------
# Planar sets: polygons, discs
# ---------------------------------------------------------------------------
def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p1, p2, p3, p4) -> bool:
    """Strict crossing test; shared endpoints and collinear overlap excluded."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


@dataclass(frozen=True)
class Polygon:
    """Simple closed polygon, vertices counter-clockwise, implicit closure."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs an (n, 2) array with n >= 3")
        object.__setattr__(self, "vertices", v)
        area = _signed_area(v)
        if abs(area) <= GEOM_TOL:
            raise ValueError("degenerate (zero-area) polygon rejected")
        if area < 0:
            raise ValueError("polygon vertices must be counter-clockwise")
        n = len(v)
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                c, d = v[j], v[(j + 1) % n]
                if _segments_properly_intersect(a, b, c, d):
                    raise ValueError("polygon is self-intersecting")

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def edges(self) -> np.ndarray:
        """(n, 2, 2) array of (start, end) vertex pairs."""
        v = self.vertices
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)

    def contains(self, point, tol: float = GEOM_TOL) -> bool:
        """Point-in-closed-polygon via winding with boundary tolerance."""
        p = np.asarray(point, dtype=float)
        v = self.vertices
        n = len(v)
        # on-boundary check
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            ab = b - a
            t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
            if np.linalg.norm(a + t * ab - p) <= tol:
                return True
        inside = False
        j = n - 1
        for i in range(n):
            if (v[i, 1] > p[1]) != (v[j, 1] > p[1]):
                x_cross = v[j, 0] + (p[1] - v[j, 1]) * (v[i, 0] - v[j, 0]) / (v[i, 1] - v[j, 1])
                if p[0] < x_cross:
                    inside = not inside
            j = i
        return inside


@dataclass(frozen=True)
class Disc:
    """Closed disc; participates in support/cone predicates like a polygon."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")

    def contains(self, point, tol: float = GEOM_TOL) -> bool:
        return np.linalg.norm(np.asarray(point, dtype=float) - self.center) <= self.radius + tol


@dataclass(frozen=True)
class PolygonSet:
    """Disjoint union of simple polygons (the hidden set D)."""

    components: tuple

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, Polygon) else Polygon(np.asarray(c, dtype=float))
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                if _polygons_touch(comps[i], comps[j]):
                    raise ValueError("polygon components must have disjoint closures")

    @property
    def is_empty(self) -> bool:
        return len(self.components) == 0

    def all_vertices(self) -> np.ndarray:
        if self.is_empty:
            return np.zeros((0, 2))
        return np.vstack([c.vertices for c in self.components])

    def contains(self, point, tol: float = GEOM_TOL) -> bool:
        return any(c.contains(point, tol) for c in self.components)


def _polygons_touch(a: Polygon, b: Polygon) -> bool:
    for ea in a.edges():
        for eb in b.edges():
            if _segments_properly_intersect(ea[0], ea[1], eb[0], eb[1]):
                return True
    if a.contains(b.vertices[0]) or b.contains(a.vertices[0]):
        return True
    # closure contact: any vertex of one on/inside the other
    if any(a.contains(v) for v in b.vertices) or any(b.contains(v) for v in a.vertices):
        return True
    return False


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Cone2:
    """Closed planar cone about ``axis`` of half-opening pi*alpha/2 at ``vertex``.

    Membership: (x - vertex).omega >= |x - vertex| cos(pi alpha / 2).
    """

    vertex: np.ndarray
    axis: Direction2
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "vertex", np.asarray(self.vertex, dtype=float))
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("opening alpha must lie in (0, 1]")

    @property
    def half_angle(self) -> float:
        return 0.5 * np.pi * self.alpha

    def contains(self, points, tol: float = GEOM_TOL) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.vertex
        r = np.linalg.norm(p, axis=1)
        lhs = p @ self.axis.omega
        return lhs >= r * np.cos(self.half_angle) - tol

    def translated(self, shift) -> "Cone2":
        return Cone2(self.vertex + np.asarray(shift, dtype=float), self.axis, self.alpha)

    def distance_to_point(self, point) -> float:
        """Euclidean distance from a point to the closed cone."""
        p = np.asarray(point, dtype=float) - self.vertex
        r = np.linalg.norm(p)
        if r == 0.0:
            return 0.0
        u = float(p @ self.axis.omega)
        v = float(p @ self.axis.perp)
        phi = abs(np.arctan2(v, u))  # angle off the axis, in [0, pi]
        half = self.half_angle
        if phi <= half:
            return 0.0
        if phi - half <= 0.5 * np.pi:
            return r * np.sin(phi - half)  # nearest point on an edge ray
        return r  # nearest point is the vertex

    def intersects(self, shape, tol: float = GEOM_TOL) -> bool:
        """Closed cone vs closed polygon/disc/polygon-set intersection."""
        if isinstance(shape, PolygonSet):
            return any(self.intersects(c, tol) for c in shape.components)
        if isinstance(shape, Disc):
            return self.distance_to_point(shape.center) <= shape.radius + tol
        if isinstance(shape, Polygon):
            if np.any(self.contains(shape.vertices, tol)):
                return True
            if shape.contains(self.vertex, tol):
                return True
            # edge vs boundary-ray crossings
            half = self.half_angle
            for sgn in (+1.0, -1.0):
                ray = np.cos(half) * self.axis.omega + sgn * np.sin(half) * self.axis.perp
                for e in shape.edges():
                    if _ray_hits_segment(self.vertex, ray, e[0], e[1], tol):
                        return True
            return False
        raise TypeError(f"unsupported shape {type(shape)!r}")


def _ray_hits_segment(origin, direction, a, b, tol) -> bool:
    d = np.asarray(direction, dtype=float)
    e = b - a
    denom = d[0] * (-e[1]) - d[1] * (-e[0])
    if abs(denom) < 1e-15:
        return False
    rhs = a - origin
    t = (rhs[0] * (-e[1]) - rhs[1] * (-e[0])) / denom
    s = (d[0] * rhs[1] - d[1] * rhs[0]) / denom
    return t >= -tol and -tol <= s <= 1 + tol


# ---------------------------------------------------------------------------
# Space-time directions and 3D scene primitives
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SpacetimeDirection:
    """Unit direction (c omega, -1)/sqrt(c^2+1) in R^2 x R, time component < 0."""

    direction: Direction2
    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("virtual slowness c must be positive")

    @property
    def vector(self) -> np.ndarray:
        w = np.empty(3)
        w[:2] = self.c * self.direction.omega
        w[2] = -1.0
        return w / np.sqrt(self.c**2 + 1.0)


@dataclass(frozen=True)
class SphereObstacle:
    """Sphere obstacle; optional constant surface admittance for dissipative scenes."""

    center: np.ndarray
    radius: float
    admittance: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.admittance is not None and self.admittance <= 0:
            raise ValueError("admittance must be positive")


@dataclass(frozen=True)
class BallSource:
    """Source/receiver ball for the wave scenes."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("radius must be positive")


# ---------------------------------------------------------------------------
# Support functions
# ---------------------------------------------------------------------------
def support_function(shape, direction: Direction2) -> float:
    """sup of x.omega over the set; exact on polygon vertices and discs."""
    omega = direction.omega if isinstance(direction, Direction2) else np.asarray(direction, float)
    if isinstance(shape, PolygonSet):
        if shape.is_empty:
            raise ValueError("support function of the empty set is undefined")
        return float(np.max(shape.all_vertices() @ omega))
    if isinstance(shape, Polygon):
        return float(np.max(shape.vertices @ omega))
    if isinstance(shape, Disc):
        return float(shape.center @ omega) + shape.radius
    raise TypeError(f"unsupported shape {type(shape)!r}")


def is_regular_direction(shape: PolygonSet, direction: Direction2, tol: float = GEOM_TOL):
    """True iff exactly one vertex attains the support value within tol.

    Returns (flag, argmax vertex or None).
    """
    if isinstance(shape, Polygon):
        shape = PolygonSet((shape,))
    if shape.is_empty:
        raise ValueError("empty set has no regular directions")
    verts = shape.all_vertices()
    vals = verts @ direction.omega
    h = float(np.max(vals))
    hits = np.nonzero(vals >= h - tol)[0]
    if len(hits) == 1:
        return True, verts[hits[0]].copy()
    return False, None


def generalized_support(
    shape,
    y,
    direction: Direction2,
    alpha: float,
    domain=None,
    t_max: float = 50.0,
    tol: float = GEOM_TOL,
) -> Optional[float]:
    """First cone-contact parameter along the ray through y.

    Slides the cone vertex from y backwards along omega (t decreasing from
    0) and returns the largest t < 0 at which the closed cone first meets
    the closure of ``shape``; the enlarged cone at any t above the returned
    value stays disjoint.  Returns None when no contact occurs for
    t >= -t_max.

    ``domain``, when given, is the scene region (Disc) whose closure must be
    disjoint from the initial cone; violating that is a caller error.
    """
    y = np.asarray(y, dtype=float)
    cone0 = Cone2(y, direction, alpha)
    if domain is not None:
        if cone0.distance_to_point(domain.center) <= domain.radius + tol:
            raise ValueError("initial cone must be disjoint from the closed domain")
    if cone0.intersects(shape, tol):
        raise ValueError("initial cone already meets the target set")

    def hits(t: float) -> bool:
        return cone0.translated(t * direction.omega).intersects(shape, tol)

    if not hits(-t_max):
        return None
    lo, hi = -t_max, 0.0  # hits(lo) is True, hits(hi) is False
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if hits(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Broken paths, nearest distances, first reflectors
# ---------------------------------------------------------------------------
def _sphere_plane_frame(center, p, pp):
    """Orthonormal in-plane frame (e1, e2) of the plane through center, p, pp."""
    u = np.asarray(p, float) - center
    v = np.asarray(pp, float) - center
    if np.linalg.norm(u) < 1e-14:
        u = v
    e1 = u / np.linalg.norm(u)
    v2 = v - (v @ e1) * e1
    n2 = np.linalg.norm(v2)
    if n2 < 1e-12:  # p, pp, center collinear: any orthogonal companion works
        a = np.zeros(3)
        a[int(np.argmin(np.abs(e1)))] = 1.0
        v2 = a - (a @ e1) * e1
        n2 = np.linalg.norm(v2)
    e2 = v2 / n2
    return e1, e2


def _segment_point_distance(a, b, q) -> float:
    ab = b - a
    t = np.clip(np.dot(q - a, ab) / np.dot(ab, ab), 0.0, 1.0) if np.dot(ab, ab) > 0 else 0.0
    return float(np.linalg.norm(a + t * ab - q))


def broken_path_min(obstacle: SphereObstacle, p, pp, tol: float = 1e-10):
    """Minimize |p - x| + |x - pp| over the obstacle sphere.

    The minimizer lies in the plane spanned by p, pp and the center (both
    the sphere and the level spheroids are symmetric under reflection in
    that plane), so the search runs over the in-plane angle, refined by
    golden-section around every near-global coarse minimum.  Returns
    (min value, list of reflector points).
    """
    p = np.asarray(p, dtype=float)
    pp = np.asarray(pp, dtype=float)
    c, R = obstacle.center, obstacle.radius
    if _segment_point_distance(p, pp, c) <= R:
        raise ValueError("segment between source points meets the obstacle")
    e1, e2 = _sphere_plane_frame(c, p, pp)

    def phi_of(psi: np.ndarray):
        x = c[None, :] + R * (np.cos(psi)[:, None] * e1 + np.sin(psi)[:, None] * e2)
        return np.linalg.norm(x - p, axis=1) + np.linalg.norm(x - pp, axis=1), x

    psi_grid = np.linspace(0.0, 2 * np.pi, 2049)[:-1]
    vals, _ = phi_of(psi_grid)
    vmin = float(np.min(vals))

    golden = 0.5 * (np.sqrt(5.0) - 1.0)

    def refine(lo: float, hi: float) -> float:
        a, b = lo, hi
        while b - a > 1e-13:
            d = golden * (b - a)
            x1, x2 = b - d, a + d
            f1, _ = phi_of(np.array([x1]))
            f2, _ = phi_of(np.array([x2]))
            if f1[0] < f2[0]:
                b = x2
            else:
                a = x1
        return 0.5 * (a + b)

    h = psi_grid[1] - psi_grid[0]
    minima = []
    n = len(psi_grid)
    for i in range(n):
        prev_v, next_v = vals[(i - 1) % n], vals[(i + 1) % n]
        if vals[i] <= prev_v and vals[i] <= next_v and vals[i] <= vmin + 10 * tol:
            psi_star = refine(psi_grid[i] - h, psi_grid[i] + h)
            v_star, x_star = phi_of(np.array([psi_star]))
            minima.append((float(v_star[0]), x_star[0]))
    best = min(m[0] for m in minima)
    points = []
    for v, x in minima:
        if v <= best + tol and all(np.linalg.norm(x - q) > 1e-6 for q in points):
            points.append(x)
    return best, points


def nearest_distance(obstacle: SphereObstacle, p):
    """Distance from p to the obstacle boundary and the unique nearest point."""
    p = np.asarray(p, dtype=float)
    r = np.linalg.norm(p - obstacle.center)
    if r <= obstacle.radius:
        raise ValueError("point lies inside the closed obstacle")
    d = float(r - obstacle.radius)
    reflector = obstacle.center + obstacle.radius * (p - obstacle.center) / r
    return d, reflector


def first_reflection_scan(d_oracle: Callable, p, omega, s: float, tol: float = 1e-7) -> bool:
    """Decide whether p + d(p) omega lies on the obstacle boundary.

    Compares d(p + s omega) against d(p) - s: equality (within tol) holds
    exactly when the probed direction passes through a nearest boundary
    point; otherwise the shifted distance is strictly larger.
    """
    p = np.asarray(p, dtype=float)
    omega = np.asarray(omega, dtype=float)
    d0 = d_oracle(p)
    if not (0.0 < s < d0):
        raise ValueError("shift s must lie in (0, d(p))")
    return d_oracle(p + s * omega) - (d0 - s) <= tol


# ---------------------------------------------------------------------------
# Shape operators via level sets
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SurfaceCurvature:
    H: float
    K: float
    shape_matrix: np.ndarray  # 2x2 in an orthonormal tangent basis


@dataclass(frozen=True)
class CurvaturePair:
    outer: SurfaceCurvature
    obstacle: SurfaceCurvature
    det_difference: float


def sphere_level_set(center, radius: float) -> Callable:
    center = np.asarray(center, dtype=float)

    def F(x):
        return np.linalg.norm(np.asarray(x, dtype=float) - center) - radius

    return F


def spheroid_level_set(p, pp, c: float) -> Callable:
    """Level set phi(x) = |p-x| + |x-pp| - c of the confocal spheroid family."""
    p = np.asarray(p, dtype=float)
    pp = np.asarray(pp, dtype=float)
    if c <= np.linalg.norm(p - pp):
        raise ValueError("spheroid level must exceed the focal distance")

    def F(x):
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - p) + np.linalg.norm(x - pp) - c

    return F


def _fd_gradient(F, q, h):
    g = np.zeros(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        g[i] = (F(q + e) - F(q - e)) / (2 * h)
    return g


def _fd_hessian(F, q, h):
    H = np.zeros((3, 3))
    f0 = F(q)
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h
        H[i, i] = (F(q + ei) - 2 * f0 + F(q - ei)) / h**2
        for j in range(i + 1, 3):
            ej = np.zeros(3)
            ej[j] = h
            H[i, j] = (
                F(q + ei + ej) - F(q + ei - ej) - F(q - ei + ej) + F(q - ei - ej)
            ) / (4 * h**2)
            H[j, i] = H[i, j]
    return H


def level_set_curvatures(F: Callable, q, nu, h: float = 1e-4) -> SurfaceCurvature:
    """Shape operator of {F = 0} at q with respect to the unit normal nu.

    Second-order finite differences on F; the operator is the tangential
    Hessian of F scaled by 1/|grad F|, with the sign flipped when grad F
    points against nu.  Convex surface with outward nu gives positive H.
    """
    q = np.asarray(q, dtype=float)
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    g = _fd_gradient(F, q, h)
    gn = np.linalg.norm(g)
    if gn < 1e-10:
        raise ValueError("level set gradient vanishes at q")
    sign = 1.0 if g @ nu > 0 else -1.0
    # orthonormal tangent basis
    a = np.zeros(3)
    a[int(np.argmin(np.abs(nu)))] = 1.0
    t1 = a - (a @ nu) * nu
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(nu, t1)
    Hf = _fd_hessian(F, q, h)
    T = np.stack([t1, t2], axis=1)  # (3, 2)
    S = sign * (T.T @ Hf @ T) / gn  # (2, 2)
    S = 0.5 * (S + S.T)
    return SurfaceCurvature(H=float(np.trace(S)) / 2.0, K=float(np.linalg.det(S)), shape_matrix=S)


def shape_operator_det(
    outer_F: Callable,
    obstacle_F: Callable,
    q,
    nu_q,
    h: float = 1e-4,
    tangent_tol: float = 1e-6,
) -> CurvaturePair:
    """Curvatures of both surfaces at a common tangency point q.

    nu_q is the outward normal of the obstacle (equivalently the inward
    normal of the outer enclosing surface).  Returns per-surface (H, K)
    and det(S(outer) - S(obstacle)), which is nonnegative when the outer
    surface encloses a convex obstacle; the sign conventions were pinned
    by that positivity on sphere pairs (module docstring).
    """
    q = np.asarray(q, dtype=float)
    nu_q = np.asarray(nu_q, dtype=float)
    nu_q = nu_q / np.linalg.norm(nu_q)
    g_out = _fd_gradient(outer_F, q, h)
    g_obs = _fd_gradient(obstacle_F, q, h)
    n_out = g_out / np.linalg.norm(g_out)
    n_obs = g_obs / np.linalg.norm(g_obs)
    if abs(abs(n_out @ n_obs) - 1.0) > tangent_tol:
        raise ValueError("surfaces do not share a tangent plane at q")
    if abs(outer_F(q)) > 100 * h**2 or abs(obstacle_F(q)) > 100 * h**2:
        raise ValueError("q does not lie on both surfaces")
    outer = level_set_curvatures(outer_F, q, nu_q, h)
    obstacle = level_set_curvatures(obstacle_F, q, nu_q, h)
    det = float(np.linalg.det(outer.shape_matrix - obstacle.shape_matrix))
    return CurvaturePair(outer=outer, obstacle=obstacle, det_difference=det)


# ---------------------------------------------------------------------------
# Space-time support
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SpacetimeRegion:
    """Bounded union of polygon x interval slabs and space-time cones.

    ``slabs``: (Polygon, t0, t1) triples, the set P x [t0, t1].
    ``cones``: (apex (x, t0), base polygon W, height delta) triples, the set
    {(x + s/delta (y - x), t0 + s) : y in W, 0 <= s <= delta}.
    """

    slabs: tuple = ()
    cones: tuple = ()

    def __post_init__(self):
        if not self.slabs and not self.cones:
            raise ValueError("space-time region must be nonempty and bounded")
        for _, t0, t1 in self.slabs:
            if not (t1 > t0):
                raise ValueError("slab needs t1 > t0")
        for _, _, delta in self.cones:
            if delta <= 0:
                raise ValueError("cone height must be positive")


def spacetime_support(region: SpacetimeRegion, theta) -> float:
    """sup of (x, t).theta over the region; exact on the stored primitives."""
    if isinstance(theta, SpacetimeDirection):
        theta = theta.vector
    theta = np.asarray(theta, dtype=float)
    w, wt = theta[:2], float(theta[2])
    best = -np.inf
    for poly, t0, t1 in region.slabs:
        poly = poly if isinstance(poly, Polygon) else Polygon(poly)
        sx = np.max(poly.vertices @ w)
        best = max(best, sx + max(wt * t0, wt * t1))
    for apex, base, delta in region.cones:
        base = base if isinstance(base, Polygon) else Polygon(base)
        x0, t0 = np.asarray(apex[0], dtype=float), float(apex[1])
        # extreme points: apex and the base vertices at t0 + delta
        best = max(best, float(x0 @ w + wt * t0))
        best = max(best, float(np.max(base.vertices @ w) + wt * (t0 + delta)))
    if not np.isfinite(best):
        raise ValueError("region is unbounded or empty in direction theta")
    return float(best)
