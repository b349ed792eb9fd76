"""
Circle Space Module
Circles, lines and point-circles of the Riemann sphere as points [k:a:b:h]
of real projective 3-space, for the quadric k(x^2+y^2) + ax + by + h = 0.

Covers the quadratic form Q = a^2 + b^2 - 4kh and its polarization,
Cramer-rule circles through three points, the Mobius action on circles,
pencils with frames and their coordinates, and circle intersections.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from config import resolve_eps
from utils.errors import (
    CoincidentCircles,
    CoincidentPoints,
    DegenerateCircle,
    DegenerateInput,
    EllipticUnsupported,
    GeometryError,
    IdentityMap,
    InfiniteCenter,
    IsLine,
    NoFrame,
)
from utils.mobius import (
    INFINITY,
    ComplexPoint,
    FixedPointPair,
    MobiusMap,
    TransformKind,
    apply_point,
    classify,
    fixed_points,
    inverse,
    isometric_circle,
)

# Gram matrix of the polarized form <c1, c2> = a1a2 + b1b2 - 2(k1h2 + k2h1)
GRAM = np.array([
    [0.0, 0.0, 0.0, -2.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [-2.0, 0.0, 0.0, 0.0],
])


class CircleKind(Enum):
    REAL_CIRCLE = "real_circle"
    LINE = "line"
    POINT_CIRCLE = "point_circle"
    IMAGINARY = "imaginary"


@dataclass(frozen=True)
class CircleP3:
    """
    Homogeneous coordinates [k:a:b:h] of a circle.

    The raw coordinates are kept as given so that the quadratic form can be
    evaluated on a chosen representative; `normalized()` gives the canonical
    representative (unit norm, first nonzero coordinate positive) used for
    comparison, hashing and JSON.
    """
    k: float
    a: float
    b: float
    h: float

    def __post_init__(self):
        values = [float(x) for x in (self.k, self.a, self.b, self.h)]
        if not all(math.isfinite(x) for x in values):
            raise GeometryError(f"Circle coordinates must be finite, got {values}")
        if all(x == 0.0 for x in values):
            raise GeometryError("The zero vector is not a circle")
        for name, x in zip(('k', 'a', 'b', 'h'), values):
            object.__setattr__(self, name, x)

    @classmethod
    def from_vector(cls, v) -> 'CircleP3':
        return cls(float(v[0]), float(v[1]), float(v[2]), float(v[3]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.k, self.a, self.b, self.h])

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def normalized(self) -> 'CircleP3':
        v = self.vector / self.norm()
        for x in v:
            if abs(x) > 1e-15:
                if x < 0:
                    v = -v
                break
        return CircleP3.from_vector(v)

    def quadratic(self) -> float:
        """Q(c) = a^2 + b^2 - 4kh on this representative."""
        return self.a ** 2 + self.b ** 2 - 4.0 * self.k * self.h

    def quadric_value(self, z: ComplexPoint) -> float:
        """Value of the quadric at z; at infinity this is k (chart 1/z)."""
        if z.infinite:
            return self.k
        x, y = z.value.real, z.value.imag
        return self.k * (x * x + y * y) + self.a * x + self.b * y + self.h

    def kind(self, eps: Optional[float] = None) -> CircleKind:
        eps = resolve_eps(eps)
        n = self.normalized()
        if abs(n.k) <= eps and math.hypot(n.a, n.b) > eps:
            return CircleKind.LINE
        q = n.quadratic()
        if abs(q) <= eps:
            return CircleKind.POINT_CIRCLE
        if q < 0:
            return CircleKind.IMAGINARY
        return CircleKind.REAL_CIRCLE

    def is_proportional(self, other: 'CircleP3', eps: Optional[float] = None) -> bool:
        eps = resolve_eps(eps)
        u = self.vector / self.norm()
        v = other.vector / other.norm()
        return bool(min(np.linalg.norm(u - v), np.linalg.norm(u + v)) <= eps)

    def scaled(self, s: float) -> 'CircleP3':
        return CircleP3.from_vector(s * self.vector)

    def to_json(self) -> List[float]:
        n = self.normalized()
        return [n.k, n.a, n.b, n.h]

    @classmethod
    def from_json(cls, data) -> 'CircleP3':
        if not isinstance(data, (list, tuple)) or len(data) != 4:
            raise GeometryError(f"Circle must be [k, a, b, h], got {data!r}")
        return cls(*[float(x) for x in data])

    def __str__(self) -> str:
        n = self.normalized()
        return f"[{n.k:.6g}:{n.a:.6g}:{n.b:.6g}:{n.h:.6g}]"


POINT_AT_INFINITY = CircleP3(0.0, 0.0, 0.0, 1.0)


def from_center_radius(center: ComplexPoint, radius: float) -> CircleP3:
    """
    Circle with the given center and radius.

    Returns:
        [1 : -2Re(center) : -2Im(center) : |center|^2 - radius^2]

    Raises:
        InfiniteCenter: If center is the point at infinity
    """
    if center.infinite:
        raise InfiniteCenter("A circle center must be finite")
    if not radius > 0:
        raise GeometryError(f"Radius must be positive, got {radius}")
    z = center.value
    return CircleP3(1.0, -2.0 * z.real, -2.0 * z.imag, abs(z) ** 2 - radius ** 2)


def point_circle(p: ComplexPoint) -> CircleP3:
    """The null vector representing a single point."""
    if p.infinite:
        return POINT_AT_INFINITY
    z = p.value
    return CircleP3(1.0, -2.0 * z.real, -2.0 * z.imag, abs(z) ** 2)


def point_of(c: CircleP3) -> ComplexPoint:
    """The point carried by a point-circle."""
    n = c.normalized()
    if abs(n.k) <= 1e-15:
        return INFINITY
    return ComplexPoint.finite(complex(-n.a / (2 * n.k), -n.b / (2 * n.k)))


def _require_circle(c: CircleP3, eps: float) -> None:
    if abs(c.k) <= eps * c.norm():
        raise IsLine(f"{c} is a line")


def rad2(c: CircleP3, eps: Optional[float] = None) -> float:
    """Squared radius (a^2 + b^2 - 4kh) / 4k^2."""
    eps = resolve_eps(eps)
    _require_circle(c, eps)
    return c.quadratic() / (4.0 * c.k ** 2)


def center(c: CircleP3, eps: Optional[float] = None) -> ComplexPoint:
    """Center (-a/2k, -b/2k)."""
    eps = resolve_eps(eps)
    _require_circle(c, eps)
    return ComplexPoint.finite(complex(-c.a / (2 * c.k), -c.b / (2 * c.k)))


def minkowski(c1: CircleP3, c2: CircleP3) -> float:
    """Polarization of Q on the given representatives."""
    return c1.a * c2.a + c1.b * c2.b - 2.0 * (c1.k * c2.h + c2.k * c1.h)


def angle_ratio(c1: CircleP3, c2: CircleP3, eps: Optional[float] = None) -> float:
    """
    <c1,c2> / sqrt(Q(c1) Q(c2)) on normalized representatives.

    Raises:
        DegenerateCircle: If either Q <= eps
    """
    eps = resolve_eps(eps)
    n1, n2 = c1.normalized(), c2.normalized()
    q1, q2 = n1.quadratic(), n2.quadratic()
    if q1 <= eps or q2 <= eps:
        raise DegenerateCircle("Angles need circles with Q > 0")
    return minkowski(n1, n2) / math.sqrt(q1 * q2)


def angle_between(c1: CircleP3, c2: CircleP3, eps: Optional[float] = None) -> Optional[float]:
    """
    Angle between two circles in radians.

    Returns:
        The angle, or None when the circles do not meet (NoRealAngle)

    Raises:
        DegenerateCircle: If either Q <= eps
    """
    eps = resolve_eps(eps)
    ratio = angle_ratio(c1, c2, eps)
    if abs(ratio) > 1.0 + eps:
        return None
    return math.acos(max(-1.0, min(1.0, ratio)))


def _row(p: ComplexPoint) -> List[float]:
    if p.infinite:
        return [1.0, 0.0, 0.0, 0.0]
    x, y = p.value.real, p.value.imag
    return [x * x + y * y, x, y, 1.0]


def circle_through_points(
    p1: ComplexPoint,
    p2: ComplexPoint,
    p3: ComplexPoint,
    eps: Optional[float] = None
) -> CircleP3:
    """
    The circle through three points, by Cramer's rule on the rows
    [x^2+y^2, x, y, 1]. A point at infinity or three collinear points
    give a line.

    Raises:
        CoincidentPoints: If two of the points agree within eps
    """
    eps = resolve_eps(eps)
    points = [p1, p2, p3]
    for i in range(3):
        for j in range(i + 1, 3):
            if points[i].is_close(points[j], eps):
                raise CoincidentPoints(f"Points {i + 1} and {j + 1} coincide: {points[i]}")
    m = np.array([_row(p) for p in points])
    coeffs = np.array([
        (-1) ** i * np.linalg.det(np.delete(m, i, axis=1))
        for i in range(4)
    ])
    if np.linalg.norm(coeffs) == 0.0:
        raise CoincidentPoints("Points do not determine a circle")
    return CircleP3.from_vector(coeffs).normalized()


def hermitian_apply(g: MobiusMap, c: CircleP3) -> CircleP3:
    """
    Exact image of c under g through the Hermitian form
    H = [[k, w], [conj(w), h]], w = (a + ib)/2, transformed as
    H' = (g^-1)* H g^-1.

    The result is scaled to unit norm but keeps its sign, so the disc
    {quadric < 0} of c is carried onto the disc {quadric < 0} of the image.
    """
    w = complex(c.a, c.b) / 2.0
    hm = np.array([[c.k, w], [w.conjugate(), c.h]], dtype=complex)
    gi = inverse(g).matrix
    image = gi.conj().T @ hm @ gi
    w2 = image[0, 1]
    v = np.array([image[0, 0].real, 2.0 * w2.real, 2.0 * w2.imag, image[1, 1].real])
    return CircleP3.from_vector(v / np.linalg.norm(v))


def transport_disc(g: MobiusMap, disc: CircleP3) -> CircleP3:
    """Image of the oriented disc {quadric < 0} of `disc` under g."""
    return hermitian_apply(g, disc)


def _line_frame(c: CircleP3) -> Tuple[complex, complex]:
    # Closest point to the origin and a unit direction along the line.
    n = c.normalized()
    normal = complex(n.a, n.b)
    foot = -n.h * normal / abs(normal) ** 2
    return foot, 1j * normal / abs(normal)


def _samples(c: CircleP3, kind: CircleKind, fallback: bool) -> List[ComplexPoint]:
    if kind is CircleKind.LINE:
        foot, direction = _line_frame(c)
        if fallback:
            return [ComplexPoint.finite(foot), ComplexPoint.finite(foot + 2 * direction), INFINITY]
        return [ComplexPoint.finite(foot - direction), ComplexPoint.finite(foot + direction), INFINITY]
    cz = center(c).value
    r = math.sqrt(rad2(c))
    degrees = (30.0, 150.0, 270.0) if fallback else (0.0, 120.0, 240.0)
    return [ComplexPoint.finite(cz + r * np.exp(1j * math.radians(t))) for t in degrees]


def mobius_apply(g: MobiusMap, c: CircleP3, eps: Optional[float] = None) -> CircleP3:
    """
    Image of a circle under g.

    Real circles and lines are mapped by sampling three points and refitting
    with circle_through_points; point-circles map through apply_point and
    imaginary circles through the Hermitian action.
    """
    eps = resolve_eps(eps)
    kind = c.kind(eps)
    if kind is CircleKind.POINT_CIRCLE:
        return point_circle(apply_point(g, point_of(c)))
    if kind is CircleKind.IMAGINARY:
        return hermitian_apply(g, c).normalized()
    for fallback in (False, True):
        images = [apply_point(g, p) for p in _samples(c, kind, fallback)]
        try:
            return circle_through_points(*images, eps=eps)
        except CoincidentPoints:
            continue
    return hermitian_apply(g, c).normalized()


# ---------------------------------------------------------------------------
# Pencils
# ---------------------------------------------------------------------------

def _projector_residual(x: CircleP3, basis: np.ndarray) -> float:
    v = x.vector / x.norm()
    proj = basis @ np.linalg.solve(basis.T @ basis, basis.T)
    return float(np.linalg.norm((proj - np.eye(4)) @ v))


@dataclass(frozen=True)
class Pencil:
    """
    A projective line of circles spanned by p and q, with an optional frame
    (f0, finf, f1) assigning coordinates 0, inf and 1.
    """
    p: CircleP3
    q: CircleP3
    frame: Optional[Tuple[CircleP3, CircleP3, CircleP3]] = None
    _chart: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        eps = resolve_eps()
        u = self.p.vector / self.p.norm()
        v = self.q.vector / self.q.norm()
        if np.linalg.matrix_rank(np.column_stack([u, v]), tol=eps) < 2:
            raise GeometryError(f"Pencil generators {self.p} and {self.q} are proportional")
        if self.frame is not None:
            if len(self.frame) != 3:
                raise GeometryError("A pencil frame needs exactly three circles")
            for f in self.frame:
                if _projector_residual(f, self.basis) > max(eps, 1e-8):
                    raise GeometryError(f"Frame circle {f} is not on the pencil")
            object.__setattr__(self, '_chart', _frame_chart(self.frame))

    @property
    def basis(self) -> np.ndarray:
        return np.column_stack([
            self.p.vector / self.p.norm(),
            self.q.vector / self.q.norm(),
        ])

    def to_json(self) -> dict:
        data = {"p": self.p.to_json(), "q": self.q.to_json()}
        if self.frame is not None:
            data["frame"] = [f.to_json() for f in self.frame]
        return data

    @classmethod
    def from_json(cls, data: dict) -> 'Pencil':
        frame = data.get("frame")
        return cls(
            CircleP3.from_json(data["p"]),
            CircleP3.from_json(data["q"]),
            tuple(CircleP3.from_json(f) for f in frame) if frame else None,
        )


def _frame_chart(frame: Tuple[CircleP3, CircleP3, CircleP3]) -> Tuple[np.ndarray, np.ndarray]:
    # Rescale f0 and finf so that f0 + finf is proportional to f1.
    f0, finf, f1 = (f.vector for f in frame)
    coeffs, *_ = np.linalg.lstsq(np.column_stack([f0, finf]), f1, rcond=None)
    if abs(coeffs[0]) == 0.0 or abs(coeffs[1]) == 0.0:
        raise GeometryError("Frame circles are not in general position")
    return coeffs[0] * f0, coeffs[1] * finf


def on_line(x: CircleP3, pencil: Pencil, eps: Optional[float] = None) -> bool:
    """True iff x lies in the span of the pencil (projector residual <= eps*|x|)."""
    eps = resolve_eps(eps)
    return _projector_residual(x, pencil.basis) <= eps


def same_span(p1: Pencil, p2: Pencil, eps: Optional[float] = None) -> bool:
    return on_line(p2.p, p1, eps) and on_line(p2.q, p1, eps)


def pencil_coordinate(pencil: Pencil, c: CircleP3, eps: Optional[float] = None) -> float:
    """
    Frame coordinate x = nu/mu of c = mu*F0 + nu*Finf (math.inf at Finf).

    Raises:
        NoFrame: If the pencil has no frame
        GeometryError: If c is not on the pencil
    """
    eps = resolve_eps(eps)
    if pencil.frame is None:
        raise NoFrame("Pencil has no frame")
    if _projector_residual(c, pencil.basis) > max(eps, 1e-8):
        raise GeometryError(f"{c} is not on the pencil")
    f0, finf = pencil._chart
    (mu, nu), *_ = np.linalg.lstsq(np.column_stack([f0, finf]), c.vector, rcond=None)
    if abs(mu) <= 1e-14 * abs(nu):
        return math.inf
    return float(nu / mu)


def circle_at(pencil: Pencil, x: float) -> CircleP3:
    """Circle with frame coordinate x."""
    if pencil.frame is None:
        raise NoFrame("Pencil has no frame")
    f0, finf = pencil._chart
    if math.isinf(x):
        return CircleP3.from_vector(finf)
    return CircleP3.from_vector(f0 + x * finf)


def pencil_circle_through(pencil: Pencil, z: ComplexPoint) -> CircleP3:
    """
    The circle of the pencil passing through z: s*p + t*q with
    s<p, z> + t<q, z> = 0 against the point-circle of z.

    Raises:
        DegenerateInput: If every circle of the pencil passes through z
    """
    pz = point_circle(z)
    sp, sq = minkowski(pencil.p, pz), minkowski(pencil.q, pz)
    if math.hypot(sp, sq) <= 1e-14 * pencil.p.norm() * pencil.q.norm() * pz.norm():
        raise DegenerateInput(f"Every circle of the pencil passes through {z}")
    return CircleP3.from_vector(sq * pencil.p.vector - sp * pencil.q.vector).normalized()


def pencils_meet(l1: Pencil, l2: Pencil, eps: Optional[float] = None) -> Optional[CircleP3]:
    """
    The circle common to two pencils, or None when the lines are skew.

    Raises:
        GeometryError: If the two pencils span the same line
    """
    eps = resolve_eps(eps)
    m = np.column_stack([l1.basis, -l2.basis])
    _, s, vt = np.linalg.svd(m)
    if s[2] <= eps * s[0]:
        raise GeometryError("The pencils span the same line")
    if s[3] > max(eps, 1e-8) * s[0]:
        return None
    coeffs = vt[3]
    return CircleP3.from_vector(l1.basis @ coeffs[:2]).normalized()


def pencil_quadratic(pencil: Pencil) -> Tuple[float, float, float]:
    """
    Coefficients (A, B, C) of Q(s*p + t*q) = A s^2 + 2B st + C t^2 on the
    normalized spanning circles.
    """
    p, q = pencil.p.normalized(), pencil.q.normalized()
    return p.quadratic(), minkowski(p, q), q.quadratic()


def count_point_circles(pencil: Pencil, eps: Optional[float] = None) -> int:
    """
    Number of point-circles on the pencil: real roots of Q restricted to
    the line, with discriminant tolerance eps.
    """
    eps = resolve_eps(eps)
    qa, qb, qc = pencil_quadratic(pencil)
    disc = qb * qb - qa * qc
    if disc > eps:
        return 2
    if disc >= -eps:
        return 1
    return 0


def _line_through(m: complex, normal: complex) -> CircleP3:
    """The line through m with unit normal `normal`."""
    return CircleP3(0.0, normal.real, normal.imag, -(normal.real * m.real + normal.imag * m.imag))


def _pencil_fixing_infinity(g: MobiusMap, kind: TransformKind, fixed: FixedPointPair) -> Pencil:
    if kind is TransformKind.PARABOLIC:
        # z -> z + t keeps the lines perpendicular to t
        t = g.b / g.d
        n = t / abs(t)
        own, other = _line_through(-t / 2, n), _line_through(t / 2, n)
        return Pencil(own, other, (own, POINT_AT_INFINITY, other))
    finite = fixed.repelling if fixed.attracting.infinite else fixed.attracting
    ends = (point_circle(fixed.repelling), point_circle(fixed.attracting))
    return Pencil(ends[0], ends[1], (ends[0], ends[1], from_center_radius(finite, 1.0)))


def pencil_of(g: MobiusMap, eps: Optional[float] = None) -> Pencil:
    """
    The pencil of g.

    Loxodromic and parabolic maps get the span of the isometric circles of
    g and g^-1. Loxodromic frame: repelling point -> 0, attracting point ->
    inf, isometric circle of g -> 1. Parabolic frame: isometric circle of g
    -> 0, fixed point -> inf, isometric circle of g^-1 -> 1. Elliptic maps
    get the circles through both fixed points, without a frame.

    When the multiplier of a loxodromic g is not real, the isometric span
    misses the fixed points; the pencil is then spanned by the two fixed
    point-circles and the unit circle is the projection of I(g) onto it.

    Maps fixing infinity have no isometric circles. A translation z -> z + t
    gets the lines perpendicular to t, framed by the lines through -t/2 (0)
    and t/2 (1) with infinity at inf. A loxodromic map fixing infinity gets
    the circles about its finite fixed point, the radius 1 circle at 1.

    Raises:
        IdentityMap: If g is +-I
    """
    eps = resolve_eps(eps)
    kind = classify(g, eps).tag
    if kind is TransformKind.IDENTITY:
        raise IdentityMap("The identity has no pencil")
    fixed = fixed_points(g, eps)
    if kind is TransformKind.ELLIPTIC:
        rows = np.array([
            GRAM @ point_circle(fixed.attracting).vector,
            GRAM @ point_circle(fixed.repelling).vector,
        ])
        _, _, vt = np.linalg.svd(rows)
        return Pencil(CircleP3.from_vector(vt[2]), CircleP3.from_vector(vt[3]))
    if abs(g.c) <= eps:
        return _pencil_fixing_infinity(g, kind, fixed)
    own = from_center_radius(*isometric_circle(g, eps))
    other = from_center_radius(*isometric_circle(inverse(g), eps))
    if kind is TransformKind.PARABOLIC:
        return Pencil(own, other, (own, point_circle(fixed.attracting), other))
    ends = (point_circle(fixed.repelling), point_circle(fixed.attracting))
    span = Pencil(own, other).basis
    if all(_projector_residual(f, span) <= max(eps, 1e-8) for f in ends):
        return Pencil(own, other, (ends[0], ends[1], own))
    # non-real multiplier: g keeps the pencil through its fixed points, and
    # the isometric circle projected onto it serves as the unit circle
    basis = Pencil(*ends).basis
    v = own.vector / own.norm()
    unit = CircleP3.from_vector(basis @ np.linalg.solve(basis.T @ basis, basis.T @ v))
    return Pencil(ends[0], ends[1], (ends[0], ends[1], unit))


def pencil_multiplier(g: MobiusMap, pencil: Pencil, eps: Optional[float] = None) -> float:
    """Coordinate of g(f1), the loxodromic scaling factor on the pencil."""
    return pencil_coordinate(pencil, mobius_apply(g, pencil.frame[2], eps), eps)


def pencil_action(
    g: MobiusMap,
    x: float,
    pencil: Optional[Pencil] = None,
    eps: Optional[float] = None
) -> float:
    """
    Action of g on frame coordinates of its pencil: x -> lambda*x for
    loxodromic g, x -> x + 1 for parabolic g.

    Raises:
        EllipticUnsupported: If g is elliptic
        NoFrame: If the pencil has no frame
    """
    eps = resolve_eps(eps)
    kind = classify(g, eps).tag
    if kind is TransformKind.ELLIPTIC:
        raise EllipticUnsupported("Elliptic maps have no framed pencil action")
    if pencil is None:
        pencil = pencil_of(g, eps)
    if pencil.frame is None:
        raise NoFrame("Pencil has no frame")
    if kind is TransformKind.PARABOLIC:
        return x + 1.0
    if x == 0.0 or math.isinf(x):
        return x
    return pencil_multiplier(g, pencil, eps) * x


# ---------------------------------------------------------------------------
# Intersections
# ---------------------------------------------------------------------------

def _sort_points(points: List[ComplexPoint]) -> List[ComplexPoint]:
    return sorted(points, key=lambda p: (p.infinite, p.value.real, p.value.imag))


def _line_circle(line: Tuple[float, float, float], cz: complex, r: float, eps: float) -> List[ComplexPoint]:
    a, b, h = line
    norm = math.hypot(a, b)
    normal = complex(a, b) / norm
    dist = (a * cz.real + b * cz.imag + h) / norm
    foot = cz - dist * normal
    disc = r * r - dist * dist
    if disc > eps * max(1.0, r * r):
        offset = math.sqrt(disc) * 1j * normal
        return [ComplexPoint.finite(foot + offset), ComplexPoint.finite(foot - offset)]
    if disc >= -eps * max(1.0, r * r):
        return [ComplexPoint.finite(foot)]
    return []


def circle_circle_intersection(
    c1: CircleP3,
    c2: CircleP3,
    eps: Optional[float] = None
) -> List[ComplexPoint]:
    """
    Common points of two real circles or lines, sorted. Tangency gives one
    point; two lines always meet at infinity.

    Raises:
        DegenerateInput: If either input is a point-circle or imaginary
        CoincidentCircles: If the coordinates are proportional
    """
    eps = resolve_eps(eps)
    kinds = (c1.kind(eps), c2.kind(eps))
    for kind in kinds:
        if kind not in (CircleKind.REAL_CIRCLE, CircleKind.LINE):
            raise DegenerateInput(f"Intersections need real circles or lines, got {kind.value}")
    if c1.is_proportional(c2, eps):
        raise CoincidentCircles(f"{c1} and {c2} coincide")
    n1, n2 = c1.normalized(), c2.normalized()
    if kinds == (CircleKind.LINE, CircleKind.LINE):
        det = n1.a * n2.b - n2.a * n1.b
        if abs(det) <= eps:
            return [INFINITY]
        x = (-n1.h * n2.b + n2.h * n1.b) / det
        y = (-n1.a * n2.h + n2.a * n1.h) / det
        return [ComplexPoint.finite(complex(x, y)), INFINITY]
    if kinds[0] is CircleKind.LINE:
        n1, n2 = n2, n1
    cz = center(n1).value
    r = math.sqrt(rad2(n1))
    if n2.kind(eps) is CircleKind.LINE:
        return _sort_points(_line_circle((n2.a, n2.b, n2.h), cz, r, eps))
    radical = (n1.a / n1.k - n2.a / n2.k, n1.b / n1.k - n2.b / n2.k, n1.h / n1.k - n2.h / n2.k)
    if math.hypot(radical[0], radical[1]) <= eps * max(1.0, abs(cz)):
        return []
    return _sort_points(_line_circle(radical, cz, r, eps))


def sample_circle(c: CircleP3, count: int, span: float = 10.0) -> List[complex]:
    """
    Finite sample points on a real circle, or on a line within `span` of its
    closest point to the origin.
    """
    if c.kind() is CircleKind.LINE:
        foot, direction = _line_frame(c)
        return [foot + direction * s for s in np.linspace(-span, span, count)]
    cz = center(c).value
    r = math.sqrt(rad2(c))
    return [cz + r * np.exp(2j * math.pi * j / count) for j in range(count)]


def inside_disc(c: CircleP3, z: ComplexPoint) -> bool:
    """True iff z lies in the open disc {quadric < 0} of c as given."""
    return c.quadric_value(z) / c.norm() < 0


def residual_under(g: MobiusMap, c: CircleP3, eps: Optional[float] = None) -> float:
    """Distance between normalized c and its image under g, modulo sign."""
    image = mobius_apply(g, c, eps)
    u = c.vector / c.norm()
    v = image.vector / image.norm()
    return float(min(np.linalg.norm(u - v), np.linalg.norm(u + v)))

