"""
Polygon Service
Formal curvilinear polygons with side pairings: admissibility, the
minimally bounded hexagon predicate, boundary assembly from an arrangement
of marked circles, polygon intersection and vertex-cycle angle sums.

Arcs of circles and lines share one angular parameter: arg(z - center) on a
circle, 2*atan(s) on a line with s the signed distance along it from its
foot point, so the point at infinity of a line sits at parameter pi.
Assembled boundaries are oriented with their region on the left.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import resolve_eps
from services.chain_service import Relation, disc_relation
from utils.circlespace import (
    CircleKind,
    CircleP3,
    Pencil,
    center,
    circle_circle_intersection,
    circle_through_points,
    count_point_circles,
    minkowski,
    mobius_apply,
    on_line,
    pencil_of,
    pencils_meet,
    rad2,
    same_span,
    transport_disc,
)
from utils.errors import (
    AmbiguousRegion,
    CoincidentCircles,
    DisconnectedArrangement,
    GeometryError,
    KleinianError,
)
from utils.mobius import (
    INFINITY,
    ComplexPoint,
    MobiusMap,
    TransformKind,
    apply_point,
    classify,
    conjugate,
    inverse,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
LEFT_OFFSET = 1e-6  # relative offset of sample points off an arc
MATCH_TOLERANCE = 1e-7  # endpoint matching when chaining arcs


# ---------------------------------------------------------------------------
# Arc geometry
# ---------------------------------------------------------------------------

def _is_line(c: CircleP3) -> bool:
    return c.kind() is CircleKind.LINE


def _line_frame(c: CircleP3) -> Tuple[complex, complex]:
    # foot point closest to the origin and unit direction
    n = c.normalized()
    normal = complex(n.a, n.b)
    foot = -n.h * normal / abs(normal) ** 2
    return foot, 1j * normal / abs(normal)


def parameter_of(c: CircleP3, z: ComplexPoint) -> float:
    """Angular parameter of a point of the support, in [0, 2pi)."""
    if _is_line(c):
        if z.infinite:
            return math.pi
        foot, direction = _line_frame(c)
        s = ((z.value - foot) * direction.conjugate()).real
        return (2.0 * math.atan(s)) % TWO_PI
    if z.infinite:
        raise GeometryError(f"The point at infinity is not on the circle {c}")
    return cmath.phase(z.value - center(c).value) % TWO_PI


def point_at(c: CircleP3, theta: float) -> ComplexPoint:
    """Point of the support at an angular parameter."""
    if _is_line(c):
        half = (theta % TWO_PI) / 2.0
        if abs(half - math.pi / 2) <= 1e-15:
            return INFINITY
        foot, direction = _line_frame(c)
        return ComplexPoint.finite(foot + direction * math.tan(half))
    r = math.sqrt(rad2(c))
    return ComplexPoint.finite(center(c).value + r * cmath.exp(1j * theta))


@dataclass(frozen=True)
class Arc:
    """
    An arc of a circle or line.

    Attributes:
        support: The supporting circle
        start: Starting point on the support
        end: Ending point on the support
        ccw: True to run with increasing parameter from start to end,
            False with decreasing parameter; selects which of the two arcs
            between the endpoints is meant
        full: The whole support, traversed from start back to start
    """
    support: CircleP3
    start: ComplexPoint
    end: ComplexPoint
    ccw: bool = True
    full: bool = False

    def __post_init__(self):
        tol = max(resolve_eps(), 1e-8)
        for p in (self.start, self.end):
            if p.infinite:
                if not _is_line(self.support):
                    raise GeometryError(f"Arc endpoint {p} is not on {self.support}")
                continue
            scale = self.support.norm() * (1.0 + abs(p.value) ** 2)
            if abs(self.support.quadric_value(p)) > tol * scale:
                raise GeometryError(f"Arc endpoint {p} is not on {self.support}")

    @property
    def start_parameter(self) -> float:
        return parameter_of(self.support, self.start)

    @property
    def span(self) -> float:
        """Angular length in parameter space."""
        if self.full:
            return TWO_PI
        s, e = self.start_parameter, parameter_of(self.support, self.end)
        span = (e - s) % TWO_PI if self.ccw else (s - e) % TWO_PI
        return span if span > 0 else TWO_PI

    def offset_of(self, theta: float) -> float:
        """Parameter distance from the start along the travel direction."""
        if self.ccw:
            return (theta - self.start_parameter) % TWO_PI
        return (self.start_parameter - theta) % TWO_PI

    def parameter_at(self, fraction: float) -> float:
        step = fraction * self.span
        return self.start_parameter + (step if self.ccw else -step)

    def point(self, fraction: float) -> ComplexPoint:
        return point_at(self.support, self.parameter_at(fraction))

    @property
    def midpoint(self) -> ComplexPoint:
        return self.point(0.5)

    def contains(self, z: ComplexPoint, tol: float = 1e-9) -> bool:
        """True iff z (on the support) lies on the closed arc."""
        if self.full:
            return True
        offset = self.offset_of(parameter_of(self.support, z))
        return offset <= self.span + tol or offset >= TWO_PI - tol

    def interior_contains(self, z: ComplexPoint, tol: float = 1e-9) -> bool:
        """True iff z (on the support) lies on the arc away from its endpoints."""
        if self.full:
            return True
        offset = self.offset_of(parameter_of(self.support, z))
        return tol < offset < self.span - tol

    def reversed(self) -> 'Arc':
        return Arc(self.support, self.end, self.start, not self.ccw, self.full)

    def direction_at(self, fraction: float) -> complex:
        """Unit travel direction at a finite point of the arc."""
        sign = 1.0 if self.ccw else -1.0
        if _is_line(self.support):
            return sign * _line_frame(self.support)[1]
        return sign * 1j * cmath.exp(1j * self.parameter_at(fraction))

    def tangent(self, at_end: bool) -> complex:
        """
        Unit travel direction at the start or the end. At the point at
        infinity the direction is read in the chart w = 1/z.
        """
        p = self.end if at_end else self.start
        travel = self.direction_at(1.0 if at_end else 0.0)
        if p.infinite:
            return -travel.conjugate()
        return travel

    def left_point(self, fraction: float, offset: float = LEFT_OFFSET) -> Optional[complex]:
        """A point just left of the arc, or None at the point at infinity."""
        z = self.point(fraction)
        if z.infinite:
            return None
        scale = max(1.0, abs(z.value)) if _is_line(self.support) else math.sqrt(rad2(self.support))
        return z.value + offset * scale * 1j * self.direction_at(fraction)

    def sample(self, count: int) -> List[ComplexPoint]:
        """count points along the arc, endpoints included."""
        if count < 2:
            return [self.start]
        return [self.point(i / (count - 1)) for i in range(count)]

    def to_json(self) -> dict:
        return {
            "support": self.support.to_json(),
            "endpoints": [self.start.to_json(), self.end.to_json()],
            "side": 1 if self.ccw else -1,
            "full": self.full,
        }

    @classmethod
    def from_json(cls, data: dict) -> 'Arc':
        try:
            start, end = data["endpoints"]
            return cls(
                CircleP3.from_json(data["support"]),
                ComplexPoint.from_json(start),
                ComplexPoint.from_json(end),
                data.get("side", 1) >= 0,
                bool(data.get("full", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise GeometryError(f"Malformed arc: {e}") from e


def full_circle(c: CircleP3, inside: bool = True) -> Arc:
    """The whole circle, keeping its finite disc (inside=True) or its outside on the left."""
    start = point_at(c, 0.0)
    return Arc(c, start, start, ccw=inside, full=True)


def segment(p: complex, q: complex) -> Arc:
    """The straight segment from p to q."""
    a, b = ComplexPoint.finite(p), ComplexPoint.finite(q)
    support = circle_through_points(a, b, INFINITY)
    foot, direction = _line_frame(support)
    s_p = ((p - foot) * direction.conjugate()).real
    s_q = ((q - foot) * direction.conjugate()).real
    return Arc(support, a, b, ccw=s_q > s_p)


def polygon_from_points(points: List[complex]) -> List[Arc]:
    """Closed polyline through the points; counterclockwise order keeps the interior on the left."""
    n = len(points)
    if n < 3:
        raise GeometryError("A polygon needs at least three points")
    return [segment(points[i], points[(i + 1) % n]) for i in range(n)]


def transport_arc(h: MobiusMap, arc: Arc) -> Arc:
    """Image of an arc under h; the region on its left is carried along."""
    support = mobius_apply(h, arc.support)
    start, end = apply_point(h, arc.start), apply_point(h, arc.end)
    first, second = apply_point(h, arc.point(1 / 3)), apply_point(h, arc.point(2 / 3))
    candidate = Arc(support, start, end, True, arc.full)
    ccw = candidate.offset_of(parameter_of(support, first)) < candidate.offset_of(parameter_of(support, second))
    return Arc(support, start, end, ccw, arc.full)


# ---------------------------------------------------------------------------
# Polygons
# ---------------------------------------------------------------------------

@dataclass
class PairingEntry:
    """
    One side pairing: phi maps F1 onto F2, both on the pencil L.

    Attributes:
        pencil: L, expected to span Pen(phi)
        f1: Source circle
        f2: Target circle
        phi: The pairing map
        word: Optional word label of phi
        sides: Optional (s1, s2); +1 keeps the outside {quadric >= 0} of the
            given representative, -1 keeps its disc. Defaults to (+1, +1)
    """
    pencil: Pencil
    f1: CircleP3
    f2: CircleP3
    phi: MobiusMap
    word: str = ""
    sides: Optional[Tuple[int, int]] = None

    def to_json(self) -> dict:
        data = {
            "pencil": self.pencil.to_json(),
            "F1": [float(x) for x in self.f1.vector],
            "F2": [float(x) for x in self.f2.vector],
            "phi": self.phi.to_json(),
            "word": self.word,
        }
        if self.sides is not None:
            data["sides"] = list(self.sides)
        return data

    @classmethod
    def from_json(cls, data: dict) -> 'PairingEntry':
        try:
            sides = data.get("sides")
            return cls(
                Pencil.from_json(data["pencil"]),
                CircleP3.from_json(data["F1"]),
                CircleP3.from_json(data["F2"]),
                MobiusMap.from_json(data["phi"]),
                data.get("word", ""),
                tuple(int(s) for s in sides) if sides is not None else None,
            )
        except (KeyError, TypeError) as e:
            raise GeometryError(f"Malformed pairing entry: {e}") from e


@dataclass
class Vertex:
    point: ComplexPoint
    incoming: int
    outgoing: int
    angle: float


@dataclass
class SidePairedPolygon:
    """
    Pairing entries plus the assembled boundary. `loops` holds the
    (first, last + 1) arc index ranges of the boundary's closed loops.
    `cuts` are extra circles without a pairing that clip the region to
    their kept side {quadric >= 0}.
    """
    entries: List[PairingEntry]
    assembled_boundary: List[Arc] = field(default_factory=list)
    vertices: List[Vertex] = field(default_factory=list)
    loops: List[Tuple[int, int]] = field(default_factory=list)
    cuts: List[CircleP3] = field(default_factory=list)

    def transported(self, h: MobiusMap) -> 'SidePairedPolygon':
        """The h-translate: circles moved by h, pairings conjugated by h."""
        entries = []
        for e in self.entries:
            frame = tuple(mobius_apply(h, f) for f in e.pencil.frame) if e.pencil.frame else None
            pencil = Pencil(mobius_apply(h, e.pencil.p), mobius_apply(h, e.pencil.q), frame)
            entries.append(PairingEntry(
                pencil, transport_disc(h, e.f1), transport_disc(h, e.f2),
                conjugate(h, e.phi), e.word, e.sides,
            ))
        return SidePairedPolygon(entries, cuts=[transport_disc(h, c) for c in self.cuts])

    def loop_arcs(self) -> List[List[Arc]]:
        return [self.assembled_boundary[a:b] for a, b in self.loops]

    def to_json(self) -> dict:
        return {
            "entries": [e.to_json() for e in self.entries],
            "boundary": [a.to_json() for a in self.assembled_boundary],
            "loops": [list(r) for r in self.loops],
            "cuts": [[float(x) for x in c.vector] for c in self.cuts],
            "vertices": [
                {"point": v.point.to_json(), "in": v.incoming, "out": v.outgoing, "angle": v.angle}
                for v in self.vertices
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> 'SidePairedPolygon':
        return cls(
            [PairingEntry.from_json(e) for e in data.get("entries", [])],
            [Arc.from_json(a) for a in data.get("boundary", [])],
            loops=[tuple(r) for r in data.get("loops", [])],
            cuts=[CircleP3.from_json(c) for c in data.get("cuts", [])],
        )


@dataclass
class EntryCheck:
    index: int
    real_circles: bool
    on_pencil: bool
    pencil_matches: bool
    maps_f1_to_f2: bool

    @property
    def passed(self) -> bool:
        return self.real_circles and self.on_pencil and self.pencil_matches and self.maps_f1_to_f2


@dataclass
class AdmissibilityReport:
    checks: List[EntryCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def check_admissible(p: SidePairedPolygon, eps: Optional[float] = None) -> AdmissibilityReport:
    """Per entry: Q(F1), Q(F2) > 0; both on L; L spans Pen(phi); phi(F1) = F2."""
    eps = resolve_eps(eps)
    tol = max(eps, 1e-8)
    checks = []
    for i, e in enumerate(p.entries):
        real = all(c.normalized().quadratic() > eps for c in (e.f1, e.f2))
        on_pencil = on_line(e.f1, e.pencil, tol) and on_line(e.f2, e.pencil, tol)
        try:
            matches = same_span(e.pencil, pencil_of(e.phi, eps), tol)
        except KleinianError:
            matches = False
        try:
            maps = real and mobius_apply(e.phi, e.f1, eps).is_proportional(e.f2, tol)
        except KleinianError:
            maps = False
        checks.append(EntryCheck(i, real, on_pencil, matches, maps))
    return AdmissibilityReport(checks)


# ---------------------------------------------------------------------------
# Hexagons
# ---------------------------------------------------------------------------

@dataclass
class HexagonLines:
    """Six pencils l1..l6 in cyclic order and the circle sigma they stay orthogonal to."""
    lines: List[Pencil]
    sigma: CircleP3

    def __post_init__(self):
        if len(self.lines) != 6:
            raise GeometryError(f"A hexagon needs 6 lines, got {len(self.lines)}")


@dataclass
class HexagonReport:
    orthogonal: List[bool]
    paired: List[bool]
    even_point_circles: List[bool]
    odd_point_circles: List[bool]
    skew_hexagon: bool
    vertex_circles: List[Optional[CircleP3]]

    @property
    def passed(self) -> bool:
        return (all(self.orthogonal) and all(self.paired) and all(self.even_point_circles)
                and all(self.odd_point_circles) and self.skew_hexagon)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "orthogonal": self.orthogonal,
            "paired": self.paired,
            "even_point_circles": self.even_point_circles,
            "odd_point_circles": self.odd_point_circles,
            "skew_hexagon": self.skew_hexagon,
        }


def hexagon_lines(circles: List[CircleP3], sigma: CircleP3, pairings: List[MobiusMap]) -> HexagonLines:
    """
    Lines of a hexagon from its circles C1..C6 with C(2j) = f(2j)(C(2j-1)):
    odd lines join C6,C1 / C2,C3 / C4,C5; even lines are Pen(f2), Pen(f4), Pen(f6).
    """
    c1, c2, c3, c4, c5, c6 = circles
    f2, f4, f6 = pairings
    return HexagonLines([
        Pencil(c6, c1), pencil_of(f2), Pencil(c2, c3),
        pencil_of(f4), Pencil(c4, c5), pencil_of(f6),
    ], sigma)


NON_ADJACENT = [(i, j) for i in range(6) for j in range(i + 2, 6) if (i, j) != (0, 5)]


def check_minimally_bounded(
    h: HexagonLines,
    f2: MobiusMap,
    f4: MobiusMap,
    f6: MobiusMap,
    eps: Optional[float] = None
) -> HexagonReport:
    """
    Minimally bounded hexagon conditions:
    (1) every line is orthogonal to sigma;
    (2) f2(l1) = l3, f4(l3) = l5, f6(l5) = l1;
    (3) even lines carry two point-circles, one when the pairing is parabolic;
    (4) odd lines carry none.
    The skew-hexagon check asks that adjacent lines meet in distinct real
    circles and that no two non-adjacent lines meet in one of those.
    """
    eps = resolve_eps(eps)
    tol = max(eps, 1e-8)
    sigma = h.sigma.normalized()
    orthogonal = [
        all(abs(minkowski(c.normalized(), sigma)) <= tol for c in (line.p, line.q))
        for line in h.lines
    ]

    paired = []
    for g, i, j in ((f2, 0, 2), (f4, 2, 4), (f6, 4, 0)):
        try:
            image = Pencil(mobius_apply(g, h.lines[i].p, eps), mobius_apply(g, h.lines[i].q, eps))
            paired.append(same_span(image, h.lines[j], tol))
        except KleinianError:
            paired.append(False)

    even = []
    for g, idx in ((f2, 1), (f4, 3), (f6, 5)):
        expected = 1 if classify(g, eps).tag is TransformKind.PARABOLIC else 2
        even.append(count_point_circles(h.lines[idx], tol) == expected)
    odd = [count_point_circles(h.lines[idx], tol) == 0 for idx in (0, 2, 4)]

    skew = True
    vertices: List[Optional[CircleP3]] = []
    for i in range(6):
        try:
            meet = pencils_meet(h.lines[i], h.lines[(i + 1) % 6], tol)
        except GeometryError:
            meet = None
        if meet is None or meet.normalized().quadratic() <= tol:
            skew = False
        vertices.append(meet)
    found = [v for v in vertices if v is not None]
    for i in range(len(found)):
        for j in range(i + 1, len(found)):
            if found[i].is_proportional(found[j], 1e-6):
                skew = False
    for i, j in NON_ADJACENT:
        try:
            meet = pencils_meet(h.lines[i], h.lines[j], tol)
        except GeometryError:
            skew = False
            continue
        if meet is not None and any(meet.is_proportional(v, 1e-6) for v in found):
            skew = False
    return HexagonReport(orthogonal, paired, even, odd, skew, vertices)


# ---------------------------------------------------------------------------
# Boundary assembly
# ---------------------------------------------------------------------------

def _kept_value(c: CircleP3, z: ComplexPoint) -> float:
    """Quadric of c at z on a bounded scale; the kept side is >= 0."""
    if z.infinite:
        return c.k / c.norm()
    return c.quadric_value(z) / (c.norm() * (1.0 + abs(z.value) ** 2))


def _half_spaces(p: SidePairedPolygon, eps: float) -> List[CircleP3]:
    spaces: List[CircleP3] = []
    for i, e in enumerate(p.entries):
        sides = e.sides
        if sides is None:
            if e.f1.is_proportional(e.f2, eps):
                raise AmbiguousRegion(f"Entry {i} pairs a circle with itself; supply side flags")
            rel = disc_relation(e.f1, e.f2, oriented=True, eps=eps)
            if rel.relation in (Relation.INTERSECTING, Relation.NESTED):
                raise AmbiguousRegion(f"Entry {i}: F1 and F2 overlap ({rel}); supply side flags")
            sides = (1, 1)
        for c, s in zip((e.f1, e.f2), sides):
            kept = c.scaled(float(s))
            if not any(np.allclose(kept.vector / kept.norm(), x.vector / x.norm(), atol=eps) for x in spaces):
                spaces.append(kept)
    for c in p.cuts:
        if not any(np.allclose(c.vector / c.norm(), x.vector / x.norm(), atol=eps) for x in spaces):
            spaces.append(c)
    return spaces


def _in_region(spaces: List[CircleP3], z: ComplexPoint, skip: int, tol: float) -> bool:
    return all(_kept_value(c, z) >= -tol for i, c in enumerate(spaces) if i != skip)


def _split_parameters(spaces: List[CircleP3], i: int, eps: float) -> List[float]:
    c = spaces[i]
    params: List[float] = []
    for j, other in enumerate(spaces):
        if j == i:
            continue
        try:
            points = circle_circle_intersection(c, other, eps)
        except CoincidentCircles:
            continue
        for z in points:
            theta = parameter_of(c, z)
            if not any(min(abs(theta - t), TWO_PI - abs(theta - t)) <= 1e-9 for t in params):
                params.append(theta)
    return sorted(params)


def _orient_left(arc: Arc, kept: CircleP3) -> Arc:
    fraction = 0.5 if not arc.midpoint.infinite else 0.3
    near = arc.left_point(fraction)
    return arc if _kept_value(kept, ComplexPoint.finite(near)) > 0 else arc.reversed()


def _turn(incoming: Arc, outgoing: Arc) -> float:
    ratio = outgoing.tangent(at_end=False) / incoming.tangent(at_end=True)
    return math.atan2(ratio.imag, ratio.real)


def _vertex(arcs: List[Arc], incoming: int, outgoing: int) -> Vertex:
    # the region is an intersection of half-spaces, so interior angles lie in [0, pi]
    angle = min(math.pi, max(0.0, math.pi - abs(_turn(arcs[incoming], arcs[outgoing]))))
    return Vertex(arcs[incoming].end, incoming, outgoing, angle)


def _kept_pieces(spaces: List[CircleP3], eps: float) -> List[Arc]:
    pieces: List[Arc] = []
    for i, c in enumerate(spaces):
        params = _split_parameters(spaces, i, eps)
        if len(params) <= 1:
            theta = params[0] if params else 0.0
            start = point_at(c, theta)
            if _in_region(spaces, point_at(c, theta + math.pi), i, 1e-9):
                pieces.append(_orient_left(Arc(c, start, start, True, True), c))
            continue
        bounds = params + [params[0] + TWO_PI]
        for a, b in zip(bounds[:-1], bounds[1:]):
            inner = point_at(c, (a + b) / 2)
            if inner.infinite:
                inner = point_at(c, a + 0.3 * (b - a))
            if _in_region(spaces, inner, i, 1e-9):
                pieces.append(_orient_left(Arc(c, point_at(c, a), point_at(c, b), True), c))
    return pieces


def assemble_boundary(p: SidePairedPolygon, eps: Optional[float] = None) -> List[Arc]:
    """
    Boundary of the region kept by every marked circle: split each support
    at its intersections with the others, keep the pieces on the closure
    of the region, orient them with the region on the left and chain them
    into closed loops. Vertices with interior angles and the loop ranges
    are recorded on p.

    Returns:
        The arcs loop by loop; consecutive arcs of a loop share endpoints

    Raises:
        AmbiguousRegion: If an entry's own circles overlap and no side flags are given
        DisconnectedArrangement: If the region is empty or the kept arcs do not close up
    """
    eps = resolve_eps(eps)
    pieces = _kept_pieces(_half_spaces(p, eps), eps)
    if not pieces:
        raise DisconnectedArrangement("The marked circles leave an empty region")

    boundary: List[Arc] = []
    vertices: List[Vertex] = []
    loops: List[Tuple[int, int]] = []
    used = [False] * len(pieces)
    for first in range(len(pieces)):
        if used[first]:
            continue
        used[first] = True
        loop_start = len(boundary)
        boundary.append(pieces[first])
        while True:
            current = boundary[-1]
            candidates = [k for k in range(len(pieces))
                          if not used[k] and pieces[k].start.is_close(current.end, MATCH_TOLERANCE)]
            if not candidates:
                if not current.end.is_close(boundary[loop_start].start, MATCH_TOLERANCE):
                    raise DisconnectedArrangement(f"Boundary does not close at {current.end}")
                if not (current.full and len(boundary) == loop_start + 1):
                    vertices.append(_vertex(boundary, len(boundary) - 1, loop_start))
                break
            used[candidates[0]] = True
            boundary.append(pieces[candidates[0]])
            vertices.append(_vertex(boundary, len(boundary) - 2, len(boundary) - 1))
        loops.append((loop_start, len(boundary)))
    p.assembled_boundary = boundary
    p.vertices = vertices
    p.loops = loops
    logger.debug(f"[POLYGON] {len(boundary)} arcs in {len(loops)} loops, {len(vertices)} vertices")
    return boundary


# ---------------------------------------------------------------------------
# Intersection of polygons
# ---------------------------------------------------------------------------

def _arc_distance(arc: Arc, z: complex) -> float:
    if _is_line(arc.support):
        foot, direction = _line_frame(arc.support)
        nearest = foot + direction * ((z - foot) * direction.conjugate()).real
    else:
        cz = center(arc.support).value
        r = math.sqrt(rad2(arc.support))
        if z == cz:
            return r
        nearest = cz + r * (z - cz) / abs(z - cz)
    if arc.contains(ComplexPoint.finite(nearest), 0.0):
        return abs(nearest - z)
    ends = [q.value for q in (arc.start, arc.end) if not q.infinite]
    return min((abs(q - z) for q in ends), default=math.inf)


def _segment_crossings(arcs: List[Arc], a: complex, b: complex) -> Optional[int]:
    """Transversal crossings of the segment [a, b] with the arcs; None when degenerate."""
    chord = circle_through_points(ComplexPoint.finite(a), ComplexPoint.finite(b), INFINITY)
    count = 0
    for arc in arcs:
        try:
            points = [z for z in circle_circle_intersection(chord, arc.support) if not z.infinite]
        except CoincidentCircles:
            return None
        tangent = len(points) == 1 and not _is_line(arc.support)
        for z in points:
            t = ((z.value - a) / (b - a)).real
            if not 0.0 < t < 1.0 or not arc.contains(z):
                continue
            if tangent:
                return None
            if not arc.full:
                offset = arc.offset_of(parameter_of(arc.support, z))
                if min(offset, abs(arc.span - offset), TWO_PI - offset) <= 1e-9:
                    return None
            count += 1
    return count


def region_contains(arcs: List[Arc], z: complex, collar: float = 1e-9) -> bool:
    """
    Even-odd membership of z in the region left of an oriented boundary,
    counted along a segment from a reference point just left of an arc.
    Points within the collar of the boundary are not inside.
    """
    if any(_arc_distance(arc, z) <= collar * max(1.0, abs(z)) for arc in arcs):
        return False
    for arc in arcs:
        for fraction in (0.37, 0.61, 0.83):
            ref = arc.left_point(fraction, 1e-5)
            if ref is None:
                continue
            if any(_arc_distance(other, ref) < 5e-6 * max(1.0, abs(ref)) for other in arcs if other is not arc):
                continue
            crossings = _segment_crossings(arcs, ref, z)
            if crossings is not None:
                return crossings % 2 == 0
    raise DisconnectedArrangement("No reference point gives a clean segment for the even-odd test")


def boundaries_cross(pa: List[Arc], pb: List[Arc], eps: Optional[float] = None) -> bool:
    """True iff two arcs cross transversally away from both arcs' endpoints."""
    eps = resolve_eps(eps)
    for a in pa:
        for b in pb:
            try:
                points = circle_circle_intersection(a.support, b.support, eps)
            except CoincidentCircles:
                continue
            if len(points) < 2:
                continue
            if any(a.interior_contains(z) and b.interior_contains(z) for z in points):
                return True
    return False


def polygons_intersect(pa: List[Arc], pb: List[Arc], eps: Optional[float] = None) -> bool:
    """
    True iff the two regions overlap: their boundaries cross, or a point on
    or just inside one boundary lies strictly inside the other region.
    Tangential contact does not count.
    """
    eps = resolve_eps(eps)
    if boundaries_cross(pa, pb, eps):
        return True
    collar = max(eps, 1e-9)
    for first, second in ((pa, pb), (pb, pa)):
        for arc in first:
            for fraction in (0.25, 0.5, 0.75):
                z = arc.point(fraction)
                if not z.infinite and region_contains(second, z.value, collar):
                    return True
                near = arc.left_point(fraction, 1e-5)
                if near is not None and region_contains(second, near, collar):
                    return True
    return False


# ---------------------------------------------------------------------------
# Angles
# ---------------------------------------------------------------------------

@dataclass
class VertexCycle:
    points: List[ComplexPoint]
    total_angle: float


def angle_sum_at_vertices(p: SidePairedPolygon, eps: Optional[float] = None) -> List[VertexCycle]:
    """
    Vertex cycles under the pairings with their total interior angles. A
    vertex on F1 of an entry is linked to its phi-image, a vertex on F2 to
    its phi^-1-image.
    """
    eps = resolve_eps(eps)
    if not p.assembled_boundary:
        assemble_boundary(p, eps)
    tol = max(eps, 1e-7)
    vertices = p.vertices
    parent = list(range(len(vertices)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, v in enumerate(vertices):
        for e in p.entries:
            for circle, g in ((e.f1, e.phi), (e.f2, inverse(e.phi))):
                if abs(_kept_value(circle, v.point)) > tol:
                    continue
                image = apply_point(g, v.point)
                for j, w in enumerate(vertices):
                    if w.point.is_close(image, tol):
                        parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(len(vertices)):
        groups.setdefault(find(i), []).append(i)
    cycles = [
        VertexCycle([vertices[i].point for i in members], sum(vertices[i].angle for i in members))
        for members in groups.values()
    ]
    for c in cycles:
        logger.debug(f"[POLYGON] vertex cycle of {len(c.points)}: total angle {c.total_angle:.12f}")
    return cycles


def loop_angles(arcs: List[Arc]) -> List[float]:
    """Interior angles at the junctions of one closed loop of arcs."""
    return [_vertex(arcs, i, (i + 1) % len(arcs)).angle for i in range(len(arcs))]


def total_turning(arcs: List[Arc]) -> float:
    """Turning of one closed finite loop: the arcs' own turning plus the corner turns."""
    total = 0.0
    for i, arc in enumerate(arcs):
        if not _is_line(arc.support):
            total += arc.span if arc.ccw else -arc.span
        if not (arc.full and len(arcs) == 1):
            total += _turn(arc, arcs[(i + 1) % len(arcs)])
    return total


def sample_boundary(arcs: List[Arc], count: int) -> np.ndarray:
    """Finite sample points along every arc, for rendering and distance checks."""
    points = [z.value for arc in arcs for z in arc.sample(count) if not z.infinite]
    return np.array(points, dtype=complex)
