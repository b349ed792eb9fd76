"""
Domain Service
Compatible minimally bounded hexagon domains for the vertices of a circle
chain, fine and coarse holonomy across hnn edges, the grafted fundamental
domain, its twisted deformation off the pleating variety and the domain
certificate.

Circles of a domain are stored so that the kept side is {quadric >= 0} of
the stored representative; transporting a domain uses the sign-keeping
Hermitian action.
"""
import cmath
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

import config
from config import resolve_eps
from services.chain_service import (
    CircleChainSpec,
    ChainEdge,
    Marker,
    PeripheralSpec,
    Relation,
    check_pleating_conditions,
    disc_relation,
    peripheral_disc,
)
from services.group_service import GroupRep
from services.polygon_service import (
    Arc,
    HexagonLines,
    HexagonReport,
    PairingEntry,
    SidePairedPolygon,
    assemble_boundary,
    check_minimally_bounded,
    hexagon_lines,
    parameter_of,
    polygons_intersect,
    transport_arc,
)
from utils.batch_processor import BatchProcessor
from utils.circlespace import (
    GRAM,
    CircleKind,
    CircleP3,
    Pencil,
    angle_between,
    circle_at,
    circle_circle_intersection,
    circle_through_points,
    inside_disc,
    mobius_apply,
    on_line,
    pencil_circle_through,
    pencil_coordinate,
    pencil_multiplier,
    pencil_of,
    point_circle,
    transport_disc,
)
from utils.errors import (
    ChainNotOnPleatingVariety,
    CoincidentCircles,
    ConstructionDegenerate,
    DisconnectedArrangement,
    FramesNotOnPencil,
    GeometryError,
    HolonomyUndefined,
    KleinianError,
    ParabolicUnsupported,
    StepFailed,
    SubarcEmpty,
)
from utils.mobius import (
    IDENTITY,
    INFINITY,
    ComplexPoint,
    MobiusMap,
    TransformKind,
    apply_point,
    chordal_distance,
    classify,
    compose,
    conjugate,
    fixed_points,
    hyperbolic_with_fixed_points,
    inverse,
    isometric_circle,
    multiplier,
    one_parameter_power,
    power,
    standardizing_map,
)
from utils.words import Word

logger = logging.getLogger(__name__)

CHAT_CHOICES = ("EuclideanSegment", "DiscBoundary")
SIGMA_MODES = ("markers", "fixed_points")
MAP_TOLERANCE = 1e-7  # matching group elements by their matrices
ON_CIRCLE_TOLERANCE = 1e-7
BETWEEN_TOLERANCE = 1e-7  # slack on the pencil position of the split circle
ARC_FRACTIONS = (0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875)


# ---------------------------------------------------------------------------
# Small helpers
# ---------------------------------------------------------------------------

def _matches(g: MobiusMap, h: MobiusMap) -> int:
    """+1 if g = h, -1 if g = h^-1, 0 otherwise (modulo sign)."""
    if g.is_close(h, MAP_TOLERANCE):
        return 1
    if g.is_close(inverse(h), MAP_TOLERANCE):
        return -1
    return 0


def _word_power(w: Word, n: int) -> Word:
    base = w if n >= 0 else w.inverse()
    result = Word()
    for _ in range(abs(n)):
        result = result * base
    return result


def _depth(disc: CircleP3, z: ComplexPoint) -> float:
    """Normalized quadric of the disc at z; negative inside."""
    if z.infinite:
        return disc.k / disc.norm()
    return disc.quadric_value(z) / (disc.norm() * (1.0 + abs(z.value) ** 2))


def _meet(c1: CircleP3, c2: CircleP3, eps: float) -> List[ComplexPoint]:
    try:
        return [p for p in circle_circle_intersection(c1, c2, eps) if not p.infinite]
    except (CoincidentCircles, GeometryError):
        return []


def _inside(points: List[ComplexPoint], disc: CircleP3) -> List[ComplexPoint]:
    """Points strictly inside the disc, deepest first."""
    return sorted((p for p in points if inside_disc(disc, p)), key=lambda p: _depth(disc, p))


def _on_circle(c: CircleP3, z: ComplexPoint, tol: float = ON_CIRCLE_TOLERANCE) -> bool:
    return abs(_depth(c, z)) <= tol


def _null_circle(points: List[ComplexPoint], circles: List[CircleP3], what: str) -> CircleP3:
    """The circle through the points and orthogonal to the circles, three conditions in all."""
    rows = np.array([GRAM @ point_circle(p).vector for p in points] + [GRAM @ c.vector for c in circles])
    _, s, vt = np.linalg.svd(rows)
    if s[2] <= 1e-12 * s[0]:
        raise ConstructionDegenerate(f"No unique {what}")
    return CircleP3.from_vector(vt[3]).normalized()


def _orthogonal_circle(p: ComplexPoint, q: ComplexPoint, sigma: CircleP3) -> CircleP3:
    """The circle through p and q orthogonal to sigma (the geodesic of the disc)."""
    return _null_circle([p, q], [sigma], f"geodesic through {p} and {q}")


def _perpendicular(p: ComplexPoint, c: CircleP3, sigma: CircleP3) -> CircleP3:
    """The geodesic of the disc from p meeting c at a right angle."""
    return _null_circle([p], [c, sigma], f"perpendicular from {p}")


def _facing(c: CircleP3, vertices: List[ComplexPoint]) -> CircleP3:
    """c signed so that the hexagon vertices off it lie on its kept side."""
    far = max(vertices, key=lambda v: abs(_depth(c, v)))
    return c if _depth(c, far) >= 0 else c.scaled(-1.0)


def _nearest_on(pencil: Pencil, hint: CircleP3) -> CircleP3:
    """Least-squares projection of the hint onto the span of the pencil."""
    basis = pencil.basis
    coeffs, *_ = np.linalg.lstsq(basis, hint.vector / hint.norm(), rcond=None)
    return CircleP3.from_vector(basis @ coeffs).normalized()


def _centers_line(h: MobiusMap, eps: float) -> CircleP3:
    """Euclidean line through the centers of the isometric circles of h and h^-1."""
    c1, _ = isometric_circle(h, eps)
    c2, _ = isometric_circle(inverse(h), eps)
    if c1.is_close(c2, 1e-12):
        raise HolonomyUndefined(f"Isometric circles of {h} are concentric")
    return circle_through_points(c1, c2, INFINITY, eps)


def _cutting_line(h: MobiusMap, anchor: CircleP3, p: CircleP3, eps: float) -> CircleP3:
    """
    The Euclidean line a graft is cut along. Maps fixing infinity have no
    isometric circles; their line runs through the crossing of the anchor
    with P, parallel to a translation or through the finite fixed point.
    """
    if abs(h.c) > eps:
        return _centers_line(h, eps)
    crossings = _meet(anchor, p, eps)
    if not crossings:
        raise HolonomyUndefined(f"The anchor circle misses the end circle of {h}")
    q = crossings[0]
    fixed = fixed_points(h, eps)
    if fixed.degenerate:
        through = ComplexPoint.finite(q.value + h.b / h.d)
    else:
        through = fixed.repelling if fixed.attracting.infinite else fixed.attracting
    return circle_through_points(q, through, INFINITY, eps)


def _raw(c: CircleP3) -> List[float]:
    """Coordinates as stored; the sign carries the kept side."""
    return [float(x) for x in c.vector]


def _malformed(what: str, e: Exception) -> GeometryError:
    return GeometryError(f"Malformed {what}: {e!r}")


# ---------------------------------------------------------------------------
# Minimally bounded domains
# ---------------------------------------------------------------------------

@dataclass
class MinBoundedDomain:
    """
    The hexagon domain of one chain vertex.

    Attributes:
        owner: Vertex name
        circles: C1..C6 with C2 = f2(C1), C4 = f4(C3), C6 = f6(C5)
        pairings: f2, f4, f6 with f6 f4 f2 = 1
        words: Words of f2, f4, f6
        sigma: Oriented disc {quadric < 0} the hexagon lives in
        coordinate: Base pencil coordinate x of the construction
    """
    owner: str
    circles: List[CircleP3]
    pairings: List[MobiusMap]
    words: List[Word]
    sigma: CircleP3
    coordinate: float = 1.0
    report: Optional[HexagonReport] = None

    @property
    def hexagon(self) -> HexagonLines:
        return hexagon_lines(self.circles, self.sigma, self.pairings)

    def pair(self, j: int) -> Tuple[CircleP3, CircleP3]:
        return self.circles[2 * j], self.circles[2 * j + 1]

    def check(self, eps: Optional[float] = None) -> HexagonReport:
        f2, f4, f6 = self.pairings
        self.report = check_minimally_bounded(self.hexagon, f2, f4, f6, eps)
        return self.report

    def polygon(self, clip: bool = False) -> SidePairedPolygon:
        """The side-paired polygon of the hexagon; clip=True cuts it to the disc."""
        entries = [
            PairingEntry(pencil_of(f), c1, c2, f, str(w))
            for f, w, (c1, c2) in zip(self.pairings, self.words, (self.pair(j) for j in range(3)))
        ]
        return SidePairedPolygon(entries, cuts=[self.sigma.scaled(-1.0)] if clip else [])

    def transported(self, h: MobiusMap) -> 'MinBoundedDomain':
        return MinBoundedDomain(
            self.owner,
            [transport_disc(h, c) for c in self.circles],
            [conjugate(h, f) for f in self.pairings],
            list(self.words),
            transport_disc(h, self.sigma),
            self.coordinate,
        )

    def to_json(self) -> dict:
        return {
            "owner": self.owner,
            "circles": [_raw(c) for c in self.circles],
            "pairings": [
                {"word": str(w), "matrix": f.to_json()} for f, w in zip(self.pairings, self.words)
            ],
            "sigma": _raw(self.sigma),
            "x": self.coordinate,
            "minimally_bounded": self.report.to_json() if self.report is not None else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> 'MinBoundedDomain':
        try:
            pairings = data["pairings"]
            return cls(
                str(data["owner"]),
                [CircleP3.from_json(c) for c in data["circles"]],
                [MobiusMap.from_json(p["matrix"]) for p in pairings],
                [Word.parse(p["word"]) for p in pairings],
                CircleP3.from_json(data["sigma"]),
                float(data.get("x", 1.0)),
            )
        except (KeyError, TypeError, IndexError) as e:
            raise _malformed("vertex domain", e) from e


def _rotate_for_leaf(group: GroupRep, spec: PeripheralSpec, words: List[Word], leaf: MobiusMap) -> List[Word]:
    # cyclic rotations keep f6 f4 f2 = 1
    for k in range(3):
        rotated = words[k:] + words[:k]
        if _matches(group.evaluate_word(rotated[2]), leaf):
            return rotated
    raise ConstructionDegenerate(f"Vertex {spec.name}: the edge leaf is none of its boundary elements")


def _vertex_disc(group: GroupRep, spec: PeripheralSpec, words: List[Word], mode: str, eps: float) -> CircleP3:
    if mode == "fixed_points":
        # off the variety the disc is replaced by the circle through the attracting fixed points
        spec = PeripheralSpec(spec.name, spec.generator_words, [Marker(w, "attracting") for w in words])
    return peripheral_disc(group, spec, eps)


def _first_vertex(
    f2: MobiusMap,
    f4: MobiusMap,
    c1: CircleP3,
    c6: CircleP3,
    disc: CircleP3,
    name: str,
    eps: float
) -> Tuple[ComplexPoint, CircleP3]:
    """v1 on C6 inside the disc, and C1 through it."""
    candidates = _inside(_meet(c1, c6, eps), disc)
    if candidates:
        return candidates[0], c1
    repelling = fixed_points(f4, eps).repelling
    logger.debug(f"[DOMAIN] {name}: C1 misses C6 inside the disc, using the repelling-point geodesic")
    try:
        geodesic = _orthogonal_circle(fixed_points(f2, eps).repelling, repelling, disc)
        candidates = _inside(_meet(geodesic, c6, eps), disc)
    except ConstructionDegenerate:
        candidates = []
    if not candidates:
        # parabolic f2 and f4 put that geodesic through cusps, touching C6 on the disc boundary
        logger.debug(f"[DOMAIN] {name}: dropping the perpendicular from {repelling} onto C6")
        candidates = _inside(_meet(_perpendicular(repelling, c6, disc), c6, eps), disc)
    if not candidates:
        raise ConstructionDegenerate(f"Vertex {name}, step 1: no geodesic reaches C6 inside the disc")
    v1 = candidates[0]
    return v1, pencil_circle_through(pencil_of(f2, eps), v1)


def _build_vertex(
    group: GroupRep,
    spec: PeripheralSpec,
    words: List[Word],
    disc: CircleP3,
    inherited: Optional[Tuple[CircleP3, CircleP3]],
    x: float,
    eps: float,
    root_circle: Optional[CircleP3] = None
) -> MinBoundedDomain:
    f2, f4, f6 = (group.evaluate_word(w) for w in words)
    name = spec.name
    try:
        if inherited is None:
            pencil = pencil_of(f6, eps)
            c5 = circle_at(pencil, x).normalized() if root_circle is None else _nearest_on(pencil, root_circle)
            c6 = mobius_apply(f6, c5, eps)
        else:
            c5, c6 = inherited
        c1 = circle_at(pencil_of(f2, eps), x).normalized()
        v1, c1 = _first_vertex(f2, f4, c1, c6, disc, name, eps)
    except ConstructionDegenerate:
        raise
    except KleinianError as e:
        raise ConstructionDegenerate(f"Vertex {name}, step 1: {e}") from e

    try:
        c2 = mobius_apply(f2, c1, eps)
    except KleinianError as e:
        raise ConstructionDegenerate(f"Vertex {name}, step 2: {e}") from e

    v2 = apply_point(f2, v1)
    try:
        c3 = pencil_circle_through(pencil_of(f4, eps), v2)
        c4 = mobius_apply(f4, c3, eps)
    except KleinianError as e:
        raise ConstructionDegenerate(f"Vertex {name}, step 3: {e}") from e

    v3 = apply_point(f4, v2)
    if not _on_circle(c5, v3):
        raise ConstructionDegenerate(f"Vertex {name}, step 4: f4 f2 v1 = {v3} is off C5")
    logger.debug(f"[DOMAIN] {name}: v1 = {v1}, v2 = {v2}, v3 = {v3}")
    circles = [
        _facing(c1, [v2, v3]), _facing(c2, [v1, v3]), _facing(c3, [v1, v3]),
        _facing(c4, [v1, v2]), _facing(c5, [v1, v2]), _facing(c6, [v2, v3]),
    ]
    return MinBoundedDomain(name, circles, [f2, f4, f6], list(words), disc, x)


def _traversal(chain: CircleChainSpec) -> List[Tuple[str, Optional[ChainEdge]]]:
    """Breadth-first order over tree edges; each vertex with the edge it was reached by."""
    order: List[Tuple[str, Optional[ChainEdge]]] = []
    seen = set()
    for root in chain.vertices:
        if root.name in seen:
            continue
        seen.add(root.name)
        queue = deque([(root.name, None)])
        while queue:
            name, edge = queue.popleft()
            order.append((name, edge))
            for e in chain.tree_edges:
                if name not in (e.source, e.target):
                    continue
                other = e.target if e.source == name else e.source
                if other not in seen:
                    seen.add(other)
                    queue.append((other, e))
    return order


def _root_leaf(group: GroupRep, chain: CircleChainSpec, name: str) -> Optional[MobiusMap]:
    for e in chain.tree_edges:
        if e.source == name:
            return group.evaluate_word(e.leaf)
        if e.target == name:
            return group.evaluate_word(e.far_leaf)
    return None


def _inherit(parent: MinBoundedDomain, f6: MobiusMap) -> Tuple[CircleP3, CircleP3]:
    for j, f in enumerate(parent.pairings):
        s = _matches(f, f6)
        if s == 1:
            return parent.pair(j)
        if s == -1:
            first, second = parent.pair(j)
            return second, first
    raise ConstructionDegenerate(f"The edge leaf pairs no sides of vertex {parent.owner}")


def build_compatible_domains(
    group: GroupRep,
    chain: CircleChainSpec,
    x: float = 1.0,
    eps: Optional[float] = None,
    verify: bool = True,
    sigma_mode: str = "markers",
    root_circle: Optional[CircleP3] = None
) -> List[MinBoundedDomain]:
    """
    Build one minimally bounded hexagon per chain vertex, sharing the
    paired circles across tree edges.

    The root vertex takes the circle at pencil coordinate x on Pen(f6)
    and its f6-image; every other vertex inherits that pair from its
    parent along the tree edge. At each vertex C1 is the circle at x on
    Pen(f2), v1 its crossing with C6 inside the disc (falling back to the
    geodesic between the repelling points of f2 and f4, then to the foot of
    the perpendicular from the repelling point of f4 onto C6), C2 = f2(C1),
    C3 the Pen(f4) circle through f2(v1) and C4 = f4(C3). Each circle is
    signed so that the hexagon vertices it misses lie on its kept side.

    Args:
        group: The representation
        chain: Chain whose vertices list exactly three boundary words
        x: Base pencil coordinate; 1 selects isometric circles
        eps: Tolerance
        verify: Require the pleating conditions and minimal boundedness
        sigma_mode: 'markers' for the peripheral disc, 'fixed_points' for
            the circle through the attracting fixed points of the boundary
            elements (off the pleating variety)
        root_circle: Replaces the root C5 by its projection onto Pen(f6),
            keeping rebuilt domains close to an earlier one

    Returns:
        Domains in chain vertex order

    Raises:
        ChainNotOnPleatingVariety: If verify and the pleating check fails
        ConstructionDegenerate: If a boundary element is elliptic or a
            required intersection is empty (the step is reported)
    """
    eps = resolve_eps(eps)
    if sigma_mode not in SIGMA_MODES:
        raise GeometryError(f"sigma_mode must be one of {SIGMA_MODES}, got '{sigma_mode}'")
    if verify:
        report = check_pleating_conditions(group, chain, eps=eps)
        if not report.passed:
            failed = [k for k, ok in report.condition_verdicts.items() if not ok]
            raise ChainNotOnPleatingVariety(f"Failed conditions: {', '.join(failed)}")
    for v in chain.vertices:
        if len(v.boundary_words) != 3:
            raise ConstructionDegenerate(f"Vertex {v.name} needs 3 boundary words, got {len(v.boundary_words)}")

    order = _traversal(chain)
    domains: Dict[str, MinBoundedDomain] = {}
    for i, (name, edge) in enumerate(order, start=1):
        spec = chain.vertex(name)
        words = [b.word for b in spec.boundary_words]
        if edge is None:
            leaf = _root_leaf(group, chain, name)
        else:
            leaf = group.evaluate_word(edge.far_leaf if edge.target == name else edge.leaf)
        if leaf is not None:
            words = _rotate_for_leaf(group, spec, words, leaf)
        f2, f4, f6 = (group.evaluate_word(w) for w in words)
        if not compose(f6, compose(f4, f2)).is_identity(MAP_TOLERANCE):
            raise ConstructionDegenerate(f"Vertex {name}: f6 f4 f2 is not the identity")
        for w, f in zip(words, (f2, f4, f6)):
            if classify(f, eps).tag is TransformKind.ELLIPTIC:
                raise ConstructionDegenerate(f"Vertex {name}: boundary element {w} is elliptic")

        inherited = None
        if edge is not None:
            parent = edge.source if edge.target == name else edge.target
            inherited = _inherit(domains[parent], f6)
        logger.info(f"[DOMAIN] [STEP {i}/{len(order)}] Vertex {name}"
                    f"{' (root)' if edge is None else f' from {edge.label}'}")
        disc = _vertex_disc(group, spec, words, sigma_mode, eps)
        domain = _build_vertex(group, spec, words, disc, inherited, x, eps,
                               root_circle if i == 1 else None)
        report = domain.check(eps)
        if report.passed:
            logger.info(f"[DOMAIN] ✓ {name} is minimally bounded")
        else:
            logger.info(f"[DOMAIN] ✗ {name} is not minimally bounded: {report.to_json()}")
            if verify:
                raise ConstructionDegenerate(f"Vertex {name}, step 5: the hexagon is not minimally bounded")
        domains[name] = domain
    return [domains[v.name] for v in chain.vertices]


# ---------------------------------------------------------------------------
# Holonomy
# ---------------------------------------------------------------------------

@dataclass
class HolonomyData:
    edge: str
    fine: MobiusMap
    delta: int

    def to_json(self) -> dict:
        return {"edge": self.edge, "fine": self.fine.to_json(), "delta": self.delta}

    @classmethod
    def from_json(cls, data: dict) -> 'HolonomyData':
        return cls(str(data["edge"]), MobiusMap.from_json(data["fine"]), int(data["delta"]))


def _framed_kind(h2: MobiusMap, eps: float) -> TransformKind:
    kind = classify(h2, eps).tag
    if kind not in (TransformKind.LOXODROMIC, TransformKind.PARABOLIC):
        raise HolonomyUndefined(f"Holonomy needs a loxodromic or parabolic element, got {kind.value}")
    return kind


def fine_holonomy(
    h2: MobiusMap,
    mapped_frame: Tuple[CircleP3, CircleP3],
    target_frame: Tuple[CircleP3, CircleP3],
    eps: Optional[float] = None
) -> MobiusMap:
    """
    The element of the one-parameter group through h2 carrying the mapped
    pair onto the target pair.

    Loxodromic h2 multiplies pencil coordinates, so the result is the
    hyperbolic map with the fixed points of h2 and scale sqrt(ratio);
    parabolic h2 shifts them, giving the real power h2^shift.

    Raises:
        FramesNotOnPencil: If any of the four circles is off Pen(h2)
        HolonomyUndefined: If the frames sit on opposite sides of the fixed points
    """
    eps = resolve_eps(eps)
    kind = _framed_kind(h2, eps)
    pencil = pencil_of(h2, eps)
    tol = max(eps, 1e-8)
    for c in (*mapped_frame, *target_frame):
        if not on_line(c, pencil, tol):
            raise FramesNotOnPencil(f"{c} is not on the pencil of {h2}")
    xm = pencil_coordinate(pencil, mapped_frame[0], eps)
    xt = pencil_coordinate(pencil, target_frame[0], eps)
    if kind is TransformKind.PARABOLIC:
        return one_parameter_power(h2, xt - xm, eps)
    ratio = xt / xm if xm != 0 else math.inf
    if not (0.0 < ratio < math.inf):
        raise HolonomyUndefined(f"Frame coordinates {xm} and {xt} do not bracket a scaling")
    fixed = fixed_points(h2, eps)
    return hyperbolic_with_fixed_points(fixed.repelling, fixed.attracting, math.sqrt(ratio))


def holonomy_position(h2: MobiusMap, fine: MobiusMap, eps: Optional[float] = None) -> float:
    """
    Position of fine in units of h2: log(mu)/log(lambda) for loxodromic
    h2, the coordinate shift for parabolic h2.
    """
    eps = resolve_eps(eps)
    kind = _framed_kind(h2, eps)
    pencil = pencil_of(h2, eps)
    if kind is TransformKind.PARABOLIC:
        return pencil_coordinate(pencil, mobius_apply(fine, pencil.frame[0], eps), eps)
    mu = pencil_multiplier(fine, pencil, eps)
    lam = pencil_multiplier(h2, pencil, eps)
    if not mu > 0:
        raise HolonomyUndefined(f"{fine} does not preserve the sides of the pencil of {h2}")
    return math.log(mu) / math.log(lam)


def bracket_holds(h2: MobiusMap, fine: MobiusMap, delta: int, eps: Optional[float] = None) -> bool:
    """lambda^delta <= mu < lambda^(delta+1), with the tolerance pushing ties to delta."""
    eps = resolve_eps(eps)
    r = holonomy_position(h2, fine, eps)
    tol = eps * max(1.0, abs(r))
    return delta - tol <= r < delta + 1 - tol


def coarse_holonomy(
    h2: MobiusMap,
    fine: MobiusMap,
    eps: Optional[float] = None,
    allow_parabolic: bool = False
) -> int:
    """
    The integer delta with h2^delta <= fine < h2^(delta+1) on framed
    pencil coordinates (logarithmic for loxodromic h2).

    Raises:
        ParabolicUnsupported: For parabolic h2 with a nonzero shift, unless allow_parabolic
    """
    eps = resolve_eps(eps)
    r = holonomy_position(h2, fine, eps)
    delta = math.floor(r + eps * max(1.0, abs(r)))
    if classify(h2, eps).tag is TransformKind.PARABOLIC and delta != 0 and not allow_parabolic:
        raise ParabolicUnsupported(f"Parabolic coarse holonomy {delta} (shift {r:.6g}) is not supported")
    return delta


# ---------------------------------------------------------------------------
# Grafted domains
# ---------------------------------------------------------------------------

@dataclass
class GraftPairing:
    word: Word
    map: MobiusMap
    arc: Optional[Arc]

    def to_json(self) -> dict:
        return {
            "word": str(self.word),
            "matrix": self.map.to_json(),
            "arc": self.arc.to_json() if self.arc is not None else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> 'GraftPairing':
        arc = data.get("arc")
        return cls(Word.parse(data["word"]), MobiusMap.from_json(data["matrix"]),
                   Arc.from_json(arc) if arc is not None else None)


@dataclass
class Graft:
    """
    The grafting data of one hnn edge, read in the source vertex picture.

    `circles` are (P, Z, hP): the source pair on Pen(h) and the split
    circle h^-delta(gamma F1') between them. `pairings` carry
    gamma^-1 h^delta on [z, w'] and gamma^-1 h^(delta+1) on [w, z].
    """
    edge: str
    source: str
    leaf: MobiusMap
    conjugator: MobiusMap
    target_circle: CircleP3
    chat: CircleP3
    image: CircleP3
    w: ComplexPoint
    z: ComplexPoint
    w_prime: ComplexPoint
    circles: Tuple[CircleP3, CircleP3, CircleP3]
    holonomy: HolonomyData
    pairings: List[GraftPairing]
    rotation: complex = 1.0 + 0j

    @property
    def degenerate(self) -> bool:
        return any(p.arc is None for p in self.pairings)

    def transported(self, h: MobiusMap) -> 'Graft':
        move = lambda p: apply_point(h, p)
        pairings = []
        for p in self.pairings:
            arc = None
            if p.arc is not None:
                arc = transport_arc(h, p.arc)
            pairings.append(GraftPairing(p.word, conjugate(h, p.map), arc))
        return Graft(
            self.edge, self.source, conjugate(h, self.leaf), conjugate(h, self.conjugator),
            transport_disc(h, self.target_circle), mobius_apply(h, self.chat), mobius_apply(h, self.image),
            move(self.w), move(self.z), move(self.w_prime),
            tuple(transport_disc(h, c) for c in self.circles),
            HolonomyData(self.holonomy.edge, conjugate(h, self.holonomy.fine), self.holonomy.delta),
            pairings, self.rotation,
        )

    def to_json(self) -> dict:
        return {
            "edge": self.edge,
            "source": self.source,
            "leaf": self.leaf.to_json(),
            "conjugator": self.conjugator.to_json(),
            "target_circle": _raw(self.target_circle),
            "chat": _raw(self.chat),
            "image": _raw(self.image),
            "split_points": {"w": self.w.to_json(), "z": self.z.to_json(), "w_prime": self.w_prime.to_json()},
            "circles": [_raw(c) for c in self.circles],
            "holonomy": self.holonomy.to_json(),
            "pairings": [p.to_json() for p in self.pairings],
            "rotation": [self.rotation.real, self.rotation.imag],
        }

    @classmethod
    def from_json(cls, data: dict) -> 'Graft':
        try:
            points = data["split_points"]
            p, split, hp = (CircleP3.from_json(c) for c in data["circles"])
            re, im = data.get("rotation", [1.0, 0.0])
            return cls(
                str(data["edge"]),
                str(data["source"]),
                MobiusMap.from_json(data["leaf"]),
                MobiusMap.from_json(data["conjugator"]),
                CircleP3.from_json(data["target_circle"]),
                CircleP3.from_json(data["chat"]),
                CircleP3.from_json(data["image"]),
                ComplexPoint.from_json(points["w"]),
                ComplexPoint.from_json(points["z"]),
                ComplexPoint.from_json(points["w_prime"]),
                (p, split, hp),
                HolonomyData.from_json(data["holonomy"]),
                [GraftPairing.from_json(x) for x in data["pairings"]],
                complex(float(re), float(im)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise _malformed("graft", e) from e


@dataclass
class GraftedDomain:
    vertex_domains: List[MinBoundedDomain]
    grafts: List[Graft] = field(default_factory=list)
    chat_choice: str = "EuclideanSegment"

    @property
    def x(self) -> float:
        return self.vertex_domains[0].coordinate if self.vertex_domains else 1.0

    @property
    def deltas(self) -> Dict[str, int]:
        return {g.edge: g.holonomy.delta for g in self.grafts}

    def recipe(self) -> dict:
        """What twist_domain needs to rebuild this domain at another parameter."""
        return {
            "x": self.x,
            "chat_choice": self.chat_choice,
            "deltas": self.deltas,
            "rotations": {g.edge: g.rotation for g in self.grafts},
        }

    def domain_of(self, name: str) -> MinBoundedDomain:
        for d in self.vertex_domains:
            if d.owner == name:
                return d
        raise GeometryError(f"No domain for vertex '{name}'")

    def transported(self, h: MobiusMap) -> 'GraftedDomain':
        return GraftedDomain(
            [d.transported(h) for d in self.vertex_domains],
            [g.transported(h) for g in self.grafts],
            self.chat_choice,
        )

    def boundary_arcs(self, eps: Optional[float] = None) -> List[Arc]:
        """Clipped hexagon boundaries followed by the graft sub-arcs."""
        arcs: List[Arc] = []
        for d in self.vertex_domains:
            try:
                arcs.extend(assemble_boundary(d.polygon(clip=True), eps))
            except KleinianError as e:
                logger.warning(f"[DOMAIN] ✗ Boundary of {d.owner} not assembled: {e}")
        for g in self.grafts:
            arcs.extend(p.arc for p in g.pairings if p.arc is not None)
        return arcs

    def to_json(self) -> dict:
        return {
            "chat_choice": self.chat_choice,
            "x": self.x,
            "vertices": [d.to_json() for d in self.vertex_domains],
            "grafts": [g.to_json() for g in self.grafts],
            "holonomy": [g.holonomy.to_json() for g in self.grafts],
        }

    @classmethod
    def from_json(cls, data: dict) -> 'GraftedDomain':
        """Read a domain written by to_json; the holonomy summary is ignored."""
        if not isinstance(data, dict) or "vertices" not in data:
            raise GeometryError("A grafted domain needs a 'vertices' list")
        chat_choice = data.get("chat_choice", "EuclideanSegment")
        if chat_choice not in CHAT_CHOICES:
            raise GeometryError(f"chat_choice must be one of {CHAT_CHOICES}, got '{chat_choice}'")
        return cls(
            [MinBoundedDomain.from_json(v) for v in data["vertices"]],
            [Graft.from_json(g) for g in data.get("grafts", [])],
            chat_choice,
        )


def _pair_on(domain: MinBoundedDomain, element: MobiusMap) -> Tuple[CircleP3, CircleP3]:
    """(P, element(P)) among the paired circles of the domain."""
    for j, f in enumerate(domain.pairings):
        s = _matches(f, element)
        if s == 1:
            return domain.pair(j)
        if s == -1:
            first, second = domain.pair(j)
            return second, first
    raise HolonomyUndefined(f"The edge leaf pairs no sides of vertex {domain.owner}")


def _crossings(support: CircleP3, c: CircleP3, h: MobiusMap, eps: float) -> List[ComplexPoint]:
    """Crossings of c with the cutting circle, without the fixed point of a parabolic h."""
    points = _meet(support, c, eps)
    fixed = fixed_points(h, eps)
    if fixed.degenerate:
        points = [q for q in points if not q.is_close(fixed.attracting, 1e-7)]
    return points


def _outside_both(arc: Arc, p: CircleP3, hp: CircleP3) -> bool:
    for fraction in ARC_FRACTIONS:
        q = arc.point(fraction)
        if not q.infinite and (_depth(p, q) <= 0 or _depth(hp, q) <= 0):
            return False
    return True


def _through_infinity(arc: Arc) -> bool:
    return arc.support.kind() is CircleKind.LINE and arc.contains(INFINITY)


def _choose_arc(
    support: CircleP3,
    pairs: List[Tuple[ComplexPoint, ComplexPoint]],
    p: CircleP3,
    hp: CircleP3
) -> Optional[Arc]:
    """
    The arc of the support from a point of P to a point of hP that stays
    in the kept sides of both circles; finite arcs first, then the
    shortest chord.
    """
    candidates = []
    for a, b in pairs:
        if a.is_close(b, 1e-9):
            continue
        for ccw in (True, False):
            arc = Arc(support, a, b, ccw)
            if _outside_both(arc, p, hp):
                candidates.append(arc)
    if not candidates:
        return None
    return min(candidates, key=lambda arc: (_through_infinity(arc), chordal_distance(arc.start, arc.end)))


def _tilted(arc: Arc, p: CircleP3, hp: CircleP3, eps: float) -> Optional[Arc]:
    """
    The arc between the same ends on the circle meeting the support at
    config.CHAT_TILT; the arc itself when the tilt is zero.
    """
    if config.CHAT_TILT == 0.0:
        return arc
    chart = standardizing_map(arc.start, arc.end)
    # the support is a line through 0 in the chart; turn it about 0
    middle = apply_point(chart, arc.point(0.5))
    turned = ComplexPoint.finite(middle.value * cmath.exp(1j * config.CHAT_TILT))
    support = circle_through_points(arc.start, apply_point(inverse(chart), turned), arc.end, eps)
    return _choose_arc(support, [(arc.start, arc.end)], p, hp)


def _split_point(arc: Arc, split: CircleP3, h: MobiusMap, eps: float) -> Optional[ComplexPoint]:
    """The crossing of the split circle with the cut arc, endpoints included."""
    on_arc = [q for q in _crossings(arc.support, split, h, eps) if arc.contains(q, 1e-7)]
    if not on_arc:
        return None
    middle = arc.span / 2
    return min(on_arc, key=lambda q: abs(arc.offset_of(parameter_of(arc.support, q)) - middle))


def _pencil_position(h: MobiusMap, p: CircleP3, z: CircleP3, hp: CircleP3, eps: float) -> float:
    """Position of z on Pen(h) with p at 0 and hp at 1."""
    pencil = pencil_of(h, eps)
    xp, xz, xq = (pencil_coordinate(pencil, c, eps) for c in (p, z, hp))
    if classify(h, eps).tag is TransformKind.PARABOLIC:
        return (xz - xp) / (xq - xp)
    if xz / xp <= 0:
        return math.inf
    return math.log(xz / xp) / math.log(xq / xp)


def _subarc(arc: Arc, a: ComplexPoint, b: ComplexPoint) -> Optional[Arc]:
    """The piece of the cut arc from a to b; None when it degenerates to a point."""
    if a.is_close(b, 1e-9):
        return None
    return Arc(arc.support, a, b, arc.ccw)


def _edge_frames(group: GroupRep, edge: ChainEdge, by_name: Dict[str, MinBoundedDomain]):
    """Leaf h, conjugator gamma, source pair (P, hP) and the far circle F1'."""
    u, v = by_name[edge.source], by_name[edge.target]
    h = group.evaluate_word(edge.leaf)
    gamma = group.evaluate_word(edge.conjugator)
    far = group.evaluate_word(edge.far_leaf)
    s = _matches(conjugate(gamma, far), h)
    if s == 0:
        raise HolonomyUndefined(f"{edge.label}: the conjugator does not carry the far leaf onto the leaf")
    far = far if s == 1 else inverse(far)
    p, hp = _pair_on(u, h)
    f1_far, _ = _pair_on(v, far)
    return h, gamma, p, hp, f1_far


def _graft_pairings(
    edge: ChainEdge,
    h: MobiusMap,
    gamma: MobiusMap,
    delta: int,
    arc: Arc,
    z: ComplexPoint
) -> List[GraftPairing]:
    back = edge.conjugator.inverse()
    return [
        GraftPairing(back * _word_power(edge.leaf, delta),
                     compose(inverse(gamma), power(h, delta)), _subarc(arc, z, arc.end)),
        GraftPairing(back * _word_power(edge.leaf, delta + 1),
                     compose(inverse(gamma), power(h, delta + 1)), _subarc(arc, arc.start, z)),
    ]


def _graft(
    group: GroupRep,
    edge: ChainEdge,
    by_name: Dict[str, MinBoundedDomain],
    chat_choice: str,
    eps: float,
    delta: Optional[int],
    allow_parabolic: bool
) -> Graft:
    h, gamma, p, hp, f1_far = _edge_frames(group, edge, by_name)
    mapped_far = mobius_apply(gamma, f1_far, eps)
    fine = fine_holonomy(h, (p, hp), (mapped_far, mobius_apply(h, mapped_far, eps)), eps)
    if delta is None:
        delta = coarse_holonomy(h, fine, eps, allow_parabolic=allow_parabolic)
    split = mobius_apply(power(h, -delta), mapped_far, eps)
    position = _pencil_position(h, p, split, hp, eps)
    if not (-BETWEEN_TOLERANCE <= position <= 1 + BETWEEN_TOLERANCE):
        raise SubarcEmpty(f"{edge.label}: the split circle sits at {position:.6g}, outside [0, 1] (delta {delta})")

    anchor = transport_disc(gamma, by_name[edge.target].sigma)
    chat = anchor if chat_choice == "DiscBoundary" else _cutting_line(h, anchor, p, eps)
    pairs = [(a, b) for a in _crossings(chat, p, h, eps) for b in _crossings(chat, hp, h, eps)]
    arc = _choose_arc(chat, pairs, p, hp)
    if arc is None:
        raise SubarcEmpty(f"{edge.label}: no arc of the cutting circle joins the end circles outside them")
    arc = _tilted(arc, p, hp, eps)
    if arc is None:
        raise SubarcEmpty(f"{edge.label}: the tilted cut enters an end disc")
    chat = arc.support
    z = _split_point(arc, split, h, eps)
    if z is None:
        raise SubarcEmpty(f"{edge.label}: the split circle misses the cut arc")
    logger.debug(f"[DOMAIN] {edge.label}: delta {delta}, w = {arc.start}, z = {z}, w' = {arc.end}")
    return Graft(
        edge.label, edge.source, h, gamma, f1_far, chat, mobius_apply(inverse(gamma), chat, eps),
        arc.start, z, arc.end, (p, split, hp), HolonomyData(edge.label, fine, delta),
        _graft_pairings(edge, h, gamma, delta, arc, z),
    )


def build_grafted_domain(
    group: GroupRep,
    chain: CircleChainSpec,
    domains: List[MinBoundedDomain],
    chat_choice: str = "EuclideanSegment",
    eps: Optional[float] = None,
    deltas: Optional[Dict[str, int]] = None,
    allow_parabolic: bool = True
) -> GraftedDomain:
    """
    Graft the vertex domains across the hnn edges of the chain.

    For each hnn edge with leaf h and conjugator gamma, the far vertex's
    pair is carried into Pen(h) by gamma; the fine holonomy compares it
    with the near pair (P, hP), the coarse holonomy delta places the split
    circle Z = h^-delta(gamma F1') between them, and the cutting line Chat
    is split at w (on P), z (on Z) and w' (on hP). Chat meets the pencil
    circles at right angles, so the cut runs on the circle through w and
    w' that meets Chat at CHAT_TILT.

    Args:
        group: The representation
        chain: Chain whose hnn edges carry stable words
        domains: Output of build_compatible_domains
        chat_choice: 'EuclideanSegment' (line through the pencil centers,
            along the motion for leaves fixing infinity)
            or 'DiscBoundary' (gamma image of the far peripheral circle)
        eps: Tolerance
        deltas: Coarse holonomy per edge label, overriding the computed one
        allow_parabolic: Accept nonzero coarse holonomy on parabolic leaves

    Raises:
        HolonomyUndefined: If an edge's elements do not fit the domains
        SubarcEmpty: If the split circle falls outside [P, hP]
    """
    eps = resolve_eps(eps)
    if chat_choice not in CHAT_CHOICES:
        raise GeometryError(f"chat_choice must be one of {CHAT_CHOICES}, got '{chat_choice}'")
    by_name = {d.owner: d for d in domains}
    hnn = [e for e in chain.edges if e.kind == "hnn"]
    grafts = []
    for i, e in enumerate(hnn, start=1):
        logger.info(f"[DOMAIN] [STEP {i}/{len(hnn)}] Grafting across {e.label}")
        override = (deltas or {}).get(e.label)
        grafts.append(_graft(group, e, by_name, chat_choice, eps, override, allow_parabolic))
    logger.info(f"[DOMAIN] ✓ Grafted domain with {len(domains)} hexagons and {len(grafts)} grafts")
    return GraftedDomain(list(domains), grafts, chat_choice)


# ---------------------------------------------------------------------------
# Twisting off the pleating variety
# ---------------------------------------------------------------------------

def _rotation_half(h: MobiusMap, previous: Optional[complex]) -> complex:
    """Principal square root of the rotational part of the multiplier, sign-matched to previous."""
    k = multiplier(h) ** 2
    u = cmath.sqrt(k / abs(k))
    if previous is not None and abs(u - previous) > abs(-u - previous):
        u = -u
    return u


def _twist_graft(
    group: GroupRep,
    edge: ChainEdge,
    by_name: Dict[str, MinBoundedDomain],
    delta: int,
    previous: Optional[complex],
    eps: float
) -> Graft:
    try:
        h, gamma, p, hp, f1_far = _edge_frames(group, edge, by_name)
        mapped_far = mobius_apply(gamma, f1_far, eps)
        fine = fine_holonomy(h, (p, hp), (mapped_far, mobius_apply(h, mapped_far, eps)), eps)
    except KleinianError as e:
        raise StepFailed(1, f"{edge.label}: {e}") from e

    fixed = fixed_points(h, eps)
    try:
        if fixed.degenerate or abs(h.c) <= eps:
            line = _cutting_line(h, transport_disc(gamma, by_name[edge.target].sigma), p, eps)
        else:
            line = circle_through_points(fixed.repelling, fixed.attracting, INFINITY, eps)
    except KleinianError as e:
        raise StepFailed(2, f"{edge.label}: {e}") from e

    pairs = [(a, b) for a in _crossings(line, p, h, eps) for b in _crossings(line, hp, h, eps)]
    base_arc = _choose_arc(line, pairs, p, hp)
    if base_arc is None:
        raise StepFailed(3, f"{edge.label}: the fixed-point line does not join the end circles")

    if fixed.degenerate:
        rotation, phi = 1.0 + 0j, IDENTITY
    else:
        rotation = _rotation_half(h, previous)
        phi = hyperbolic_with_fixed_points(fixed.repelling, fixed.attracting, rotation)
    a, b = apply_point(inverse(phi), base_arc.start), apply_point(phi, base_arc.end)
    try:
        arc = _choose_arc(circle_through_points(a, b, INFINITY, eps), [(a, b)], p, hp)
        if arc is not None:
            arc = _tilted(arc, p, hp, eps)
    except KleinianError as e:
        raise StepFailed(4, f"{edge.label}: {e}") from e
    if arc is None:
        raise StepFailed(4, f"{edge.label}: the twisted segment enters an end disc")
    twisted = arc.support

    split = mobius_apply(power(h, -delta), mapped_far, eps)
    z = _split_point(arc, split, h, eps)
    if z is None:
        raise StepFailed(5, f"{edge.label}: the twisted segment misses the split circle")
    return Graft(
        edge.label, edge.source, h, gamma, f1_far, twisted, mobius_apply(inverse(gamma), twisted, eps),
        a, z, b, (p, split, hp), HolonomyData(edge.label, fine, delta),
        _graft_pairings(edge, h, gamma, delta, arc, z), rotation,
    )


def twist_domain(
    group: GroupRep,
    chain: CircleChainSpec,
    base: GraftedDomain,
    eps: Optional[float] = None,
    previous: Optional[GraftedDomain] = None
) -> GraftedDomain:
    """
    Rebuild a grafted domain at a group off the pleating variety.

    The vertex hexagons are rebuilt against the circle through the
    attracting fixed points of each vertex's boundary elements, the root
    C5 projected from the previous sample. Per hnn edge: (i) frames and
    fine holonomy, (ii) the line through the fixed points of h, (iii) its
    crossings w, w' with the end circles, (iv) the twisted segment through
    phi^-1(w) and phi(w') with phi the square root of the rotational part
    of h, bent by CHAT_TILT as in grafting, (v) the split point z on
    h^-delta(gamma F1') with delta taken from the base recipe.

    Args:
        group: The representation at the new parameter
        chain: The chain the base was built from
        base: Domain supplying x and the coarse holonomy per edge
        eps: Tolerance
        previous: Earlier sample along a path, for square-root continuity

    Raises:
        StepFailed: With the index of the failing step
    """
    eps = resolve_eps(eps)
    recipe = base.recipe()
    root = (previous or base).vertex_domains[0].circles[4]
    try:
        domains = build_compatible_domains(group, chain, recipe["x"], eps, verify=False,
                                           sigma_mode="fixed_points", root_circle=root)
    except KleinianError as e:
        raise StepFailed(1, f"vertex hexagons: {e}") from e
    by_name = {d.owner: d for d in domains}
    anchors = (previous or base).recipe()["rotations"]

    grafts = []
    for e in (e for e in chain.edges if e.kind == "hnn"):
        if e.label not in recipe["deltas"]:
            raise StepFailed(1, f"{e.label}: no coarse holonomy in the base recipe")
        grafts.append(_twist_graft(group, e, by_name, recipe["deltas"][e.label], anchors.get(e.label), eps))
    logger.info(f"[DOMAIN] ✓ Twisted domain with {len(grafts)} grafts")
    return GraftedDomain(domains, grafts, "EuclideanSegment")


# ---------------------------------------------------------------------------
# Certificate
# ---------------------------------------------------------------------------

CONDITIONS = ("1a", "1b", "2a", "closure", "words")


@dataclass
class ConditionCheck:
    condition: str
    subject: str
    passed: bool
    margin: float
    detail: str = ""

    def to_json(self) -> dict:
        data = dict(self.__dict__)
        data["margin"] = self.margin if math.isfinite(self.margin) else None
        return data


@dataclass
class CertificateReport:
    """
    Per-condition verdicts of the domain certificate. Margins are the
    smallest clearances observed; the verdict is numeric at tolerance eps.
    """
    checks: List[ConditionCheck]
    tolerance: float

    @property
    def verdicts(self) -> Dict[str, bool]:
        return {c: all(k.passed for k in self.checks if k.condition == c) for c in CONDITIONS}

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def offenders(self) -> Dict[str, List[str]]:
        return {c: [k.subject for k in self.checks if k.condition == c and not k.passed] for c in CONDITIONS}

    @property
    def margins(self) -> Dict[str, float]:
        return {
            c: min((k.margin for k in self.checks if k.condition == c), default=math.inf)
            for c in CONDITIONS
        }

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "conditions": self.verdicts,
            "offenders": self.offenders,
            "margins": {c: (m if math.isfinite(m) else None) for c, m in self.margins.items()},
            "tolerance": self.tolerance,
            "checks": [k.to_json() for k in self.checks if not k.passed],
        }


def _disjoint_pairs(d: GraftedDomain, eps: float) -> List[ConditionCheck]:
    checks = []
    for dom in d.vertex_domains:
        for j in range(3):
            c1, c2 = dom.pair(j)
            rel = disc_relation(c1, c2, eps=eps)
            ok = rel.relation in (Relation.DISJOINT, Relation.TANGENT)
            checks.append(ConditionCheck("1a", f"{dom.owner}: C{2 * j + 1}/C{2 * j + 2}", ok, rel.margin, str(rel)))
    for g in d.grafts:
        names = ("P", "Z", "hP")
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = g.circles[i], g.circles[j]
                if a.is_proportional(b, 1e-7):
                    continue
                rel = disc_relation(a, b, eps=eps)
                ok = rel.relation is not Relation.INTERSECTING
                checks.append(ConditionCheck("1a", f"{g.edge}: {names[i]}/{names[j]}", ok, rel.margin, str(rel)))
    return checks


def _angle_checks(d: GraftedDomain, eps: float) -> List[ConditionCheck]:
    checks = []
    window = config.ANGLE_EPSILON
    for g in d.grafts:
        owner = d.domain_of(g.source)
        p, split, hp = g.circles
        for label, circle in (("w", p), ("w'", hp)):
            angle = angle_between(g.chat.normalized(), circle.normalized(), eps)
            if angle is None:
                checks.append(ConditionCheck("1b", f"{g.edge}: {label}", False, -math.inf, "no crossing"))
                continue
            acute = min(angle, math.pi - angle)
            ok = window < acute < math.pi / 2 - window
            margin = min(acute - window, math.pi / 2 - window - acute)
            checks.append(ConditionCheck("1b", f"{g.edge}: {label}", ok, margin, f"angle {acute:.9g}"))
        for pairing in g.pairings:
            if pairing.arc is None:
                continue
            for k, c in enumerate(owner.circles):
                if any(c.is_proportional(x, 1e-7) for x in g.circles):
                    continue
                hits = [q for q in _meet(pairing.arc.support, c, eps) if pairing.arc.interior_contains(q)]
                if hits:
                    checks.append(ConditionCheck(
                        "1b", f"{g.edge}: [{pairing.word}] hits C{k + 1}", False, 0.0, str(hits[0])))
    return checks


def _overlap_check(first: str, second: str, arcs_a: List[Arc], arcs_b: List[Arc], eps: float) -> ConditionCheck:
    overlap = polygons_intersect(arcs_a, arcs_b, eps)
    return ConditionCheck("2a", f"{first}/{second}", not overlap, 0.0 if overlap else 1.0)


def _ends_on(poly: SidePairedPolygon, c: CircleP3) -> List[ComplexPoint]:
    """Endpoints of the boundary arcs supported on c."""
    return [q for a in poly.assembled_boundary if a.support.is_proportional(c, 1e-7) for q in (a.start, a.end)]


def _closure_checks(
    d: GraftedDomain,
    polygons: Dict[str, SidePairedPolygon],
    eps: float
) -> List[ConditionCheck]:
    checks = []
    for owner, poly in polygons.items():
        for k, e in enumerate(poly.entries):
            targets = _ends_on(poly, e.f2)
            worst = 0.0
            for q in _ends_on(poly, e.f1):
                image = apply_point(e.phi, q)
                gap = min((_point_gap(image, t) for t in targets), default=math.inf)
                worst = max(worst, gap)
            ok = worst <= max(eps, MAP_TOLERANCE)
            checks.append(ConditionCheck("closure", f"{owner}: {e.word}", ok, -worst, f"residual {worst:.3e}"))
    for g in d.grafts:
        first, second = g.pairings
        meet = _point_gap(apply_point(first.map, g.w_prime), apply_point(second.map, g.w))
        lands = abs(_depth(g.target_circle, apply_point(first.map, g.z)))
        worst = max(meet, lands)
        ok = worst <= max(eps, 1e-6)
        checks.append(ConditionCheck("closure", g.edge, ok, -worst, f"residual {worst:.3e}"))
    return checks


def _point_gap(p: ComplexPoint, q: ComplexPoint) -> float:
    if p.infinite or q.infinite:
        return 0.0 if p.infinite and q.infinite else math.inf
    return abs(p.value - q.value) / max(1.0, abs(p.value))


def _word_checks(group: GroupRep, d: GraftedDomain) -> List[ConditionCheck]:
    checks = []
    maps = [(dom.owner, w, f) for dom in d.vertex_domains for w, f in zip(dom.words, dom.pairings)]
    maps += [(g.edge, p.word, p.map) for g in d.grafts for p in g.pairings]
    for owner, w, f in maps:
        ok = group.evaluate_word(w).is_close(f, MAP_TOLERANCE)
        checks.append(ConditionCheck("words", f"{owner}: {w}", ok, 0.0))
    return checks


def certify_domain(group: GroupRep, d: GraftedDomain, eps: Optional[float] = None) -> CertificateReport:
    """
    Check the fundamental-domain conditions of a grafted domain.

    1a: paired circles of each hexagon are disjoint or tangent, and the
        circles incident to a graft do not cross.
    1b: each cutting line meets its end circles at an angle strictly
        inside (ANGLE_EPSILON, pi/2 - ANGLE_EPSILON) and its sub-arcs hit
        no other circle.
    2a: the clipped hexagons of different vertices do not overlap.
    Side-pairing closure and the pairing words are checked alongside.

    Returns:
        CertificateReport; never raises for a failed condition
    """
    eps = resolve_eps(eps)
    logger.info(f"[DOMAIN] [STEP 1/3] Circle separation and cutting angles")
    checks = _disjoint_pairs(d, eps) + _angle_checks(d, eps)

    logger.info(f"[DOMAIN] [STEP 2/3] Overlap of {len(d.vertex_domains)} local hexagons")
    polygons: Dict[str, SidePairedPolygon] = {}
    for dom in d.vertex_domains:
        poly = dom.polygon(clip=True)
        try:
            assemble_boundary(poly, eps)
            polygons[dom.owner] = poly
        except (DisconnectedArrangement, KleinianError) as e:
            checks.append(ConditionCheck("2a", dom.owner, False, 0.0, f"boundary: {e}"))
    names = list(polygons)
    tasks = [
        {"first": a, "second": b, "arcs_a": polygons[a].assembled_boundary,
         "arcs_b": polygons[b].assembled_boundary, "eps": eps}
        for i, a in enumerate(names) for b in names[i + 1:]
    ]
    with BatchProcessor() as processor:
        checks.extend(processor.map(_overlap_check, tasks))

    logger.info(f"[DOMAIN] [STEP 3/3] Side-pairing closure and pairing words")
    checks.extend(_closure_checks(d, polygons, eps))
    checks.extend(_word_checks(group, d))

    report = CertificateReport(checks, eps)
    if report.passed:
        logger.info(f"[DOMAIN] ✓ Certificate passes ({len(checks)} checks)")
    else:
        failed = [c for c, ok in report.verdicts.items() if not ok]
        logger.info(f"[DOMAIN] ✗ Certificate fails: {', '.join(failed)}")
    return report
