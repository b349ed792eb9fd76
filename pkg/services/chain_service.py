"""
Chain Service
Peripheral discs of Fuchsian subgroups, incidence relations between discs,
and the checks that a circle chain sits on the pleating variety: reality of
boundary traces, incident discs meeting, non-incident discs disjoint.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

import config
from config import resolve_eps
from services.group_service import GroupRep
from utils.batch_processor import BatchProcessor
from utils.circlespace import (
    CircleKind,
    CircleP3,
    circle_through_points,
    minkowski,
    residual_under,
    transport_disc,
)
from utils.errors import (
    ChainInvalid,
    CoincidentPoints,
    DegenerateInput,
    DiscComputationFailed,
    GeometryError,
    KleinianError,
    MarkersDegenerate,
)
from utils.mobius import (
    ComplexPoint,
    MobiusMap,
    TransformKind,
    classify,
    fixed_points,
    inverse,
)
from utils.words import Word, enumerate_reduced_words

logger = logging.getLogger(__name__)

FIX_SELECTORS = ("attracting", "repelling", "parabolic")
BOUNDARY_KINDS = ("hyperbolic", "puncture")
IDENTITY_WORD = Word()
EDGE_KINDS = ("tree", "hnn")


# ---------------------------------------------------------------------------
# Chain specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Marker:
    word: Word
    fix: str

    def __post_init__(self):
        if self.fix not in FIX_SELECTORS:
            raise GeometryError(f"Marker selector must be one of {FIX_SELECTORS}, got '{self.fix}'")
        if self.word.is_identity():
            raise GeometryError("Marker words must be nontrivial")


@dataclass(frozen=True)
class BoundaryWord:
    word: Word
    kind: str

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise GeometryError(f"Boundary kind must be one of {BOUNDARY_KINDS}, got '{self.kind}'")


@dataclass
class PeripheralSpec:
    """
    A vertex of a circle chain: a Fuchsian subgroup given by words.

    Attributes:
        name: Vertex name
        generator_words: Generators of the subgroup
        markers: Three (word, fixed-point selector) pairs whose fixed points
            span the peripheral circle
        boundary_words: Primitive boundary elements in cyclic order; for
            hexagon construction their product in reverse order is trivial
    """
    name: str
    generator_words: List[Word]
    markers: List[Marker]
    boundary_words: List[BoundaryWord] = field(default_factory=list)

    def __post_init__(self):
        if len(self.markers) != 3:
            raise GeometryError(f"Vertex {self.name} needs exactly 3 markers, got {len(self.markers)}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generators": [str(w) for w in self.generator_words],
            "markers": [{"word": str(m.word), "fix": m.fix} for m in self.markers],
            "boundary": [{"word": str(b.word), "kind": b.kind} for b in self.boundary_words],
        }

    @classmethod
    def from_json(cls, data: dict) -> 'PeripheralSpec':
        try:
            return cls(
                name=str(data["name"]),
                generator_words=[Word.parse(w) for w in data.get("generators", [])],
                markers=[Marker(Word.parse(m["word"]), m.get("fix", "parabolic")) for m in data["markers"]],
                boundary_words=[
                    BoundaryWord(Word.parse(b["word"]), b.get("kind", "hyperbolic"))
                    for b in data.get("boundary", [])
                ],
            )
        except (KeyError, TypeError) as e:
            raise GeometryError(f"Malformed vertex entry: {e}") from e


@dataclass
class ChainEdge:
    """
    An edge of a circle chain.

    `leaf` is read in the source vertex, `target_leaf` (default: leaf) in
    the target vertex. Tree edges require the two to be equal; other edges
    require conj * target_leaf * conj^-1 = leaf^+-1 where conj is `gamma`
    if given, else `stable`.
    """
    source: str
    target: str
    leaf: Word
    kind: str = "tree"
    stable: Optional[Word] = None
    gamma: Optional[Word] = None
    target_leaf: Optional[Word] = None

    def __post_init__(self):
        if self.kind not in EDGE_KINDS:
            raise GeometryError(f"Edge kind must be one of {EDGE_KINDS}, got '{self.kind}'")
        if self.kind == "hnn" and self.stable is None:
            raise GeometryError(f"hnn edge {self.source}->{self.target} needs a stable word")

    @property
    def far_leaf(self) -> Word:
        return self.target_leaf if self.target_leaf is not None else self.leaf

    @property
    def conjugator(self) -> Optional[Word]:
        if self.kind == "tree":
            return None
        return self.gamma if self.gamma is not None else self.stable

    @property
    def label(self) -> str:
        return f"{self.source}->{self.target} [{self.leaf}]"

    def to_json(self) -> dict:
        data = {"from": self.source, "to": self.target, "leaf": str(self.leaf), "kind": self.kind}
        if self.stable is not None:
            data["stable"] = str(self.stable)
        if self.gamma is not None:
            data["gamma"] = str(self.gamma)
        if self.target_leaf is not None:
            data["target_leaf"] = str(self.target_leaf)
        return data

    @classmethod
    def from_json(cls, data: dict) -> 'ChainEdge':
        def optional(key):
            return Word.parse(data[key]) if data.get(key) is not None else None
        try:
            return cls(
                source=str(data["from"]),
                target=str(data["to"]),
                leaf=Word.parse(data["leaf"]),
                kind=data.get("kind", "tree"),
                stable=optional("stable"),
                gamma=optional("gamma"),
                target_leaf=optional("target_leaf"),
            )
        except (KeyError, TypeError) as e:
            raise GeometryError(f"Malformed edge entry: {e}") from e


@dataclass
class CircleChainSpec:
    vertices: List[PeripheralSpec]
    edges: List[ChainEdge]

    def vertex(self, name: str) -> PeripheralSpec:
        for v in self.vertices:
            if v.name == name:
                return v
        raise GeometryError(f"Unknown vertex '{name}'")

    @property
    def tree_edges(self) -> List[ChainEdge]:
        return [e for e in self.edges if e.kind == "tree"]

    def to_json(self) -> dict:
        return {
            "vertices": [v.to_json() for v in self.vertices],
            "edges": [e.to_json() for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> 'CircleChainSpec':
        if not isinstance(data, dict) or "vertices" not in data:
            raise GeometryError("Chain must be an object with 'vertices' and 'edges'")
        return cls(
            [PeripheralSpec.from_json(v) for v in data["vertices"]],
            [ChainEdge.from_json(e) for e in data.get("edges", [])],
        )


# ---------------------------------------------------------------------------
# Discs
# ---------------------------------------------------------------------------

def _marker_point(group: GroupRep, marker: Marker, eps: float) -> ComplexPoint:
    g = group.evaluate_word(marker.word)
    kind = classify(g, eps).tag
    if kind is TransformKind.IDENTITY:
        raise MarkersDegenerate(f"Marker word '{marker.word}' evaluates to the identity")
    pair = fixed_points(g, eps)
    if marker.fix == "repelling":
        return pair.repelling
    # 'parabolic' on a loxodromic element (off the pleating variety) reads the attracting point
    return pair.attracting


def _vote_orientation(group: GroupRep, disc: CircleP3, eps: float) -> CircleP3:
    """
    Orient the disc so that fixed points of short words of G lie outside it.
    Without votes the normalized representative is kept.
    """
    votes = 0
    for w in enumerate_reduced_words(group.names, 2)[1:]:
        g = group.evaluate_word(w)
        if classify(g, eps).tag in (TransformKind.IDENTITY, TransformKind.ELLIPTIC):
            continue
        pair = fixed_points(g, eps)
        for p in {pair.attracting, pair.repelling}:
            value = disc.quadric_value(p)
            if p.infinite:
                scale = disc.norm()
            else:
                scale = disc.norm() * (1.0 + abs(p.value) ** 2)
            if abs(value) > 1e-6 * scale:
                votes += 1 if value > 0 else -1
    if votes < 0:
        return disc.scaled(-1.0)
    return disc


def peripheral_disc(group: GroupRep, spec: PeripheralSpec, eps: Optional[float] = None) -> CircleP3:
    """
    The oriented peripheral disc {quadric < 0} through the three marker
    fixed points.

    Raises:
        MarkersDegenerate: If two marker points coincide (the pair is named)
    """
    eps = resolve_eps(eps)
    points = [_marker_point(group, m, eps) for m in spec.markers]
    for i in range(3):
        for j in range(i + 1, 3):
            if points[i].is_close(points[j], max(eps, 1e-9)):
                raise MarkersDegenerate(
                    f"Vertex {spec.name}: markers {i + 1} ('{spec.markers[i].word}') and "
                    f"{j + 1} ('{spec.markers[j].word}') share the fixed point {points[i]}"
                )
    try:
        disc = circle_through_points(*points, eps=eps)
    except CoincidentPoints as e:
        raise MarkersDegenerate(f"Vertex {spec.name}: {e}") from e
    return _vote_orientation(group, disc, eps)


def preserves_circle(
    group: GroupRep,
    words: List[Word],
    c: CircleP3,
    eps: Optional[float] = None
) -> bool:
    """True iff every word maps c onto itself within eps."""
    eps = resolve_eps(eps)
    for w in words:
        residual = residual_under(group.evaluate_word(w), c, eps)
        if residual > eps:
            logger.debug(f"[CHAIN CHECK] word '{w}' moves {c} (residual {residual:.3e})")
            return False
    return True


class Relation(Enum):
    DISJOINT = "disjoint"
    TANGENT = "tangent"
    INTERSECTING = "intersecting"
    NESTED = "nested"
    COINCIDENT = "coincident"


@dataclass(frozen=True)
class DiscRelation:
    """
    Relation of two discs. `ratio` is <c1,c2>/sqrt(Q1 Q2); `margin` is the
    distance of |ratio| from the tangency value 1.
    """
    relation: Relation
    angle: Optional[float] = None
    ratio: float = 0.0

    @property
    def margin(self) -> float:
        return abs(abs(self.ratio) - 1.0)

    def __str__(self) -> str:
        if self.relation is Relation.INTERSECTING:
            return f"intersecting({self.angle:.6g})"
        return self.relation.value


def disc_relation(
    c1: CircleP3,
    c2: CircleP3,
    oriented: bool = False,
    eps: Optional[float] = None
) -> DiscRelation:
    """
    Incidence relation of two discs.

    Unoriented (default): each circle bounds its finite disc (a line never
    nests). Oriented: each argument is the disc {quadric < 0} of the given
    representative, so ratio > 1 means nested and ratio < -1 disjoint.

    Raises:
        DegenerateInput: On point-circles or imaginary circles
    """
    eps = resolve_eps(eps)
    for c in (c1, c2):
        if c.kind(eps) not in (CircleKind.REAL_CIRCLE, CircleKind.LINE):
            raise DegenerateInput(f"{c} is not a real circle or line")
    u = c1.vector / c1.norm()
    v = c2.vector / c2.norm()
    if c1.is_proportional(c2, eps):
        return DiscRelation(Relation.COINCIDENT, ratio=1.0 if float(u @ v) > 0 else -1.0)
    if not oriented:
        u = -u if u[0] < 0 else u
        v = -v if v[0] < 0 else v
    p, q = CircleP3.from_vector(u), CircleP3.from_vector(v)
    ratio = minkowski(p, q) / math.sqrt(p.quadratic() * q.quadratic())
    if abs(abs(ratio) - 1.0) <= eps:
        return DiscRelation(Relation.TANGENT, ratio=ratio)
    if abs(ratio) < 1.0:
        return DiscRelation(Relation.INTERSECTING, math.acos(ratio), ratio)
    is_line = abs(u[0]) <= eps or abs(v[0]) <= eps
    if ratio > 1.0 and (oriented or not is_line):
        return DiscRelation(Relation.NESTED, ratio=ratio)
    return DiscRelation(Relation.DISJOINT, ratio=ratio)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class TraceCheck:
    word: str
    kind: str
    trace_squared: complex
    passed: bool
    reason: str = ""


@dataclass
class RealnessReport:
    vertex: str
    checks: List[TraceCheck]
    passed: bool

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "passed": self.passed,
            "checks": [
                {"word": c.word, "kind": c.kind, "tr2": [c.trace_squared.real, c.trace_squared.imag],
                 "passed": c.passed, "reason": c.reason}
                for c in self.checks
            ],
        }


def check_realness(group: GroupRep, spec: PeripheralSpec, eps: Optional[float] = None) -> RealnessReport:
    """
    Per boundary word: tr^2 real, > 4 for hyperbolic boundary, = 4 for
    punctures. Tolerances are relative to max(1, |tr^2|).
    """
    eps = resolve_eps(eps)
    checks = []
    for b in spec.boundary_words:
        t2 = group.trace_squared(b.word)
        scale = max(1.0, abs(t2))
        reason = ""
        if abs(t2.imag) > eps * scale:
            reason = f"Im(tr^2) = {t2.imag:.3e}"
        elif b.kind == "hyperbolic" and not t2.real > 4 + eps * scale:
            reason = f"tr^2 = {t2.real:.9g} is not > 4"
        elif b.kind == "puncture" and abs(t2.real - 4) > eps * scale:
            reason = f"tr^2 = {t2.real:.9g} is not 4"
        checks.append(TraceCheck(str(b.word), b.kind, t2, not reason, reason))
    return RealnessReport(spec.name, checks, all(c.passed for c in checks))


# Sign patterns on (tr X, tr Y, tr XY) with their bounds
GENUS_TWO_SETS: List[Tuple[str, Tuple[int, int, int], float]] = [
    ("(-trX, -trY, -trXY) > -2", (-1, -1, -1), -2.0),
    ("(-trX, trY, trXY) > 2", (-1, 1, 1), 2.0),
    ("(trX, -trY, trXY) > 2", (1, -1, 1), 2.0),
    ("(trX, trY, -trXY) > 2", (1, 1, -1), 2.0),
]


def genus_two_reality_sets(
    group: GroupRep,
    words: Tuple[str, str, str] = ("X", "Y", "X Y"),
    eps: Optional[float] = None
) -> List[str]:
    """
    Names of the sign-pattern sets containing the signed traces of
    the three words; empty when a trace is not real. The first set is
    evaluated as stated even though its bound differs from the
    other three.
    """
    eps = resolve_eps(eps)
    traces = [group.word_trace(w) for w in words]
    if any(abs(t.imag) > eps * max(1.0, abs(t)) for t in traces):
        return []
    matched = []
    for name, signs, bound in GENUS_TWO_SETS:
        if all(s * t.real > bound for s, t in zip(signs, traces)):
            matched.append(name)
    return matched


@dataclass
class PairCheck:
    first: str
    second: str
    relation: str
    passed: bool
    margin: float = 0.0


@dataclass
class CombinatoricsReport:
    passed: bool
    forest: bool
    connected: bool
    edge_checks: List[PairCheck]
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "forest": self.forest,
            "connected": self.connected,
            "edges": [c.__dict__ for c in self.edge_checks],
            "warnings": self.warnings,
            "errors": self.errors,
        }


@dataclass
class PleatingReport:
    """Verdicts of conditions (1) realness, (2) incidence, (3) disjointness."""
    passed: bool
    realness: List[RealnessReport]
    incidences: List[PairCheck]
    separations: List[PairCheck]
    discs: Dict[str, CircleP3]
    truncation: int
    tolerance: float

    @property
    def condition_verdicts(self) -> Dict[str, bool]:
        return {
            "realness": all(r.passed for r in self.realness),
            "incidence": all(c.passed for c in self.incidences),
            "disjointness": all(c.passed for c in self.separations),
        }

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "conditions": self.condition_verdicts,
            "truncation_L": self.truncation,
            "tolerance": self.tolerance,
            "discs": {name: c.to_json() for name, c in self.discs.items()},
            "realness": [r.to_json() for r in self.realness],
            "incidences": [c.__dict__ for c in self.incidences],
            "separations": [c.__dict__ for c in self.separations if not c.passed],
            "separations_checked": len(self.separations),
        }


# ---------------------------------------------------------------------------
# Combinatorics
# ---------------------------------------------------------------------------

def _find(parent: Dict[str, str], x: str) -> str:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def validate_chain_combinatorics(
    group: GroupRep,
    chain: CircleChainSpec,
    eps: Optional[float] = None
) -> CombinatoricsReport:
    """
    Forest property of the tree edges, equality of tree-edge leaves,
    conjugacy of the other edges' leaves by their conjugator word.
    """
    eps = resolve_eps(eps)
    errors: List[str] = []
    warnings: List[str] = []
    names = [v.name for v in chain.vertices]
    if len(set(names)) != len(names):
        errors.append(f"Duplicate vertex names in {names}")
    for e in chain.edges:
        for end in (e.source, e.target):
            if end not in names:
                errors.append(f"Edge {e.label} references unknown vertex '{end}'")
    if errors:
        return CombinatoricsReport(False, False, False, [], warnings, errors)

    parent = {n: n for n in names}
    forest = True
    for e in chain.tree_edges:
        a, b = _find(parent, e.source), _find(parent, e.target)
        if a == b:
            forest = False
            errors.append(f"Tree edge {e.label} closes a cycle")
        else:
            parent[a] = b
    connected = len({_find(parent, n) for n in names}) == 1

    checks: List[PairCheck] = []
    for e in chain.edges:
        leaf = group.evaluate_word(e.leaf)
        far = group.evaluate_word(e.far_leaf)
        conj_word = e.conjugator
        if conj_word is not None:
            conj = group.evaluate_word(conj_word)
            far = MobiusMap.from_matrix(conj.matrix @ far.matrix @ np.linalg.inv(conj.matrix))
        ok = far.is_close(leaf, eps) or (conj_word is not None and far.is_close(inverse(leaf), eps))
        how = "equal" if conj_word is None else f"conjugate by {conj_word}"
        checks.append(PairCheck(str(e.leaf), str(e.far_leaf), how, ok))
        if not ok:
            errors.append(f"Edge {e.label}: leaf words are not {how}")

    traces = [(e.label, group.trace_squared(e.leaf)) for e in chain.edges]
    for i in range(len(traces)):
        for j in range(i + 1, len(traces)):
            if abs(traces[i][1] - traces[j][1]) <= eps * max(1.0, abs(traces[i][1])):
                warnings.append(
                    f"Leaves of {traces[i][0]} and {traces[j][0]} have equal tr^2; "
                    f"non-conjugacy is not confirmed numerically"
                )
    passed = forest and all(c.passed for c in checks)
    return CombinatoricsReport(passed, forest, connected, checks, warnings, errors)


# ---------------------------------------------------------------------------
# Pleating conditions
# ---------------------------------------------------------------------------

def _quantize(c: CircleP3, grid: float) -> Tuple[int, ...]:
    v = c.vector / c.norm()
    return tuple(int(round(x / grid)) for x in v)


def _relation_check(
    first: str, second: str, c1: CircleP3, c2: CircleP3, allowed: Tuple[Relation, ...], eps: float
) -> PairCheck:
    rel = disc_relation(c1, c2, oriented=True, eps=eps)
    return PairCheck(first, second, str(rel), rel.relation in allowed, rel.margin)


def check_pleating_conditions(
    group: GroupRep,
    chain: CircleChainSpec,
    truncation: int = None,
    eps: Optional[float] = None
) -> PleatingReport:
    """
    Check the chain's pleating-variety conditions at one parameter point.

    Args:
        group: The representation
        chain: Chain specification; it must validate combinatorially
        truncation: Word length L for the disc translates of the disjointness check
        eps: Tolerance

    Returns:
        PleatingReport; the incidence check accepts Tangent as the cusp case,
        translates away from the incident discs must be strictly disjoint

    Raises:
        ChainInvalid: If the chain fails the combinatorial validation
        DiscComputationFailed: If a peripheral disc cannot be computed
    """
    eps = resolve_eps(eps)
    truncation = config.TRUNCATION_L if truncation is None else truncation
    combinatorics = validate_chain_combinatorics(group, chain, eps)
    if not combinatorics.passed:
        raise ChainInvalid(f"Chain fails combinatorics: {'; '.join(combinatorics.errors)}")
    logger.info(f"[CHAIN CHECK] [STEP 1/3] Realness of {len(chain.vertices)} vertices")
    realness = [check_realness(group, v, eps) for v in chain.vertices]

    discs: Dict[str, CircleP3] = {}
    for v in chain.vertices:
        try:
            discs[v.name] = peripheral_disc(group, v, eps)
        except KleinianError as e:
            raise DiscComputationFailed(f"Disc of {v.name}: {e}") from e
        logger.debug(f"[CHAIN CHECK] disc {v.name} = {discs[v.name]}")

    logger.info(f"[CHAIN CHECK] [STEP 2/3] Incidence along {len(chain.edges)} edges")
    incidences: List[PairCheck] = []
    incident: Dict[str, List[CircleP3]] = {v.name: [] for v in chain.vertices}
    for e in chain.edges:
        conj = IDENTITY_WORD if e.conjugator is None else e.conjugator
        g = group.evaluate_word(conj)
        far = transport_disc(g, discs[e.target])
        near = transport_disc(group.evaluate_word(conj.inverse()), discs[e.source])
        incident[e.source].append(far)
        incident[e.target].append(near)
        incidences.append(_relation_check(
            e.source, f"{conj} . {e.target}" if e.conjugator else e.target,
            discs[e.source], far, (Relation.INTERSECTING, Relation.TANGENT), eps,
        ))

    logger.info(f"[CHAIN CHECK] [STEP 3/3] Disjointness of disc translates, L = {truncation}")
    words = enumerate_reduced_words(group.names, truncation)
    translates: Dict[Tuple[int, ...], Tuple[str, CircleP3]] = {}
    for v in chain.vertices:
        for w in words:
            image = transport_disc(group.evaluate_word(w), discs[v.name])
            key = _quantize(image, config.DEDUP_GRID)
            translates.setdefault(key, (f"{w} . {v.name}" if w.letters else v.name, image))

    tasks = []
    for v in chain.vertices:
        own = discs[v.name]
        skip = _incident_orbit(group, v, incident[v.name], truncation, eps)
        for label, image in translates.values():
            if image.is_proportional(own, eps) or any(image.is_proportional(s, 1e-7) for s in skip):
                continue
            tasks.append({"first": v.name, "second": label, "c1": own, "c2": image,
                          "allowed": (Relation.DISJOINT,), "eps": eps})
    with BatchProcessor() as processor:
        separations = processor.map(_relation_check, tasks)

    report = PleatingReport(False, realness, incidences, separations, discs, truncation, eps)
    report.passed = all(report.condition_verdicts.values())
    failed = [k for k, ok in report.condition_verdicts.items() if not ok]
    if report.passed:
        logger.info(f"[CHAIN CHECK] ✓ All conditions pass ({len(separations)} translate pairs checked)")
    else:
        logger.info(f"[CHAIN CHECK] ✗ Failed conditions: {', '.join(failed)}")
    return report


def _incident_orbit(
    group: GroupRep,
    vertex: PeripheralSpec,
    incident: List[CircleP3],
    truncation: int,
    eps: float
) -> List[CircleP3]:
    # incident discs moved by short words of the vertex group stay incident
    names = [f"g{i}" for i in range(len(vertex.generator_words))]
    maps = {n: group.evaluate_lift(w) for n, w in zip(names, vertex.generator_words)}
    orbit = []
    for w in enumerate_reduced_words(names, truncation):
        m = np.eye(2, dtype=complex)
        for name, e in w.letters:
            base = maps[name] if e > 0 else np.linalg.inv(maps[name])
            m = m @ base
        g = MobiusMap.from_matrix(m)
        orbit.extend(transport_disc(g, d) for d in incident)
    return orbit


@dataclass
class SweepReport:
    reports: List[PleatingReport]
    first_failure: Optional[int]

    @property
    def passed(self) -> bool:
        return self.first_failure is None


def sweep_pleating(
    group: GroupRep,
    chain: CircleChainSpec,
    params_path: List[Dict[str, complex]],
    truncation: int = None,
    eps: Optional[float] = None
) -> SweepReport:
    """
    Run the pleating checks along a sampled parameter path starting from a
    basepoint asserted to lie on the variety; membership claims are relative
    to the path. Stops at the first failing sample.
    """
    reports = []
    for i, params in enumerate(params_path):
        try:
            report = check_pleating_conditions(group.with_params(**params), chain, truncation, eps)
        except DiscComputationFailed as e:
            logger.info(f"[CHAIN CHECK] ✗ Sample {i}: {e}")
            return SweepReport(reports, i)
        reports.append(report)
        if not report.passed:
            return SweepReport(reports, i)
    return SweepReport(reports, None)
