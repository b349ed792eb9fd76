"""
Fixture Registry
Built-in groups, circle chains and trace systems from the worked
examples: the Apollonian Riley group, the theta = pi/3 compression body,
the genus-2 Schottky trace system, a real pants group and the explicit
hexagon pants family. Fixtures are built on first use and cached.
"""
import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

import config
from services.chain_service import BoundaryWord, ChainEdge, CircleChainSpec, Marker, PeripheralSpec
from services.group_service import (
    GroupRep,
    build_compression_body,
    build_explicit,
    build_rank2_trace,
    build_riley,
)
from services.trace_solver import TraceSystem
from utils.circlespace import CircleP3, from_center_radius
from utils.errors import UnknownFixture
from utils.mobius import isometric_circle
from utils.words import Word

logger = logging.getLogger(__name__)

SCHOTTKY_85_SEED = {
    "tX": 0.7607 + 0.8579j,
    "tY": -0.7610 - 0.8579j,
    "tXY": 2.3146 - 2.6103j,
}
SCHOTTKY_85_WORDS = ("X^-1 Y^2", "X^-1 Y^3 X^-2", "Y X^-2")


@dataclass
class Fixture:
    """
    A named example.

    Attributes:
        name: Registry key
        description: One line for the `fixtures` listing
        group: The representation
        chain: Circle chain at the group, if the example has one
        system: Trace system and its seed, for solver fixtures
        seeds: Seed circles for orbit renders
        viewport: Default render viewport (cx, cy, half-width)
        x: Base pencil coordinate for domain construction
    """
    name: str
    description: str
    group: GroupRep
    chain: Optional[CircleChainSpec] = None
    system: Optional[Tuple[TraceSystem, Dict[str, complex]]] = None
    seeds: List[CircleP3] = field(default_factory=list)
    viewport: Tuple[float, float, float] = config.DEFAULT_VIEWPORT
    x: float = 1.0

    def to_json(self) -> dict:
        data = {
            "name": self.name,
            "description": self.description,
            "group": self.group.to_json(),
            "chain": self.chain.to_json() if self.chain is not None else None,
            "seeds": [c.to_json() for c in self.seeds],
            "viewport": list(self.viewport),
            "x": self.x,
        }
        if self.system is not None:
            system, seed = self.system
            data["system"] = {
                "constraints": [{"word": str(w), "target": [t.real, t.imag]} for w, t in system.constraints],
                "free": list(system.free_params),
                "seed": {k: [v.real, v.imag] for k, v in seed.items()},
            }
        return data


def _words(*texts: str) -> List[Word]:
    return [Word.parse(t) for t in texts]


def _vertex(name: str, generators: List[str], boundary: List[str], kind: str, fix: str) -> PeripheralSpec:
    return PeripheralSpec(
        name,
        _words(*generators),
        [Marker(w, fix) for w in _words(*boundary)],
        [BoundaryWord(w, kind) for w in _words(*boundary)],
    )


def riley_chain() -> CircleChainSpec:
    """
    Two triangle-group vertices joined along the commutator, each with a
    loop edge: Y carries the X-cusp vertex to itself, X the Y-cusp vertex.
    Boundary words are ordered so that their product in reverse is trivial.
    """
    left = _vertex("L", ["X^-1", "Y^-1 X Y"], ["Y^-1 X Y", "X^-1", "Y^-1 X^-1 Y X"], "puncture", "parabolic")
    right = _vertex("R", ["X^-1 Y^-1 X", "Y"], ["Y", "X^-1 Y^-1 X", "Y^-1 X^-1 Y X"], "puncture", "parabolic")
    edges = [
        ChainEdge("L", "R", Word.parse("X^-1 Y^-1 X Y")),
        ChainEdge("L", "L", Word.parse("X"), "hnn", stable=Word.parse("Y"), target_leaf=Word.parse("Y^-1 X Y")),
        ChainEdge("R", "R", Word.parse("Y"), "hnn", stable=Word.parse("X"), target_leaf=Word.parse("X^-1 Y X")),
    ]
    return CircleChainSpec([left, right], edges)


def pants_hexagon_group(a: float, b: float = 3.0) -> GroupRep:
    """
    Real pants group with A = [[-a, -ab-1], [1, b]] and B = [[b, -ab-1], [1, -a]];
    the third boundary element is A^-1 B^-1 = [[-(2ab+1), 2b(ab+1)], [2a, -(2ab+1)]].
    """
    c = -a * b - 1
    return build_explicit({
        "A": np.array([[-a, c], [1, b]], dtype=complex),
        "B": np.array([[b, c], [1, -a]], dtype=complex),
    })


def pants_chain(edges: Optional[List[ChainEdge]] = None) -> CircleChainSpec:
    vertex = _vertex("P", ["A", "B"], ["A", "B", "A^-1 B^-1"], "hyperbolic", "attracting")
    return CircleChainSpec([vertex], list(edges or []))


def _riley_apollonian() -> Fixture:
    group = build_riley(2j)
    center, radius = isometric_circle(group.generators["Y"])
    return Fixture(
        "riley-apollonian",
        "Riley group rho = 2i on the Riley slice boundary; parabolic commutator",
        group,
        riley_chain(),
        seeds=[from_center_radius(center, radius)],
        viewport=(-0.5, 0.25, 1.0),
        x=0.125,
    )


def _compression_theta3() -> Fixture:
    s3 = math.sqrt(3.0)
    group = build_compression_body(3 + 1j * s3, 3 - 1j * s3, 1)
    vertex = PeripheralSpec(
        "Pi",
        _words("M P^-1 M Q^-1", "M"),
        [Marker(w, "parabolic") for w in _words("M", "M P^-1 M Q^-1", "M^2 P^-1 M Q^-1 M^-1")],
        [BoundaryWord(w, "puncture") for w in _words("M", "M P^-1 M Q^-1")],
    )
    m_center, m_radius = isometric_circle(group.generators["M"])
    return Fixture(
        "compression-theta3",
        "(1;2)-compression body, theta = pi/3: F-peripheral but not maximal",
        group,
        CircleChainSpec([vertex], []),
        seeds=[from_center_radius(m_center, m_radius)],
        viewport=(1.5, 0.0, 3.0),
    )


def _schottky_85() -> Fixture:
    group = build_rank2_trace(SCHOTTKY_85_SEED["tX"], SCHOTTKY_85_SEED["tY"], SCHOTTKY_85_SEED["tXY"])
    system = TraceSystem(group, [(w, 4 + 0j) for w in _words(*SCHOTTKY_85_WORDS)], ["tX", "tY", "tXY"])
    seeds = [from_center_radius(*isometric_circle(group.generators[name])) for name in ("X", "Y")]
    return Fixture(
        "schottky-85",
        "Genus-2 trace system tr^2 U1 = tr^2 U2 = tr^2 U3 = 4 from a 4-decimal seed",
        group,
        system=(system, dict(SCHOTTKY_85_SEED)),
        seeds=seeds,
        viewport=(0.0, 0.0, 3.0),
    )


def _pants_real() -> Fixture:
    group = build_rank2_trace(3, 3, -3)
    vertex = _vertex("P", ["X", "Y"], ["X", "Y", "X^-1 Y^-1"], "hyperbolic", "attracting")
    return Fixture(
        "pants-real",
        "Pants group with boundary traces (3, 3, -3) on the real locus",
        group,
        CircleChainSpec([vertex], []),
        seeds=[from_center_radius(*isometric_circle(group.generators["X"]))],
        viewport=(0.0, 0.0, 4.0),
    )


def _pants_hexagon() -> Fixture:
    group = pants_hexagon_group(0.5)
    seeds = [from_center_radius(*isometric_circle(group.generators[name])) for name in ("A", "B")]
    return Fixture(
        "pants-hexagon",
        "Explicit real pants family at a = 0.5, b = 3 with a Ford hexagon domain",
        group,
        pants_chain(),
        seeds=seeds,
        viewport=(-1.5, 0.0, 3.0),
    )


FIXTURE_BUILDERS: Dict[str, Callable[[], Fixture]] = {
    "riley-apollonian": _riley_apollonian,
    "compression-theta3": _compression_theta3,
    "schottky-85": _schottky_85,
    "pants-real": _pants_real,
    "pants-hexagon": _pants_hexagon,
}


class FixtureRegistry:
    """
    Singleton cache of built fixtures.
    Each fixture is built once, under a per-name lock.
    """

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super(FixtureRegistry, cls).__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self.fixtures: Dict[str, Fixture] = {}
        self.building: Dict[str, threading.Lock] = {name: threading.Lock() for name in FIXTURE_BUILDERS}
        self._initialized = True
        logger.debug("[FIXTURES] Registry initialized")

    def names(self) -> List[str]:
        return list(FIXTURE_BUILDERS)

    def get(self, name: str) -> Fixture:
        """
        The named fixture, building it on first use.

        Raises:
            UnknownFixture: If no fixture has that name
        """
        if name not in FIXTURE_BUILDERS:
            raise UnknownFixture(f"Unknown fixture '{name}', have {', '.join(FIXTURE_BUILDERS)}")
        if name in self.fixtures:
            return self.fixtures[name]
        with self.building[name]:
            if name not in self.fixtures:
                logger.info(f"[FIXTURES] Building '{name}'")
                self.fixtures[name] = FIXTURE_BUILDERS[name]()
        return self.fixtures[name]

    def clear(self) -> None:
        self.fixtures.clear()


def get_fixture_registry() -> FixtureRegistry:
    return FixtureRegistry()
