"""
Render Service
Finite orbit approximations of limit sets and deterministic figure
emission: scenes of circles, arcs and points written as SVG 1.1 or as
binary PPM (P6).

Identical scenes give identical bytes: coordinates are printed with a
fixed number of significant digits and the rasterizer has no
anti-aliasing.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

import config
from config import resolve_eps
from services.group_service import GroupRep
from services.output_service import OutputService
from services.polygon_service import Arc
from utils.circlespace import CircleKind, CircleP3, center, mobius_apply, rad2
from utils.errors import BudgetExceeded, GeometryError, KleinianError
from utils.mobius import IDENTITY, INFINITY, ComplexPoint, MobiusMap, compose
from utils.words import Word

logger = logging.getLogger(__name__)

SVG_PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN"
"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">
<svg width="%(size)d" height="%(size)d" viewBox="0 0 %(size)d %(size)d" version="1.1"
    xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="%(size)d" height="%(size)d" style="fill:#ffffff"/>
"""

SVG_POSTAMBLE = """\
</svg>
"""

POINT_RADIUS = 1.5  # pixels
NAMED_COLORS = {
    "black": "#000000",
    "white": "#ffffff",
    "red": "#cc0000",
    "green": "#008000",
    "blue": "#0000cc",
    "gray": "#808080",
}


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

def _dedup_key(c: CircleP3, grid: float) -> Tuple[int, ...]:
    return tuple(int(round(x / grid)) for x in c.normalized().vector)


def orbit_circles(
    group: GroupRep,
    seeds: List[CircleP3],
    max_len: int,
    eps: Optional[float] = None,
    cap: Optional[int] = None
) -> List[CircleP3]:
    """
    Images of the seed circles under every reduced word of length <= max_len.

    Words are enumerated breadth first over the free-reduction tree
    (relators are ignored, so non-free groups are over-drawn). Images are
    deduplicated by their normalized coordinates quantized to DEDUP_GRID;
    the first occurrence in enumeration order is kept.

    Args:
        group: The representation
        seeds: Circles to move around
        max_len: Maximum word length, >= 0
        eps: Tolerance for mapping circles
        cap: Maximum number of circles (config.ORBIT_CAP by default)

    Returns:
        The seeds followed by their new images, level by level

    Raises:
        BudgetExceeded: When the number of circles passes the cap
    """
    eps = resolve_eps(eps)
    cap = config.ORBIT_CAP if cap is None else cap
    if max_len < 0:
        raise GeometryError(f"max_len must be >= 0, got {max_len}")

    seen: Dict[Tuple[int, ...], CircleP3] = {}
    circles: List[CircleP3] = []

    def keep(c: CircleP3) -> None:
        key = _dedup_key(c, config.DEDUP_GRID)
        if key in seen:
            return
        seen[key] = c
        circles.append(c)
        if len(circles) > cap:
            raise BudgetExceeded(f"Orbit passed {cap} circles at word length <= {max_len}")

    for s in seeds:
        keep(s.normalized())

    letters = [(name, s) for name in group.names for s in (1, -1)]
    maps = {(name, s): group.evaluate_word(Word.generator(name, s)) for name, s in letters}
    frontier: List[Tuple[MobiusMap, Optional[Tuple[str, int]]]] = [(IDENTITY, None)]
    for length in range(1, max_len + 1):
        next_frontier = []
        for g, last in frontier:
            for letter in letters:
                if last is not None and last[0] == letter[0] and last[1] == -letter[1]:
                    continue
                next_frontier.append((compose(g, maps[letter]), letter))
        before = len(circles)
        for g, _ in next_frontier:
            for s in seeds:
                try:
                    keep(mobius_apply(g, s, eps))
                except BudgetExceeded:
                    raise
                except KleinianError as e:
                    logger.debug(f"[RENDER] Skipped a degenerate image: {e}")
        logger.debug(f"[RENDER] Length {length}: {len(next_frontier)} words, {len(circles) - before} new circles")
        frontier = next_frontier
    logger.info(f"[RENDER] ✓ Orbit of {len(seeds)} seeds to length {max_len}: {len(circles)} circles")
    return circles


# ---------------------------------------------------------------------------
# Scenes
# ---------------------------------------------------------------------------

@dataclass
class Layer:
    """
    One drawing layer. Exactly the non-empty lists are drawn, circles
    first, then arcs, then points.

    Attributes:
        stroke: '#rrggbb', a named color or 'none'
        fill: Fill for circles and points; 'none' for outlines only
        width: Stroke width in pixels
    """
    circles: List[CircleP3] = field(default_factory=list)
    arcs: List[Arc] = field(default_factory=list)
    points: List[ComplexPoint] = field(default_factory=list)
    stroke: str = "black"
    fill: str = "none"
    width: float = 1.0

    def to_json(self) -> dict:
        return {
            "circles": [c.to_json() for c in self.circles],
            "arcs": [a.to_json() for a in self.arcs],
            "points": [p.to_json() for p in self.points],
            "style": {"stroke": self.stroke, "fill": self.fill, "width": self.width},
        }

    @classmethod
    def from_json(cls, data: dict) -> 'Layer':
        style = data.get("style", {})
        return cls(
            [CircleP3.from_json(c) for c in data.get("circles", [])],
            [Arc.from_json(a) for a in data.get("arcs", [])],
            [ComplexPoint.from_json(p) for p in data.get("points", [])],
            str(style.get("stroke", "black")),
            str(style.get("fill", "none")),
            float(style.get("width", 1.0)),
        )


@dataclass
class Scene:
    """Ordered layers (later layers on top) and a square viewport."""
    layers: List[Layer] = field(default_factory=list)
    viewport: Tuple[float, float, float] = config.DEFAULT_VIEWPORT

    def __post_init__(self):
        cx, cy, hw = (float(v) for v in self.viewport)
        if not (hw > 0 and math.isfinite(hw)):
            raise GeometryError(f"Viewport half-width must be positive, got {hw}")
        self.viewport = (cx, cy, hw)

    def to_json(self) -> dict:
        return {"viewport": list(self.viewport), "layers": [layer.to_json() for layer in self.layers]}

    @classmethod
    def from_json(cls, data: dict) -> 'Scene':
        try:
            viewport = tuple(float(v) for v in data.get("viewport", config.DEFAULT_VIEWPORT))
            if len(viewport) != 3:
                raise GeometryError(f"Viewport must be [cx, cy, half_width], got {viewport}")
            return cls([Layer.from_json(layer) for layer in data.get("layers", [])], viewport)
        except (TypeError, ValueError, AttributeError) as e:
            raise GeometryError(f"Malformed scene: {e}") from e


def build_scene(
    orbit: Optional[List[CircleP3]] = None,
    discs: Optional[List[CircleP3]] = None,
    arcs: Optional[List[Arc]] = None,
    viewport: Tuple[float, float, float] = config.DEFAULT_VIEWPORT
) -> Scene:
    """Orbit layer, then peripheral discs, then domain arcs on top."""
    layers = []
    if orbit:
        layers.append(Layer(circles=list(orbit), stroke="black", width=0.5))
    if discs:
        layers.append(Layer(circles=list(discs), stroke="blue", width=1.0))
    if arcs:
        layers.append(Layer(arcs=list(arcs), stroke="red", width=1.5))
    return Scene(layers, viewport)


# ---------------------------------------------------------------------------
# Pixel frame
# ---------------------------------------------------------------------------

class _Frame:
    """Linear map from the viewport to pixel coordinates, y pointing down."""

    def __init__(self, viewport: Tuple[float, float, float], pixels: int):
        self.cx, self.cy, self.hw = viewport
        self.pixels = pixels
        self.scale = pixels / (2.0 * self.hw)

    def to_pixel(self, z: complex) -> Tuple[float, float]:
        return (z.real - self.cx + self.hw) * self.scale, (self.cy + self.hw - z.imag) * self.scale

    def reach(self) -> float:
        """A world distance that leaves the viewport from anywhere inside it."""
        return 4.0 * self.hw


def _fmt(x: float) -> str:
    text = f"{x:.{config.SVG_SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def _color(token: str) -> str:
    token = token.strip().lower()
    if token == "none":
        return "none"
    token = NAMED_COLORS.get(token, token)
    if len(token) != 7 or token[0] != "#":
        raise GeometryError(f"Unknown color '{token}'")
    try:
        int(token[1:], 16)
    except ValueError:
        raise GeometryError(f"Unknown color '{token}'") from None
    return token


def _line_pieces(arc: Arc, frame: _Frame) -> List[Tuple[complex, complex]]:
    """Finite segments covering an arc on a line; an arc through infinity gives two rays."""
    if arc.full:
        p = arc.point(0.25).value
        q = arc.point(0.75).value
        u = (q - p) / abs(q - p)
        return [(p - frame.reach() * u - u * abs(p), q + frame.reach() * u + u * abs(q))]
    if arc.start.infinite or arc.end.infinite:
        finite = arc.end if arc.start.infinite else arc.start
        middle = arc.midpoint.value
        u = (middle - finite.value) / abs(middle - finite.value)
        return [(finite.value, finite.value + (frame.reach() + abs(finite.value)) * u)]
    p, q = arc.start.value, arc.end.value
    if not arc.interior_contains(INFINITY):
        return [(p, q)]
    u = (p - q) / abs(p - q)
    far = frame.reach() + abs(p) + abs(q)
    return [(p, p + far * u), (q, q - far * u)]


def _is_line(c: CircleP3) -> bool:
    return c.kind() is CircleKind.LINE


def _line_through(c: CircleP3) -> Tuple[complex, complex]:
    """Foot point closest to the origin and unit direction of a line."""
    n = c.normalized()
    normal = complex(n.a, n.b)
    return -n.h * normal / abs(normal) ** 2, 1j * normal / abs(normal)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

def _style(stroke: str, fill: str, width: float) -> str:
    return f'style="fill:{_color(fill)};stroke:{_color(stroke)};stroke-width:{_fmt(width)}"'


def _svg_circle(c: CircleP3, layer: Layer, frame: _Frame) -> Optional[str]:
    kind = c.kind()
    if kind is CircleKind.LINE:
        foot, direction = _line_through(c)
        a = frame.to_pixel(foot - (frame.reach() + abs(foot)) * direction)
        b = frame.to_pixel(foot + (frame.reach() + abs(foot)) * direction)
        return (f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" y2="{_fmt(b[1])}" '
                f'{_style(layer.stroke, "none", layer.width)}/>')
    if kind is not CircleKind.REAL_CIRCLE:
        return None
    x, y = frame.to_pixel(center(c).value)
    r = math.sqrt(rad2(c)) * frame.scale
    return (f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" '
            f'{_style(layer.stroke, layer.fill, layer.width)}/>')


def _svg_arc(arc: Arc, layer: Layer, frame: _Frame) -> str:
    style = _style(layer.stroke, "none", layer.width)
    if _is_line(arc.support):
        commands = []
        for p, q in _line_pieces(arc, frame):
            a, b = frame.to_pixel(p), frame.to_pixel(q)
            commands.append(f"M {_fmt(a[0])} {_fmt(a[1])} L {_fmt(b[0])} {_fmt(b[1])}")
        return f'<path d="{" ".join(commands)}" {style}/>'
    r = math.sqrt(rad2(arc.support)) * frame.scale
    if arc.full:
        x, y = frame.to_pixel(center(arc.support).value)
        return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" {style}/>'
    a, b = frame.to_pixel(arc.start.value), frame.to_pixel(arc.end.value)
    large = 1 if arc.span > math.pi else 0
    # increasing angle is clockwise on screen once y points down
    sweep = 0 if arc.ccw else 1
    return (f'<path d="M {_fmt(a[0])} {_fmt(a[1])} A {_fmt(r)} {_fmt(r)} 0 {large} {sweep} '
            f'{_fmt(b[0])} {_fmt(b[1])}" {style}/>')


def _svg_point(p: ComplexPoint, layer: Layer, frame: _Frame) -> Optional[str]:
    if p.infinite:
        return None
    x, y = frame.to_pixel(p.value)
    fill = layer.stroke if layer.fill == "none" else layer.fill
    return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(POINT_RADIUS)}" {_style("none", fill, 0.0)}/>'


def render_svg(scene: Scene, pixels: int = config.DEFAULT_PIXELS) -> str:
    """The SVG document of a scene as text."""
    frame = _Frame(scene.viewport, pixels)
    items: List[str] = []
    for layer in scene.layers:
        items.extend(filter(None, (_svg_circle(c, layer, frame) for c in layer.circles)))
        items.extend(_svg_arc(a, layer, frame) for a in layer.arcs)
        items.extend(filter(None, (_svg_point(p, layer, frame) for p in layer.points)))
    body = "".join(item + "\n" for item in items)
    return SVG_PREAMBLE % {"size": pixels} + body + SVG_POSTAMBLE


def emit_svg(scene: Scene, path: str, pixels: int = config.DEFAULT_PIXELS) -> str:
    """
    Write the scene as SVG.

    Returns:
        The path written

    Raises:
        IoFailure: If the file cannot be written
    """
    text = render_svg(scene, pixels)
    written = OutputService().write_text(path, text)
    logger.info(f"[RENDER] ✓ SVG with {len(scene.layers)} layers written to {written}")
    return written


# ---------------------------------------------------------------------------
# PPM
# ---------------------------------------------------------------------------

def _rgb(token: str) -> Optional[np.ndarray]:
    color = _color(token)
    if color == "none":
        return None
    return np.array([int(color[i:i + 2], 16) for i in (1, 3, 5)], dtype=np.uint8)


class _Raster:
    """Pixel buffer with pixel centers at half-integer positions."""

    def __init__(self, frame: _Frame):
        self.frame = frame
        n = frame.pixels
        self.image = np.full((n, n, 3), 255, dtype=np.uint8)

    def _window(self, x0: float, x1: float, y0: float, y1: float):
        n = self.frame.pixels
        j0, j1 = max(0, int(math.floor(x0))), min(n, int(math.ceil(x1)) + 1)
        i0, i1 = max(0, int(math.floor(y0))), min(n, int(math.ceil(y1)) + 1)
        if j0 >= j1 or i0 >= i1:
            return None
        jj, ii = np.meshgrid(np.arange(j0, j1) + 0.5, np.arange(i0, i1) + 0.5)
        return (slice(i0, i1), slice(j0, j1)), jj, ii

    def ring(self, cx: float, cy: float, r: float, half: float, color: np.ndarray, fill: Optional[np.ndarray]):
        window = self._window(cx - r - half, cx + r + half, cy - r - half, cy + r + half)
        if window is None:
            return
        box, jj, ii = window
        d = np.hypot(jj - cx, ii - cy)
        if fill is not None:
            self.image[box][d < r] = fill
        self.image[box][np.abs(d - r) <= half] = color

    def segment(self, a: Tuple[float, float], b: Tuple[float, float], half: float, color: np.ndarray):
        ax, ay = a
        bx, by = b
        # clip to a band around the image so long rays stay cheap
        n = self.frame.pixels
        lo, hi = -2.0 * n, 3.0 * n
        ax, ay, bx, by = (min(max(v, lo), hi) for v in (ax, ay, bx, by))
        window = self._window(min(ax, bx) - half, max(ax, bx) + half, min(ay, by) - half, max(ay, by) + half)
        if window is None:
            return
        box, jj, ii = window
        dx, dy = bx - ax, by - ay
        length2 = dx * dx + dy * dy
        if length2 == 0:
            d = np.hypot(jj - ax, ii - ay)
        else:
            t = np.clip(((jj - ax) * dx + (ii - ay) * dy) / length2, 0.0, 1.0)
            d = np.hypot(jj - (ax + t * dx), ii - (ay + t * dy))
        self.image[box][d <= half] = color


def _half_width(layer: Layer) -> float:
    return max(0.5 * layer.width, 0.75)


def _raster_arc(raster: _Raster, arc: Arc, layer: Layer, color: np.ndarray) -> None:
    frame = raster.frame
    half = _half_width(layer)
    if _is_line(arc.support):
        for p, q in _line_pieces(arc, frame):
            raster.segment(frame.to_pixel(p), frame.to_pixel(q), half, color)
        return
    r = math.sqrt(rad2(arc.support)) * frame.scale
    count = max(config.ARC_SAMPLES, int(math.ceil(arc.span * r)) + 1)
    points = [frame.to_pixel(q.value) for q in arc.sample(count)]
    for a, b in zip(points, points[1:]):
        raster.segment(a, b, half, color)


def render_ppm(scene: Scene, pixels: int = config.DEFAULT_PIXELS) -> bytes:
    """The binary P6 image of a scene, row-major from the top-left pixel."""
    if pixels <= 0:
        raise GeometryError(f"pixels must be positive, got {pixels}")
    frame = _Frame(scene.viewport, pixels)
    raster = _Raster(frame)
    for layer in scene.layers:
        color = _rgb(layer.stroke)
        fill = _rgb(layer.fill)
        half = _half_width(layer)
        for c in layer.circles:
            kind = c.kind()
            if kind is CircleKind.LINE and color is not None:
                foot, u = _line_through(c)
                far = frame.reach() + abs(foot)
                raster.segment(frame.to_pixel(foot - far * u), frame.to_pixel(foot + far * u), half, color)
            elif kind is CircleKind.REAL_CIRCLE:
                x, y = frame.to_pixel(center(c).value)
                r = math.sqrt(rad2(c)) * frame.scale
                if color is not None or fill is not None:
                    raster.ring(x, y, r, half, color if color is not None else fill, fill)
        if color is not None:
            for a in layer.arcs:
                _raster_arc(raster, a, layer, color)
        dot = fill if fill is not None else color
        if dot is not None:
            for p in layer.points:
                if not p.infinite:
                    x, y = frame.to_pixel(p.value)
                    raster.ring(x, y, POINT_RADIUS, 0.0, dot, dot)
    header = f"P6\n{pixels} {pixels}\n255\n".encode("ascii")
    return header + raster.image.tobytes()


def emit_ppm(scene: Scene, path: str, pixels: int = config.DEFAULT_PIXELS) -> str:
    """
    Write the scene as a binary PPM.

    Raises:
        IoFailure: If the file cannot be written
    """
    data = render_ppm(scene, pixels)
    written = OutputService().write_bytes(path, data)
    logger.info(f"[RENDER] ✓ PPM {pixels}x{pixels} written to {written}")
    return written
