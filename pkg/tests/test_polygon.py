import math

import numpy as np
import pytest

from services.polygon_service import (
    Arc,
    PairingEntry,
    SidePairedPolygon,
    angle_sum_at_vertices,
    assemble_boundary,
    check_admissible,
    full_circle,
    loop_angles,
    parameter_of,
    point_at,
    polygon_from_points,
    polygons_intersect,
    region_contains,
    segment,
    total_turning,
    transport_arc,
)
from utils.circlespace import from_center_radius, pencil_of
from utils.errors import AmbiguousRegion, DisconnectedArrangement, GeometryError
from utils.mobius import INFINITY, ComplexPoint, MobiusMap

HYPERBOLIC = MobiusMap.of(2, 3, 1, 2)
UNIT_SQUARE = [0, 1, 1 + 1j, 1j]


def circle(z: complex, r: float):
    return from_center_radius(ComplexPoint.finite(z), r)


def schottky_entry(f2=None, sides=None) -> PairingEntry:
    # HYPERBOLIC carries its isometric circle |z + 2| = 1 onto |z - 2| = 1
    return PairingEntry(pencil_of(HYPERBOLIC), circle(-2, 1), f2 or circle(2, 1), HYPERBOLIC, "A", sides)


def test_line_parameters():
    line = segment(0, 1).support
    assert parameter_of(line, INFINITY) == pytest.approx(math.pi)
    assert point_at(line, math.pi).infinite
    z = point_at(line, 1.0)
    assert abs(z.value.imag) < 1e-12
    assert parameter_of(line, z) == pytest.approx(1.0)


def test_arc_endpoint_must_lie_on_support():
    with pytest.raises(GeometryError):
        Arc(circle(0, 1), ComplexPoint.finite(1), ComplexPoint.finite(2))
    with pytest.raises(GeometryError):
        Arc(circle(0, 1), ComplexPoint.finite(1), INFINITY)


def test_square_region_and_angles():
    square = polygon_from_points(UNIT_SQUARE)
    assert region_contains(square, 0.5 + 0.5j)
    assert region_contains(square, 0.1 + 0.9j)
    assert not region_contains(square, 2 + 2j)
    assert not region_contains(square, -0.3 + 0.5j)
    # points on the boundary are not inside
    assert not region_contains(square, 0.5)
    assert loop_angles(square) == pytest.approx([math.pi / 2] * 4)
    assert total_turning(square) == pytest.approx(2 * math.pi)


def test_full_circle_region():
    unit = [full_circle(circle(0, 1))]
    assert region_contains(unit, 0.2 - 0.3j)
    assert not region_contains(unit, 3)
    assert total_turning(unit) == pytest.approx(2 * math.pi)
    outside = [full_circle(circle(0, 1), inside=False)]
    assert region_contains(outside, 3)
    assert not region_contains(outside, 0.2)


def test_transport_arc_moves_endpoints():
    arc = segment(0, 1)
    moved = transport_arc(MobiusMap.of(1, 1j, 0, 1), arc)
    assert moved.start.value == pytest.approx(1j)
    assert moved.end.value == pytest.approx(1 + 1j)
    assert moved.midpoint.value == pytest.approx(0.5 + 1j)


def test_polygons_intersect():
    square = polygon_from_points(UNIT_SQUARE)
    shifted = polygon_from_points([z + 0.5 + 0.5j for z in UNIT_SQUARE])
    far = polygon_from_points([z + 5 for z in UNIT_SQUARE])
    inner = polygon_from_points([0.25 + 0.25j, 0.75 + 0.25j, 0.75 + 0.75j, 0.25 + 0.75j])
    assert polygons_intersect(square, shifted)
    assert not polygons_intersect(square, far)
    # containment without crossing boundaries
    assert polygons_intersect(square, inner)


def test_polygons_sharing_an_edge_do_not_intersect():
    square = polygon_from_points(UNIT_SQUARE)
    neighbour = polygon_from_points([z + 1 for z in UNIT_SQUARE])
    assert not polygons_intersect(square, neighbour)


def test_schottky_pair_is_admissible():
    assert check_admissible(SidePairedPolygon([schottky_entry()])).passed
    report = check_admissible(SidePairedPolygon([schottky_entry(circle(3, 1))]))
    assert not report.passed
    assert not report.checks[0].maps_f1_to_f2


def test_assemble_two_disjoint_circles():
    polygon = SidePairedPolygon([schottky_entry()])
    arcs = assemble_boundary(polygon)
    assert len(arcs) == 2
    assert all(a.full for a in arcs)
    assert polygon.loops == [(0, 1), (1, 2)]
    assert polygon.vertices == []
    assert angle_sum_at_vertices(polygon) == []
    # the kept region is outside both discs
    assert region_contains(arcs, 0)
    assert not region_contains(arcs, -2)


def test_overlapping_pair_needs_side_flags():
    entry = PairingEntry(pencil_of(HYPERBOLIC), circle(0, 1), circle(1, 1), HYPERBOLIC)
    with pytest.raises(AmbiguousRegion):
        assemble_boundary(SidePairedPolygon([entry]))


def test_empty_region():
    with pytest.raises(DisconnectedArrangement):
        assemble_boundary(SidePairedPolygon([schottky_entry(sides=(-1, -1))]))


def test_polygon_needs_three_points():
    with pytest.raises(GeometryError):
        polygon_from_points([0, 1])


def random_shape(rng):
    """A disc or a star-shaped polygon, with a signed clearance (positive inside)."""
    c = complex(*rng.uniform(-1.5, 1.5, 2))
    if rng.random() < 0.4:
        r = rng.uniform(0.3, 1.0)
        box = (c.real - r, c.imag - r, c.real + r, c.imag + r)
        return [full_circle(circle(c, r))], box, lambda z: r - np.abs(z - c)
    n = int(rng.integers(3, 7))
    angles = 2 * np.pi * np.arange(n) / n + rng.uniform(-0.3, 0.3, n) * np.pi / n
    points = c + rng.uniform(0.3, 1.0, n) * np.exp(1j * angles)
    a, b = points, np.roll(points, -1)

    def clearance(z):
        z = z[..., None]
        t = np.clip(((z - a) * np.conj(b - a)).real / np.abs(b - a) ** 2, 0.0, 1.0)
        distance = np.abs(z - (a + t * (b - a))).min(axis=-1)
        straddles = (a.imag > z.imag) != (b.imag > z.imag)
        cross = a.real + (z.imag - a.imag) * (b.real - a.real) / np.where(b.imag == a.imag, 1.0, b.imag - a.imag)
        inside = (straddles & (z.real < cross)).sum(axis=-1) % 2 == 1
        return np.where(inside, distance, -distance)

    box = (points.real.min(), points.imag.min(), points.real.max(), points.imag.max())
    return polygon_from_points(list(points)), box, clearance


def sampled_overlap(first, second, h: float = 0.01):
    """True or False when a grid decides the overlap, None within one spacing of contact."""
    (_, box_a, inside_a), (_, box_b, inside_b) = first, second
    x0, y0 = max(box_a[0], box_b[0]) - h, max(box_a[1], box_b[1]) - h
    x1, y1 = min(box_a[2], box_b[2]) + h, min(box_a[3], box_b[3]) + h
    if x0 > x1 or y0 > y1:
        return False
    xs, ys = np.meshgrid(np.arange(x0, x1 + h, h), np.arange(y0, y1 + h, h))
    z = xs + 1j * ys
    deepest = np.minimum(inside_a(z), inside_b(z)).max()
    if deepest > h:
        return True
    if deepest < -h:
        return False
    return None


def test_polygons_intersect_agrees_with_sampling(rng):
    decided = 0
    for _ in range(160):
        first, second = random_shape(rng), random_shape(rng)
        expected = sampled_overlap(first, second)
        if expected is None:
            continue
        decided += 1
        assert polygons_intersect(first[0], second[0]) is expected
        assert polygons_intersect(second[0], first[0]) is expected
    assert decided >= 100
