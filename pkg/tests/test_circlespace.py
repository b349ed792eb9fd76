import cmath
import math

import numpy as np
import pytest

from utils.circlespace import (
    CircleKind,
    CircleP3,
    Pencil,
    angle_between,
    center,
    circle_at,
    circle_circle_intersection,
    circle_through_points,
    count_point_circles,
    from_center_radius,
    hermitian_apply,
    inside_disc,
    minkowski,
    mobius_apply,
    on_line,
    pencil_action,
    pencil_circle_through,
    pencil_coordinate,
    pencil_of,
    pencil_quadratic,
    pencils_meet,
    point_circle,
    point_of,
    rad2,
    residual_under,
    same_span,
    sample_circle,
    transport_disc,
)
from utils.errors import (
    CoincidentCircles,
    CoincidentPoints,
    DegenerateCircle,
    EllipticUnsupported,
    GeometryError,
    InfiniteCenter,
    IsLine,
    NoFrame,
)
from utils.mobius import (
    INFINITY,
    ComplexPoint,
    MobiusMap,
    TransformKind,
    apply_point,
    classify,
    compose,
    conjugate,
)

SQRT3 = math.sqrt(3.0)
UNIT = CircleP3(1, 0, 0, -1)
LINE_X0 = CircleP3(0, 1, 0, 0)
HYPERBOLIC = MobiusMap.of(2, 3, 1, 2)
RILEY_Y = MobiusMap.of(1, 0, 2j, 1)


def point(z: complex) -> ComplexPoint:
    return ComplexPoint.finite(z)


def proportional(c: CircleP3, expected) -> bool:
    return c.is_proportional(CircleP3(*expected), 1e-9)


def test_from_center_radius_examples():
    assert from_center_radius(point(0), 1) == CircleP3(1, 0, 0, -1)
    assert from_center_radius(point(1), 1) == CircleP3(1, -2, 0, 0)
    assert from_center_radius(point(1 + 1j), 1) == CircleP3(1, -2, -2, 1)
    with pytest.raises(InfiniteCenter):
        from_center_radius(INFINITY, 1)
    with pytest.raises(GeometryError):
        from_center_radius(point(0), 0)


def test_zero_vector_is_not_a_circle():
    with pytest.raises(GeometryError):
        CircleP3(0, 0, 0, 0)


def test_rad2_and_center():
    assert rad2(UNIT) == pytest.approx(1)
    assert center(UNIT).value == pytest.approx(0)
    assert rad2(CircleP3(2, 0, 0, -2)) == pytest.approx(1)
    assert rad2(CircleP3(1, -2, -2, 1)) == pytest.approx(1)
    assert center(CircleP3(1, -2, -2, 1)).value == pytest.approx(1 + 1j)
    with pytest.raises(IsLine):
        rad2(LINE_X0)


def test_kind_classification():
    assert UNIT.kind() is CircleKind.REAL_CIRCLE
    assert LINE_X0.kind() is CircleKind.LINE
    assert point_circle(point(2 - 1j)).kind() is CircleKind.POINT_CIRCLE
    assert CircleP3(1, 0, 0, 1).kind() is CircleKind.IMAGINARY


def test_minkowski_examples():
    assert minkowski(UNIT, UNIT) == pytest.approx(UNIT.quadratic())
    assert minkowski(UNIT, UNIT) == pytest.approx(4)
    assert minkowski(UNIT, LINE_X0) == 0
    assert minkowski(UNIT, CircleP3(1, -2, 0, 0)) == pytest.approx(2)


def test_angle_between_examples():
    assert angle_between(UNIT, LINE_X0) == pytest.approx(math.pi / 2)
    assert angle_between(UNIT, CircleP3(1, -2, 0, 0)) == pytest.approx(math.pi / 3)
    assert angle_between(UNIT, from_center_radius(point(0), 2)) is None
    with pytest.raises(DegenerateCircle):
        angle_between(UNIT, point_circle(point(0)))


def test_angle_formula_matches_euclidean(rng):
    worst = 0.0
    for _ in range(10_000):
        r1, r2 = rng.uniform(0.2, 3.0, size=2)
        d = rng.uniform(abs(r1 - r2) + 1e-3, r1 + r2 - 1e-3)
        phi = rng.uniform(0, 2 * math.pi)
        c1 = from_center_radius(point(0.3 - 0.1j), r1)
        c2 = from_center_radius(point(0.3 - 0.1j + d * cmath.exp(1j * phi)), r2)
        euclid = math.acos((r1 * r1 + r2 * r2 - d * d) / (2 * r1 * r2))
        worst = max(worst, abs(angle_between(c1, c2) - euclid))
    assert worst <= 1e-11


def test_circle_through_points_examples():
    c = circle_through_points(point(1), point(1j), point(-1))
    assert proportional(c, (1, 0, 0, -1))
    line = circle_through_points(point(0), point(1), point(2))
    assert proportional(line, (0, 0, 1, 0))
    through_inf = circle_through_points(point(0), point(1j), INFINITY)
    assert through_inf.kind() is CircleKind.LINE
    with pytest.raises(CoincidentPoints):
        circle_through_points(point(0), point(0), point(1 + 1j))


def test_mobius_apply_examples():
    translate = MobiusMap.of(1, 1, 0, 1)
    assert proportional(mobius_apply(translate, UNIT), (1, -2, 0, 0))
    assert mobius_apply(MobiusMap.of(1, 0, 0, 1), UNIT).is_proportional(UNIT, 1e-9)
    assert proportional(mobius_apply(HYPERBOLIC, CircleP3(1, 4, 0, 3)), (1, -4, 0, 3))


def test_point_circle_maps_through_its_point():
    image = mobius_apply(HYPERBOLIC, point_circle(point(1j)))
    assert image.kind() is CircleKind.POINT_CIRCLE
    expected = (2j * 1 + 3) / (1j + 2)
    assert point_of(image).value == pytest.approx(expected)


def test_action_law_on_circles(random_map):
    for _ in range(30):
        g, h = random_map(), random_map()
        c = from_center_radius(point(0.2 + 0.1j), 0.7)
        direct = mobius_apply(compose(g, h), c)
        nested = mobius_apply(g, mobius_apply(h, c))
        assert direct.is_proportional(nested, 1e-8)


def test_hermitian_action_agrees_and_keeps_disc(random_map):
    for _ in range(20):
        g = random_map()
        disc = from_center_radius(point(0.1), 0.5)
        image = transport_disc(g, disc)
        assert image.is_proportional(mobius_apply(g, disc), 1e-8)
        # the image of the center stays inside the transported disc
        assert inside_disc(image, apply_point(g, point(0.1)))
    assert hermitian_apply(HYPERBOLIC, UNIT).is_proportional(mobius_apply(HYPERBOLIC, UNIT), 1e-9)


def test_scale_invariance(rng):
    c = CircleP3(1, -2, -2, 1)
    for s in rng.uniform(0.1, 10, size=5):
        scaled = c.scaled(s)
        assert rad2(scaled) == pytest.approx(rad2(c))
        assert center(scaled).value == pytest.approx(center(c).value)
        assert angle_between(scaled, UNIT) == pytest.approx(angle_between(c, UNIT))


def test_on_line_examples():
    pencil = Pencil(CircleP3(1, 4, 0, 3), CircleP3(1, -4, 0, 3))
    assert on_line(CircleP3(1, 0, 0, 3), pencil)
    assert on_line(pencil.p, pencil)
    assert not on_line(CircleP3(0, 0, 1, 0), pencil)


def test_pencil_needs_independent_circles():
    with pytest.raises(GeometryError):
        Pencil(UNIT, UNIT.scaled(-3))


def test_pencil_of_hyperbolic_contains_fixed_points():
    pencil = pencil_of(HYPERBOLIC)
    assert same_span(pencil, Pencil(CircleP3(1, 4, 0, 3), CircleP3(1, -4, 0, 3)))
    for s in (1, -1):
        assert on_line(CircleP3(1, -2 * s * SQRT3, 0, 3), pencil)
    assert count_point_circles(pencil) == 2


def test_pencil_of_parabolic_is_tangent_at_fixed_point():
    pencil = pencil_of(RILEY_Y)
    assert on_line(point_circle(point(0)), pencil)
    assert count_point_circles(pencil) == 1


def test_pencil_of_elliptic_passes_through_fixed_points():
    pencil = pencil_of(MobiusMap.of(0, 1, -1, 0))
    assert pencil.frame is None
    assert on_line(UNIT, pencil)
    assert on_line(LINE_X0, pencil)


def test_pencil_of_translation_is_the_perpendicular_lines():
    shift = MobiusMap.of(1, 1, 0, 1)
    pencil = pencil_of(shift)
    assert pencil.frame[1].is_proportional(point_circle(INFINITY))
    assert proportional(circle_at(pencil, 0.5), [0, 1, 0, 0])
    assert count_point_circles(pencil) == 1
    assert pencil_action(shift, 0.3, pencil) == pytest.approx(1.3)
    image = mobius_apply(shift, circle_at(pencil, 0.25))
    assert pencil_coordinate(pencil, image) == pytest.approx(1.25)


def test_pencil_of_loxodromic_fixing_infinity_is_concentric():
    # z -> 4z + 2 fixes -2/3
    pencil = pencil_of(MobiusMap.of(2, 1, 0, 0.5))
    assert on_line(from_center_radius(point(-2 / 3), 3.0), pencil)
    assert on_line(point_circle(point(-2 / 3)), pencil)
    assert count_point_circles(pencil) == 2


def test_pencil_action_examples():
    pencil = pencil_of(HYPERBOLIC)
    assert pencil_action(HYPERBOLIC, 0.0) == 0.0
    lam = pencil_action(HYPERBOLIC, 1.0)
    other = from_center_radius(point(2), 1)  # isometric circle of the inverse
    assert lam == pytest.approx(pencil_coordinate(pencil, other))
    assert pencil_action(RILEY_Y, 0.0) == 1.0
    with pytest.raises(EllipticUnsupported):
        pencil_action(MobiusMap.of(0, 1, -1, 0), 1.0)
    with pytest.raises(NoFrame):
        pencil_coordinate(Pencil(UNIT, LINE_X0), UNIT)


def test_pencil_action_matches_mobius_apply(random_map, rng):
    checked = 0
    for _ in range(200):
        g = random_map()
        if classify(g).tag is not TransformKind.LOXODROMIC:
            continue
        pencil = pencil_of(g)
        x = float(rng.uniform(0.2, 3.0))
        image = mobius_apply(g, circle_at(pencil, x))
        assert pencil_coordinate(pencil, image) == pytest.approx(pencil_action(g, x, pencil), rel=1e-6)
        checked += 1
    assert checked > 150


def test_parabolic_pencil_action_matches_mobius_apply(random_map, rng):
    for _ in range(50):
        h = random_map()
        g = conjugate(h, RILEY_Y)
        if abs(g.c) < 1e-3:
            continue
        pencil = pencil_of(g)
        x = float(rng.uniform(-2.0, 2.0))
        image = mobius_apply(g, circle_at(pencil, x))
        assert pencil_coordinate(pencil, image) == pytest.approx(x + 1.0, abs=1e-6)


def test_pencil_conjugation_covariance(random_map):
    for _ in range(50):
        g, h = random_map(), random_map()
        conj = pencil_of(conjugate(h, g))
        base = pencil_of(g)
        moved = Pencil(mobius_apply(h, base.p), mobius_apply(h, base.q))
        assert same_span(conj, moved, 1e-7)


def test_pencil_coordinates_and_circle_at():
    pencil = pencil_of(HYPERBOLIC)
    assert pencil_coordinate(pencil, pencil.frame[0]) == pytest.approx(0.0, abs=1e-12)
    assert math.isinf(pencil_coordinate(pencil, pencil.frame[1]))
    assert pencil_coordinate(pencil, circle_at(pencil, 2.5)) == pytest.approx(2.5)
    assert circle_at(pencil, 1.0).is_proportional(CircleP3(1, 4, 0, 3), 1e-9)


def test_pencil_circle_through_point():
    pencil = pencil_of(HYPERBOLIC)
    c = pencil_circle_through(pencil, point(1j))
    assert abs(c.quadric_value(point(1j))) <= 1e-12
    assert on_line(c, pencil)


def test_pencils_meet():
    a = Pencil(UNIT, LINE_X0)
    b = Pencil(UNIT, CircleP3(1, -2, 0, 0))
    assert pencils_meet(a, b).is_proportional(UNIT, 1e-9)
    assert pencils_meet(Pencil(UNIT, LINE_X0), Pencil(CircleP3(0, 0, 1, 0), CircleP3(1, -2, -2, 1))) is None


def test_pencil_quadratic_on_unit_and_line():
    qa, qb, qc = pencil_quadratic(Pencil(UNIT, LINE_X0))
    assert qa == pytest.approx(UNIT.normalized().quadratic())
    assert qb == pytest.approx(0.0, abs=1e-12)
    assert qc == pytest.approx(1.0)


def test_intersection_examples():
    two = circle_circle_intersection(UNIT, CircleP3(1, -2, 0, 0))
    assert [p.value for p in two] == [pytest.approx(0.5 - SQRT3 / 2 * 1j), pytest.approx(0.5 + SQRT3 / 2 * 1j)]
    one = circle_circle_intersection(UNIT, from_center_radius(point(2), 1))
    assert len(one) == 1 and one[0].value == pytest.approx(1)
    assert circle_circle_intersection(UNIT, from_center_radius(point(0), 2)) == []
    with pytest.raises(CoincidentCircles):
        circle_circle_intersection(UNIT, UNIT.scaled(2))


def test_two_lines_meet_at_infinity():
    points = circle_circle_intersection(LINE_X0, CircleP3(0, 0, 1, 0))
    assert points[0].value == pytest.approx(0)
    assert points[1].infinite


def test_fixed_point_circles_are_null(random_map):
    for _ in range(20):
        g = random_map()
        if classify(g).tag is not TransformKind.LOXODROMIC:
            continue
        pencil = pencil_of(g)
        for f in pencil.frame[:2]:
            assert abs(f.normalized().quadratic()) <= 1e-9
            assert on_line(f, pencil, 1e-8)


def test_sample_circle_and_residual():
    samples = sample_circle(UNIT, 16)
    assert np.allclose([abs(z) for z in samples], 1.0)
    assert residual_under(MobiusMap.of(0, 1, -1, 0), UNIT) <= 1e-9
    assert residual_under(MobiusMap.of(1, 1, 0, 1), UNIT) > 0.1


def test_json_normalizes_sign():
    data = UNIT.scaled(-2).to_json()
    assert data[0] > 0
    assert CircleP3.from_json(data).is_proportional(UNIT)
    with pytest.raises(GeometryError):
        CircleP3.from_json([1, 2, 3])
