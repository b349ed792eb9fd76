import cmath
import math

import numpy as np
import pytest

from utils.errors import FixesInfinity, GeometryError, IdentityHasNoIsolatedFixedPoints, SingularMatrix
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
    inverse,
    isometric_circle,
    multiplier,
    one_parameter_power,
    parse_complex,
    power,
)

SQRT3 = math.sqrt(3.0)
TRANSLATION = MobiusMap.of(1, 1, 0, 1)
RILEY_Y = MobiusMap.of(1, 0, 2j, 1)
HYPERBOLIC = MobiusMap.of(2, 3, 1, 2)


def point(z: complex) -> ComplexPoint:
    return ComplexPoint.finite(z)


def test_apply_point_examples():
    assert apply_point(TRANSLATION, point(0)).value == pytest.approx(1)
    assert apply_point(RILEY_Y, INFINITY).value == pytest.approx(-0.5j)
    assert apply_point(HYPERBOLIC, point(SQRT3)).value == pytest.approx(SQRT3)


def test_apply_point_pole_goes_to_infinity():
    assert apply_point(HYPERBOLIC, point(-2)).infinite
    assert apply_point(TRANSLATION, INFINITY).infinite


def test_classify_examples():
    assert classify(TRANSLATION).tag is TransformKind.PARABOLIC
    assert classify(MobiusMap.of(0, 1, -1, 0)).tag is TransformKind.ELLIPTIC
    kind = classify(HYPERBOLIC)
    assert kind.tag is TransformKind.LOXODROMIC
    assert kind.purely_hyperbolic
    assert str(kind) == "loxodromic (hyperbolic)"
    assert classify(IDENTITY).tag is TransformKind.IDENTITY


def test_fixed_points_examples():
    pair = fixed_points(TRANSLATION)
    assert pair.degenerate and pair.attracting.infinite

    pair = fixed_points(HYPERBOLIC)
    assert not pair.degenerate
    assert pair.attracting.value == pytest.approx(SQRT3)
    assert pair.repelling.value == pytest.approx(-SQRT3)

    pair = fixed_points(RILEY_Y)
    assert pair.degenerate
    assert abs(pair.attracting.value) < 1e-12


def test_identity_has_no_fixed_points():
    with pytest.raises(IdentityHasNoIsolatedFixedPoints):
        fixed_points(IDENTITY)


def test_isometric_circle_examples():
    c, r = isometric_circle(RILEY_Y)
    assert c.value == pytest.approx(0.5j)
    assert r == pytest.approx(0.5)
    c, r = isometric_circle(HYPERBOLIC)
    assert c.value == pytest.approx(-2)
    assert r == pytest.approx(1)
    with pytest.raises(FixesInfinity):
        isometric_circle(TRANSLATION)


def test_singular_matrix_rejected():
    with pytest.raises(SingularMatrix):
        MobiusMap.of(1, 2, 2, 4)


def test_sign_normalization_makes_minus_identity_equal():
    assert MobiusMap.of(-1, 0, 0, -1) == IDENTITY
    assert MobiusMap.of(-2, -3, -1, -2) == HYPERBOLIC


def test_non_finite_point_rejected():
    with pytest.raises(GeometryError):
        ComplexPoint.finite(complex(math.inf, 0))


def test_chordal_distance_to_infinity():
    assert chordal_distance(point(0), INFINITY) == pytest.approx(2.0)
    assert chordal_distance(INFINITY, INFINITY) == 0.0


def test_group_laws_on_random_maps(random_map, rng):
    for _ in range(50):
        f, g, h = random_map(), random_map(), random_map()
        assert compose(compose(f, g), h).is_close(compose(f, compose(g, h)), 1e-9)
        z = point(complex(*rng.normal(size=2)))
        direct = apply_point(compose(g, h), z)
        nested = apply_point(g, apply_point(h, z))
        assert chordal_distance(direct, nested) <= 1e-9


def test_determinant_is_one(random_map):
    for _ in range(50):
        g = random_map(scale=5.0)
        assert abs(g.determinant() - 1) <= 1e-12
        assert abs(inverse(g).determinant() - 1) <= 1e-12


def test_classify_is_conjugation_invariant(random_map):
    for g in (TRANSLATION, HYPERBOLIC, MobiusMap.of(0, 1, -1, 0), MobiusMap.of(2j, 0, 0, -0.5j)):
        for _ in range(10):
            h = random_map()
            assert classify(conjugate(h, g), 1e-7).tag is classify(g).tag


def test_isometric_circle_maps_to_inverse_isometric_circle(random_map):
    for _ in range(20):
        g = random_map()
        c, r = isometric_circle(g)
        c_inv, r_inv = isometric_circle(inverse(g))
        for j in range(8):
            z = c.value + r * cmath.exp(2j * math.pi * j / 8)
            w = apply_point(g, point(z))
            assert abs(abs(w.value - c_inv.value) - r_inv) <= 1e-9 * max(1.0, r_inv)


def test_parabolic_orbit_tends_to_fixed_point():
    g = power(RILEY_Y, 100_000)
    w = apply_point(g, point(0.3 + 0.7j))
    assert abs(w.value - fixed_points(RILEY_Y).attracting.value) < 1e-4


def test_power_and_inverse():
    assert power(HYPERBOLIC, 3).is_close(compose(HYPERBOLIC, compose(HYPERBOLIC, HYPERBOLIC)))
    assert power(HYPERBOLIC, -1).is_close(inverse(HYPERBOLIC))
    assert power(HYPERBOLIC, 0).is_identity()
    assert compose(HYPERBOLIC, inverse(HYPERBOLIC)).is_identity()


def test_multiplier_of_hyperbolic_map():
    assert multiplier(HYPERBOLIC) == pytest.approx(2 + SQRT3)


def test_one_parameter_power():
    half = one_parameter_power(HYPERBOLIC, 0.5)
    assert compose(half, half).is_close(HYPERBOLIC, 1e-9)
    assert one_parameter_power(TRANSLATION, 2.5).is_close(MobiusMap.of(1, 2.5, 0, 1))
    assert one_parameter_power(RILEY_Y, 3).is_close(power(RILEY_Y, 3), 1e-9)
    # fixed points are shared with g
    fixed = fixed_points(one_parameter_power(HYPERBOLIC, 0.3))
    assert fixed.attracting.value == pytest.approx(SQRT3)


def test_matrix_json_forms():
    assert MobiusMap.from_json([[2, 3], [1, 2]]) == HYPERBOLIC
    assert MobiusMap.from_json(HYPERBOLIC.to_json()).is_close(HYPERBOLIC)
    assert MobiusMap.from_json([[1, 0], [0, 0], [0, 2], [1, 0]]).is_close(RILEY_Y)
    with pytest.raises(GeometryError):
        MobiusMap.from_json([1, 2, 3])
    with pytest.raises(GeometryError):
        MobiusMap.from_json("not a matrix")


def test_parse_complex():
    assert parse_complex(2) == 2
    assert parse_complex([0.5, -1]) == 0.5 - 1j
    with pytest.raises(GeometryError):
        parse_complex("2")
    with pytest.raises(GeometryError):
        parse_complex(True)


def test_random_maps_match_numpy_product(random_map):
    g, h = random_map(), random_map()
    product = g.matrix @ h.matrix
    assert compose(g, h).is_close(MobiusMap.from_matrix(product))
    assert np.allclose(abs(np.linalg.det(compose(g, h).matrix)), 1.0)
