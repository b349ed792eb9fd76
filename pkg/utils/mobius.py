"""
Mobius Transformation Module
Arithmetic on PSL(2,C): normalization, composition, action on the Riemann
sphere, classification, fixed points and isometric circles.
All values are immutable; every function here is pure.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from config import resolve_eps
from utils.errors import (
    FixesInfinity,
    GeometryError,
    IdentityHasNoIsolatedFixedPoints,
    SingularMatrix,
)


@dataclass(frozen=True)
class ComplexPoint:
    """
    A point of the Riemann sphere.

    Attributes:
        value: Finite coordinate (ignored when infinite)
        infinite: True for the point at infinity
    """
    value: complex = 0j
    infinite: bool = False

    def __post_init__(self):
        if not self.infinite:
            z = complex(self.value)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise GeometryError(f"Non-finite coordinate {z}; use INFINITY instead")
            object.__setattr__(self, 'value', z)
        else:
            object.__setattr__(self, 'value', 0j)

    @classmethod
    def finite(cls, z: complex) -> 'ComplexPoint':
        return cls(complex(z), False)

    def is_close(self, other: 'ComplexPoint', eps: Optional[float] = None) -> bool:
        """Relative distance for finite points, chordal distance near infinity."""
        eps = resolve_eps(eps)
        if not (self.infinite or other.infinite):
            scale = max(1.0, abs(self.value), abs(other.value))
            return abs(self.value - other.value) <= eps * scale
        return chordal_distance(self, other) <= eps

    def distance_to_infinity(self) -> float:
        return 0.0 if self.infinite else 2.0 / math.sqrt(1.0 + abs(self.value) ** 2)

    def to_json(self):
        if self.infinite:
            return "inf"
        return [self.value.real, self.value.imag]

    @classmethod
    def from_json(cls, data) -> 'ComplexPoint':
        if data == "inf":
            return INFINITY
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            raise GeometryError(f"Point must be [re, im] or \"inf\", got {data!r}")
        return cls.finite(complex(float(data[0]), float(data[1])))

    def __str__(self) -> str:
        if self.infinite:
            return "inf"
        return f"{self.value.real:.9g}{self.value.imag:+.9g}i"


INFINITY = ComplexPoint(0j, True)


def chordal_distance(p: ComplexPoint, q: ComplexPoint) -> float:
    """Chordal distance on the unit sphere."""
    if p.infinite and q.infinite:
        return 0.0
    if p.infinite:
        return q.distance_to_infinity()
    if q.infinite:
        return p.distance_to_infinity()
    z, w = p.value, q.value
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def _sign_normalize(entries: Tuple[complex, ...], eps: float) -> Tuple[complex, ...]:
    # First entry with |x| > eps gets Re >= 0, ties broken by Im >= 0.
    for x in entries:
        if abs(x) > eps:
            if x.real < -eps or (abs(x.real) <= eps and x.imag < 0):
                return tuple(-y for y in entries)
            break
    return entries


@dataclass(frozen=True)
class MobiusMap:
    """
    A Mobius transformation z -> (az+b)/(cz+d), stored normalized to det 1
    and sign-normalized so that equality modulo +-I is deterministic.

    Construct through `MobiusMap.of(a, b, c, d)` to normalize; the plain
    constructor trusts its input.
    """
    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def of(cls, a, b, c, d, eps: Optional[float] = None) -> 'MobiusMap':
        """
        Build a normalized map from raw entries.

        Raises:
            SingularMatrix: If |ad - bc| <= eps
        """
        eps = resolve_eps(eps)
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if abs(det) <= eps:
            raise SingularMatrix(f"Determinant {det} is zero within tolerance")
        s = cmath.sqrt(det)
        entries = _sign_normalize((a / s, b / s, c / s, d / s), eps)
        return cls(*entries)

    @classmethod
    def from_matrix(cls, m: np.ndarray, eps: Optional[float] = None) -> 'MobiusMap':
        return cls.of(m[0, 0], m[0, 1], m[1, 0], m[1, 1], eps)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def trace(self) -> complex:
        """Trace of the stored lift (sign is a normalization artifact)."""
        return self.a + self.d

    @property
    def trace_squared(self) -> complex:
        return (self.a + self.d) ** 2

    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def is_close(self, other: 'MobiusMap', eps: Optional[float] = None) -> bool:
        """Equality modulo global sign."""
        eps = resolve_eps(eps)
        m1 = self.matrix
        m2 = other.matrix
        scale = max(1.0, float(np.max(np.abs(m1))))
        return bool(min(np.max(np.abs(m1 - m2)), np.max(np.abs(m1 + m2))) <= eps * scale)

    def is_identity(self, eps: Optional[float] = None) -> bool:
        eps = resolve_eps(eps)
        return abs(self.b) <= eps and abs(self.c) <= eps and abs(self.a - self.d) <= eps

    def to_json(self) -> List[List[float]]:
        return [[x.real, x.imag] for x in (self.a, self.b, self.c, self.d)]

    @classmethod
    def from_json(cls, data) -> 'MobiusMap':
        """
        Parse [[re,im] x 4] in row-major (a,b,c,d) order. The nested
        [[a,b],[c,d]] form with real or [re,im] entries is accepted too.
        """
        if not isinstance(data, (list, tuple)):
            raise GeometryError("Matrix must be a JSON array")
        if len(data) == 4:
            entries = [parse_complex(x) for x in data]
        elif len(data) == 2 and all(isinstance(r, (list, tuple)) and len(r) == 2 for r in data):
            entries = [parse_complex(x) for row in data for x in row]
        else:
            raise GeometryError(f"Matrix must have 4 entries, got {data!r}")
        return cls.of(*entries)

    def __str__(self) -> str:
        return f"[[{self.a:.6g}, {self.b:.6g}], [{self.c:.6g}, {self.d:.6g}]]"


def parse_complex(x) -> complex:
    """A JSON number or [re, im] pair."""
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise GeometryError(f"Entry must be a number or [re, im], got {x!r}")


IDENTITY = MobiusMap(1 + 0j, 0j, 0j, 1 + 0j)


class TransformKind(Enum):
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class TransformClass:
    tag: TransformKind
    purely_hyperbolic: bool = False

    def __str__(self) -> str:
        if self.tag is TransformKind.LOXODROMIC and self.purely_hyperbolic:
            return "loxodromic (hyperbolic)"
        return self.tag.value


@dataclass(frozen=True)
class FixedPointPair:
    """
    Fixed points of a non-identity map. A parabolic map reports its single
    fixed point in both slots with degenerate=True.
    """
    attracting: ComplexPoint
    repelling: ComplexPoint
    degenerate: bool = False


def compose(g: MobiusMap, h: MobiusMap) -> MobiusMap:
    """Return g o h."""
    return MobiusMap.from_matrix(g.matrix @ h.matrix)


def inverse(g: MobiusMap) -> MobiusMap:
    return MobiusMap.of(g.d, -g.b, -g.c, g.a)


def conjugate(h: MobiusMap, g: MobiusMap) -> MobiusMap:
    """Return h g h^-1."""
    return compose(compose(h, g), inverse(h))


def power(g: MobiusMap, n: int) -> MobiusMap:
    base = g if n >= 0 else inverse(g)
    return MobiusMap.from_matrix(np.linalg.matrix_power(base.matrix, abs(int(n))))


def apply_point(g: MobiusMap, z: ComplexPoint) -> ComplexPoint:
    """
    Apply g to a point of the Riemann sphere.

    Args:
        g: The transformation
        z: Point, possibly infinite

    Returns:
        g(z); g(inf) = a/c and g(-d/c) = inf
    """
    if z.infinite:
        if g.c == 0:
            return INFINITY
        return ComplexPoint.finite(g.a / g.c)
    num = g.a * z.value + g.b
    den = g.c * z.value + g.d
    if den == 0:
        return INFINITY
    w = num / den
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        return INFINITY
    return ComplexPoint.finite(w)


def classify(g: MobiusMap, eps: Optional[float] = None) -> TransformClass:
    """Classify g by its squared trace."""
    eps = resolve_eps(eps)
    if g.is_identity(eps):
        return TransformClass(TransformKind.IDENTITY)
    t2 = g.trace_squared
    scale = max(1.0, abs(t2))
    if abs(t2 - 4) <= eps * scale:
        return TransformClass(TransformKind.PARABOLIC)
    is_real = abs(t2.imag) <= eps * scale
    if is_real and -eps * scale <= t2.real < 4:
        return TransformClass(TransformKind.ELLIPTIC)
    return TransformClass(TransformKind.LOXODROMIC, purely_hyperbolic=is_real and t2.real > 4)


def fixed_points(g: MobiusMap, eps: Optional[float] = None) -> FixedPointPair:
    """
    Fixed points of g. The attracting point of a loxodromic map carries the
    eigenvector of the eigenvalue with modulus > 1.

    Raises:
        IdentityHasNoIsolatedFixedPoints: If g is +-I
    """
    eps = resolve_eps(eps)
    kind = classify(g, eps).tag
    if kind is TransformKind.IDENTITY:
        raise IdentityHasNoIsolatedFixedPoints("The identity fixes every point")
    a, b, c, d = g.a, g.b, g.c, g.d
    if abs(c) > eps:
        if kind is TransformKind.PARABOLIC:
            p = ComplexPoint.finite((a - d) / (2 * c))
            return FixedPointPair(p, p, True)
        s = cmath.sqrt(g.trace_squared - 4)
        z1 = ((a - d) + s) / (2 * c)
        z2 = ((a - d) - s) / (2 * c)
        # eigenvector [z, 1] has eigenvalue cz + d
        if abs(c * z1 + d) >= abs(c * z2 + d):
            return FixedPointPair(ComplexPoint.finite(z1), ComplexPoint.finite(z2))
        return FixedPointPair(ComplexPoint.finite(z2), ComplexPoint.finite(z1))
    # g fixes infinity with eigenvalue a; the other fixed point has eigenvalue d
    if kind is TransformKind.PARABOLIC or abs(d - a) <= eps:
        return FixedPointPair(INFINITY, INFINITY, True)
    other = ComplexPoint.finite(b / (d - a))
    if abs(a) >= abs(d):
        return FixedPointPair(INFINITY, other)
    return FixedPointPair(other, INFINITY)


def multiplier(g: MobiusMap) -> complex:
    """Eigenvalue of the stored lift with modulus >= 1."""
    t = g.trace
    s = cmath.sqrt(t * t - 4)
    lam = (t + s) / 2
    if abs(lam) < 1:
        lam = (t - s) / 2
    return lam


def isometric_circle(g: MobiusMap, eps: Optional[float] = None) -> Tuple[ComplexPoint, float]:
    """
    Isometric circle |cz + d| = 1 of g.

    Returns:
        Tuple of (center, radius) with center -d/c and radius 1/|c|

    Raises:
        FixesInfinity: If |c| <= eps
    """
    eps = resolve_eps(eps)
    if abs(g.c) <= eps:
        raise FixesInfinity(f"{g} fixes infinity and has no isometric circle")
    return ComplexPoint.finite(-g.d / g.c), 1.0 / abs(g.c)


def standardizing_map(repelling: ComplexPoint, attracting: ComplexPoint) -> MobiusMap:
    """A map sending repelling -> 0 and attracting -> inf."""
    if attracting.infinite:
        return MobiusMap.of(1, -repelling.value, 0, 1)
    if repelling.infinite:
        return MobiusMap.of(0, 1, 1, -attracting.value)
    return MobiusMap.of(1, -repelling.value, 1, -attracting.value)


def hyperbolic_with_fixed_points(
    repelling: ComplexPoint,
    attracting: ComplexPoint,
    scale: complex
) -> MobiusMap:
    """
    The map with the given fixed points acting by w -> scale * w in the
    chart sending repelling to 0 and attracting to inf. A real positive
    scale gives a hyperbolic map, a unit complex scale a rotation.
    """
    s = standardizing_map(repelling, attracting)
    root = cmath.sqrt(complex(scale))
    diagonal = MobiusMap.of(root, 0, 0, 1.0 / root)
    return compose(inverse(s), compose(diagonal, s))


def one_parameter_power(g: MobiusMap, t: float, eps: Optional[float] = None) -> MobiusMap:
    """
    Real power g^t inside the one-parameter group through g that shares
    its fixed points. Parabolic maps use I + tN with N nilpotent.
    """
    eps = resolve_eps(eps)
    kind = classify(g, eps).tag
    if kind is TransformKind.IDENTITY:
        return IDENTITY
    m = g.matrix
    if kind is TransformKind.PARABOLIC:
        sign = 1.0 if g.trace.real >= 0 else -1.0
        n = sign * m - np.eye(2)
        return MobiusMap.from_matrix(np.eye(2) + t * n)
    values, vectors = np.linalg.eig(m)
    powered = np.diag(np.exp(t * np.log(values.astype(complex))))
    return MobiusMap.from_matrix(vectors @ powered @ np.linalg.inv(vectors))
