"""
Group Service
Finitely generated subgroups of SL(2,C) given by parameterized matrix
families (Riley, (1;2)-compression bodies, rank-2 trace coordinates) or by
explicit matrices, and evaluation of words in them.

Lifts are kept as signed SL(2,C) matrices so that signed traces of words
are available; MobiusMap values are derived from them on demand.
"""
import cmath
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from utils.errors import GeometryError, SingularMatrix, UnknownGenerator
from utils.mobius import MobiusMap, parse_complex
from utils.words import Word

logger = logging.getLogger(__name__)

WordLike = Union[Word, str]

FAMILY_RILEY = "riley"
FAMILY_COMPRESSION = "compression_body"
FAMILY_RANK2 = "rank2_trace"
FAMILY_EXPLICIT = "explicit"


def _as_word(w: WordLike) -> Word:
    return Word.parse(w) if isinstance(w, str) else w


def _unit_determinant(m: np.ndarray) -> np.ndarray:
    """Scale a 2x2 matrix to determinant 1 with the principal square root."""
    m = np.asarray(m, dtype=complex)
    det = np.linalg.det(m)
    if abs(det) <= 1e-14:
        raise SingularMatrix(f"Determinant {det} is zero")
    return m / cmath.sqrt(det)


def _riley_lifts(params: Dict[str, complex]) -> Dict[str, np.ndarray]:
    rho = params["rho"]
    return {
        "X": np.array([[1, 1], [0, 1]], dtype=complex),
        "Y": np.array([[1, 0], [rho, 1]], dtype=complex),
    }


def _compression_lifts(params: Dict[str, complex]) -> Dict[str, np.ndarray]:
    alpha, beta, lam = params["alpha"], params["beta"], params["lambda"]
    return {
        "P": np.array([[1, alpha], [0, 1]], dtype=complex),
        "Q": np.array([[1, beta], [0, 1]], dtype=complex),
        "M": np.array([[lam, lam * lam - 1], [1, lam]], dtype=complex),
    }


def _rank2_lifts(params: Dict[str, complex]) -> Dict[str, np.ndarray]:
    tx, ty, txy = params["tX"], params["tY"], params["tXY"]
    branch = params.get("branch", 1)
    if branch not in (1, -1):
        raise GeometryError(f"branch must be +1 or -1, got {branch}")
    v = branch * cmath.sqrt(4 - txy * txy)
    return {
        "X": np.array([
            [(tx + 1j * txy) / 2, -(tx + v) / 2],
            [-(tx - v) / 2, (tx - 1j * txy) / 2],
        ], dtype=complex),
        "Y": np.array([
            [ty / 2 - 1j, ty / 2],
            [ty / 2, ty / 2 + 1j],
        ], dtype=complex),
    }


FAMILY_BUILDERS: Dict[str, Callable[[Dict[str, complex]], Dict[str, np.ndarray]]] = {
    FAMILY_RILEY: _riley_lifts,
    FAMILY_COMPRESSION: _compression_lifts,
    FAMILY_RANK2: _rank2_lifts,
}

FAMILY_PARAMETERS: Dict[str, List[str]] = {
    FAMILY_RILEY: ["rho"],
    FAMILY_COMPRESSION: ["alpha", "beta", "lambda"],
    FAMILY_RANK2: ["tX", "tY", "tXY"],
}


@dataclass
class GroupRep:
    """
    A representation with ordered named generators.

    Attributes:
        family: One of riley, compression_body, rank2_trace, explicit
        params: Family parameters (rank2_trace also carries integer 'branch')
        lifts: Generator name -> signed SL(2,C) matrix, in generator order
        conjugator: Optional det-1 matrix H; family lifts are replaced by
            H M H^-1 so that a family group can be moved into position
    """
    family: str
    params: Dict[str, complex] = field(default_factory=dict)
    lifts: Dict[str, np.ndarray] = field(default_factory=dict)
    conjugator: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.lifts:
            raise GeometryError("A group needs at least one generator")
        for name, m in self.lifts.items():
            det = np.linalg.det(m)
            if abs(det - 1) > 1e-8:
                raise GeometryError(f"Generator {name} has determinant {det}, expected 1")

    @property
    def names(self) -> List[str]:
        return list(self.lifts.keys())

    @property
    def generators(self) -> Dict[str, MobiusMap]:
        return {name: MobiusMap.from_matrix(m) for name, m in self.lifts.items()}

    def lift_of(self, name: str) -> np.ndarray:
        if name not in self.lifts:
            raise UnknownGenerator(f"Unknown generator '{name}', have {self.names}")
        return self.lifts[name]

    def evaluate_lift(self, w: WordLike) -> np.ndarray:
        """
        Signed matrix product of a word.

        Raises:
            UnknownGenerator: If a letter is not a generator
        """
        result = np.eye(2, dtype=complex)
        for name, exponent in _as_word(w).letters:
            base = self.lift_of(name)
            if exponent < 0:
                base = np.array([[base[1, 1], -base[0, 1]], [-base[1, 0], base[0, 0]]])
            result = result @ np.linalg.matrix_power(base, abs(exponent))
        return result

    def evaluate_word(self, w: WordLike) -> MobiusMap:
        return MobiusMap.from_matrix(self.evaluate_lift(w))

    def word_trace(self, w: WordLike) -> complex:
        """Signed trace of the word in the stored lifts."""
        m = self.evaluate_lift(w)
        return complex(m[0, 0] + m[1, 1])

    def trace_squared(self, w: WordLike) -> complex:
        return self.word_trace(w) ** 2

    def with_params(self, **params) -> 'GroupRep':
        """
        The same family rebuilt at new parameter values, keeping the
        conjugator. Unnamed parameters keep their current values.

        Raises:
            GeometryError: For explicit groups or unknown parameter names
        """
        if self.family == FAMILY_EXPLICIT:
            raise GeometryError("Explicit groups have no parameters")
        allowed = set(FAMILY_PARAMETERS[self.family]) | {"branch"}
        unknown = set(params) - allowed
        if unknown:
            raise GeometryError(f"Unknown parameters {sorted(unknown)} for family {self.family}")
        merged = dict(self.params)
        merged.update(params)
        return build_family(self.family, merged, self.conjugator)

    def conjugated(self, h: MobiusMap) -> 'GroupRep':
        """The representation h G h^-1, sharing family and parameters."""
        hm = _unit_determinant(h.matrix)
        total = hm if self.conjugator is None else hm @ self.conjugator
        if self.family == FAMILY_EXPLICIT:
            inv = np.linalg.inv(hm)
            return GroupRep(
                FAMILY_EXPLICIT,
                dict(self.params),
                {name: hm @ m @ inv for name, m in self.lifts.items()},
            )
        return build_family(self.family, self.params, total)

    def to_json(self) -> dict:
        data = {
            "family": self.family,
            "params": {
                k: (v if k == "branch" else [complex(v).real, complex(v).imag])
                for k, v in self.params.items()
            },
            "generators": {name: _matrix_to_json(m) for name, m in self.lifts.items()},
        }
        if self.conjugator is not None:
            data["conjugator"] = _matrix_to_json(self.conjugator)
        return data

    @classmethod
    def from_json(cls, data: dict) -> 'GroupRep':
        """
        Parse GroupRep JSON. Family groups are rebuilt from their
        parameters; explicit groups read their generator matrices.

        Raises:
            GeometryError: On a malformed document
        """
        if not isinstance(data, dict):
            raise GeometryError("Group must be a JSON object")
        family = data.get("family", FAMILY_EXPLICIT)
        conjugator = data.get("conjugator")
        conj_matrix = _matrix_from_json(conjugator) if conjugator is not None else None
        if family == FAMILY_EXPLICIT:
            gens = data.get("generators")
            if not isinstance(gens, dict) or not gens:
                raise GeometryError("Explicit group needs a non-empty 'generators' object")
            lifts = {name: _matrix_from_json(m) for name, m in gens.items()}
            if conj_matrix is not None:
                inv = np.linalg.inv(conj_matrix)
                lifts = {name: conj_matrix @ m @ inv for name, m in lifts.items()}
            return cls(FAMILY_EXPLICIT, {}, lifts)
        if family not in FAMILY_BUILDERS:
            raise GeometryError(f"Unknown family '{family}'")
        raw = data.get("params", {})
        params: Dict[str, complex] = {}
        for key, value in raw.items():
            params[key] = int(value) if key == "branch" else parse_complex(value)
        missing = [p for p in FAMILY_PARAMETERS[family] if p not in params]
        if missing:
            raise GeometryError(f"Family {family} is missing parameters {missing}")
        return build_family(family, params, conj_matrix)


def _matrix_to_json(m: np.ndarray) -> List[List[float]]:
    return [[complex(x).real, complex(x).imag] for x in (m[0, 0], m[0, 1], m[1, 0], m[1, 1])]


def _matrix_from_json(data) -> np.ndarray:
    if isinstance(data, (list, tuple)) and len(data) == 4:
        entries = [parse_complex(x) for x in data]
    elif isinstance(data, (list, tuple)) and len(data) == 2:
        entries = [parse_complex(x) for row in data for x in row]
    else:
        raise GeometryError(f"Matrix must have 4 entries, got {data!r}")
    return _unit_determinant(np.array(entries, dtype=complex).reshape(2, 2))


def build_family(
    family: str,
    params: Dict[str, complex],
    conjugator: Optional[np.ndarray] = None
) -> GroupRep:
    """Build a family group, applying the conjugator to every lift."""
    lifts = FAMILY_BUILDERS[family](params)
    if conjugator is not None:
        inv = np.linalg.inv(conjugator)
        lifts = {name: conjugator @ m @ inv for name, m in lifts.items()}
    return GroupRep(family, dict(params), lifts, conjugator)


def build_riley(rho: complex) -> GroupRep:
    """X = [[1,1],[0,1]], Y = [[1,0],[rho,1]]."""
    return build_family(FAMILY_RILEY, {"rho": complex(rho)})


def build_compression_body(alpha: complex, beta: complex, lam: complex) -> GroupRep:
    """P = [[1,alpha],[0,1]], Q = [[1,beta],[0,1]], M = [[lam, lam^2-1],[1, lam]]."""
    return build_family(FAMILY_COMPRESSION, {
        "alpha": complex(alpha), "beta": complex(beta), "lambda": complex(lam),
    })


def build_rank2_trace(t_x: complex, t_y: complex, t_xy: complex, branch: int = 1) -> GroupRep:
    """
    Two generators with tr X = t_x, tr Y = t_y, tr XY = t_xy.

    Args:
        branch: Sign of v in v^2 = 4 - t_xy^2, applied to the principal root
    """
    return build_family(FAMILY_RANK2, {
        "tX": complex(t_x), "tY": complex(t_y), "tXY": complex(t_xy), "branch": int(branch),
    })


def build_explicit(generators: Dict[str, Union[MobiusMap, np.ndarray]]) -> GroupRep:
    """Explicit generators; MobiusMaps or raw matrices scaled to det 1."""
    lifts = {}
    for name, g in generators.items():
        m = g.matrix if isinstance(g, MobiusMap) else np.asarray(g, dtype=complex)
        lifts[name] = _unit_determinant(m)
    return GroupRep(FAMILY_EXPLICIT, {}, lifts)


def evaluate_word(group: GroupRep, w: WordLike) -> MobiusMap:
    """Product of generator powers, normalized."""
    return group.evaluate_word(w)
