"""
Validation Service
Centralized checking of command-line inputs: JSON documents for matrices,
groups, chains, trace systems, scenes and domains, plus numeric options.
Every check returns (is_valid, error_message, data) and never raises.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import config
from services.chain_service import CircleChainSpec
from services.domain_service import GraftedDomain
from services.group_service import GroupRep
from services.render_service import Scene
from services.trace_solver import TraceSystem
from utils.errors import KleinianError
from utils.mobius import MobiusMap, parse_complex
from utils.words import Word

logger = logging.getLogger(__name__)

Result = Tuple[bool, Optional[str], Any]


class ValidationService:
    """
    Service for validating user input.

    Responsibilities:
    - Parse JSON given inline or as a file path
    - Build domain objects from their JSON forms
    - Check numeric options against their allowed ranges
    """

    @staticmethod
    def load_json(source: str) -> Result:
        """
        Parse JSON from inline text or from a file.

        Args:
            source: JSON text, or a path to a JSON file

        Returns:
            Tuple of (is_valid, error_message, parsed document)
        """
        if source is None:
            return False, "No JSON input given", None
        text = source
        stripped = source.strip()
        if not stripped.startswith(("{", "[")):
            path = Path(source)
            if not path.is_file():
                return False, f"No such file: {source}", None
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as e:
                return False, f"Cannot read {source}: {e}", None
        try:
            return True, None, json.loads(text)
        except json.JSONDecodeError as e:
            return False, f"Malformed JSON: {e}", None

    @staticmethod
    def _build(source: str, what: str, builder) -> Result:
        ok, error, data = ValidationService.load_json(source)
        if not ok:
            return False, error, None
        try:
            value = builder(data)
        except (KleinianError, KeyError, TypeError, ValueError, IndexError) as e:
            return False, f"Invalid {what}: {e}", None
        logger.debug(f"[VALIDATION] {what} accepted")
        return True, None, value

    @staticmethod
    def validate_matrix(source: str) -> Result:
        return ValidationService._build(source, "matrix", MobiusMap.from_json)

    @staticmethod
    def validate_group(source: str) -> Result:
        return ValidationService._build(source, "group", GroupRep.from_json)

    @staticmethod
    def validate_chain(source: str) -> Result:
        return ValidationService._build(source, "chain", CircleChainSpec.from_json)

    @staticmethod
    def validate_scene(source: str) -> Result:
        return ValidationService._build(source, "scene", Scene.from_json)

    @staticmethod
    def validate_domain(source: str) -> Result:
        return ValidationService._build(source, "domain", GraftedDomain.from_json)

    @staticmethod
    def validate_system(source: str) -> Result:
        """
        A trace system document:
        {"group": GroupRep JSON, "constraints": [{"word", "target"}],
         "free": [parameter names], "seed": {name: [re, im]}, "overdetermined": bool}

        Returns:
            Tuple of (is_valid, error_message, (TraceSystem, seed or None))
        """
        def build(data: Dict) -> Tuple[TraceSystem, Optional[Dict[str, complex]]]:
            if not isinstance(data, dict):
                raise ValueError("a trace system must be a JSON object")
            group = GroupRep.from_json(data["group"])
            constraints = [
                (Word.parse(c["word"]), parse_complex(c.get("target", 4)))
                for c in data["constraints"]
            ]
            system = TraceSystem(group, constraints, list(data["free"]), bool(data.get("overdetermined", False)))
            seed = data.get("seed")
            if seed is not None:
                seed = {str(k): parse_complex(v) for k, v in seed.items()}
            return system, seed
        return ValidationService._build(source, "trace system", build)

    @staticmethod
    def validate_seed(source: str, free: list) -> Result:
        """A parameter seed {name: [re, im]} covering every free parameter."""
        def build(data: Dict) -> Dict[str, complex]:
            seed = {str(k): parse_complex(v) for k, v in data.items()}
            missing = [n for n in free if n not in seed]
            if missing:
                raise ValueError(f"seed is missing {missing}")
            return seed
        return ValidationService._build(source, "seed", build)

    @staticmethod
    def validate_tolerance(value: Optional[float]) -> Result:
        if value is None:
            return True, None, config.EPSILON
        if not (0 < value <= config.MAX_TOLERANCE):
            return False, f"Tolerance must lie in (0, {config.MAX_TOLERANCE}], got {value}", None
        return True, None, float(value)

    @staticmethod
    def validate_viewport(text: Optional[str]) -> Result:
        """'cx,cy,hw' with hw > 0."""
        if text is None:
            return True, None, config.DEFAULT_VIEWPORT
        try:
            cx, cy, hw = (float(p) for p in text.split(","))
        except ValueError:
            return False, f"Viewport must be cx,cy,hw, got '{text}'", None
        if not hw > 0:
            return False, f"Viewport half-width must be positive, got {hw}", None
        return True, None, (cx, cy, hw)

    @staticmethod
    def validate_depth(value: int, name: str = "depth") -> Result:
        if value < 0:
            return False, f"{name} must be >= 0, got {value}", None
        return True, None, int(value)

    @staticmethod
    def validate_pixels(value: int) -> Result:
        if value <= 0:
            return False, f"pixels must be positive, got {value}", None
        return True, None, int(value)
