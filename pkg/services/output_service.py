"""
Output Service
Resolves output paths and writes JSON, SVG and PPM files.
Relative paths land under config.OUTPUT_FOLDER; parent directories are
created on demand.
"""
import json
import logging
from pathlib import Path
from typing import Any, Optional

import config
from utils.errors import IoFailure

logger = logging.getLogger(__name__)


class OutputService:
    """
    Writes result files.

    Features:
    - Relative paths resolved against the output folder
    - Parent directories created before writing
    - OS errors reported as IoFailure with the offending path
    """

    def __init__(self, output_folder: Optional[str] = None):
        self.output_folder = Path(output_folder or config.OUTPUT_FOLDER)

    def resolve(self, path: str) -> Path:
        """Absolute paths are kept; relative ones go under the output folder."""
        p = Path(path)
        if p.is_absolute() or p.parent != Path("."):
            return p
        return self.output_folder / p

    def _prepare(self, path: str) -> Path:
        target = self.resolve(path)
        try:
            if target.parent == self.output_folder:
                config.ensure_output_directory(str(self.output_folder))
            else:
                target.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IoFailure(f"Cannot create directory for {target}: {e}") from e
        if target.is_dir():
            raise IoFailure(f"{target} is a directory")
        return target

    def write_bytes(self, path: str, data: bytes) -> str:
        target = self._prepare(path)
        try:
            target.write_bytes(data)
        except OSError as e:
            raise IoFailure(f"Cannot write {target}: {e}") from e
        logger.debug(f"[OUTPUT] {len(data)} bytes to {target}")
        return str(target)

    def write_text(self, path: str, text: str) -> str:
        return self.write_bytes(path, text.encode("utf-8"))

    def write_json(self, path: str, data: Any) -> str:
        """Sorted keys and a fixed indent, so equal data gives equal files."""
        return self.write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")
