"""
Configuration module for the Kleinian group toolkit.
Contains all numeric tolerances, truncation depths and output defaults.
"""
import math
from pathlib import Path

# Numeric tolerance
# Functions take eps=None and read EPSILON at call time, so assigning
# config.EPSILON (the CLI --tolerance flag does) changes it globally.
EPSILON = 1e-9
MAX_TOLERANCE = 1e-3  # --tolerance must lie in (0, MAX_TOLERANCE]
ANGLE_EPSILON = 1e-6  # clearance for the (0, pi/2) angle window of certificates
CHAT_TILT = math.pi / 4  # angle between a graft cut and the line it is bent from; 0 keeps the line

# Pleating-condition checks
TRUNCATION_L = 3  # word length for disc translates in separation checks

# Newton solver for trace systems
NEWTON_MAX_ITERATIONS = 50
NEWTON_TOLERANCE = 1e-12  # target ||F||
NEWTON_FD_STEP = 1e-6  # central finite-difference step
NEWTON_MAX_HALVINGS = 20  # step halvings before declaring step collapse
NEWTON_VERIFY_TOLERANCE = 1e-10  # post hoc re-evaluation bound

# Orbit enumeration
ORBIT_DEPTH = 8
ORBIT_CAP = 2_000_000  # BudgetExceeded past this many circles
DEDUP_GRID = 1e-7  # quantization for normalized circle coordinates

# Figure emission
SVG_SIGNIFICANT_DIGITS = 9
DEFAULT_VIEWPORT = (0.0, 0.0, 2.0)  # center x, center y, half-width
DEFAULT_PIXELS = 512
ARC_SAMPLES = 64  # polyline samples per arc for rasterizing and Hausdorff checks

# Worker pool for pairwise checks
MAX_WORKERS = 4

# Output Configuration
OUTPUT_FOLDER = 'output'


def ensure_output_directory(folder: str = None) -> str:
    """Create output directory if it doesn't exist."""
    output_path = Path(folder or OUTPUT_FOLDER)
    output_path.mkdir(parents=True, exist_ok=True)
    return str(output_path)


def resolve_eps(eps: float = None) -> float:
    """Return eps, or the current global EPSILON when eps is None."""
    return EPSILON if eps is None else eps
