"""
Command-line application for the Kleinian group toolkit.
Parses options, wires the services together and maps failures onto exit
codes: 0 pass, 1 checked-and-failed or numeric failure, 2 input error.
"""
import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import config
from services.chain_service import check_pleating_conditions, peripheral_disc, validate_chain_combinatorics
from services.domain_service import (
    CHAT_CHOICES,
    CertificateReport,
    GraftedDomain,
    build_compatible_domains,
    build_grafted_domain,
    certify_domain,
    twist_domain,
)
from services.fixture_registry import Fixture, get_fixture_registry
from services.group_service import FAMILY_EXPLICIT, FAMILY_PARAMETERS, GroupRep
from services.output_service import OutputService
from services.render_service import Scene, build_scene, emit_ppm, emit_svg, orbit_circles
from services.trace_solver import TraceSolver
from services.validation_service import ValidationService
from utils.errors import ComputationError, GeometryError, IoFailure, KleinianError
from utils.mobius import classify

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
    handlers=[
        logging.StreamHandler(sys.stdout)
    ]
)
logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

FORMATS = ("svg", "ppm")


@dataclass
class RunConfig:
    """
    Resolved run options shared by every subcommand.

    Attributes:
        tolerance: Numeric tolerance, also written to config.EPSILON
        truncation_L: Word length for the disc translates of chain checks
        depth: Word length for orbit renders
        viewport: (cx, cy, half-width), or None for the fixture's own
        out: Output path, or None to print results only
        format: 'svg' or 'ppm'
        fixture: Built-in fixture name, or None
        pixels: Raster size for PPM output and the SVG canvas
    """
    tolerance: float = config.EPSILON
    truncation_L: int = config.TRUNCATION_L
    depth: int = config.ORBIT_DEPTH
    viewport: Optional[Tuple[float, float, float]] = None
    out: Optional[str] = None
    format: str = "svg"
    fixture: Optional[str] = None
    pixels: int = config.DEFAULT_PIXELS


def _require(result) -> object:
    ok, error, data = result
    if not ok:
        raise GeometryError(error)
    return data


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Validate the shared options.

    Raises:
        GeometryError: If an option is out of range
    """
    tolerance = _require(ValidationService.validate_tolerance(args.tolerance))
    truncation = _require(ValidationService.validate_depth(args.truncation_L, "truncation-L"))
    depth = _require(ValidationService.validate_depth(args.depth))
    pixels = _require(ValidationService.validate_pixels(args.pixels))
    viewport = _require(ValidationService.validate_viewport(args.viewport)) if args.viewport else None
    return RunConfig(tolerance, truncation, depth, viewport, args.out, args.format, args.fixture, pixels)


def _parse_params(entries: Optional[List[str]]) -> Dict[str, complex]:
    params: Dict[str, complex] = {}
    for entry in entries or []:
        name, sep, value = entry.partition("=")
        if not sep or not name:
            raise GeometryError(f"Parameter must be NAME=VALUE, got '{entry}'")
        try:
            params[name.strip()] = complex(value.strip().replace(" ", ""))
        except ValueError as e:
            raise GeometryError(f"Bad value for {name}: '{value}'") from e
    return params


def _fixture(run: RunConfig) -> Optional[Fixture]:
    return get_fixture_registry().get(run.fixture) if run.fixture else None


def _load_group(args: argparse.Namespace, run: RunConfig) -> GroupRep:
    """The --group document, else the fixture's group; --param overrides apply."""
    fixture = _fixture(run)
    if getattr(args, "group", None):
        group = _require(ValidationService.validate_group(args.group))
    elif fixture is not None:
        group = fixture.group
    else:
        raise GeometryError("Give --group or --fixture")
    params = _parse_params(getattr(args, "param", None))
    if params:
        group = group.with_params(**params)
        logger.info(f"  Parameters overridden: {', '.join(params)}")
    return group


def _load_chain(args: argparse.Namespace, run: RunConfig):
    fixture = _fixture(run)
    if getattr(args, "chain", None):
        return _require(ValidationService.validate_chain(args.chain))
    if fixture is not None and fixture.chain is not None:
        return fixture.chain
    raise GeometryError("Give --chain or a fixture that has a circle chain")


def _emit_json(data: dict, run: RunConfig, default_name: Optional[str] = None) -> None:
    target = run.out or default_name
    if target:
        path = OutputService().write_json(target, data)
        logger.info(f"✓ Wrote {path}")
    else:
        print(json.dumps(data, indent=2, sort_keys=True))


def _format_complex(z: complex) -> str:
    scale = max(1.0, abs(z))
    if abs(z.imag) <= config.EPSILON * scale:
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}i"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args: argparse.Namespace, run: RunConfig) -> int:
    g = _require(ValidationService.validate_matrix(args.matrix))
    kind = classify(g, run.tolerance)
    line = f"{kind}, tr² = {_format_complex(g.trace_squared)}"
    print(line)
    logger.info(f"✓ Classified: {line}")
    return EXIT_PASS


def cmd_chain_check(args: argparse.Namespace, run: RunConfig) -> int:
    logger.info("[STEP 1/3] Loading group and chain...")
    group = _load_group(args, run)
    chain = _load_chain(args, run)

    logger.info("[STEP 2/3] Checking chain combinatorics...")
    combinatorics = validate_chain_combinatorics(group, chain, run.tolerance)
    report = {"combinatorics": combinatorics.to_json(), "pleating": None}
    if not combinatorics.passed:
        logger.info(f"✗ Combinatorics fail: {'; '.join(combinatorics.errors)}")
        _emit_json(report, run)
        return EXIT_FAIL

    logger.info("[STEP 3/3] Checking pleating conditions...")
    pleating = check_pleating_conditions(group, chain, run.truncation_L, run.tolerance)
    report["pleating"] = pleating.to_json()
    _emit_json(report, run)
    for condition, ok in pleating.condition_verdicts.items():
        print(f"{'✓' if ok else '✗'} {condition}")
    tangent = sum(1 for c in pleating.incidences + pleating.separations if c.relation.startswith("tangent"))
    if pleating.passed and tangent:
        print(f"pass with {tangent} tangencies")
    return EXIT_PASS if pleating.passed else EXIT_FAIL


def _print_verdicts(report: CertificateReport) -> int:
    for condition, ok in report.verdicts.items():
        print(f"{'✓' if ok else '✗'} {condition} (margin {report.margins[condition]:.3g})")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _certify_and_report(group: GroupRep, domain: GraftedDomain, run: RunConfig, default_name: str) -> int:
    report = certify_domain(group, domain, run.tolerance)
    _emit_json({"domain": domain.to_json(), "certificate": report.to_json()}, run, default_name)
    return _print_verdicts(report)


def cmd_domain_build(args: argparse.Namespace, run: RunConfig) -> int:
    logger.info("[STEP 1/3] Loading group and chain...")
    group = _load_group(args, run)
    chain = _load_chain(args, run)
    fixture = _fixture(run)
    x = args.x if args.x is not None else (fixture.x if fixture is not None else 1.0)

    logger.info(f"[STEP 2/3] Building compatible domains at x = {x:g}...")
    domains = build_compatible_domains(group, chain, x, run.tolerance, verify=not args.no_verify)

    logger.info("[STEP 3/3] Grafting and certifying...")
    domain = build_grafted_domain(group, chain, domains, args.chat_choice, run.tolerance)
    return _certify_and_report(group, domain, run, "domain.json")


def _twist_targets(group: GroupRep, args: argparse.Namespace) -> Dict[str, complex]:
    """End point of the twist path: --param values, else --t added to the first family parameter."""
    targets = _parse_params(args.param)
    if targets:
        return targets
    if args.t is None:
        raise GeometryError("Give --t or --param for the twist target")
    if group.family == FAMILY_EXPLICIT:
        raise GeometryError("Explicit groups cannot be twisted by --t")
    name = FAMILY_PARAMETERS[group.family][0]
    return {name: complex(group.params[name]) + args.t}


def cmd_domain_twist(args: argparse.Namespace, run: RunConfig) -> int:
    logger.info("[STEP 1/3] Loading base domain...")
    fixture = _fixture(run)
    if args.group:
        base_group = _require(ValidationService.validate_group(args.group))
    elif fixture is not None:
        base_group = fixture.group
    else:
        raise GeometryError("Give --group or --fixture")
    chain = _load_chain(args, run)
    if args.domain:
        base = _require(ValidationService.validate_domain(args.domain))
    else:
        x = fixture.x if fixture is not None else 1.0
        domains = build_compatible_domains(base_group, chain, x, run.tolerance)
        base = build_grafted_domain(base_group, chain, domains, eps=run.tolerance)

    targets = _twist_targets(base_group, args)
    if args.steps < 1:
        raise GeometryError(f"--steps must be >= 1, got {args.steps}")
    logger.info(f"[STEP 2/3] Twisting along {args.steps} steps...")
    start = {k: complex(base_group.params[k]) for k in targets if k in base_group.params}
    previous = base
    group = base_group
    for i in range(1, args.steps + 1):
        s = i / args.steps
        group = base_group.with_params(**{k: start.get(k, v) + s * (v - start.get(k, v)) for k, v in targets.items()})
        previous = twist_domain(group, chain, base, run.tolerance, previous)
        logger.debug(f"  step {i}/{args.steps} done")

    logger.info("[STEP 3/3] Certifying twisted domain...")
    return _certify_and_report(group, previous, run, "twisted.json")


def cmd_domain_certify(args: argparse.Namespace, run: RunConfig) -> int:
    domain = _require(ValidationService.validate_domain(args.domain))
    group = _load_group(args, run)
    report = certify_domain(group, domain, run.tolerance)
    _emit_json(report.to_json(), run)
    return _print_verdicts(report)


def cmd_solve(args: argparse.Namespace, run: RunConfig) -> int:
    fixture = _fixture(run)
    if args.system:
        system, seed = _require(ValidationService.validate_system(args.system))
    elif fixture is not None and fixture.system is not None:
        system, seed = fixture.system
    else:
        raise GeometryError("Give --system or a fixture with a trace system")
    if args.seed:
        seed = _require(ValidationService.validate_seed(args.seed, system.free_params))
    if seed is None:
        raise GeometryError("The trace system has no seed; give --seed")

    start = time.time()
    result = TraceSolver().solve(system, seed)
    logger.info(f"✓ Solved in {time.time() - start:.3f} seconds")
    _emit_json({
        "values": {k: [v.real, v.imag] for k, v in result.values.items()},
        "iterations": result.iterations,
        "residual_norm": result.residual_norm,
    }, run)
    return EXIT_PASS


def _fixture_scene(fixture: Fixture, run: RunConfig, domain: Optional[GraftedDomain]) -> Scene:
    orbit = orbit_circles(fixture.group, fixture.seeds, run.depth, run.tolerance)
    discs = []
    if fixture.chain is not None:
        for v in fixture.chain.vertices:
            try:
                discs.append(peripheral_disc(fixture.group, v, run.tolerance))
            except KleinianError as e:
                logger.warning(f"  No disc drawn for {v.name}: {e}")
    arcs = domain.boundary_arcs(run.tolerance) if domain is not None else None
    return build_scene(orbit, discs, arcs, run.viewport or fixture.viewport)


def cmd_render(args: argparse.Namespace, run: RunConfig) -> int:
    logger.info("[STEP 1/2] Building scene...")
    fixture = _fixture(run)
    if args.scene:
        scene = _require(ValidationService.validate_scene(args.scene))
        if run.viewport is not None:
            scene = Scene(scene.layers, run.viewport)
    elif fixture is not None:
        domain = _require(ValidationService.validate_domain(args.domain)) if args.domain else None
        scene = _fixture_scene(fixture, run, domain)
    else:
        raise GeometryError("Give --scene or --fixture")

    name = run.out or f"{run.fixture or 'scene'}.{run.format}"
    logger.info(f"[STEP 2/2] Writing {run.format.upper()} to {name}...")
    if run.format == "ppm":
        path = emit_ppm(scene, name, run.pixels)
    else:
        path = emit_svg(scene, name, run.pixels)
    print(path)
    return EXIT_PASS


def cmd_fixtures(args: argparse.Namespace, run: RunConfig) -> int:
    registry = get_fixture_registry()
    for name in registry.names():
        print(f"{name}: {registry.get(name).description}")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None,
                        help=f"numeric tolerance in (0, {config.MAX_TOLERANCE}]")
    common.add_argument("--truncation-L", dest="truncation_L", type=int, default=config.TRUNCATION_L,
                        help="word length for disc translates in chain checks")
    common.add_argument("--depth", type=int, default=config.ORBIT_DEPTH, help="orbit word length")
    common.add_argument("--viewport", help="cx,cy,hw")
    common.add_argument("--out", help="output path; bare names go under the output folder")
    common.add_argument("--format", choices=FORMATS, default="svg")
    common.add_argument("--pixels", type=int, default=config.DEFAULT_PIXELS)
    common.add_argument("--fixture", help="built-in fixture name")
    common.add_argument("--verbose", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="kleinian", description=__doc__.strip().splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("classify", parents=[common], help="classify a 2x2 matrix")
    p.add_argument("matrix", help="matrix JSON, inline or a file")
    p.set_defaults(handler=cmd_classify)

    p = commands.add_parser("chain-check", parents=[common], help="check pleating-variety conditions")
    p.add_argument("--group")
    p.add_argument("--chain")
    p.add_argument("--param", action="append", help="NAME=VALUE override, e.g. rho=0.3+2j")
    p.set_defaults(handler=cmd_chain_check)

    domain = commands.add_parser("domain", help="grafted fundamental domains")
    actions = domain.add_subparsers(dest="action", required=True)

    p = actions.add_parser("build", parents=[common])
    p.add_argument("--group")
    p.add_argument("--chain")
    p.add_argument("--param", action="append")
    p.add_argument("--x", type=float, default=None, help="base pencil coordinate")
    p.add_argument("--chat-choice", choices=CHAT_CHOICES, default="EuclideanSegment")
    p.add_argument("--no-verify", action="store_true", help="skip the pleating and hexagon checks")
    p.set_defaults(handler=cmd_domain_build)

    p = actions.add_parser("twist", parents=[common])
    p.add_argument("--group", help="group at the base domain")
    p.add_argument("--chain")
    p.add_argument("--domain", help="base domain JSON; built from the fixture if omitted")
    p.add_argument("--t", type=complex, default=None, help="offset added to the first family parameter")
    p.add_argument("--param", action="append", help="NAME=VALUE target instead of --t")
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(handler=cmd_domain_twist)

    p = actions.add_parser("certify", parents=[common])
    p.add_argument("--domain", required=True)
    p.add_argument("--group")
    p.add_argument("--param", action="append")
    p.set_defaults(handler=cmd_domain_certify)

    p = commands.add_parser("solve", parents=[common], help="solve a trace system")
    p.add_argument("--system")
    p.add_argument("--seed")
    p.set_defaults(handler=cmd_solve)

    p = commands.add_parser("render", parents=[common], help="render an orbit scene")
    p.add_argument("--scene")
    p.add_argument("--domain", help="grafted domain JSON drawn over the fixture")
    p.set_defaults(handler=cmd_render)

    p = commands.add_parser("fixtures", parents=[common], help="list built-in fixtures")
    p.set_defaults(handler=cmd_fixtures)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    start = time.time()
    try:
        run = resolve_run_config(args)
        if args.tolerance is not None:
            config.EPSILON = run.tolerance
        return args.handler(args, run)
    except IoFailure as e:
        logger.error(f"✗ Output error after {time.time() - start:.2f} seconds: {e}")
        return EXIT_INPUT
    except GeometryError as e:
        logger.error(f"✗ Input error after {time.time() - start:.2f} seconds: {e}")
        return EXIT_INPUT
    except ComputationError as e:
        logger.error(f"✗ Computation failed after {time.time() - start:.2f} seconds: {e}")
        return EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
